"""HTTP API for browsing, evaluating and simulating driver trees."""

from .app import create_app

__all__ = ["create_app"]
