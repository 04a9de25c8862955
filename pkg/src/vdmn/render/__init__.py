"""Rendering backends for value driver trees."""

from .dot import to_dot
from .layout import Layout, NodeBox, layout_model
from .style import Border, Fill, Shape, VisualStyle, style_for
from .svg import to_svg

__all__ = [
    "Border",
    "Fill",
    "Layout",
    "NodeBox",
    "Shape",
    "VisualStyle",
    "layout_model",
    "style_for",
    "to_dot",
    "to_svg",
]
