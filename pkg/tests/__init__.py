"""Test suite for the vdmn package."""
