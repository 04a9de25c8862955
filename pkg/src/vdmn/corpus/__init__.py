"""Models packaged with the library."""
