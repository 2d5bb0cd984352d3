"""Shelf-scene product fusion and comparative glyph overlay engine."""

__version__ = "0.1.0"
