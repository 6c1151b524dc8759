"""Exact truncated verification of intertwining operator algebras."""

__version__ = "0.1.0"
