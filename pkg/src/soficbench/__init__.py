"""Executable soficity constructions for amalgams and graph-of-groups doubles."""

__version__ = "0.1.0"
