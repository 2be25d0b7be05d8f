"""Bounds on the chromatic number of the plane with a forbidden distance interval [1, d]."""

__version__ = "0.1.0"
