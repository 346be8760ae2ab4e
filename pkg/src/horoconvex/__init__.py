"""Horocyclic convexity toolkit for the hyperbolic disk."""

__version__ = "0.1.0"
