"""Decomposition of piecewise affine interval maps into fully invariant regular open pieces."""

__version__ = "0.1.0"
