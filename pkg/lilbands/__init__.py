"""LIL-refined goodness-of-fit statistics and confidence bands for distribution functions."""

__version__ = "0.1.0"
