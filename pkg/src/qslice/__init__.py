"""Exact combinatorics of flower-quiver varieties and their quantized slices."""

__version__ = "0.1.0"
