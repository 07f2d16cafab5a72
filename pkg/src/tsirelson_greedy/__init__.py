"""Exact and numerical experiments on Tsirelson-type spaces and greedy bases."""

__version__ = "0.1.0"
