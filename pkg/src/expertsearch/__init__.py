"""Explainable expertise retrieval over publication abstracts."""

__version__ = "0.1.0"
