"""Batch figure rendering for pseudomix experiment outputs."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, SchemaError, extract_series, render  # noqa: F401
