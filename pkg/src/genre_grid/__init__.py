"""genre-grid: sentence-level factuality/formality classification and
two-dimensional genre mapping for news corpora."""

__version__ = "0.1.0"
