"""Multi-view subspace clustering with per-sample graph fusion."""

__version__ = "0.1.0"
