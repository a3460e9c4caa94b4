"""Growing random recursive hypergraphs: simulator, exact oracle,
brute-force enumerator, and Monte Carlo validation harness."""

from .backend import BACKEND, available_backends

__version__ = "0.1.0"

__all__ = ["BACKEND", "available_backends", "__version__"]
