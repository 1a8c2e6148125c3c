"""Wind-line profile workbench: single-star synthesis, binary composition,
spectrum handling, fitting, and the HTTP/CLI front ends."""

from .config import __version__, numeric_fingerprint

__all__ = ["__version__", "numeric_fingerprint"]
