"""Two-layer quasi-geostrophic model: exact solutions, symmetries, verification."""

__version__ = "0.1.0"
