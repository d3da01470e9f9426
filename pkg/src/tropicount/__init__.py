"""Root counting for sparse polynomial systems over discretely valued fields."""

__version__ = "0.1.0"
