"""Zero-temperature dynamics of disordered Curie-Weiss models."""

__version__ = "0.1.0"
