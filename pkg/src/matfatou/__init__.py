"""Fatou and Julia sets of polynomial maps on matrix algebras."""

__version__ = "0.1.0"
