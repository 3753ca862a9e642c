"""Numerical laboratory for large character sums, smooth numbers and moment identities."""

__version__ = "0.1.0"

from .errors import CharlabError, DomainError, InvariantError, ResourceCapError

__all__ = ["__version__", "CharlabError", "DomainError", "InvariantError", "ResourceCapError"]
