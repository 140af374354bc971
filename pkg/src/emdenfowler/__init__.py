"""Integrable Emden-Fowler equations and their Weierstrass elliptic solutions."""
from .efcore import EfEquation, ClassTag, classify as classify_equation
from .weierstrass import GermPair, LatticeCase, classify as classify_lattice, wp, wp_prime
from .errors import EmdenFowlerError, DomainError

__version__ = "0.1.0"

__all__ = [
    "EfEquation",
    "ClassTag",
    "classify_equation",
    "GermPair",
    "LatticeCase",
    "classify_lattice",
    "wp",
    "wp_prime",
    "EmdenFowlerError",
    "DomainError",
]
