"""Exact verification of the Weil constituents of the Steinberg module of Sp(2n,q)."""

__version__ = "0.1.0"

from .ffield import (
    AdditiveCharacter,
    FieldDescriptor,
    FieldElement,
    gauss_sum,
    is_square,
    least_nonsquare,
    transversal,
)
from .spgroup import SymplecticSpace

__all__ = [
    "AdditiveCharacter",
    "FieldDescriptor",
    "FieldElement",
    "SymplecticSpace",
    "gauss_sum",
    "is_square",
    "least_nonsquare",
    "transversal",
    "__version__",
]
