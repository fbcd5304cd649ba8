"""
Reference Transfer-Operator Methods
Ulam box discretization, EDMD, and least-squares DMD
"""

from .ulam import UlamGrid, UlamMatrix, ulam_matrix, box_histogram
from .edmd import (
    edmd_fit,
    dmd_least_squares,
    dictionary_matrix,
    coordinate_dictionary,
    monomial_dictionary,
)

__all__ = [
    "UlamGrid",
    "UlamMatrix",
    "ulam_matrix",
    "box_histogram",
    "edmd_fit",
    "dmd_least_squares",
    "dictionary_matrix",
    "coordinate_dictionary",
    "monomial_dictionary",
]
