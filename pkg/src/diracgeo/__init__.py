"""Numerical twisted Dirac geometry: linear Dirac structures, twisted Courant
brackets, multiplicative 2-forms on chart-presented Lie groupoids, Cartan/AMM
constructions, path-space reconstruction forms, and foliated cohomology."""

__version__ = "0.1.0"

from .jets import Jet, DomainError, value_of  # noqa: F401
from .expr import ScalarExpr, parse  # noqa: F401
