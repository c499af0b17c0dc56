"""Discrete Laguerre operators: heat kernels, spectral data and perturbations.

The operator acts on sequences indexed by the nonnegative integers as the
symmetric Jacobi matrix with diagonal ``2n + 1 + alpha`` and off-diagonal
``-sqrt((n+1)(n+1+alpha))`` for ``alpha > -1``.
"""
from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "ConvergenceError", "DomainError", "__version__"]
