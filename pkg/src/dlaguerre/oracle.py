"""Brute-force references that share no formulas with the closed-form kernels.

Three independent routes to ``e^(-tH)``:

* the exponential of a finite section, either from its eigendecomposition or
  from a positivity-preserving uniformisation with repeated squaring;
* Gauss quadrature of ``int e^(-t x) P_n(x) P_m(x) drho(x)``, optionally in
  arbitrary precision;
* the free lattice kernel ``e^(-2t) I_(n-m)(2t)`` as a sanity check of the
  whole pipeline on a problem with a classical answer.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import linalg

from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre.operators import TridiagonalMatrix, _params, truncate
from dlaguerre.spectral import QuadratureRule, poly_first_matrix
from dlaguerre.specfun import bessel_i

__all__ = [
    "EigenDecomposition",
    "eigendecompose",
    "negative_eigenvalue_count",
    "positive_expm",
    "heat_block",
    "expm_heat",
    "expm_heat_block",
    "semigroup_defect",
    "quad_heat",
    "quad_heat_block",
    "free_lattice_heat",
    "lattice_heat_truncated",
]

MAX_N = 4000
_FLUSH = 1e-290


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition ``T = Q diag(lambda) Q^T`` of a symmetric tridiagonal matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def apply_function(self, f) -> np.ndarray:
        """``Q diag(f(lambda)) Q^T`` as a dense matrix."""
        q = self.eigenvectors
        return (q * f(self.eigenvalues)) @ q.T

    def heat(self, t: float) -> np.ndarray:
        return self.apply_function(lambda lam: np.exp(-t * lam))

    def reconstruction_defect(self, T: TridiagonalMatrix) -> float:
        """``max |T - Q Lambda Q^T| / max |T|``."""
        return float(np.max(np.abs(T.to_dense() - self.apply_function(lambda lam: lam))) / T.max_abs())


def eigendecompose(T: TridiagonalMatrix) -> EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a tridiagonal matrix."""
    try:
        lam, q = linalg.eigh_tridiagonal(T.diag, T.offdiag)
    except linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    lam.flags.writeable = False
    q.flags.writeable = False
    return EigenDecomposition(lam, q)


def negative_eigenvalue_count(T: TridiagonalMatrix) -> int:
    """Number of strictly negative eigenvalues from the full eigendecomposition."""
    lam = linalg.eigh_tridiagonal(T.diag, T.offdiag, eigvals_only=True)
    return int(np.count_nonzero(lam < 0.0))


def _times_tridiagonal(X: np.ndarray, d: np.ndarray, e: np.ndarray) -> np.ndarray:
    # X @ B for symmetric tridiagonal B with diagonal d and off-diagonal e
    out = X * d
    out[:, 1:] += X[:, :-1] * e
    out[:, :-1] += X[:, 1:] * e
    return out


def positive_expm(T: TridiagonalMatrix, t: float) -> np.ndarray:
    """``exp(-t T)`` for a tridiagonal ``T`` with nonpositive off-diagonal.

    With ``s = max(diag)`` the matrix ``B = s I - T`` is entrywise
    nonnegative, so ``exp(-tT) = e^(-ts) exp(tB)`` is computed from a Taylor
    series of ``exp(tau B)`` at ``tau = t / 2^j`` followed by ``j`` squarings.
    Every operation adds or multiplies nonnegative numbers, hence each entry,
    however small, carries a relative (not absolute) rounding error. Entries
    below 1e-290 are flushed to zero.
    """
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if np.any(T.offdiag > 0.0):
        raise DomainError("positive_expm needs a nonpositive off-diagonal")
    s = float(np.max(T.diag))
    d = s - T.diag
    e = -T.offdiag
    norm = float(np.max(d) + 2.0 * np.max(e, initial=0.0))
    j = max(0, math.ceil(math.log2(max(t * norm / 0.5, 1.0))))
    tau = t / 2.0 ** j
    n = T.dim
    F = np.eye(n)
    term = np.eye(n)
    for k in range(1, 4 * n + 64):
        term = _times_tridiagonal(term, tau * d, tau * e) / k
        term[term < _FLUSH] = 0.0
        F += term
        live = F > 1e-250
        if not np.any(term[live] > 1e-17 * F[live]):
            break
    else:
        raise ConvergenceError("Taylor series of the uniformised generator did not converge")
    F *= math.exp(-tau * s)
    for _ in range(j):
        F = F @ F
        F[F < _FLUSH] = 0.0
    return F


def heat_block(params, t: float, n_max: int, N: int, method: str = "positive", V=None) -> np.ndarray:
    """Leading ``(n_max+1)`` square block of ``exp(-t T_N)``.

    ``method="positive"`` uses :func:`positive_expm`; ``method="eig"`` uses the
    eigendecomposition, whose absolute accuracy is about ``1e-16`` per entry.
    """
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if N > MAX_N:
        raise DomainError(f"N={N} exceeds the cap {MAX_N}")
    if n_max >= N:
        raise DomainError(f"requested block {n_max + 1} exceeds the truncation {N}")
    T = truncate(params, N, V)
    if method == "positive":
        E = positive_expm(T, t)
    elif method == "eig":
        E = eigendecompose(T).heat(t)
    else:
        raise ValueError(f"method must be 'positive' or 'eig', got {method!r}")
    return E[: n_max + 1, : n_max + 1]


def expm_heat_block(params, t: float, n_max: int, N: int = 400, method: str = "positive",
                    certify: bool = True, rtol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Kernel block from the size-N section, certified against the size-2N section.

    Returns the block and the largest relative difference between the two
    truncations (``0.0`` when `certify` is false).

    Raises
    ------
    ConvergenceError
        If the two truncations differ by more than `rtol`.
    """
    block = heat_block(params, t, n_max, N, method)
    if not certify:
        return block, 0.0
    twice = heat_block(params, t, n_max, min(2 * N, MAX_N), method)
    defect = float(np.max(np.abs(block - twice) / np.abs(twice)))
    if not defect <= rtol:
        raise ConvergenceError(f"N={N} and N={2 * N} disagree by {defect:.3e}")
    return block, defect


def expm_heat(params, t: float, n: int, m: int, N: int = 400, method: str = "positive",
              certify: bool = True, rtol: float = 1e-10) -> float:
    """Single entry of :func:`expm_heat_block`."""
    if n >= N or m >= N:
        raise DomainError("indices must be below the truncation size")
    return float(expm_heat_block(params, t, max(n, m), N, method, certify, rtol)[0][n, m])


def semigroup_defect(params, s: float, t: float, N: int = 200) -> float:
    """``max |e^(-(s+t)T) - e^(-sT) e^(-tT)|`` for the size-N section, via one eigendecomposition."""
    eig = eigendecompose(truncate(params, N))
    return float(np.max(np.abs(eig.heat(s + t) - eig.heat(s) @ eig.heat(t))))


def _check_rule(rule: QuadratureRule, degree: int) -> None:
    if rule.size < degree // 2 + 20:
        warnings.warn(f"{rule.size}-point rule is small for degree {degree}", RuntimeWarning, stacklevel=3)


def quad_heat_block(params, t: float, n_max: int, rule: QuadratureRule) -> np.ndarray:
    """``sum_i w_i e^(-t x_i) P_n(x_i) P_m(x_i)`` for ``n, m <= n_max``.

    When the rule carries high-precision nodes and weights the polynomials and
    the sums are evaluated at that precision, which removes the cancellation
    between the oscillating terms; otherwise double precision is used.
    """
    a = _params(params).alpha
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    _check_rule(rule, 2 * n_max)
    if rule.hp_nodes is None:
        P = poly_first_matrix(a, n_max, rule.nodes)
        return (P * (rule.weights * np.exp(-t * rule.nodes))) @ P.T
    ctx = mpmath.mp.clone()
    ctx.dps = rule.dps
    al = ctx.mpf(a)
    tt = ctx.mpf(t)
    cpl = [ctx.sqrt(n * (n + al)) for n in range(n_max + 2)]
    rows = [[] for _ in range(n_max + 1)]
    scaled = [[] for _ in range(n_max + 1)]
    for x, w in zip(rule.hp_nodes, rule.hp_weights):
        c = w * ctx.exp(-tt * x)
        prev, cur = ctx.zero, ctx.one
        for n in range(n_max + 1):
            rows[n].append(cur)
            scaled[n].append(c * cur)
            prev, cur = cur, ((2 * n + 1 + al - x) * cur - cpl[n] * prev) / cpl[n + 1]
    out = np.empty((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for m in range(n, n_max + 1):
            out[n, m] = out[m, n] = float(ctx.fdot(scaled[n], rows[m]))
    return out


def quad_heat(params, t: float, n: int, m: int, rule: QuadratureRule) -> float:
    """Quadrature approximation of one kernel entry; see :func:`quad_heat_block`."""
    return float(quad_heat_block(params, t, max(n, m), rule)[n, m])


def free_lattice_heat(t: float, n: int, m: int) -> float:
    """Heat kernel ``e^(-2t) I_(n-m)(2t)`` of the free Jacobi matrix on the integers."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    return math.exp(-2.0 * t) * bessel_i(n - m, 2.0 * t)


def lattice_heat_truncated(t: float, n: int, m: int, half_width: int = 200,
                           method: str = "positive") -> float:
    """Free lattice kernel from the section ``[-half_width, half_width]`` of the integer lattice."""
    size = 2 * half_width + 1
    T = TridiagonalMatrix(np.full(size, 2.0), np.full(size - 1, -1.0))
    E = positive_expm(T, t) if method == "positive" else eigendecompose(T).heat(t)
    return float(E[n + half_width, m + half_width])
