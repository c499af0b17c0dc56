"""Orthogonal-polynomial solutions, the Weyl function, the Green function and quadrature.

Polynomials of the first kind ``P_n`` solve ``tau u = z u`` with ``P_0 = 1``;
those of the second kind ``Q_n`` solve the same recurrence for ``n >= 1`` with
``Q_0 = 0``. The Weyl solution ``Psi = Q + m P`` is the solution that is square
summable at infinity, and the resolvent kernel is ``P_min(n,m) Psi_max(n,m)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
from scipy import linalg, optimize

from dlaguerre import _kernels
from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre.operators import _params, as_dense, couplings, diagonal, string_weights
from dlaguerre.specfun import log_rising_over_factorial, scaled_exp_integral

__all__ = [
    "QuadratureRule",
    "poly_first",
    "poly_first_all",
    "poly_first_matrix",
    "poly_second",
    "poly_second_all",
    "weyl_m",
    "weyl_m_inverse",
    "weyl_solution",
    "green",
    "green_column",
    "green_at_zero",
    "gauss_rule",
    "spectral_transform",
]

# Largest admissible cancellation factor |m P_n| / |Psi_n| for evaluating the
# Weyl solution directly as Q + m P; beyond it Miller's backward sweep is used.
_DIRECT_CANCELLATION = 1e3
_MILLER_CAP = 1 << 24


def _recurrence_coefficients(alpha: float, n_max: int):
    return couplings(alpha, n_max + 2), diagonal(alpha, n_max + 1)


def poly_first_all(params, n_max: int, z: float) -> np.ndarray:
    """``P_n(z) = L_n^(alpha)(z) / sigma(n)`` for ``n = 0..n_max``."""
    a = _params(params).alpha
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max!r}")
    cpl, dg = _recurrence_coefficients(a, n_max)
    p1 = (1.0 + a - z) / math.sqrt(1.0 + a)
    return _kernels.forward_three_term(cpl, dg, float(z), 1.0, p1, n_max)


def poly_first(params, n: int, z: float) -> float:
    """Orthonormal Laguerre polynomial ``P_n(z)``."""
    return float(poly_first_all(params, n, z)[n])


def poly_first_matrix(params, n_max: int, nodes) -> np.ndarray:
    """Array ``P[n, i] = P_n(nodes[i])`` for ``n = 0..n_max``."""
    a = _params(params).alpha
    nodes = np.asarray(nodes, dtype=float)
    cpl, dg = _recurrence_coefficients(a, n_max)
    out = np.empty((n_max + 1, nodes.size))
    out[0] = 1.0
    if n_max >= 1:
        out[1] = (1.0 + a - nodes) / cpl[1]
    for n in range(1, n_max):
        out[n + 1] = ((dg[n] - nodes) * out[n] - cpl[n] * out[n - 1]) / cpl[n + 1]
    return out


def poly_second_all(params, n_max: int, z: float) -> np.ndarray:
    """Second-kind polynomials ``Q_n(z)`` for ``n = 0..n_max``.

    Seeds ``Q_0 = 0`` and ``Q_1 = -1/sqrt(alpha+1)``; the sign is the one for
    which ``(tau - z) Q = delta_0`` and ``Q + m P`` is the Weyl solution.
    """
    a = _params(params).alpha
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max!r}")
    cpl, dg = _recurrence_coefficients(a, n_max)
    return _kernels.forward_three_term(cpl, dg, float(z), 0.0, -1.0 / math.sqrt(1.0 + a), n_max)


def poly_second(params, n: int, z: float) -> float:
    """Polynomial of the second kind ``Q_n(z)``."""
    return float(poly_second_all(params, n, z)[n])


def _check_negative(x: float) -> None:
    if not x < 0.0:
        raise DomainError(f"the spectral parameter must be negative, got {x!r}")


def _weyl_cf(alpha: float, y: float, depth: int) -> float:
    sw = string_weights(alpha, depth - 1)
    return _kernels.stieltjes_cf(sw.l, sw.w, y)


def weyl_m(params, x: float, method: str = "integral", depth: Optional[int] = None) -> float:
    """Weyl function ``m(x) = e^(-x) E_(1+alpha)(-x)`` for ``x < 0``.

    Parameters
    ----------
    params : OperatorParams or float
        The operator parameter.
    x : float
        Negative spectral parameter.
    method : {"integral", "cf", "continued_fraction"}
        ``integral`` evaluates the scaled exponential integral. ``cf`` evaluates
        the Stieltjes continued fraction built from the string weights by a
        backward sweep.
    depth : int, optional
        Number of (length, mass) levels of the continued fraction. When omitted
        the depth is doubled until two successive values agree to 1e-15.

    Raises
    ------
    DomainError
        If ``x >= 0``.
    ConvergenceError
        If the automatic depth search exceeds ``2**22`` levels.
    """
    a = _params(params).alpha
    _check_negative(x)
    if method == "integral":
        return scaled_exp_integral(1.0 + a, -x)
    if method not in ("cf", "continued_fraction"):
        raise ValueError(f"unknown method {method!r}")
    if depth is not None:
        if depth < 1:
            raise DomainError(f"depth must be positive, got {depth!r}")
        return _weyl_cf(a, -x, depth)
    d = 64
    prev = _weyl_cf(a, -x, d)
    while d < (1 << 22):
        d *= 2
        cur = _weyl_cf(a, -x, d)
        if abs(cur - prev) <= 1e-15 * abs(cur):
            return cur
        prev = cur
    raise ConvergenceError(f"continued fraction did not settle by depth {d} at x={x!r}")


def weyl_m_inverse(params, value: float) -> float:
    """The unique ``x < 0`` with ``m(x) = value``.

    ``m`` increases from 0 at minus infinity to ``1/alpha`` (or to infinity for
    ``alpha <= 0``) at zero, so `value` must lie strictly inside that range.
    """
    a = _params(params).alpha
    if not value > 0.0 or (a > 0.0 and not value < 1.0 / a):
        raise DomainError(f"value {value!r} is outside the range of the Weyl function")

    def f(s):
        return weyl_m(a, -math.exp(s)) - value

    lo, hi = math.log(0.5 / value), math.log(2.0 / value)
    while f(lo) < 0.0:
        lo -= 2.0
    while f(hi) > 0.0:
        hi += 2.0
    s = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return -math.exp(s)


def _miller_weyl(alpha: float, x: float, n_max: int, m0: float) -> Optional[np.ndarray]:
    start = max(2 * n_max + 64, int(64.0 / max(abs(x), 1e-300)) if abs(x) < 1.0 else 0)
    start = min(start, _MILLER_CAP)
    prev = None
    while True:
        cpl = couplings(alpha, start + 2)
        dg = diagonal(alpha, start + 1)
        r = _kernels.minimal_ratios(cpl, dg, float(x), start)[1 : n_max + 1]
        if prev is not None and np.all(np.abs(r - prev) <= 1e-15 * np.abs(r)):
            break
        if start >= _MILLER_CAP:
            return None
        prev = r
        start = min(2 * start, _MILLER_CAP)
    psi = np.empty(n_max + 1)
    psi[0] = m0
    psi[1:] = m0 * np.cumprod(r)
    return psi


def weyl_solution(params, x: float, n_max: int) -> np.ndarray:
    """Weyl solution ``Psi_n(x) = Q_n(x) + m(x) P_n(x)`` for ``n = 0..n_max``, ``x < 0``.

    Where ``Q + m P`` suffers little cancellation it is used directly;
    otherwise the decaying solution is produced by Miller's backward ratio
    sweep and normalised by ``Psi_0 = m(x)``.
    """
    a = _params(params).alpha
    _check_negative(x)
    m0 = weyl_m(a, x)
    mp = m0 * poly_first_all(a, n_max, x)
    direct = poly_second_all(a, n_max, x) + mp
    with np.errstate(divide="ignore", invalid="ignore"):
        cancel = np.abs(mp) / np.abs(direct)
    if np.all(np.isfinite(cancel)) and float(np.max(cancel)) <= _DIRECT_CANCELLATION:
        return direct
    miller = _miller_weyl(a, x, n_max, m0)
    return direct if miller is None else miller


def green_column(params, x: float, m: int, n_max: int) -> np.ndarray:
    """Resolvent kernel ``G(x; n, m)`` for ``n = 0..n_max`` and fixed `m`."""
    a = _params(params).alpha
    _check_negative(x)
    size = max(n_max, m)
    p = poly_first_all(a, size, x)
    psi = weyl_solution(a, x, size)
    n = np.arange(n_max + 1)
    return np.where(n <= m, p[: n_max + 1] * psi[m], p[m] * psi[: n_max + 1])


def green(params, x: float, n: int, m: int) -> float:
    """Resolvent kernel ``G(x; n, m) = P_min(x) Psi_max(x)`` for ``x < 0``; symmetric in n, m."""
    lo, hi = min(n, m), max(n, m)
    a = _params(params).alpha
    _check_negative(x)
    return float(poly_first_all(a, lo, x)[lo] * weyl_solution(a, x, hi)[hi])


def green_at_zero(params, n: int, m: int) -> float:
    """Limit of ``G(x; n, m)`` as ``x`` rises to 0: ``sigma(min)/(alpha sigma(max))`` or infinity."""
    a = _params(params).alpha
    if a <= 0.0:
        return math.inf
    lo, hi = min(n, m), max(n, m)
    table = log_rising_over_factorial(a, hi)
    return math.exp(0.5 * (table[lo] - table[hi])) / a


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the spectral measure ``x^alpha e^(-x) dx / Gamma(alpha+1)``.

    ``hp_nodes`` and ``hp_weights`` optionally carry the same rule in
    arbitrary precision (``mpmath.mpf`` tuples) for cancellation-free sums.
    """

    alpha: float
    nodes: np.ndarray
    weights: np.ndarray
    hp_nodes: Optional[tuple] = field(default=None, repr=False, compare=False)
    hp_weights: Optional[tuple] = field(default=None, repr=False, compare=False)
    dps: Optional[int] = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0) or np.any(nodes <= 0):
            raise ValueError("nodes must be positive and strictly increasing")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.nodes.size


def _refine_hp(alpha: float, nodes: np.ndarray, dps: int):
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    K = nodes.size
    a = ctx.mpf(alpha)
    tol = ctx.mpf(10) ** (-(dps - 10))

    def lag_pair(x):
        prev, cur = ctx.zero, ctx.one
        for k in range(K):
            prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        return cur, prev

    hp_nodes = []
    for x0 in nodes:
        x = ctx.mpf(float(x0))
        for _ in range(60):
            lk, lkm1 = lag_pair(x)
            deriv = (K * lk - (K + a) * lkm1) / x
            step = lk / deriv
            x -= step
            if abs(step) <= tol * x:
                break
        else:
            raise ConvergenceError(f"Newton refinement of node {x0!r} did not converge")
        hp_nodes.append(x)

    # Orthonormal recurrence: P_(n+1) = ((2n+1+a-x) P_n - sqrt(n(n+a)) P_(n-1)) / sqrt((n+1)(n+1+a)).
    cpl = [ctx.sqrt(n * (n + a)) for n in range(K + 1)]
    hp_weights = []
    for x in hp_nodes:
        prev, cur = ctx.zero, ctx.one
        total = ctx.one
        for n in range(K - 1):
            prev, cur = cur, ((2 * n + 1 + a - x) * cur - cpl[n] * prev) / cpl[n + 1]
            total += cur * cur
        hp_weights.append(1 / total)
    return tuple(hp_nodes), tuple(hp_weights)


@lru_cache(maxsize=32)
def _gauss_rule_cached(alpha: float, K: int, dps: Optional[int]) -> QuadratureRule:
    dg = diagonal(alpha, K)
    off = -couplings(alpha, K + 1)[1:K]
    nodes = linalg.eigh_tridiagonal(dg, off, eigvals_only=True)
    with np.errstate(over="ignore"):
        P = poly_first_matrix(alpha, K - 1, nodes)
        weights = 1.0 / np.sum(P * P, axis=0)
    if dps is None:
        return QuadratureRule(alpha, nodes, weights)
    hp_nodes, hp_weights = _refine_hp(alpha, nodes, dps)
    return QuadratureRule(
        alpha,
        np.array([float(v) for v in hp_nodes]),
        np.array([float(v) for v in hp_weights]),
        hp_nodes,
        hp_weights,
        dps,
    )


def gauss_rule(params, K: int = 200, dps: Optional[int] = None) -> QuadratureRule:
    """K-point Gauss rule for the spectral measure, exact to polynomial degree ``2K - 1``.

    Nodes are the eigenvalues of the ``K x K`` finite section. Weights are the
    squared first components of its normalised eigenvectors, computed through
    the equivalent Christoffel form ``1 / sum_(n<K) P_n(x)^2``, which keeps
    relative accuracy for the exponentially small weights. With `dps` set,
    nodes are polished by Newton's method on ``L_K^(alpha)`` at that many
    decimal digits and the weights recomputed as ``1 / sum_(n<K) P_n(x)^2``.
    """
    a = _params(params).alpha
    if K < 1:
        raise DomainError(f"K must be positive, got {K!r}")
    return _gauss_rule_cached(a, int(K), dps)


def spectral_transform(params, f, rule: QuadratureRule, direction: str = "forward",
                       n_max: Optional[int] = None) -> np.ndarray:
    """Expansion in orthonormal polynomials, evaluated on the nodes of a Gauss rule.

    ``forward`` maps coefficients ``f_n`` to ``F(x_i) = sum_n f_n P_n(x_i)``.
    ``inverse`` maps node values back to ``f_n = sum_i w_i F(x_i) P_n(x_i)``
    for ``n = 0..n_max`` (default ``K - 1``).
    """
    a = _params(params).alpha
    if direction == "forward":
        coeffs = as_dense(f)
        if coeffs.size == 0:
            return np.zeros(rule.size)
        P = poly_first_matrix(a, coeffs.size - 1, rule.nodes)
        return coeffs @ P
    if direction == "inverse":
        values = np.asarray(f, dtype=float)
        if values.shape != rule.nodes.shape:
            raise ValueError("node values must match the rule size")
        top = rule.size - 1 if n_max is None else n_max
        P = poly_first_matrix(a, top, rule.nodes)
        return P @ (rule.weights * values)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
