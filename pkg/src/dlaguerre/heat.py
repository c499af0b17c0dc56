"""Heat kernels of the discrete Laguerre operator and diagnostics built on them.

The kernel is evaluated from the terminating positive sum

    e^(-tH)(n, m) = sigma(n) sigma(m) t^(n+m) / (1+t)^(n+m+alpha+1)
                    * 2F1(-n, -m; alpha+1; 1/t^2),

in log-magnitude arithmetic. Every term of the sum is positive, so the value
keeps full relative accuracy even where it is far below the double range
reached by a matrix exponential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre.operators import _params
from dlaguerre.spectral import weyl_m
from dlaguerre.specfun import (
    SignedLogReal,
    hyp2f1_terminating,
    jacobi,
    log_rising_over_factorial,
    meixner,
)

__all__ = [
    "HeatQuery",
    "heat_kernel",
    "heat_kernel_log",
    "heat_kernel_matrix",
    "heat_row",
    "special_case_row",
    "meixner_kernel",
    "ultracontractive_norm",
    "row_mass",
    "row_mass_defect",
    "TransienceReport",
    "transience_indicator",
    "binomial_inequality_holds",
    "binomial_inequality_failures",
    "chapman_kolmogorov_defect",
    "large_t_defect",
    "large_t_ratio",
    "small_t_ratio",
]

VARIANTS = ("plain", "tilde")


@dataclass(frozen=True)
class HeatQuery:
    """One kernel entry: parameter, time, row, column and variant."""

    alpha: float
    t: float
    n: int
    m: int
    variant: str = "plain"

    def __post_init__(self):
        _params(self.alpha)
        if not self.t > 0.0:
            raise DomainError(f"t must be positive, got {self.t!r}")
        if self.n < 0 or self.m < 0:
            raise DomainError("indices must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be 'plain' or 'tilde', got {self.variant!r}")


def _log_sigma_pair(alpha: float, n: int, m: int) -> tuple[float, float]:
    table = log_rising_over_factorial(alpha, max(n, m))
    return 0.5 * table[n], 0.5 * table[m]


def heat_kernel_log(alpha: float, t: float, n: int, m: int, variant: str = "plain") -> float:
    """Natural logarithm of the kernel entry; see :func:`heat_kernel`."""
    q = HeatQuery(alpha, t, n, m, variant)
    log_hyp = hyp2f1_terminating(q.n, -q.m, q.alpha + 1.0, 1.0 / (q.t * q.t)).logmag
    value = (n + m) * math.log(t) - (n + m + q.alpha + 1.0) * math.log1p(t) + log_hyp
    if variant == "plain":
        ls_n, ls_m = _log_sigma_pair(q.alpha, n, m)
        value += ls_n + ls_m
    return float(value)


def heat_kernel(q: HeatQuery) -> float:
    """Kernel entry ``e^(-tH)(n, m)`` (``plain``) or of the conjugated operator (``tilde``).

    The ``tilde`` kernel is the ``plain`` one divided by ``sigma(n) sigma(m)``.
    """
    return math.exp(heat_kernel_log(q.alpha, q.t, q.n, q.m, q.variant))


def heat_row(alpha: float, t: float, n: int, m_max: int, variant: str = "plain") -> np.ndarray:
    """Kernel entries ``(n, m)`` for ``m = 0..m_max`` in one vectorised pass."""
    HeatQuery(alpha, t, n, 0, variant)
    m = np.arange(m_max + 1, dtype=float)
    log_z = -2.0 * math.log(t)
    # log of term k of 2F1(-n, -m; alpha+1; 1/t^2), for each m; -inf where m < k
    logs = [np.zeros(m_max + 1)]
    cur = np.zeros(m_max + 1)
    for k in range(1, n + 1):
        with np.errstate(divide="ignore"):
            step = math.log(n - k + 1) + np.log(np.maximum(m - k + 1, 0.0)) + log_z \
                - math.log(alpha + k) - math.log(k)
        cur = cur + step
        logs.append(cur)
    logs = np.array(logs)
    top = np.max(logs, axis=0)
    log_hyp = top + np.log(np.sum(np.exp(logs - top), axis=0))
    out = (n + m) * math.log(t) - (n + m + alpha + 1.0) * math.log1p(t) + log_hyp
    if variant == "plain":
        table = 0.5 * log_rising_over_factorial(alpha, max(n, m_max))
        out += table[n] + table[: m_max + 1]
    return np.exp(out)


def heat_kernel_matrix(alpha: float, t: float, n_max: int, m_max: Optional[int] = None,
                       variant: str = "plain") -> np.ndarray:
    """Matrix of kernel entries for ``n <= n_max``, ``m <= m_max`` (default ``n_max``)."""
    m_max = n_max if m_max is None else m_max
    out = np.empty((n_max + 1, m_max + 1))
    for n in range(n_max + 1):
        for m in range(m_max + 1):
            if m < n and m <= n_max and n <= m_max:
                out[n, m] = out[m, n]
            else:
                out[n, m] = heat_kernel(HeatQuery(alpha, t, n, m, variant))
    return out


def special_case_row(params, t: float, n, m: int) -> float:
    """Closed forms of the plain kernel for row 0, row 1 and the diagonal.

    ``n=0``: ``sigma(m) (t/(t+1))^m / (1+t)^(1+alpha)``.
    ``n=1``: ``(1+t)^(-1-alpha) (t/(t+1))^(m-1) ((1+alpha) t^2 + m) / (t+1)^2 * sigma(m)/sigma(1)``.
    ``n="diag"``: ``(1+t)^(-1-alpha) ((t-1)/(t+1))^m P_m^(alpha,0)((t^2+1)/(t^2-1))``, for ``t != 1``.

    These are independent of :func:`heat_kernel` and serve as cross-checks.
    """
    a = _params(params).alpha
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m!r}")
    log_pre = -(1.0 + a) * math.log1p(t)
    log_sigma_m = 0.5 * log_rising_over_factorial(a, m)[m]
    log_ratio = math.log(t) - math.log1p(t)
    if n == 0:
        return math.exp(log_pre + log_sigma_m + m * log_ratio)
    if n == 1:
        body = ((1.0 + a) * t * t + m) / ((t + 1.0) ** 2)
        return math.exp(log_pre + (m - 1) * log_ratio + math.log(body)
                        + log_sigma_m - 0.5 * math.log1p(a))
    if n == "diag":
        if t == 1.0:
            raise DomainError("the diagonal Jacobi form is singular at t = 1")
        x = (t * t + 1.0) / (t * t - 1.0)
        poly = jacobi(a, 0.0, m, x)
        factor = SignedLogReal.from_float((t - 1.0) / (t + 1.0))
        power = SignedLogReal(factor.sign ** m if m else 1, m * factor.logmag if m else 0.0)
        return float(SignedLogReal(1, log_pre) * power * poly)
    raise ValueError(f"n must be 0, 1 or 'diag', got {n!r}")


def meixner_kernel(q: HeatQuery) -> float:
    """Tilde kernel through Meixner polynomials with ``c = t^2/(t^2-1)``; requires ``t != 1``.

    ``(1+t)^(-(alpha+1)) (t/(t+1))^(n+m) M_n(m; 1+alpha, c)``. The Meixner value
    itself is a plain float here, so this route is limited to moderate n, m and
    t; it is a cross-check, not the production path.
    """
    if q.t == 1.0:
        raise DomainError("c = t^2/(t^2-1) is undefined at t = 1")
    c = q.t * q.t / (q.t * q.t - 1.0)
    value = meixner(q.n, q.m, 1.0 + q.alpha, c)
    log_scale = -(q.alpha + 1.0) * math.log1p(q.t) + (q.n + q.m) * (math.log(q.t) - math.log1p(q.t))
    return math.exp(log_scale) * value


def ultracontractive_norm(params, t: float, n_search: int = 500) -> tuple[float, int]:
    """Largest diagonal tilde-kernel entry over ``n <= n_search`` and the first index attaining it."""
    a = _params(params).alpha
    diag = np.array([heat_kernel_log(a, t, n, n, "tilde") for n in range(n_search + 1)])
    idx = int(np.argmax(diag))
    return math.exp(diag[idx]), idx


def _row_mass_terms(alpha: float, t: float, n: int, M: int) -> np.ndarray:
    # tilde kernel times sigma(m)^2 equals plain kernel times sigma(m)/sigma(n)
    row = heat_row(alpha, t, n, M, "plain")
    table = 0.5 * log_rising_over_factorial(alpha, max(n, M))
    return row * np.exp(table[: M + 1] - table[n])


def row_mass(params, t: float, n: int, M: Optional[int] = None, tol: float = 1e-17,
             max_terms: int = 1 << 20) -> tuple[float, int]:
    """``sum_(m<=M) K~_t(n, m) sigma(m)^2`` and the cutoff M used.

    With ``M=None`` the cutoff is doubled until the last term falls below
    ``tol`` times the running sum past the peak of the row.

    Raises
    ------
    ConvergenceError
        If the adaptive cutoff exceeds `max_terms`.
    """
    a = _params(params).alpha
    if M is not None:
        return math.fsum(_row_mass_terms(a, t, n, M)), M
    M = max(64, 2 * n)
    while M <= max_terms:
        terms = _row_mass_terms(a, t, n, M)
        peak = int(np.argmax(terms))
        total = math.fsum(terms)
        if peak < M // 2 and terms[-1] <= tol * total:
            return total, M
        M *= 2
    raise ConvergenceError(f"row mass did not settle within {max_terms} terms (t={t}, n={n})")


def row_mass_defect(params, t: float, n: int, M: Optional[int] = None) -> float:
    """``|1 - row_mass|``; vanishes in the limit because the semigroup is conservative."""
    return abs(1.0 - row_mass(params, t, n, M)[0])


@dataclass(frozen=True)
class TransienceReport:
    """Green function at ``x = -eps`` along a grid, with the resulting classification."""

    classification: str
    eps_grid: tuple
    values: tuple
    increments: tuple
    limit: Optional[float]
    midpoint_ratio: float


def transience_indicator(params, eps_grid: Optional[Sequence[float]] = None) -> TransienceReport:
    """Classify the associated chain as transient or recurrent from ``G(-eps; 0, 0)``.

    The default grid is ``eps = 10^-1 .. 10^-16``. The increments between
    successive grid points decay geometrically when the Green function has a
    finite limit and stay level (logarithmic growth) or grow otherwise. The
    chain is called recurrent when the last increment is at least 0.9 times the
    increment at the middle of the grid. For a transient chain the limit is
    extrapolated from the last three values (Aitken's delta-squared).
    ``midpoint_ratio`` is the last value divided by the midpoint value.
    """
    a = _params(params).alpha
    if eps_grid is None:
        eps_grid = [10.0 ** (-k) for k in range(1, 17)]
    eps = [float(e) for e in eps_grid]
    if len(eps) < 4:
        raise ValueError("eps_grid needs at least four points")
    if any(e <= 0 for e in eps) or any(b >= c for c, b in zip(eps, eps[1:])):
        raise ValueError("eps_grid must be positive and strictly decreasing")
    values = [weyl_m(a, -e) for e in eps]
    inc = [v1 - v0 for v0, v1 in zip(values, values[1:])]
    mid = len(inc) // 2
    ratio = values[-1] / values[len(values) // 2]
    if inc[-1] >= 0.9 * inc[mid]:
        return TransienceReport("recurrent", tuple(eps), tuple(values), tuple(inc), None, ratio)
    d1, d2 = inc[-2], inc[-1]
    limit = values[-1]
    if d1 != d2 and d2 != 0.0:
        r = d2 / d1
        if 0.0 < r < 1.0:
            limit = values[-1] + d2 * r / (1.0 - r)
    return TransienceReport("transient", tuple(eps), tuple(values), tuple(inc), limit, ratio)


def _binom_fraction(top: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out = out * (top - j) / (j + 1)
    return out


def binomial_inequality_holds(alpha: float, n: int, k: int) -> bool:
    """Exact check of ``binom(n+alpha, k) binom(n, k) <= binom(n+alpha, n) binom(2n, 2k)``.

    `alpha` is converted to an exact rational (its binary value), so the
    comparison involves no rounding.
    """
    a = Fraction(alpha)
    lhs = _binom_fraction(n + a, k) * math.comb(n, k)
    rhs = _binom_fraction(n + a, n) * math.comb(2 * n, 2 * k)
    return lhs <= rhs


def binomial_inequality_failures(alphas: Sequence[float], n_max: int) -> list:
    """All ``(alpha, n, k)`` with ``0 <= k < n <= n_max`` violating the inequality."""
    return [(a, n, k) for a in alphas for n in range(1, n_max + 1) for k in range(n)
            if not binomial_inequality_holds(a, n, k)]


def chapman_kolmogorov_defect(params, s: float, t: float, n: int, m: int,
                              tol: float = 1e-18, max_terms: int = 1 << 18) -> float:
    """Relative defect of ``sum_k K_s(n,k) K_t(k,m) = K_(s+t)(n,m)`` with an adaptive cutoff."""
    a = _params(params).alpha
    K = max(64, 2 * max(n, m))
    while K <= max_terms:
        terms = heat_row(a, s, n, K) * heat_row(a, t, m, K)
        total = math.fsum(terms)
        if int(np.argmax(terms)) < K // 2 and terms[-1] <= tol * total:
            exact = heat_kernel(HeatQuery(a, s + t, n, m))
            return abs(total - exact) / exact
        K *= 2
    raise ConvergenceError(f"Chapman-Kolmogorov sum did not settle within {max_terms} terms")


def large_t_defect(params, t: float, n: int, m: int) -> float:
    """``(1+t)^(1+alpha) K_t(n,m) - sigma(n) sigma(m)`` without cancellation.

    Written as ``sigma(n) sigma(m) * expm1(-(n+m) log1p(1/t) + log1p(F - 1))`` where
    ``F - 1`` is the (positive) hypergeometric sum without its leading 1.
    """
    a = _params(params).alpha
    ls_n, ls_m = _log_sigma_pair(a, n, m)
    k = np.arange(1, min(n, m) + 1, dtype=float)
    if k.size:
        ratio = (n - k + 1) * (m - k + 1) / ((a + k) * k * t * t)
        f_minus_one = math.fsum(np.cumprod(ratio))
    else:
        f_minus_one = 0.0
    return math.exp(ls_n + ls_m) * math.expm1(-(n + m) * math.log1p(1.0 / t) + math.log1p(f_minus_one))


def large_t_ratio(params, t: float, n: int, m: int) -> float:
    """``t * large_t_defect / (-(n+m) sigma(n) sigma(m))``; tends to 1 as ``t`` grows (n+m > 0)."""
    a = _params(params).alpha
    if n + m == 0:
        raise DomainError("the first-order term vanishes for n = m = 0")
    ls_n, ls_m = _log_sigma_pair(a, n, m)
    return t * large_t_defect(a, t, n, m) / (-(n + m) * math.exp(ls_n + ls_m))


def small_t_ratio(params, t: float, n: int, m: int) -> float:
    """``K_t(n,m) / t^|n-m|`` divided by its limit ``binom(max,min) sigma(max)/sigma(min)``."""
    a = _params(params).alpha
    lo, hi = min(n, m), max(n, m)
    ls_lo, ls_hi = _log_sigma_pair(a, lo, hi)
    log_limit = math.log(math.comb(hi, lo)) + ls_hi - ls_lo
    return math.exp(heat_kernel_log(a, t, n, m) - (hi - lo) * math.log(t) - log_limit)
