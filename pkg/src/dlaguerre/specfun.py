"""Special functions with overflow-safe factorial-like quantities.

Everything that grows like a factorial (Pochhammer symbols, binomials with a
real upper argument, terms of terminating hypergeometric sums) is carried as a
:class:`SignedLogReal` and only converted to a float at the API boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import integrate, optimize

from dlaguerre.errors import DomainError

__all__ = [
    "SignedLogReal",
    "pochhammer",
    "log_rising_over_factorial",
    "sigma",
    "sigma_table",
    "laguerre",
    "jacobi",
    "hyp2f1_terminating",
    "meixner",
    "exp_integral",
    "scaled_exp_integral",
    "bessel_i",
]


@dataclass(frozen=True)
class SignedLogReal:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign`` is one of -1, 0, +1; for zero the magnitude is ignored and
    normalised to ``-inf``. The logarithm is held in ``numpy.longdouble``:
    one double-precision ulp of a logarithm near 300 is already a relative
    error of 6e-14 in the value, while the extended format keeps conversions
    accurate to a few ulp for magnitudes up to about ``exp(1e4)``.
    """

    sign: int
    logmag: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "logmag", np.longdouble(-np.inf))
            return
        logmag = np.longdouble(self.logmag)
        if np.isnan(logmag):
            raise ValueError("logmag is NaN")
        object.__setattr__(self, "logmag", logmag)

    @classmethod
    def from_float(cls, value: float) -> "SignedLogReal":
        value = float(value)
        if value == 0.0:
            return cls(0)
        if not math.isfinite(value):
            raise ValueError(f"cannot represent {value!r}")
        return cls(1 if value > 0 else -1, np.log(np.longdouble(abs(value))))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        with np.errstate(over="ignore", under="ignore"):
            return self.sign * float(np.exp(self.logmag))

    def to_float(self) -> float:
        return float(self)

    def __neg__(self) -> "SignedLogReal":
        return SignedLogReal(-self.sign, self.logmag)

    def __mul__(self, other) -> "SignedLogReal":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLogReal(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SignedLogReal":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogReal")
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __add__(self, other) -> "SignedLogReal":
        return SignedLogReal.sum((self, _coerce(other)))

    __radd__ = __add__

    def __sub__(self, other) -> "SignedLogReal":
        return SignedLogReal.sum((self, -_coerce(other)))

    @staticmethod
    def sum(values: Iterable["SignedLogReal"]) -> "SignedLogReal":
        """Sum with a single rescaling by the largest magnitude and ``math.fsum``."""
        vals = [v for v in values if v.sign != 0]
        if not vals:
            return ZERO
        top = max(v.logmag for v in vals)
        total = math.fsum(v.sign * math.exp(float(v.logmag - top)) for v in vals)
        if total == 0.0:
            return ZERO
        return SignedLogReal(1 if total > 0 else -1, top + math.log(abs(total)))

    @staticmethod
    def sum_logs(signs, logmags) -> "SignedLogReal":
        """Vectorised :meth:`sum` over parallel arrays of signs and log-magnitudes."""
        signs = np.asarray(signs, dtype=float)
        logmags = np.asarray(logmags, dtype=np.longdouble)
        keep = signs != 0
        if not np.any(keep):
            return ZERO
        signs, logmags = signs[keep], logmags[keep]
        top = np.max(logmags)
        total = math.fsum(signs * np.exp((logmags - top).astype(float)))
        if total == 0.0:
            return ZERO
        return SignedLogReal(1 if total > 0 else -1, top + math.log(abs(total)))


ZERO = SignedLogReal(0)
ONE = SignedLogReal(1, 0.0)


def _coerce(value) -> SignedLogReal:
    if isinstance(value, SignedLogReal):
        return value
    return SignedLogReal.from_float(value)


def _check_alpha(alpha: float, name: str = "alpha") -> None:
    if not alpha > -1.0:
        raise DomainError(f"{name} must exceed -1, got {alpha!r}")


def pochhammer(x: float, n: int) -> SignedLogReal:
    """Rising factorial ``(x)_n = x (x+1) ... (x+n-1)``, with ``(x)_0 = 1``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    if n == 0:
        return ONE
    factors = x + np.arange(n, dtype=float)
    if np.any(factors == 0.0):
        return ZERO
    sign = -1 if int(np.count_nonzero(factors < 0)) % 2 else 1
    return SignedLogReal(sign, math.fsum(np.log(np.abs(factors))))


def log_rising_over_factorial(alpha: float, n_max: int) -> np.ndarray:
    """Table of ``log((alpha+1)_n / n!)`` for ``n = 0..n_max``.

    Built from ``log1p(alpha/k)`` increments accumulated in extended precision,
    so the table stays accurate far beyond where the plain ratio overflows.
    """
    _check_alpha(alpha)
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max!r}")
    out = np.zeros(n_max + 1)
    if n_max > 0:
        k = np.arange(1, n_max + 1, dtype=float)
        inc = np.log1p(alpha / k).astype(np.longdouble)
        out[1:] = np.cumsum(inc).astype(float)
    return out


def sigma_table(alpha: float, n_max: int) -> np.ndarray:
    """``sigma_alpha(n) = binom(n+alpha, n)^(1/2)`` for ``n = 0..n_max``."""
    return np.exp(0.5 * log_rising_over_factorial(alpha, n_max))


def sigma(alpha: float, n: int) -> float:
    """``sqrt((alpha+1)_n / n!)``; strictly positive for ``alpha > -1``."""
    _check_alpha(alpha)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    k = np.arange(1, n + 1, dtype=float)
    return math.exp(0.5 * math.fsum(np.log1p(alpha / k)))


def laguerre(alpha: float, n: int, x: float) -> float:
    """Generalised Laguerre polynomial ``L_n^(alpha)(x)`` by the recurrence in n.

    The recurrence runs in ``numpy.longdouble``; in double precision the
    rounding errors of a few hundred steps add up to about 1e-12.
    """
    _check_alpha(alpha)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    a = np.longdouble(alpha)
    z = np.longdouble(x)
    prev, cur = np.longdouble(0.0), np.longdouble(1.0)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + a - z) * cur - (k + a) * prev) / (k + 1)
    return float(cur)


def _jacobi_rodrigues(alpha: float, beta: float, n: int, x: float) -> SignedLogReal:
    # term_k = binom(n+a, n-k) binom(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k)
    k = np.arange(n + 1, dtype=float)
    lb = np.zeros(n + 1)
    if n > 0:
        j = k[:-1]
        lb[1:] = np.cumsum(np.log((n - j) / (alpha + (j + 1))) + np.log((n - j + beta) / (j + 1)))
    lb += log_rising_over_factorial(alpha, n)[n]
    xm, xp = (x - 1.0) / 2.0, (x + 1.0) / 2.0
    signs = np.ones(n + 1)
    logs = lb.copy()
    for base, power in ((xm, k), (xp, n - k)):
        if base == 0.0:
            signs[power > 0] = 0.0
        else:
            logs += power * math.log(abs(base))
            if base < 0:
                signs *= np.where(power % 2 == 1, -1.0, 1.0)
    return SignedLogReal.sum_logs(signs, logs)


def _jacobi_recurrence(alpha: float, beta: float, n: int, x: float) -> float:
    prev, cur = 1.0, (alpha - beta + (alpha + beta + 2.0) * x) / 2.0
    if n == 0:
        return prev
    ab = alpha + beta
    for k in range(1, n):
        s = 2 * k + ab
        a1 = 2.0 * (k + 1) * (k + ab + 1) * s
        a2 = (s + 1) * (alpha * alpha - beta * beta)
        a3 = s * (s + 1) * (s + 2)
        a4 = 2.0 * (k + alpha) * (k + beta) * (s + 2)
        prev, cur = cur, ((a2 + a3 * x) * cur - a4 * prev) / a1
    return cur


def jacobi(alpha: float, beta: float, n: int, x: float, method: str = "auto") -> SignedLogReal:
    """Jacobi polynomial ``P_n^(alpha, beta)(x)`` normalised by ``P_n(1) = (alpha+1)_n/n!``.

    ``method="auto"`` reflects negative arguments through
    ``P_n^(a,b)(-x) = (-1)^n P_n^(b,a)(x)``, then uses the three-term recurrence
    on ``[0, 1]`` and the Rodrigues finite sum (all terms nonnegative) for
    ``x > 1``. ``"rodrigues"`` and ``"recurrence"`` force one route.
    """
    _check_alpha(alpha)
    _check_alpha(beta, "beta")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    if method == "rodrigues":
        return _jacobi_rodrigues(alpha, beta, n, x)
    if method == "recurrence":
        return SignedLogReal.from_float(_jacobi_recurrence(alpha, beta, n, x))
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if x < 0.0:
        mirrored = jacobi(beta, alpha, n, -x)
        return -mirrored if n % 2 else mirrored
    if x <= 1.0:
        return SignedLogReal.from_float(_jacobi_recurrence(alpha, beta, n, x))
    return _jacobi_rodrigues(alpha, beta, n, x)


def _is_nonpositive_integer(c: float) -> bool:
    return c <= 0 and float(c).is_integer()


def hyp2f1_terminating(n: int, b: float, c: float, z: float) -> SignedLogReal:
    """``2F1(-n, b; c; z)`` as a finite sum of ``n + 1`` terms."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    if _is_nonpositive_integer(c):
        raise DomainError(f"c must not be a nonpositive integer, got {c!r}")
    if n == 0 or z == 0.0:
        return ONE
    k = np.arange(1, n + 1, dtype=float)
    ratio = (k - 1 - n) * (b + (k - 1)) * z / ((c + (k - 1)) * k)
    dead = np.flatnonzero(ratio == 0.0)
    if dead.size:
        ratio = ratio[: dead[0]]
    signs = np.concatenate(([1.0], np.cumprod(np.sign(ratio))))
    logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(ratio)))))
    return SignedLogReal.sum_logs(signs, logs)


def meixner(n: int, x: float, beta: float, c: float) -> float:
    """Meixner polynomial ``M_n(x; beta, c) = 2F1(-n, -x; beta; 1 - 1/c)``."""
    if c == 0.0 or c == 1.0:
        raise DomainError(f"c must differ from 0 and 1, got {c!r}")
    if _is_nonpositive_integer(beta):
        raise DomainError(f"beta must not be a nonpositive integer, got {beta!r}")
    return float(hyp2f1_terminating(n, -x, beta, 1.0 - 1.0 / c))


def scaled_exp_integral(p: float, x: float) -> float:
    """``exp(x) * E_p(x)`` for real ``x > 0``.

    Evaluated as ``int_0^inf exp(-x*(e^u - 1) + (1-p) u) du`` (the substitution
    ``t = x e^u`` in the defining integral), which has no endpoint singularity
    and stays finite for large ``x`` where ``E_p`` itself underflows.
    """
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    s = 1.0 - p

    def expo(u):
        try:
            return -x * math.expm1(u) + s * u
        except OverflowError:
            return -1e300

    u_peak = math.log(s / x) if s > x else 0.0
    top = expo(u_peak)
    width = 1.0
    while expo(u_peak + width) > top - 80.0:
        width *= 2.0
    upper = u_peak + width
    # the exponent is concave and decreasing past the peak: shrink to the cutoff
    upper = optimize.brentq(lambda u: expo(u) - (top - 80.0), u_peak, upper, xtol=1e-300, rtol=1e-10)
    points = [u_peak] if 0.0 < u_peak < upper else None

    def f(u):
        return math.exp(expo(u) - top)

    val, _ = integrate.quad(f, 0.0, upper, points=points, epsabs=0.0, epsrel=1e-13, limit=400)
    return val * math.exp(top)


def exp_integral(p: float, x: float) -> float:
    """Generalised exponential integral ``E_p(x) = x^(p-1) int_x^inf e^-t t^-p dt``, ``x > 0``."""
    return math.exp(-x) * scaled_exp_integral(p, x)


def bessel_i(k: int, x: float) -> float:
    """Modified Bessel function ``I_k(x)`` of integer order from its power series."""
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    k = abs(int(k))
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    half = 0.5 * x
    term = math.exp(k * math.log(half) - math.lgamma(k + 1))
    total = term
    j = 0
    while True:
        j += 1
        term *= half * half / (j * (j + k))
        total += term
        if term <= 1e-17 * total:
            return total
