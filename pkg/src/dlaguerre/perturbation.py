"""Negative spectrum of ``H - V`` for finitely supported ``V``, eigenvalue bounds and Hardy weights.

Sign convention: ``v_n > 0`` is attractive, i.e. lowers the diagonal.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import optimize

from dlaguerre import _kernels
from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre.operators import _params, as_dense, quadratic_form, string_weights, truncate
from dlaguerre.spectral import green, green_at_zero
from dlaguerre.specfun import log_rising_over_factorial

__all__ = [
    "Potential",
    "HardyWeight",
    "RankOneEigenvalue",
    "BargmannBounds",
    "rank_one_eigenvalue",
    "rank_one_prediction",
    "neg_count",
    "neg_count_exact",
    "neg_count_stable",
    "clr_rhs",
    "bargmann_bounds",
    "printed_kappa_bound",
    "q_weight",
    "hardy_weight",
    "hardy_weight_critical",
    "hardy_weight_ground_state",
    "hardy_weight_profile",
    "hardy_remainder",
    "hardy_check",
    "sobolev_ratio",
    "birman_schwinger_sequence",
    "random_potential",
    "kneser_counts",
]

# Below this magnitude an eigenvalue is reported as unresolved instead of located.
_SMALLEST_ENERGY = 1e-300


@dataclass(frozen=True)
class Potential:
    """Finitely supported potential ``{n: v_n}``; zero entries are dropped."""

    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.entries).items():
            k = int(k)
            v = float(v)
            if k < 0:
                raise DomainError(f"potential index must be nonnegative, got {k}")
            if not math.isfinite(v):
                raise DomainError(f"potential value at {k} is not finite")
            if v != 0.0:
                clean[k] = v
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(clean.items()))))

    @property
    def support_max(self) -> int:
        """Largest index in the support, or -1 for the zero potential."""
        return max(self.entries, default=-1)

    def positive_part(self) -> "Potential":
        return Potential({k: v for k, v in self.entries.items() if v > 0})

    def negative_part(self) -> "Potential":
        return Potential({k: -v for k, v in self.entries.items() if v < 0})

    def dense(self, length: Optional[int] = None) -> np.ndarray:
        return as_dense(dict(self.entries), self.support_max + 1 if length is None else length)

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "Potential":
        """Build from ``[{"n": index, "v": value}, ...]``, rejecting repeated indices."""
        out = {}
        for rec in records:
            if not isinstance(rec, Mapping) or set(rec) != {"n", "v"}:
                raise DomainError(f"potential record must have exactly keys 'n' and 'v': {rec!r}")
            n = rec["n"]
            if isinstance(n, bool) or not isinstance(n, int):
                raise DomainError(f"potential index must be an integer, got {n!r}")
            if n in out:
                raise DomainError(f"duplicate potential index {n}")
            v = rec["v"]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DomainError(f"potential value must be a number, got {v!r}")
            out[n] = float(v)
        return cls(out)

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        data = json.loads(text)
        if not isinstance(data, list):
            raise DomainError("potential file must hold a JSON array")
        return cls.from_records(data)

    def to_json(self) -> str:
        return json.dumps([{"n": k, "v": v} for k, v in self.entries.items()])


def _as_potential(V) -> Potential:
    if isinstance(V, Potential):
        return V
    if V is None:
        return Potential()
    return Potential(V)


@dataclass(frozen=True)
class RankOneEigenvalue:
    """Negative eigenvalue of ``H - v delta_n``.

    ``resolved`` is false when the eigenvalue exists but lies closer to 0 than
    1e-300; then ``energy`` is that bound and ``residual`` is infinite.
    """

    energy: float
    residual: float
    resolved: bool = True


def rank_one_prediction(params, v: float) -> int:
    """Number of negative eigenvalues of ``H - v delta_n``: 1 if ``alpha <= 0`` or ``v > alpha``."""
    a = _params(params).alpha
    if not v > 0.0:
        raise DomainError(f"v must be positive, got {v!r}")
    return 1 if (a <= 0.0 or v > a) else 0


def rank_one_eigenvalue(params, n: int, v: float) -> Optional[RankOneEigenvalue]:
    """The negative eigenvalue of ``H - v delta_n``, if there is one.

    The eigenvalue ``E`` solves ``G(E; n, n) = 1/v``; ``G(., n, n)`` increases
    on the negative axis from 0 to ``G(0; n, n)`` (``1/alpha`` or infinity), so a
    root exists exactly when ``1/v < G(0; n, n)``. The root is bracketed in
    ``[-v, 0)`` and located with Brent's method in the variable ``log(-E)``.

    Returns
    -------
    RankOneEigenvalue or None
        ``None`` when there is no negative eigenvalue.
    """
    a = _params(params).alpha
    if not v > 0.0:
        raise DomainError(f"v must be positive, got {v!r}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    target = 1.0 / v
    if a > 0.0 and not target < green_at_zero(a, n, n):
        return None

    def f(s):
        return green(a, -math.exp(s), n, n) - target

    hi = math.log(v)
    if f(hi) > 0.0:
        raise ConvergenceError(f"G(-v; {n}, {n}) exceeds 1/v; bracket [-v, 0) is invalid")
    lo = min(hi - 1.0, 0.0)
    floor = math.log(_SMALLEST_ENERGY)
    while f(lo) < 0.0:
        if lo <= floor:
            return RankOneEigenvalue(-_SMALLEST_ENERGY, math.inf, resolved=False)
        lo = max(2.0 * lo - 1.0, floor)
    s = optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=300)
    energy = -math.exp(s)
    return RankOneEigenvalue(energy, abs(green(a, energy, n, n) - target))


def neg_count(params, V, N: int) -> int:
    """Negative eigenvalues of the ``N x N`` Dirichlet section of ``H - V`` (Sturm count).

    The count is nondecreasing in N and converges from below.
    """
    T = truncate(params, N, _as_potential(V))
    return _kernels.sturm_count(T.diag, T.offdiag, 0.0)


def neg_count_stable(params, V, N0: int = 200, repeats: int = 2, N_cap: int = 1 << 16) -> tuple[int, int]:
    """Double N until :func:`neg_count` is unchanged over `repeats` doublings; returns (count, N)."""
    N = max(N0, _as_potential(V).support_max + 1)
    counts = [neg_count(params, V, N)]
    while N < N_cap:
        N *= 2
        counts.append(neg_count(params, V, N))
        if len(counts) > repeats and len(set(counts[-repeats - 1:])) == 1:
            return counts[-1], N
    return counts[-1], N


def neg_count_exact(params, V, N: Optional[int] = None) -> int:
    """Exact number of negative eigenvalues of ``H - V`` for finitely supported ``V``.

    Beyond the support the operator is free, and the infimum of the form over
    the tail with ``u[N-1]`` fixed is attained by the zero-energy solution that
    is admissible at infinity: ``sigma(n)`` for ``alpha <= 0`` and
    ``1/sigma(n)`` for ``alpha > 0``. Eliminating the tail therefore replaces
    the last diagonal entry of the N-section by ``N - 1`` or ``N - 1 + alpha``
    respectively. The negative eigenvalues of the resulting finite matrix are
    exactly those of the infinite operator.
    """
    a = _params(params).alpha
    pot = _as_potential(V)
    N = pot.support_max + 2 if N is None else N
    if N < pot.support_max + 2:
        raise DomainError(f"N must exceed the support by at least one, got {N}")
    T = truncate(a, N, pot)
    diag = np.array(T.diag)
    diag[-1] = (N - 1) + (a if a > 0.0 else 0.0)
    return _kernels.sturm_count(diag, T.offdiag, 0.0)


def clr_rhs(params, V) -> float:
    """``sum_n (v+_n)^(1+alpha) (alpha+1)_n/n!``, without the unknown constant; ``alpha > 0``."""
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("the CLR-type sum needs alpha > 0")
    pos = _as_potential(V).positive_part()
    if not pos.entries:
        return 0.0
    logl = log_rising_over_factorial(a, pos.support_max)
    return math.fsum(v ** (1.0 + a) * math.exp(logl[k]) for k, v in pos.entries.items())


@dataclass(frozen=True)
class BargmannBounds:
    """Upper bounds on the number of negative eigenvalues; inapplicable ones are ``None``."""

    simple: Optional[float]
    trace_exact: Optional[float]
    dual: Optional[float]


def bargmann_bounds(params, V) -> BargmannBounds:
    """Bargmann-type bounds.

    For ``alpha > 0``: ``simple = (1/alpha) sum v+_n l(n)`` and the Birman-Schwinger
    trace ``trace_exact = sum v+_n G(0; n, n) = (1/alpha) sum v+_n``.
    For ``alpha <= 0``: ``dual = 1 + sum_n w(n) sum_(k>=n) v+_k l(k)``.
    """
    a = _params(params).alpha
    pos = _as_potential(V).positive_part()
    if not pos.entries:
        return BargmannBounds(0.0, 0.0, None) if a > 0 else BargmannBounds(None, None, 1.0)
    sw = string_weights(a, pos.support_max)
    if a > 0.0:
        simple = math.fsum(v * sw.l[k] for k, v in pos.entries.items()) / a
        trace = math.fsum(v * green_at_zero(a, k, k) for k, v in pos.entries.items())
        return BargmannBounds(simple, trace, None)
    weighted = pos.dense() * sw.l
    tails = np.cumsum(weighted[::-1])[::-1]
    return BargmannBounds(None, None, 1.0 + math.fsum(sw.w * tails))


def printed_kappa_bound(params, V) -> float:
    """``sum_n v_n l(n) sum_(k<=n) w(k)``, reported for comparison only.

    This is not an upper bound on the eigenvalue count: for ``alpha = 1`` and
    ``V = 1.5 delta_0`` it equals 0.75 while there is one negative eigenvalue.
    """
    a = _params(params).alpha
    pot = _as_potential(V)
    if not pot.entries:
        return 0.0
    sw = string_weights(a, pot.support_max)
    partial = np.cumsum(sw.w)
    return math.fsum(v * sw.l[k] * partial[k] for k, v in pot.entries.items())


def q_weight(alpha: float, n) -> np.ndarray:
    """``q(n) = alpha^2 / (2n + alpha + sqrt((2n+alpha)^2 - alpha^2))``, free of cancellation."""
    n = np.asarray(n, dtype=float)
    x = 2.0 * n + alpha
    return alpha * alpha / (x + np.sqrt(x * x - alpha * alpha))


def hardy_weight(params, n: int, variant: str = "plain") -> float:
    """Optimal Hardy weight for ``alpha > 0``.

    ``plain``: ``v(n) = (q(n) + q(n+1)) / 2``. ``tilde``: ``sigma(n)^2 v(n)``, which
    at ``n = 0`` equals ``alpha + 1 - sqrt(alpha + 1)``.
    """
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("hardy_weight needs alpha > 0; use hardy_weight_critical")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    v = 0.5 * float(q_weight(a, n) + q_weight(a, n + 1))
    if variant == "plain":
        return v
    if variant == "tilde":
        return math.exp(log_rising_over_factorial(a, n)[n]) * v
    raise ValueError(f"variant must be 'plain' or 'tilde', got {variant!r}")


def _ground_state_profile(alpha: float, n_max: int, critical: bool) -> np.ndarray:
    # (1/sqrt g_n) sum_(|k-n|=1) (sqrt g_n - sqrt g_k) / w(min(n,k)), combined into one
    # positive fraction; see hardy_weight_ground_state for the closed form.
    sw = string_weights(alpha, n_max + 1)
    w = sw.w
    if critical:
        g = np.concatenate(([0.0], np.cumsum(w.astype(np.longdouble)).astype(float)))[: n_max + 2]
        scale = 1.0
    else:
        g = 1.0 / sw.l
        scale = alpha * alpha
    r = np.sqrt(g)
    out = np.empty(n_max + 1)
    if critical:
        out[0] = math.nan
    else:
        out[0] = (1.0 - r[1]) / w[0]
    n = np.arange(1, n_max + 1)
    num = scale * (w[n - 1] + w[n])
    den = r[n] * (r[n - 1] + r[n + 1]) * (r[n] + r[n + 1]) * (r[n] + r[n - 1])
    out[1:] = num / den
    return out


def hardy_weight_ground_state(params, n: int) -> float:
    """Tilde Hardy weight from the ground-state construction with ``g = 1/sigma^2``; ``alpha > 0``.

    For ``n >= 1`` the two neighbour terms are merged into
    ``alpha^2 (w(n-1) + w(n)) / (r_n (r_(n-1) + r_(n+1)) (r_n + r_(n+1)) (r_n + r_(n-1)))``
    with ``r = sqrt(g)``, which has no cancellation.
    """
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("the supercritical ground state needs alpha > 0")
    return float(_ground_state_profile(a, n, critical=False)[n])


def hardy_weight_critical(params, n: int) -> float:
    """Tilde Hardy weight for ``alpha in (-1, 0]`` and ``n >= 1``.

    Built from ``g(0) = 0``, ``g(n) = sum_(k<n) w(k)``, the positive solution of
    ``(tilde tau g)_n = 0`` for ``n >= 1`` that vanishes at 0 (for ``alpha = 0``
    these are the harmonic numbers).
    """
    a = _params(params).alpha
    if a > 0.0:
        raise DomainError("hardy_weight_critical needs alpha <= 0")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n!r}")
    return float(_ground_state_profile(a, n, critical=True)[n])


def hardy_weight_profile(params, n_max: int, critical: Optional[bool] = None,
                         variant: str = "plain") -> np.ndarray:
    """Hardy weights for ``n = 0..n_max`` in the regime fixed by alpha (critical entry 0 is 0)."""
    a = _params(params).alpha
    critical = (a <= 0.0) if critical is None else critical
    if critical:
        out = _ground_state_profile(a, n_max, critical=True)
        out[0] = 0.0
        return out
    n = np.arange(n_max + 1)
    v = 0.5 * (q_weight(a, n) + q_weight(a, n + 1))
    if variant == "tilde":
        v = v * np.exp(log_rising_over_factorial(a, n_max))
    return v


@dataclass(frozen=True)
class HardyWeight:
    """Hardy weight of the operator in its regime, evaluated on demand."""

    alpha: float

    @property
    def regime(self) -> str:
        return "supercritical" if self.alpha > 0.0 else "critical"

    def plain(self, n: int) -> float:
        return hardy_weight(self.alpha, n, "plain")

    def tilde(self, n: int) -> float:
        if self.regime == "supercritical":
            return hardy_weight(self.alpha, n, "tilde")
        return hardy_weight_critical(self.alpha, n)


def hardy_remainder(params, n) -> np.ndarray:
    """``v(n) - (alpha^2/4)(1/(2n+alpha) + 1/(2n+alpha+2))``, evaluated without cancellation.

    Uses ``q(n) - alpha^2/(2x) = alpha^4 / (2x (x + s)^2)`` with ``x = 2n + alpha`` and
    ``s = sqrt(x^2 - alpha^2)``.
    """
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("hardy_remainder needs alpha > 0")
    n = np.asarray(n, dtype=float)

    def part(x):
        s = np.sqrt(x * x - a * a)
        return a ** 4 / (2.0 * x * (x + s) ** 2)

    return 0.5 * (part(2 * n + a) + part(2 * n + a + 2))


def hardy_check(params, u, regime: Optional[str] = None) -> tuple[float, float]:
    """Both sides of the optimal Hardy inequality for the sequence `u`.

    ``supercritical`` (``alpha > 0``): plain form against ``sum v(n) u_n^2``.
    ``critical`` (``alpha <= 0``, ``u_0 = 0``): tilde form against ``sum_(n>=1) v~(n) u_n^2``.
    """
    a = _params(params).alpha
    regime = regime or ("supercritical" if a > 0.0 else "critical")
    x = as_dense(u)
    if regime == "supercritical":
        if a <= 0.0:
            raise DomainError("the supercritical regime needs alpha > 0")
        if x.size == 0:
            return 0.0, 0.0
        weights = hardy_weight_profile(a, x.size - 1, critical=False)
        return quadratic_form(a, x, "plain"), math.fsum(weights * x * x)
    if regime == "critical":
        if a > 0.0:
            raise DomainError("the critical regime needs alpha <= 0")
        if x.size and x[0] != 0.0:
            raise DomainError("the critical Hardy inequality needs u_0 = 0")
        if x.size == 0:
            return 0.0, 0.0
        weights = hardy_weight_profile(a, x.size - 1, critical=True)
        return quadratic_form(a, x, "tilde"), math.fsum(weights[1:] * x[1:] ** 2)
    raise ValueError(f"regime must be 'supercritical' or 'critical', got {regime!r}")


def sobolev_ratio(params, u) -> float:
    """``(sum |u_n|^(2+2/alpha) l(n))^(alpha/(alpha+1)) / t~[u]`` for ``alpha > 0``."""
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("sobolev_ratio needs alpha > 0")
    x = as_dense(u)
    form = quadratic_form(a, x, "tilde") if x.size else 0.0
    if form == 0.0:
        raise ZeroDivisionError("the tilde form vanishes only for u = 0")
    logl = log_rising_over_factorial(a, x.size - 1)
    total = math.fsum(np.abs(x) ** (2.0 + 2.0 / a) * np.exp(logl))
    return total ** (a / (a + 1.0)) / form


def birman_schwinger_sequence(params, V, n_max: int) -> np.ndarray:
    """``(sum_(k<=n) v_k l(k)) * (sum_(k>n) w(k))`` for ``n = 0..n_max``; ``alpha > 0``.

    The tail sum is evaluated from the telescoping identity
    ``w(k) = (1/l(k) - 1/l(k+1)) / alpha``, i.e. ``sum_(k>n) w(k) = 1/(alpha l(n+1))``.
    """
    a = _params(params).alpha
    if a <= 0.0:
        raise DomainError("the compactness sequence needs alpha > 0")
    v = _as_potential(V).dense(n_max + 1)
    sw = string_weights(a, n_max + 1)
    head = np.cumsum(v * sw.l[: n_max + 1])
    return head / (a * sw.l[1:])


def random_potential(rng: np.random.Generator, support: int = 30, vmax: float = 5.0,
                     signed: bool = False, density: float = 0.5) -> Potential:
    """Random potential on ``[0, support)``; values uniform in ``(0, vmax]`` or ``[-vmax, vmax]``."""
    mask = rng.random(support) < density
    if not mask.any():
        mask[int(rng.integers(support))] = True
    low = -vmax if signed else 0.0
    values = rng.uniform(low, vmax, support)
    return Potential({int(k): float(values[k]) for k in np.flatnonzero(mask)})


def kneser_counts(params, profile: Callable[[np.ndarray], np.ndarray], Ns: Sequence[int]) -> list:
    """Dirichlet counts of ``H - V`` with ``v_n = profile(n)`` on ``[0, N)`` for each N."""
    out = []
    for N in Ns:
        v = np.asarray(profile(np.arange(N, dtype=float)), dtype=float)
        out.append(neg_count(params, {k: float(v[k]) for k in range(N)}, N))
    return out
