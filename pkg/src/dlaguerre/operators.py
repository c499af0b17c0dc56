"""The discrete Laguerre operator, its ground-state conjugate and finite sections.

Sequences on the nonnegative integers are accepted either as a mapping
``{index: value}`` (sparse, finitely supported) or as a 1-D array whose
position is the index. Results are returned as dense arrays on the smallest
window that contains them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from dlaguerre.errors import DomainError
from dlaguerre.specfun import log_rising_over_factorial

Sequence = Union[Mapping[int, float], np.ndarray, list, tuple]

__all__ = [
    "OperatorParams",
    "TridiagonalMatrix",
    "StringWeights",
    "entries",
    "diagonal",
    "couplings",
    "as_dense",
    "apply_tau",
    "string_weights",
    "quadratic_form",
    "truncate",
    "MarkovWitness",
    "markov_witness_search",
]


@dataclass(frozen=True)
class OperatorParams:
    """The parameter ``alpha > -1`` together with a default numerical tolerance."""

    alpha: float
    tol: float = 1e-10

    def __post_init__(self):
        alpha = float(self.alpha)
        if not alpha > -1.0:
            raise DomainError(f"alpha must exceed -1, got {self.alpha!r}")
        if not self.tol > 0.0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        object.__setattr__(self, "alpha", alpha)


def _params(params) -> OperatorParams:
    return params if isinstance(params, OperatorParams) else OperatorParams(params)


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        e = np.array(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size == 0:
            raise ValueError("diag must be a nonempty 1-D sequence")
        if e.shape != (d.size - 1,):
            raise ValueError(f"offdiag must have length {d.size - 1}, got {e.size}")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[:-1] += self.offdiag * u[1:]
        out[1:] += self.offdiag * u[:-1]
        return out

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.diag)), np.max(np.abs(self.offdiag), initial=0.0)))


@dataclass(frozen=True)
class StringWeights:
    """Lengths ``l(n) = (alpha+1)_n/n!`` and masses ``w(n) = n!/(alpha+1)_(n+1)``."""

    alpha: float
    l: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)

    @property
    def n_max(self) -> int:
        return self.l.size - 1

    def reconstruct(self) -> TridiagonalMatrix:
        """Rebuild the leading block of the operator from the string weights.

        Diagonal ``(1/l(n))(1/w(n-1) + 1/w(n))`` with ``1/w(-1) = 0``, off-diagonal
        ``-1/(w(n) sqrt(l(n) l(n+1)))``.
        """
        inv_w = 1.0 / self.w
        prev = np.concatenate(([0.0], inv_w[:-1]))
        diag = (prev + inv_w) / self.l
        off = -inv_w[:-1] / np.sqrt(self.l[:-1] * self.l[1:])
        return TridiagonalMatrix(diag, off)


def entries(params, n: int) -> tuple[float, float]:
    """Diagonal entry ``2n+1+alpha`` and right neighbour ``-sqrt((n+1)(n+1+alpha))`` of row n."""
    a = _params(params).alpha
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    return 2 * n + 1 + a, -float(np.sqrt((n + 1) * (n + 1 + a)))


def diagonal(alpha: float, size: int) -> np.ndarray:
    """Diagonal ``2n + 1 + alpha`` for ``n < size``."""
    return 2.0 * np.arange(size) + 1.0 + alpha


def couplings(alpha: float, size: int) -> np.ndarray:
    """``a[n] = sqrt(n (n + alpha))`` for ``n < size``; ``a[n]`` couples rows n-1 and n."""
    n = np.arange(size, dtype=float)
    return np.sqrt(n * (n + alpha))


def as_dense(u: Sequence, length: Optional[int] = None) -> np.ndarray:
    """Materialise a sparse or dense sequence on ``[0, length)``."""
    if isinstance(u, Mapping):
        keys = [int(k) for k in u]
        if any(k < 0 for k in keys):
            raise DomainError("sequence indices must be nonnegative")
        size = (max(keys) + 1) if keys else 0
        if length is None:
            length = size
        elif size > length:
            raise DomainError(f"support reaches index {size - 1}, beyond window {length}")
        out = np.zeros(length)
        for k, v in u.items():
            out[int(k)] = float(v)
        return out
    arr = np.asarray(u, dtype=float).ravel()
    if length is None:
        return arr.copy()
    if arr.size > length:
        if np.any(arr[length:] != 0.0):
            raise DomainError(f"support reaches beyond window {length}")
        return arr[:length].copy()
    return np.concatenate((arr, np.zeros(length - arr.size)))


def apply_tau(params, u: Sequence, variant: str = "plain") -> np.ndarray:
    """Apply the difference expression to a finitely supported sequence.

    ``plain``: ``-sqrt(n(n+alpha)) u[n-1] + (2n+1+alpha) u[n] - sqrt((n+1)(n+1+alpha)) u[n+1]``.
    ``tilde``: ``-n u[n-1] + (2n+1+alpha) u[n] - (n+1+alpha) u[n+1]``.

    The result lives on a window one longer than the support of `u`. For a
    dense input the entries are taken to vanish past the end of the array.
    """
    a = _params(params).alpha
    x = as_dense(u)
    size = x.size + 1
    x = np.concatenate((x, [0.0, 0.0]))
    n = np.arange(size, dtype=float)
    if variant == "plain":
        left = np.sqrt(n * (n + a))
        right = np.sqrt((n + 1) * (n + 1 + a))
    elif variant == "tilde":
        left = n
        right = n + 1 + a
    else:
        raise ValueError(f"variant must be 'plain' or 'tilde', got {variant!r}")
    below = np.concatenate(([0.0], x[: size - 1]))
    return -left * below + (2 * n + 1 + a) * x[:size] - right * x[1 : size + 1]


def string_weights(params, n_max: int) -> StringWeights:
    """Tables of the string lengths and masses for ``n = 0..n_max``."""
    a = _params(params).alpha
    log_l = log_rising_over_factorial(a, n_max)
    n = np.arange(n_max + 1, dtype=float)
    l = np.exp(log_l)
    w = np.exp(-log_l) / (n + 1 + a)
    return StringWeights(a, l, w)


def quadratic_form(params, u: Sequence, variant: str = "plain") -> float:
    """Energy of a finitely supported sequence.

    ``plain``: ``sum |sqrt(n+alpha+1) u[n] - sqrt(n+1) u[n+1]|^2``, which equals
    ``<H u, u>``. ``tilde``: ``sum ((alpha+1)_(n+1)/n!) |u[n] - u[n+1]|^2``, the
    form of the conjugated operator in the space weighted by ``l(n)``.
    """
    a = _params(params).alpha
    x = as_dense(u)
    if x.size == 0:
        return 0.0
    x = np.concatenate((x, [0.0]))
    n = np.arange(x.size - 1, dtype=float)
    if variant == "plain":
        diff = np.sqrt(n + a + 1) * x[:-1] - np.sqrt(n + 1) * x[1:]
        return float(np.sum(diff * diff))
    if variant == "tilde":
        sw = string_weights(a, x.size - 2)
        diff = x[:-1] - x[1:]
        return float(np.sum(diff * diff / sw.w))
    raise ValueError(f"variant must be 'plain' or 'tilde', got {variant!r}")


def _potential_entries(V) -> dict:
    if V is None:
        return {}
    if isinstance(V, Mapping):
        return {int(k): float(v) for k, v in V.items()}
    return {int(k): float(v) for k, v in V.entries.items()}


def truncate(params, N: int, V=None) -> TridiagonalMatrix:
    """Leading ``N x N`` block of ``H - V`` (Dirichlet cut).

    `V` may be a mapping ``{n: v_n}`` or any object with an ``entries`` mapping.
    """
    a = _params(params).alpha
    if N < 1:
        raise DomainError(f"N must be positive, got {N!r}")
    diag = diagonal(a, N)
    for k, v in _potential_entries(V).items():
        if not 0 <= k < N:
            raise DomainError(f"potential index {k} lies outside the truncation [0, {N})")
        diag[k] -= v
    return TridiagonalMatrix(diag, -couplings(a, N + 1)[1:N])


@dataclass(frozen=True)
class MarkovWitness:
    """A positive sequence whose energy grows when it is capped at 1."""

    u: np.ndarray
    form_capped: float
    form_original: float


def markov_witness_search(params, trials: int = 2000, support: int = 6,
                          seed: int = 0) -> Optional[MarkovWitness]:
    """Randomised search for ``u > 0`` with ``t[min(u, 1)] > t[u]``.

    Such a ``u`` shows that the plain form is not a Dirichlet form. The search
    returns the first witness found, or ``None``; ``None`` proves nothing.
    """
    p = _params(params)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        size = int(rng.integers(1, support + 1))
        u = rng.uniform(0.0, 3.0, size)
        capped = np.minimum(u, 1.0)
        f_cap = quadratic_form(p, capped)
        f_u = quadratic_form(p, u)
        if f_cap > f_u * (1.0 + 1e-12):
            return MarkovWitness(u, f_cap, f_u)
    return None
