"""Pure-Python versions of the sequential recurrences.

These are the reference implementations; ``_ckernels.pyx`` mirrors them
line for line. Every function takes and returns plain floats or 1-D float64
arrays so the two backends are interchangeable.
"""
import numpy as np

PIVMIN = 1e-300


def sturm_count(diag, offdiag, shift=0.0):
    """Count eigenvalues strictly below `shift` of a symmetric tridiagonal matrix.

    Uses the pivots of the LDL^T factorisation of ``T - shift*I``
    (Sylvester's law of inertia). An exactly vanishing pivot is nudged to
    ``+PIVMIN`` so that eigenvalues sitting exactly at `shift` are not counted.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = diag.shape[0]
    count = 0
    q = diag[0] - shift
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = PIVMIN
        e = offdiag[i - 1]
        q = (diag[i] - shift) - e * e / q
        if q < 0.0:
            count += 1
    return count


def stieltjes_cf(lengths, masses, y):
    """Backward evaluation of 1/(y*l0 + 1/(w0 + 1/(y*l1 + 1/(w1 + ...)))).

    The fraction is cut after ``len(lengths)`` levels with a zero tail.
    All partial denominators are positive for y > 0, so the sweep never
    divides by zero.
    """
    val = 0.0
    for k in range(len(lengths) - 1, -1, -1):
        val = 1.0 / (masses[k] + val)
        val = 1.0 / (y * lengths[k] + val)
    return float(val)


def minimal_ratios(a, b, x, n_start):
    """Ratios r_n = psi_n / psi_{n-1}, n = 1..n_start, of the minimal solution.

    The recurrence is ``-a[n] u[n-1] + (b[n] - x) u[n] - a[n+1] u[n+1] = 0``;
    `a` must have length ``n_start + 2`` and `b` length ``n_start + 1``.
    Miller's backward sweep starts from r[n_start + 1] = 0.
    """
    r = np.zeros(n_start + 1)
    nxt = 0.0
    for n in range(n_start, 0, -1):
        nxt = a[n] / ((b[n] - x) - a[n + 1] * nxt)
        r[n] = nxt
    return r


def forward_three_term(a, b, z, u0, u1, n_max):
    """Forward sweep ``a[n+1] u[n+1] = (b[n] - z) u[n] - a[n] u[n-1]`` from seeds u0, u1."""
    u = np.empty(n_max + 1)
    u[0] = u0
    if n_max >= 1:
        u[1] = u1
    for n in range(1, n_max):
        u[n + 1] = ((b[n] - z) * u[n] - a[n] * u[n - 1]) / a[n + 1]
    return u
