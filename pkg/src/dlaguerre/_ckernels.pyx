# Compiled twins of dlaguerre._pykernels; keep the two in lockstep.
import numpy as np

cdef double PIVMIN = 1e-300


def sturm_count(diag, offdiag, double shift=0.0):
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] e = np.ascontiguousarray(offdiag, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], i
    cdef Py_ssize_t count = 0
    cdef double q, ei
    q = d[0] - shift
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = PIVMIN
        ei = e[i - 1]
        q = (d[i] - shift) - ei * ei / q
        if q < 0.0:
            count += 1
    return count


def stieltjes_cf(lengths, masses, double y):
    cdef const double[::1] l = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(masses, dtype=np.float64)
    cdef Py_ssize_t k
    cdef double val = 0.0
    for k in range(l.shape[0] - 1, -1, -1):
        val = 1.0 / (w[k] + val)
        val = 1.0 / (y * l[k] + val)
    return val


def minimal_ratios(a, b, double x, Py_ssize_t n_start):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.zeros(n_start + 1)
    cdef double[::1] r = out
    cdef double nxt = 0.0
    cdef Py_ssize_t n
    for n in range(n_start, 0, -1):
        nxt = av[n] / ((bv[n] - x) - av[n + 1] * nxt)
        r[n] = nxt
    return out


def forward_three_term(a, b, double z, double u0, double u1, Py_ssize_t n_max):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty(n_max + 1)
    cdef double[::1] u = out
    cdef Py_ssize_t n
    u[0] = u0
    if n_max >= 1:
        u[1] = u1
    for n in range(1, n_max):
        u[n + 1] = ((bv[n] - z) * u[n] - av[n] * u[n - 1]) / av[n + 1]
    return out
