# cython: language_level=3
"""Compiled versions of the simplex and post-optimal inner loops."""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()


def eta_update(double[:, ::1] binv, const double[::1] d, Py_ssize_t r):
    cdef Py_ssize_t m = binv.shape[0], n = binv.shape[1], i, j
    cdef double inv_piv = 1.0 / d[r]
    cdef double f
    for j in range(n):
        binv[r, j] *= inv_piv
    for i in range(m):
        if i == r:
            continue
        f = d[i]
        if f == 0.0:
            continue
        for j in range(n):
            binv[i, j] -= f * binv[r, j]


def ratio_test(const double[::1] x, const double[::1] d, const long[::1] basis,
               double pivot_tol, double tie_tol):
    cdef Py_ssize_t m = x.shape[0], i, best = -1
    cdef double theta = INFINITY, ratio, xi
    for i in range(m):
        if d[i] > pivot_tol:
            xi = x[i] if x[i] > 0.0 else 0.0
            ratio = xi / d[i]
            if ratio < theta:
                theta = ratio
    if theta == INFINITY:
        return -1, INFINITY
    cdef double cutoff = theta + tie_tol * (1.0 + theta)
    for i in range(m):
        if d[i] > pivot_tol:
            xi = x[i] if x[i] > 0.0 else 0.0
            if xi / d[i] <= cutoff and (best == -1 or basis[i] < basis[best]):
                best = i
    xi = x[best] if x[best] > 0.0 else 0.0
    return best, xi / d[best]


def sa_bounds(const double[::1] x, const double[::1] alpha, double tol):
    cdef Py_ssize_t m = x.shape[0], j
    cdef double dmin = -INFINITY, dmax = INFINITY, xj, a, q
    for j in range(m):
        a = alpha[j]
        xj = x[j] if x[j] > 0.0 else 0.0
        if a < -tol:
            q = -xj / a
            if q < dmax:
                dmax = q
        elif a > tol:
            q = -xj / a
            if q > dmin:
                dmin = q
    return dmin, dmax


def itr_fractions(const double[:, ::1] R, const double[::1] x,
                  const double[::1] loads, double alpha_tol, double feas_tol):
    cdef Py_ssize_t m = R.shape[0], nb = R.shape[1], i, k
    cdef double denom, a
    out = np.empty(m)
    cdef double[::1] o = out
    for i in range(m):
        denom = 0.0
        for k in range(nb):
            a = R[i, k]
            if fabs(a) > alpha_tol:
                denom += fabs(a * loads[k])
        if denom == 0.0:
            o[i] = INFINITY
        elif x[i] <= feas_tol:
            o[i] = 0.0
        else:
            o[i] = x[i] / denom
    return out


def itr_bounds(const double[:, ::1] R, const double[::1] delta,
               const double[::1] loads, double alpha_tol):
    cdef Py_ssize_t m = R.shape[0], nb = R.shape[1], i, j
    cdef double up, down, a, scale
    dec = np.empty(nb)
    inc = np.empty(nb)
    cdef double[::1] dv = dec
    cdef double[::1] iv = inc
    for j in range(nb):
        up = INFINITY
        down = INFINITY
        for i in range(m):
            a = R[i, j]
            if a < -alpha_tol:
                if delta[i] < up:
                    up = delta[i]
            elif a > alpha_tol:
                if delta[i] < down:
                    down = delta[i]
        scale = fabs(loads[j])
        if scale == 0.0:
            iv[j] = 0.0
            dv[j] = 0.0
        else:
            iv[j] = scale * up
            dv[j] = -scale * down
    return dec, inc
