# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled single-junction kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

NAME = "cython"
EULER = 0
RK4 = 1


cdef inline int rhs6(const double* x, const double* y, double* out, double min_len) noexcept nogil:
    cdef double ax = y[0]
    cdef double ay = y[1]
    cdef double a1 = y[2]
    cdef double a2 = y[3]
    cdef double a3 = y[4]
    cdef double b1x = x[0] - ax
    cdef double b1y = x[1] - ay
    cdef double b2x = x[2] - ax
    cdef double b2y = x[3] - ay
    cdef double b3x = x[4] - ax
    cdef double b3y = x[5] - ay
    cdef double l1 = sqrt(b1x * b1x + b1y * b1y)
    cdef double l2 = sqrt(b2x * b2x + b2y * b2y)
    cdef double l3 = sqrt(b3x * b3x + b3y * b3y)
    cdef double d1, d2, d3, s1, s2, s3, dax, day, g1, g2, g3
    if l1 < min_len or l1 == 0.0:
        return 0
    if l2 < min_len or l2 == 0.0:
        return 1
    if l3 < min_len or l3 == 0.0:
        return 2
    d1 = a3 - a1
    d2 = a1 - a2
    d3 = a2 - a3
    s1 = 1.0 + 0.5 * d1 * d1
    s2 = 1.0 + 0.5 * d2 * d2
    s3 = 1.0 + 0.5 * d3 * d3
    dax = s1 * b1x / l1 + s2 * b2x / l2 + s3 * b3x / l3
    day = s1 * b1y / l1 + s2 * b2y / l2 + s3 * b3y / l3
    g1 = -((l1 + l2) * a1 - l2 * a2 - l1 * a3)
    g2 = -((l2 + l3) * a2 - l2 * a1 - l3 * a3)
    g3 = -((l3 + l1) * a3 - l1 * a1 - l3 * a2)
    out[0] = dax
    out[1] = day
    out[2] = g1
    out[3] = g2
    out[4] = g3
    out[5] = g1 * g1 + g2 * g2 + g3 * g3 + dax * dax + day * day
    return -1


cdef inline double energy5(const double* x, const double* y) noexcept nogil:
    cdef double ax = y[0]
    cdef double ay = y[1]
    cdef double b1x = x[0] - ax
    cdef double b1y = x[1] - ay
    cdef double b2x = x[2] - ax
    cdef double b2y = x[3] - ay
    cdef double b3x = x[4] - ax
    cdef double b3y = x[5] - ay
    cdef double l1 = sqrt(b1x * b1x + b1y * b1y)
    cdef double l2 = sqrt(b2x * b2x + b2y * b2y)
    cdef double l3 = sqrt(b3x * b3x + b3y * b3y)
    cdef double d1 = y[4] - y[2]
    cdef double d2 = y[2] - y[3]
    cdef double d3 = y[3] - y[4]
    return (1.0 + 0.5 * d1 * d1) * l1 + (1.0 + 0.5 * d2 * d2) * l2 + (1.0 + 0.5 * d3 * d3) * l3


cdef int step(const double* x, const double* y, const double* k1, double h, int scheme,
              double min_len, double* ynew) noexcept nogil:
    cdef int i, bad
    cdef double hh, h6
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double ys[6]
    if scheme == 0:
        for i in range(6):
            ynew[i] = y[i] + h * k1[i]
        return -1
    hh = 0.5 * h
    h6 = h / 6.0
    for i in range(6):
        ys[i] = y[i] + hh * k1[i]
    bad = rhs6(x, ys, k2, min_len)
    if bad >= 0:
        return bad
    for i in range(6):
        ys[i] = y[i] + hh * k2[i]
    bad = rhs6(x, ys, k3, min_len)
    if bad >= 0:
        return bad
    for i in range(6):
        ys[i] = y[i] + h * k3[i]
    bad = rhs6(x, ys, k4, min_len)
    if bad >= 0:
        return bad
    for i in range(6):
        ynew[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return -1


def junction_rhs(anchors_flat, state5):
    cdef double x[6]
    cdef double y[6]
    cdef double out[6]
    cdef int i
    for i in range(6):
        x[i] = anchors_flat[i]
    for i in range(5):
        y[i] = state5[i]
    y[5] = 0.0
    out[:] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    bad = rhs6(x, y, out, 0.0)
    return np.array([out[i] for i in range(6)]), bad


def integrate_junction(anchors_flat, state5, double h, double t_end, Py_ssize_t n_steps,
                       int scheme, double min_len, Py_ssize_t record_every):
    cdef double x[6]
    cdef double y[6]
    cdef double ynew[6]
    cdef double k1[6]
    cdef double knew[6]
    cdef Py_ssize_t cap = n_steps // record_every + 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts = np.empty(cap)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ysr = np.empty((cap, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] es = np.empty(cap)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ar = np.empty(cap)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dr = np.empty(cap)
    cdef double[::1] ts_v = ts
    cdef double[:, ::1] ys_v = ysr
    cdef double[::1] es_v = es
    cdef double[::1] ar_v = ar
    cdef double[::1] dr_v = dr
    cdef int i, bad, status = 0, edge = -1
    cdef Py_ssize_t k = 0, nrec = 0, last_recorded = -1
    cdef double t = 0.0, hk

    for i in range(6):
        x[i] = anchors_flat[i]
    for i in range(5):
        y[i] = state5[i]
    y[5] = 0.0

    bad = rhs6(x, y, k1, min_len)
    if bad >= 0:
        return ts[:0], ysr[:0], es[:0], ar[:0], dr[:0], 1, bad

    with nogil:
        _record(ts_v, ys_v, es_v, ar_v, dr_v, nrec, t, x, y, k1)
        nrec += 1
        last_recorded = 0
        while k < n_steps:
            if k < n_steps - 1:
                hk = h
            else:
                hk = t_end - (n_steps - 1) * h
            bad = step(x, y, k1, hk, scheme, min_len, ynew)
            if bad < 0:
                bad = rhs6(x, ynew, knew, min_len)
            if bad >= 0:
                status = 1
                edge = bad
                if last_recorded != k:
                    _record(ts_v, ys_v, es_v, ar_v, dr_v, nrec, t, x, y, k1)
                    nrec += 1
                break
            k += 1
            for i in range(6):
                y[i] = ynew[i]
                k1[i] = knew[i]
            if k < n_steps:
                t = k * h
            else:
                t = t_end
            if k % record_every == 0 or k == n_steps:
                _record(ts_v, ys_v, es_v, ar_v, dr_v, nrec, t, x, y, k1)
                nrec += 1
                last_recorded = k
    return ts[:nrec], ysr[:nrec], es[:nrec], ar[:nrec], dr[:nrec], status, edge


cdef inline void _record(double[::1] ts, double[:, ::1] ys, double[::1] es, double[::1] ar,
                         double[::1] dr, Py_ssize_t n, double t, const double* x,
                         const double* y, const double* k1) noexcept nogil:
    cdef int i
    ts[n] = t
    for i in range(6):
        ys[n, i] = y[i]
    es[n] = energy5(x, y)
    ar[n] = k1[2] * k1[2] + k1[3] * k1[3] + k1[4] * k1[4]
    dr[n] = k1[0] * k1[0] + k1[1] * k1[1]
