"""Pure-Python single-junction kernels.

Mirror of ``_ckernels.pyx`` operation for operation, so both backends
produce the same floating-point results on IEEE hardware. Used when the
compiled extension is unavailable or ``GRAINFLOW_PURE_PYTHON`` is set.

State layout: ``y = (a_x, a_y, alpha_1, alpha_2, alpha_3, q)`` where ``q`` is
the accumulated dissipation. Rates ``k`` use the same layout with
``k[5] = |dalpha/dt|² + |da/dt|²``.
"""
from math import sqrt

import numpy as np

NAME = "python"
EULER = 0
RK4 = 1


def rhs6(x, y, out, min_len):
    """Fill ``out`` with the rates at ``y``; return the first short edge or -1."""
    ax = y[0]
    ay = y[1]
    a1 = y[2]
    a2 = y[3]
    a3 = y[4]
    b1x = x[0] - ax
    b1y = x[1] - ay
    b2x = x[2] - ax
    b2y = x[3] - ay
    b3x = x[4] - ax
    b3y = x[5] - ay
    l1 = sqrt(b1x * b1x + b1y * b1y)
    l2 = sqrt(b2x * b2x + b2y * b2y)
    l3 = sqrt(b3x * b3x + b3y * b3y)
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


def energy5(x, y):
    ax = y[0]
    ay = y[1]
    b1x = x[0] - ax
    b1y = x[1] - ay
    b2x = x[2] - ax
    b2y = x[3] - ay
    b3x = x[4] - ax
    b3y = x[5] - ay
    l1 = sqrt(b1x * b1x + b1y * b1y)
    l2 = sqrt(b2x * b2x + b2y * b2y)
    l3 = sqrt(b3x * b3x + b3y * b3y)
    d1 = y[4] - y[2]
    d2 = y[2] - y[3]
    d3 = y[3] - y[4]
    return (1.0 + 0.5 * d1 * d1) * l1 + (1.0 + 0.5 * d2 * d2) * l2 + (1.0 + 0.5 * d3 * d3) * l3


def junction_rhs(anchors_flat, state5):
    """Rates at a single state; returns ``(rates[6], bad_edge)``."""
    x = [float(v) for v in anchors_flat]
    y = [float(v) for v in state5] + [0.0]
    out = [0.0] * 6
    bad = rhs6(x, y, out, 0.0)
    return np.array(out), bad


def _step(x, y, k1, h, scheme, min_len, ynew):
    n = 6
    if scheme == EULER:
        for i in range(n):
            ynew[i] = y[i] + h * k1[i]
        return -1
    hh = 0.5 * h
    h6 = h / 6.0
    k2 = [0.0] * n
    k3 = [0.0] * n
    k4 = [0.0] * n
    ys = [0.0] * n
    for i in range(n):
        ys[i] = y[i] + hh * k1[i]
    bad = rhs6(x, ys, k2, min_len)
    if bad >= 0:
        return bad
    for i in range(n):
        ys[i] = y[i] + hh * k2[i]
    bad = rhs6(x, ys, k3, min_len)
    if bad >= 0:
        return bad
    for i in range(n):
        ys[i] = y[i] + h * k3[i]
    bad = rhs6(x, ys, k4, min_len)
    if bad >= 0:
        return bad
    for i in range(n):
        ynew[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return -1


def integrate_junction(anchors_flat, state5, h, t_end, n_steps, scheme, min_len, record_every):
    """Fixed-step integration with sample recording and a collision guard.

    Returns ``(t, y, energy, alpha_rate_sq, drag_rate_sq, status, edge)`` where
    ``status`` is 0 for a complete run and 1 for a guard breach at ``edge``.
    """
    x = [float(v) for v in anchors_flat]
    y = [float(v) for v in state5] + [0.0]
    cap = n_steps // record_every + 2
    ts = np.empty(cap)
    ys = np.empty((cap, 6))
    es = np.empty(cap)
    ar = np.empty(cap)
    dr = np.empty(cap)
    k1 = [0.0] * 6
    ynew = [0.0] * 6
    status = 0
    edge = -1
    bad = rhs6(x, y, k1, min_len)
    if bad >= 0:
        return ts[:0], ys[:0], es[:0], ar[:0], dr[:0], 1, bad
    nrec = 0
    last_recorded = -1
    t = 0.0

    def record(t, y, k1):
        ts[nrec] = t
        ys[nrec] = y
        es[nrec] = energy5(x, y)
        ar[nrec] = k1[2] * k1[2] + k1[3] * k1[3] + k1[4] * k1[4]
        dr[nrec] = k1[0] * k1[0] + k1[1] * k1[1]

    record(t, y, k1)
    nrec += 1
    last_recorded = 0
    k = 0
    while k < n_steps:
        hk = h if k < n_steps - 1 else t_end - (n_steps - 1) * h
        bad = _step(x, y, k1, hk, scheme, min_len, ynew)
        if bad < 0:
            knew = [0.0] * 6
            bad = rhs6(x, ynew, knew, min_len)
        if bad >= 0:
            status = 1
            edge = bad
            if last_recorded != k:
                record(t, y, k1)
                nrec += 1
            break
        k += 1
        y, ynew = ynew, y
        k1 = knew
        t = k * h if k < n_steps else t_end
        if k % record_every == 0 or k == n_steps:
            record(t, y, k1)
            nrec += 1
            last_recorded = k
    return ts[:nrec], ys[:nrec], es[:nrec], ar[:nrec], dr[:nrec], status, edge
