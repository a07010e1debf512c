"""Picard iteration for the single-junction system on a certified time window.

The ODE is recast as the integral maps

    Phi(α, a)(t) = α0 - ∫_0^t B(a(τ)) α(τ) dτ
    Psi(α, a)(t) = a0 + ∫_0^t Σ_j σ_j(α(τ)) b̂_j(a(τ)) dτ

and iterated from the constant pair ``(α0, a0)``. The window length comes
from explicit constants that make ``(Phi, Psi)`` a 3/4-contraction on curves
with ``sup|α| <= 2|α0|`` and ``sup|a - a_inf| <= 2|a0 - a_inf|``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractionFailureError, JunctionCollisionError

CONTRACTION_FACTOR = 0.75


@dataclass(frozen=True)
class ExistenceCertificate:
    C1: float
    C2: float
    T_exist: float | None
    hypothesis_ok: bool
    terms: tuple

    def grid(self, n):
        if self.T_exist is None:
            raise ValueError("certificate carries no existence time")
        return np.linspace(0.0, self.T_exist, n + 1)


@dataclass
class DiscreteCurvePair:
    grid: np.ndarray
    alpha_path: np.ndarray
    a_path: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        if self.alpha_path.shape != (n, 3) or self.a_path.shape != (n, 2):
            raise ValueError("paths must match the grid length")

    @classmethod
    def constant(cls, grid, init):
        n = len(grid)
        return cls(grid=np.asarray(grid, dtype=float),
                   alpha_path=np.tile(init.alpha, (n, 1)),
                   a_path=np.tile(init.a, (n, 1)))


def _safe_div(num, den):
    if den == 0.0:
        return math.inf
    return num / den


def existence_constants(init, anchors, eq):
    """Constants ``C1 = 2|α0|``, ``C2 = 2|a0 - a_inf|`` and the existence time.

    The time is the minimum of four candidates; a candidate whose defining
    quantity vanishes (``|α0| = 0`` or ``a0 = a_inf``) is taken as +inf.
    When ``|a0 - a_inf| < |b_inf_j|/2`` fails for some ``j`` the certificate
    has ``hypothesis_ok=False`` and no time.
    """
    alpha_norm = float(np.linalg.norm(init.alpha))
    dist = float(np.linalg.norm(init.a - eq.a_inf))
    b = eq.b_inf.lengths
    C1 = 2.0 * alpha_norm
    C2 = 2.0 * dist
    ok = bool(np.all(dist < 0.5 * b))
    if not ok:
        return ExistenceCertificate(C1=C1, C2=C2, T_exist=None, hypothesis_ok=False, terms=())
    growth = 1.0 + 8.0 * alpha_norm**2
    t1 = _safe_div(1.0, 12.0 * float(np.sum(b)))
    t2 = math.inf if dist == 0.0 else dist / (3.0 * growth)
    t3 = math.inf if alpha_norm == 0.0 else 1.0 / (96.0 * alpha_norm)
    t4 = _safe_div(1.0, 12.0 * growth * float(np.sum(1.0 / (b - 2.0 * dist))))
    terms = (t1, t2, t3, t4)
    return ExistenceCertificate(C1=C1, C2=C2, T_exist=min(terms), hypothesis_ok=True, terms=terms)


def _cumtrapz(values, grid):
    dt = np.diff(grid)
    inc = 0.5 * (values[1:] + values[:-1]) * dt.reshape((-1,) + (1,) * (values.ndim - 1))
    out = np.zeros_like(values)
    out[1:] = np.cumsum(inc, axis=0)
    return out


def _lengths_and_units(anchors, a_path):
    b = anchors.points[None, :, :] - a_path[:, None, :]
    lengths = np.sqrt(np.sum(b * b, axis=2))
    if np.any(lengths == 0.0):
        k, j = np.argwhere(lengths == 0.0)[0]
        raise JunctionCollisionError(
            f"boundary {j + 1} has zero length at grid point {k}", edge=int(j) + 1
        )
    return lengths, b / lengths[:, :, None]


def phi_integrand(pair, anchors):
    """``B(a(t)) α(t)`` at every grid point, shape (n, 3)."""
    l, _ = _lengths_and_units(anchors, pair.a_path)
    al = pair.alpha_path
    l1, l2, l3 = l[:, 0], l[:, 1], l[:, 2]
    a1, a2, a3 = al[:, 0], al[:, 1], al[:, 2]
    return np.stack(
        [
            (l1 + l2) * a1 - l2 * a2 - l1 * a3,
            -l2 * a1 + (l2 + l3) * a2 - l3 * a3,
            -l1 * a1 - l3 * a2 + (l3 + l1) * a3,
        ],
        axis=1,
    )


def psi_integrand(pair, anchors):
    """``Σ_j σ_j b̂_j`` at every grid point, shape (n, 2)."""
    _, units = _lengths_and_units(anchors, pair.a_path)
    al = pair.alpha_path
    mis = np.stack([al[:, 2] - al[:, 0], al[:, 0] - al[:, 1], al[:, 1] - al[:, 2]], axis=1)
    sigma = 1.0 + 0.5 * mis * mis
    return np.sum(sigma[:, :, None] * units, axis=1)


def apply_phi(pair, init, anchors):
    if pair.grid[0] != 0.0:
        raise ValueError("grid must start at t = 0")
    return init.alpha[None, :] - _cumtrapz(phi_integrand(pair, anchors), pair.grid)


def apply_psi(pair, init, anchors):
    if pair.grid[0] != 0.0:
        raise ValueError("grid must start at t = 0")
    return init.a[None, :] + _cumtrapz(psi_integrand(pair, anchors), pair.grid)


def sup_distance(p, q):
    """``max_t |Δα| + max_t |Δa|``."""
    da = np.max(np.linalg.norm(p.alpha_path - q.alpha_path, axis=1))
    dx = np.max(np.linalg.norm(p.a_path - q.a_path, axis=1))
    return float(da + dx)


@dataclass
class PicardResult:
    pair: DiscreteCurvePair
    ratios: list
    distances: list
    iterates: list
    iterations: int


def solve_fixed_point(init, anchors, cert, grid_n=1024, tol=1e-12, max_iter=200,
                      keep_iterates=False, ratio_floor=1e-13):
    """Iterate ``(Phi, Psi)`` on ``[0, T_exist]`` until successive iterates are within ``tol``.

    Returns a :class:`PicardResult`; ``ratios[k]`` is ``d_{k+1}/d_k`` for
    successive iterate distances, recorded only while ``d_k`` exceeds
    ``ratio_floor`` (below that the ratio measures round-off, not the map).
    Three consecutive ratios above 1 raise :class:`ContractionFailureError`.
    """
    if not cert.hypothesis_ok:
        raise ValueError("certificate hypothesis does not hold; no contraction window")
    grid = cert.grid(grid_n)
    pair = DiscreteCurvePair.constant(grid, init)
    iterates = [pair] if keep_iterates else []
    distances, ratios = [], []
    growing = 0
    for it in range(1, max_iter + 1):
        new = DiscreteCurvePair(grid, apply_phi(pair, init, anchors), apply_psi(pair, init, anchors))
        d = sup_distance(new, pair)
        if distances and distances[-1] > ratio_floor:
            r = d / distances[-1]
            ratios.append(r)
            growing = growing + 1 if r > 1.0 else 0
            if growing >= 3:
                raise ContractionFailureError(
                    f"iterate distance grew for 3 consecutive steps (last ratio {r:.3f})", ratios
                )
        distances.append(d)
        pair = new
        if keep_iterates:
            iterates.append(pair)
        if d < tol:
            return PicardResult(pair, ratios, distances, iterates, it)
    raise ContractionFailureError(f"no convergence to {tol:g} in {max_iter} iterations", ratios)


def ode_residual(pair, anchors):
    """Centered-difference residual of the ODE at interior grid points (max norm)."""
    g = pair.grid
    dt = g[2:] - g[:-2]
    dalpha = (pair.alpha_path[2:] - pair.alpha_path[:-2]) / dt[:, None]
    da = (pair.a_path[2:] - pair.a_path[:-2]) / dt[:, None]
    inner = DiscreteCurvePair(g[1:-1], pair.alpha_path[1:-1], pair.a_path[1:-1])
    r_alpha = dalpha + phi_integrand(inner, anchors)
    r_a = da - psi_integrand(inner, anchors)
    return float(max(np.max(np.abs(r_alpha)), np.max(np.abs(r_a))))
