"""Fixed anchors, edge vectors, line tension and the Fermat-Torricelli point.

All routines are pure functions on small numpy arrays.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolationError,
    ConvergenceError,
    InvalidGeometryError,
    NoInteriorEquilibriumError,
)

MIN_ANCHOR_SEPARATION = 1e-12
MIN_TRIANGLE_AREA = 1e-14
SNAP_RADIUS = 1e-12
SNAP_PERTURBATION = 1e-9


def as_point(p):
    """Return ``p`` as a finite float array of shape (2,)."""
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {arr}")
    return arr


@dataclass(frozen=True)
class AnchorSet:
    """The three fixed endpoints of the boundaries meeting at a junction."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (3, 2):
            raise InvalidGeometryError(f"anchors must have shape (3, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidGeometryError("anchor coordinates must be finite")
        for i in range(3):
            for j in range(i + 1, 3):
                if np.linalg.norm(pts[i] - pts[j]) < MIN_ANCHOR_SEPARATION:
                    raise InvalidGeometryError(f"anchors {i + 1} and {j + 1} coincide")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, x1, x2, x3):
        return cls(np.array([x1, x2, x3], dtype=float))

    def __getitem__(self, j):
        return self.points[j]

    def area(self):
        (x1, y1), (x2, y2), (x3, y3) = self.points
        return 0.5 * abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))

    def rolled(self, shift=1):
        """Anchors relabelled cyclically: new j-th anchor is old (j + shift)-th."""
        return AnchorSet(np.roll(self.points, -shift, axis=0))


def equilateral_anchors(radius=1.0):
    """Vertices of an equilateral triangle centred at the origin, first vertex on +x."""
    s = np.sqrt(3.0) / 2.0
    return AnchorSet(radius * np.array([[1.0, 0.0], [-0.5, s], [-0.5, -s]]))


@dataclass(frozen=True)
class EdgeVectors:
    """Vectors ``b_j = x_j - a`` from the junction to each anchor and their norms."""

    b: np.ndarray
    lengths: np.ndarray

    def unit(self):
        return self.b / self.lengths[:, None]


def edge_vectors(anchors, a):
    b = anchors.points - as_point(a)
    return EdgeVectors(b=b, lengths=np.sqrt(np.einsum("ij,ij->i", b, b)))


@dataclass(frozen=True)
class AngleCondition:
    flags: tuple
    sums: np.ndarray
    ok: bool


def angle_condition(anchors):
    """Evaluate ``|sum_{j != i} (x_j - x_i)/|x_j - x_i|| > 1`` at each vertex.

    The inequality holds at vertex ``i`` exactly when the interior angle there
    is below 120 degrees.
    """
    if anchors.area() < MIN_TRIANGLE_AREA:
        raise InvalidGeometryError("anchors are collinear (zero-area triangle)")
    pts = anchors.points
    sums = np.empty(3)
    for i in range(3):
        acc = np.zeros(2)
        for j in range(3):
            if j != i:
                d = pts[j] - pts[i]
                acc += d / np.linalg.norm(d)
        sums[i] = np.linalg.norm(acc)
    flags = tuple(bool(s > 1.0) for s in sums)
    return AngleCondition(flags=flags, sums=sums, ok=all(flags))


def fermat_objective(anchors, a):
    """Sum of distances from ``a`` to the three anchors."""
    return float(np.sum(edge_vectors(anchors, a).lengths))


def unit_sum_residual(anchors, a):
    """Norm of the sum of unit vectors from ``a`` toward the anchors."""
    ev = edge_vectors(anchors, a)
    return float(np.linalg.norm(ev.unit().sum(axis=0)))


@dataclass(frozen=True)
class EquilibriumResult:
    a_inf: np.ndarray
    b_inf: EdgeVectors
    residual: float
    iterations: int
    converged: bool


def fermat_point(anchors, tol=1e-12, max_iter=10_000):
    """Locate the interior Fermat point by safeguarded Weiszfeld iteration.

    Each step also tries a Newton update on the distance sum and keeps
    whichever candidate has the smaller gradient norm; near-120 degree
    triangles otherwise stall in plain Weiszfeld.

    Parameters
    ----------
    anchors : AnchorSet
    tol : float
        Stop once the norm of the summed unit edge vectors is ``<= tol``.
    max_iter : int

    Returns
    -------
    EquilibriumResult

    Raises
    ------
    NoInteriorEquilibriumError
        If some angle of the anchor triangle is at least 120 degrees.
    ConvergenceError
        If ``max_iter`` is exhausted; ``last_iterate`` holds the final point.
    """
    cond = angle_condition(anchors)
    if not cond.ok:
        bad = [i + 1 for i, f in enumerate(cond.flags) if not f]
        raise NoInteriorEquilibriumError(
            f"angle at anchor(s) {bad} is >= 120 degrees; the minimiser is a vertex"
        )
    pts = anchors.points
    a = pts.mean(axis=0)
    residual = unit_sum_residual(anchors, a)
    it = 0
    while residual > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"Weiszfeld iteration did not reach residual {tol:g} in {max_iter} steps "
                f"(last residual {residual:.3e})",
                last_iterate=a,
            )
        a_w = _weiszfeld_step(pts, a)
        a_n = _newton_step(pts, a)
        it += 1
        r_w = unit_sum_residual(anchors, a_w)
        r_n = unit_sum_residual(anchors, a_n) if a_n is not None else np.inf
        a, residual = (a_n, r_n) if r_n < r_w else (a_w, r_w)
        d = np.linalg.norm(pts - a, axis=1)
        k = int(np.argmin(d))
        if d[k] < SNAP_RADIUS:
            # push back inside along the direction from the anchor to the opposite side
            others = np.delete(pts, k, axis=0).mean(axis=0)
            away = others - pts[k]
            a = pts[k] + SNAP_PERTURBATION * away / np.linalg.norm(away)
            residual = unit_sum_residual(anchors, a)
    return EquilibriumResult(
        a_inf=a,
        b_inf=edge_vectors(anchors, a),
        residual=residual,
        iterations=it,
        converged=True,
    )


def _weiszfeld_step(pts, a):
    w = 1.0 / np.linalg.norm(pts - a, axis=1)
    return (w[:, None] * pts).sum(axis=0) / w.sum()


def _newton_step(pts, a):
    # Newton on grad f = -sum b_hat; Hessian sum (I - b_hat b_hat^T)/l is SPD off the anchors.
    b = pts - a
    l = np.linalg.norm(b, axis=1)
    u = b / l[:, None]
    grad = -u.sum(axis=0)
    hess = sum((np.eye(2) - np.outer(u[j], u[j])) / l[j] for j in range(3))
    try:
        step = np.linalg.solve(hess, grad)
    except np.linalg.LinAlgError:
        return None
    cand = a - step
    if not np.all(np.isfinite(cand)):
        return None
    return cand


def line_tension(edge, misorientation):
    """Line tension ``(1 + dα²/2) * edge`` for a unit tangent ``edge``."""
    e = np.asarray(edge, dtype=float)
    if abs(np.linalg.norm(e) - 1.0) > 1e-12:
        raise ContractViolationError(f"edge must be a unit vector, |edge| = {np.linalg.norm(e)!r}")
    return (1.0 + 0.5 * misorientation * misorientation) * e
