"""Relaxed dynamics of one triple junction with three straight boundaries.

Grain ``j`` sits between boundaries ``j`` and ``j+1``; boundary ``j`` runs from
the junction ``a`` to anchor ``x_j`` and separates grains ``j-1`` and ``j``
(indices cyclic, grain 0 is grain 3). With the surface energy
``1 + Δα²/2`` the system is

    dα/dt = -B(a) α,      da/dt = Σ_j (1 + (α_{j-1} - α_j)²/2) b̂_j,

where ``B`` is the coupling matrix built from the boundary lengths.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .coupling import build_coupling
from .errors import JunctionCollisionError
from .geometry import as_point, edge_vectors, line_tension

SCHEMES = ("euler", "rk4")


@dataclass(frozen=True)
class JunctionState:
    a: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        a = as_point(self.a)
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if alpha.shape != (3,):
            raise ValueError(f"alpha must have 3 components, got {alpha.shape}")
        if not np.all(np.isfinite(alpha)):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "alpha", alpha)

    def vector(self):
        return np.concatenate([self.a, self.alpha])

    @classmethod
    def from_vector(cls, v):
        return cls(a=v[:2], alpha=v[2:5])

    def rolled(self, shift=1):
        return JunctionState(self.a, np.roll(self.alpha, -shift))


@dataclass(frozen=True)
class SimConfig:
    step: float
    t_end: float
    scheme: str = "rk4"
    min_edge_length: float = 1e-6
    record_every: int = 1

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.step > self.t_end:
            raise ValueError("step must not exceed t_end")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.min_edge_length > 0:
            raise ValueError("min_edge_length must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be an integer >= 1")

    @property
    def n_steps(self):
        return max(1, math.ceil(self.t_end / self.step - 1e-9))


@dataclass
class Trajectory:
    """Columnar record of a simulation.

    ``accumulated_dissipation[k]`` approximates the time integral of
    ``|dα/dt|² + |da/dt|²`` from 0 to ``t[k]``.
    """

    anchors: object
    t: np.ndarray
    a: np.ndarray
    alpha: np.ndarray
    energy: np.ndarray
    alpha_rate_sq: np.ndarray
    drag_rate_sq: np.ndarray
    accumulated_dissipation: np.ndarray
    status: str = "complete"
    collision_edge: int | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def stopped_early(self):
        return self.status != "complete"

    def state(self, k):
        return JunctionState(self.a[k], self.alpha[k])

    @property
    def final_state(self):
        return self.state(-1)

    def samples(self):
        for k in range(len(self)):
            yield (
                float(self.t[k]),
                self.state(k),
                float(self.energy[k]),
                float(self.alpha_rate_sq[k]),
                float(self.drag_rate_sq[k]),
            )


def misorientation_vector(alpha):
    """Cyclic differences ``(α3-α1, α1-α2, α2-α3)``: the misorientation of boundaries 1..3."""
    al = np.asarray(alpha, dtype=float)
    return np.array([al[2] - al[0], al[0] - al[1], al[1] - al[2]])


def rhs(state, anchors):
    """Rates ``(dalpha, da)`` at ``state``.

    Raises
    ------
    JunctionCollisionError
        If the junction sits on an anchor (zero boundary length).
    """
    ev = edge_vectors(anchors, state.a)
    for j, length in enumerate(ev.lengths):
        if length == 0.0:
            raise JunctionCollisionError(f"boundary {j + 1} has zero length", edge=j + 1)
    coupling = build_coupling(*ev.lengths)
    dalpha = -(coupling.entries @ state.alpha)
    mis = misorientation_vector(state.alpha)
    units = ev.unit()
    da = np.zeros(2)
    for j in range(3):
        da += line_tension(units[j], mis[j])
    return dalpha, da


def energy(state, anchors):
    """Total boundary energy ``Σ_j (1 + Δα_j²/2) |b_j|``."""
    lengths = edge_vectors(anchors, state.a).lengths
    mis = misorientation_vector(state.alpha)
    return float(np.sum((1.0 + 0.5 * mis * mis) * lengths))


def integrate(init, anchors, config, rhs_fn=None):
    """Integrate from ``init`` over ``[0, config.t_end]`` with a fixed step.

    The accumulated dissipation is carried as an extra state component and
    advanced by the same scheme as the state, so the dissipation identity
    holds to the integrator's order.

    ``rhs_fn`` replaces the right-hand side (signature of :func:`rhs`) and
    routes through a slower generic loop; it exists for negative controls
    and for cross-checking the kernels.

    A boundary shorter than ``config.min_edge_length`` at any stage stops the
    run; the returned trajectory ends at the last admissible state and has
    ``status == "junction_collision"``.
    """
    lengths = edge_vectors(anchors, init.a).lengths
    if np.any(lengths <= config.min_edge_length):
        j = int(np.argmin(lengths)) + 1
        raise JunctionCollisionError(
            f"initial boundary {j} length {lengths[j - 1]:.3e} is not above "
            f"min_edge_length={config.min_edge_length:g}",
            edge=j,
        )
    if rhs_fn is not None:
        return _integrate_generic(init, anchors, config, rhs_fn)
    k = _backend.kernels
    scheme = k.RK4 if config.scheme == "rk4" else k.EULER
    t, y, e, ar, dr, status, edge = k.integrate_junction(
        anchors.points.reshape(-1),
        init.vector(),
        float(config.step),
        float(config.t_end),
        config.n_steps,
        scheme,
        float(config.min_edge_length),
        int(config.record_every),
    )
    return Trajectory(
        anchors=anchors,
        t=t,
        a=y[:, 0:2].copy(),
        alpha=y[:, 2:5].copy(),
        energy=e,
        alpha_rate_sq=ar,
        drag_rate_sq=dr,
        accumulated_dissipation=y[:, 5].copy(),
        status="complete" if status == 0 else "junction_collision",
        collision_edge=None if status == 0 else edge + 1,
        meta={"backend": k.NAME, "scheme": config.scheme, "step": config.step},
    )


class _Diverged(Exception):
    pass


def _integrate_generic(init, anchors, config, rhs_fn):
    min_len = config.min_edge_length

    def f(z):
        if not np.all(np.isfinite(z)):
            raise _Diverged()
        st = JunctionState(z[:2], z[2:5])
        lengths = edge_vectors(anchors, st.a).lengths
        if np.any(lengths < min_len):
            raise JunctionCollisionError("guard", edge=int(np.argmin(lengths)) + 1)
        dalpha, da = rhs_fn(st, anchors)
        if not (np.all(np.isfinite(dalpha)) and np.all(np.isfinite(da))):
            raise _Diverged()
        return np.concatenate([da, dalpha, [dalpha @ dalpha + da @ da]])

    def advance(z, kz, h):
        if config.scheme == "euler":
            return z + h * kz
        k2 = f(z + 0.5 * h * kz)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        return z + (h / 6.0) * (kz + 2.0 * k2 + 2.0 * k3 + k4)

    rows = []
    z = np.concatenate([init.vector(), [0.0]])
    kz = f(z)
    t = 0.0
    rows.append((t, z, kz))
    recorded = 0
    n = config.n_steps
    status, edge = "complete", None
    for k in range(n):
        h = config.step if k < n - 1 else config.t_end - (n - 1) * config.step
        try:
            znew = advance(z, kz, h)
            knew = f(znew)
        except (JunctionCollisionError, _Diverged) as exc:
            if isinstance(exc, _Diverged):
                status = "diverged"
            else:
                status, edge = "junction_collision", exc.edge
            if recorded != k:
                rows.append((t, z, kz))
            break
        z, kz = znew, knew
        t = (k + 1) * config.step if k + 1 < n else config.t_end
        if (k + 1) % config.record_every == 0 or k + 1 == n:
            rows.append((t, z, kz))
            recorded = k + 1
    ts = np.array([r[0] for r in rows])
    zs = np.array([r[1] for r in rows])
    ks = np.array([r[2] for r in rows])
    return Trajectory(
        anchors=anchors,
        t=ts,
        a=zs[:, 0:2],
        alpha=zs[:, 2:5],
        energy=np.array([energy(JunctionState(r[:2], r[2:5]), anchors) for r in zs]),
        alpha_rate_sq=np.sum(ks[:, 2:5] ** 2, axis=1),
        drag_rate_sq=np.sum(ks[:, 0:2] ** 2, axis=1),
        accumulated_dissipation=zs[:, 5],
        status=status,
        collision_edge=edge,
        meta={"backend": "generic", "scheme": config.scheme, "step": config.step},
    )


def dissipation_residual(traj):
    """``max_k |E(t_k) + D(t_k) - E(0)|`` with ``D`` the accumulated dissipation."""
    if len(traj) < 2:
        raise ValueError("need at least two samples")
    return float(np.max(np.abs(traj.energy + traj.accumulated_dissipation - traj.energy[0])))
