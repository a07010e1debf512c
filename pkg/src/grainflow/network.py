"""Networks of straight grain boundaries meeting at mobile triple junctions.

A network is a set of grains (each with a lattice orientation), nodes that
are either mobile triple junctions or fixed anchors, and straight boundaries
joining two nodes and separating two grains. The relaxed dynamics are

    dα_k/dt = -Σ_{boundaries j of k} |Γ_j| (α_k - α_other(j))
    da_l/dt =  Σ_{boundaries j at l} (1 + Δ_jα²/2) * unit vector from a_l along Γ_j

which is the gradient flow of ``E = Σ_j (1 + Δ_jα²/2) |Γ_j|``.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CriticalEventError, UsageError

JUNCTION = "triple_junction"
ANCHOR = "anchor"
NODE_KINDS = (JUNCTION, ANCHOR)
REQUIRED_DEGREE = {JUNCTION: 3, ANCHOR: 1}


@dataclass(frozen=True)
class Grain:
    id: int
    orientation: float


@dataclass(frozen=True)
class NetworkNode:
    id: int
    kind: str
    position: tuple

    @property
    def mobile(self):
        return self.kind == JUNCTION


@dataclass(frozen=True)
class BoundarySegment:
    id: int
    endpoints: tuple
    grains: tuple


@dataclass
class NetworkState:
    positions: dict
    orientations: dict

    def copy(self):
        return NetworkState(
            positions={k: np.array(v, dtype=float) for k, v in self.positions.items()},
            orientations=dict(self.orientations),
        )


@dataclass
class GrainNetwork:
    """Topology plus anchor positions.

    Junction node positions and grain orientations held here are the
    *initial* values; the evolving values live in :class:`NetworkState`.
    """

    grains: list
    nodes: list
    boundaries: list

    @property
    def counts(self):
        n_tj = sum(1 for n in self.nodes if n.mobile)
        return {"grains": len(self.grains), "boundaries": len(self.boundaries), "junctions": n_tj}

    def initial_state(self):
        return NetworkState(
            positions={n.id: np.array(n.position, dtype=float) for n in self.nodes if n.mobile},
            orientations={g.id: float(g.orientation) for g in self.grains},
        )

    @cached_property
    def topology(self):
        problems = validate_network(self, check_lengths=False)
        if problems:
            raise UsageError("invalid network: " + "; ".join(problems))
        return _Topology(self)


class _Topology:
    """Index arrays for vectorised evaluation."""

    def __init__(self, net):
        self.grain_ids = [g.id for g in net.grains]
        self.grain_index = {gid: i for i, gid in enumerate(self.grain_ids)}
        self.junction_ids = [n.id for n in net.nodes if n.mobile]
        self.anchor_ids = [n.id for n in net.nodes if not n.mobile]
        self.n_tj = len(self.junction_ids)
        self.n_sg = len(self.grain_ids)
        # stacked point array: junctions first, then anchors
        point_index = {nid: i for i, nid in enumerate(self.junction_ids + self.anchor_ids)}
        by_id = {n.id: n for n in net.nodes}
        self.anchor_points = np.array(
            [by_id[nid].position for nid in self.anchor_ids], dtype=float
        ).reshape(-1, 2)
        self.boundary_ids = [b.id for b in net.boundaries]
        self.p = np.array([point_index[b.endpoints[0]] for b in net.boundaries], dtype=int)
        self.q = np.array([point_index[b.endpoints[1]] for b in net.boundaries], dtype=int)
        self.g1 = np.array([self.grain_index[b.grains[0]] for b in net.boundaries], dtype=int)
        self.g2 = np.array([self.grain_index[b.grains[1]] for b in net.boundaries], dtype=int)
        self.p_mobile = self.p < self.n_tj
        self.q_mobile = self.q < self.n_tj

    def pack(self, state):
        pos = np.array([state.positions[j] for j in self.junction_ids], dtype=float).reshape(-1)
        ori = np.array([state.orientations[g] for g in self.grain_ids], dtype=float)
        return np.concatenate([pos, ori])

    def unpack(self, y):
        pos = y[: 2 * self.n_tj].reshape(-1, 2)
        return NetworkState(
            positions={j: pos[i].copy() for i, j in enumerate(self.junction_ids)},
            orientations={g: float(y[2 * self.n_tj + i]) for i, g in enumerate(self.grain_ids)},
        )

    def points(self, y):
        return np.vstack([y[: 2 * self.n_tj].reshape(-1, 2), self.anchor_points])

    def segments(self, y):
        pts = self.points(y)
        d = pts[self.q] - pts[self.p]
        return d, np.sqrt(np.sum(d * d, axis=1))

    def misorientation(self, y):
        ori = y[2 * self.n_tj:]
        return ori[self.g1] - ori[self.g2]

    def energy(self, y):
        _, lengths = self.segments(y)
        mis = self.misorientation(y)
        return float(np.sum((1.0 + 0.5 * mis * mis) * lengths))

    def rates(self, y, gamma=1.0, eta=1.0):
        d, lengths = self.segments(y)
        if np.any(lengths == 0.0):
            j = int(np.flatnonzero(lengths == 0.0)[0])
            raise CriticalEventError(
                f"boundary {self.boundary_ids[j]} has zero length", boundary=self.boundary_ids[j]
            )
        mis = self.misorientation(y)
        sigma = 1.0 + 0.5 * mis * mis
        tension = (sigma / lengths)[:, None] * d  # at endpoint p, pointing toward q
        dpos = np.zeros((self.n_tj, 2))
        np.add.at(dpos, self.p[self.p_mobile], tension[self.p_mobile])
        np.add.at(dpos, self.q[self.q_mobile], -tension[self.q_mobile])
        dori = np.zeros(self.n_sg)
        flux = lengths * mis
        np.add.at(dori, self.g1, -flux)
        np.add.at(dori, self.g2, flux)
        return np.concatenate([eta * dpos.reshape(-1), gamma * dori])

    def laplacian(self, y):
        _, lengths = self.segments(y)
        lap = np.zeros((self.n_sg, self.n_sg))
        for j in range(len(lengths)):
            a, b = self.g1[j], self.g2[j]
            lap[a, a] += lengths[j]
            lap[b, b] += lengths[j]
            lap[a, b] -= lengths[j]
            lap[b, a] -= lengths[j]
        return lap

    def min_junction_separation(self, y):
        pos = y[: 2 * self.n_tj].reshape(-1, 2)
        if self.n_tj < 2:
            return math.inf, None
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=2))
        dist[np.diag_indices(self.n_tj)] = np.inf
        i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
        return float(dist[i, j]), (self.junction_ids[min(i, j)], self.junction_ids[max(i, j)])


def validate_network(net, check_lengths=True):
    """Return a list of human-readable violations; empty means the network is usable."""
    problems = []
    for label, items in (("grain", net.grains), ("node", net.nodes), ("boundary", net.boundaries)):
        seen = set()
        for it in items:
            if it.id in seen:
                problems.append(f"duplicate {label} id {it.id}")
            seen.add(it.id)
    nodes = {n.id: n for n in net.nodes}
    grains = {g.id for g in net.grains}
    for n in net.nodes:
        if n.kind not in NODE_KINDS:
            problems.append(f"node {n.id} has unknown kind {n.kind!r}")
        if not np.all(np.isfinite(np.asarray(n.position, dtype=float))):
            problems.append(f"node {n.id} has a non-finite position")
    for g in net.grains:
        if not math.isfinite(g.orientation):
            problems.append(f"grain {g.id} has a non-finite orientation")
    degree = {nid: 0 for nid in nodes}
    pairs = {}
    for b in net.boundaries:
        u, v = b.endpoints
        if u == v:
            problems.append(f"boundary {b.id} has identical endpoints {u}")
        for e in (u, v):
            if e not in nodes:
                problems.append(f"boundary {b.id} references missing node {e}")
            else:
                degree[e] += 1
        g1, g2 = b.grains
        if g1 == g2:
            problems.append(f"boundary {b.id} separates grain {g1} from itself")
        for g in (g1, g2):
            if g not in grains:
                problems.append(f"boundary {b.id} references missing grain {g}")
        key = frozenset((g1, g2))
        if key in pairs and g1 != g2:
            problems.append(
                f"boundaries {pairs[key]} and {b.id} both separate grains {g1} and {g2}"
            )
        pairs.setdefault(key, b.id)
        if check_lengths and u in nodes and v in nodes and u != v:
            if np.linalg.norm(np.subtract(nodes[u].position, nodes[v].position)) <= 0.0:
                problems.append(f"boundary {b.id} has zero initial length")
    for nid, n in nodes.items():
        want = REQUIRED_DEGREE.get(n.kind)
        if want is not None and degree[nid] != want:
            problems.append(f"{n.kind} {nid} has {degree[nid]} incident boundaries, expected {want}")
    return problems


def boundary_length(state, net, j):
    b = next((s for s in net.boundaries if s.id == j), None)
    if b is None:
        raise KeyError(f"no boundary with id {j}")
    nodes = {n.id: n for n in net.nodes}

    def pos(nid):
        return np.asarray(state.positions[nid] if nodes[nid].mobile else nodes[nid].position, dtype=float)

    return float(np.linalg.norm(pos(b.endpoints[1]) - pos(b.endpoints[0])))


def network_energy(state, net):
    topo = net.topology
    return topo.energy(topo.pack(state))


def network_rhs(state, net, gamma=1.0, eta=1.0):
    """Rates ``(dalpha by grain id, da by junction id)``."""
    topo = net.topology
    r = topo.rates(topo.pack(state), gamma, eta)
    pos = r[: 2 * topo.n_tj].reshape(-1, 2)
    dalpha = {g: float(r[2 * topo.n_tj + i]) for i, g in enumerate(topo.grain_ids)}
    da = {j: pos[i].copy() for i, j in enumerate(topo.junction_ids)}
    return dalpha, da


@dataclass(frozen=True)
class PSDReport:
    min_quadratic_form: float
    max_relative_mismatch: float
    ok: bool


def orientation_coupling_psd(state, net, n_samples=1000, rng=None):
    """Sample ``αᵀ L α`` against the edge sum ``Σ_j |Γ_j| (Δ_j α)²``.

    ``L`` is the orientation coupling matrix evaluated by an explicit double
    loop. The report is ok when both evaluations agree to 1e-12 relative and
    none is below ``-1e-12``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    topo = net.topology
    y = topo.pack(state)
    lap = topo.laplacian(y)
    _, lengths = topo.segments(y)
    n = topo.n_sg
    worst_q = math.inf
    worst_rel = 0.0
    for _ in range(n_samples):
        al = rng.normal(size=n)
        quad = 0.0
        for i in range(n):
            for k in range(n):
                quad += lap[i, k] * al[i] * al[k]
        edge_sum = float(np.sum(lengths * (al[topo.g1] - al[topo.g2]) ** 2))
        scale = max(1.0, abs(edge_sum))
        worst_rel = max(worst_rel, abs(quad - edge_sum) / scale)
        worst_q = min(worst_q, quad, edge_sum)
    return PSDReport(worst_q, worst_rel, bool(worst_q >= -1e-12 and worst_rel <= 1e-12))


@dataclass
class NetworkTrajectory:
    net: GrainNetwork
    t: np.ndarray
    y: np.ndarray
    energy: np.ndarray
    accumulated_dissipation: np.ndarray
    status: str = "complete"
    critical: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def stopped_early(self):
        return self.status != "complete"

    def state(self, k):
        return self.net.topology.unpack(self.y[k])

    @property
    def positions(self):
        n = self.net.topology.n_tj
        return self.y[:, : 2 * n].reshape(len(self.t), n, 2)

    @property
    def orientations(self):
        return self.y[:, 2 * self.net.topology.n_tj:]


def integrate_network(state0, net, config, gamma=1.0, eta=1.0):
    """Fixed-step integration of the network dynamics.

    Stops early (``status="critical_event"``) when a boundary gets shorter than
    ``config.min_edge_length`` or two junctions get closer than it; the last
    recorded sample is the last admissible state.
    """
    topo = net.topology
    min_len = config.min_edge_length
    y0 = topo.pack(state0)

    def guard(y):
        _, lengths = topo.segments(y)
        j = int(np.argmin(lengths)) if len(lengths) else -1
        if j >= 0 and lengths[j] < min_len:
            return {"kind": "boundary_collapse", "boundary": topo.boundary_ids[j]}
        sep, pair = topo.min_junction_separation(y)
        if sep < min_len:
            return {"kind": "junction_approach", "junctions": list(pair)}
        return None

    bad = guard(y0)
    if bad:
        raise CriticalEventError(f"initial state violates guards: {bad}", boundary=bad.get("boundary"))

    def f(z):
        bad = guard(z[:-1])
        if bad:
            raise _GuardBreach(bad)
        r = topo.rates(z[:-1], gamma, eta)
        # dissipation in gradient-flow units: |dα|²/γ + |da|²/η
        n = 2 * topo.n_tj
        q = float(r[:n] @ r[:n]) / eta + float(r[n:] @ r[n:]) / gamma
        return np.append(r, q)

    def advance(z, kz, h):
        if config.scheme == "euler":
            return z + h * kz
        k2 = f(z + 0.5 * h * kz)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        return z + (h / 6.0) * (kz + 2.0 * k2 + 2.0 * k3 + k4)

    z = np.append(y0, 0.0)
    kz = f(z)
    ts, zs = [0.0], [z]
    recorded = 0
    status, critical = "complete", {}
    n = config.n_steps
    t = 0.0
    for k in range(n):
        h = config.step if k < n - 1 else config.t_end - (n - 1) * config.step
        try:
            znew = advance(z, kz, h)
            knew = f(znew)
        except _GuardBreach as exc:
            status, critical = "critical_event", dict(exc.info, t=t)
            if recorded != k:
                ts.append(t)
                zs.append(z)
            break
        z, kz = znew, knew
        t = (k + 1) * config.step if k + 1 < n else config.t_end
        if (k + 1) % config.record_every == 0 or k + 1 == n:
            ts.append(t)
            zs.append(z)
            recorded = k + 1
    zs = np.array(zs)
    return NetworkTrajectory(
        net=net,
        t=np.array(ts),
        y=zs[:, :-1],
        energy=np.array([topo.energy(r) for r in zs[:, :-1]]),
        accumulated_dissipation=zs[:, -1],
        status=status,
        critical=critical,
    )


class _GuardBreach(Exception):
    def __init__(self, info):
        super().__init__(str(info))
        self.info = info


def single_junction_network(anchors, state, junction_id=0):
    """The three-boundary configuration as a network.

    Anchor ``j`` becomes node ``j``; boundary ``j`` joins the junction to it
    and separates grains ``j-1`` and ``j`` (grain 0 is grain 3).
    """
    grains = [Grain(k + 1, float(state.alpha[k])) for k in range(3)]
    nodes = [NetworkNode(junction_id, JUNCTION, tuple(map(float, state.a)))]
    nodes += [NetworkNode(j + 1, ANCHOR, tuple(map(float, anchors.points[j]))) for j in range(3)]
    boundaries = [
        BoundarySegment(j + 1, (junction_id, j + 1), ((j - 1) % 3 + 1, j + 1)) for j in range(3)
    ]
    net = GrainNetwork(grains, nodes, boundaries)
    return net, net.initial_state()


def three_junction_network(inner=0.5, outer=2.0, twist=0.0, orientations=(0.0, 0.3, -0.2, 0.1)):
    """A central triangular grain ringed by three grains, anchored on a hexagon.

    Junctions 1..3 sit at radius ``inner`` on the rays at 90, 210 and 330
    degrees (rotated by ``twist``); each is tied to an anchor at radius
    ``outer`` on the same ray, i.e. on alternate vertices of a regular
    hexagon. Grain 0 is the central triangle; grain ``k`` lies between the
    rays of junctions ``k`` and ``k+1``.
    """
    nodes, boundaries = [], []
    angles = [math.pi / 2 + twist + 2 * math.pi * k / 3 for k in range(3)]
    for k, th in enumerate(angles):
        nodes.append(NetworkNode(k + 1, JUNCTION, (inner * math.cos(th), inner * math.sin(th))))
        nodes.append(NetworkNode(k + 11, ANCHOR, (outer * math.cos(th), outer * math.sin(th))))
    grains = [Grain(k, float(orientations[k])) for k in range(4)]
    for k in range(3):
        nxt = (k + 1) % 3
        # inner edge between junction k+1 and nxt+1 separates the centre from grain k+1
        boundaries.append(BoundarySegment(k + 1, (k + 1, nxt + 1), (0, k + 1)))
        # spoke from junction k+1 to its anchor separates grain k (previous) from grain k+1
        prev = (k - 1) % 3 + 1
        boundaries.append(BoundarySegment(k + 4, (k + 1, k + 11), (prev, k + 1)))
    return GrainNetwork(grains, nodes, boundaries)
