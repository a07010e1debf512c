"""Text formats: trajectory CSV, the network description document, run config files."""
import configparser
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .network import ANCHOR, BoundarySegment, Grain, GrainNetwork, NetworkNode, NODE_KINDS

TRAJECTORY_COLUMNS = (
    "t", "a_x", "a_y", "alpha_1", "alpha_2", "alpha_3",
    "energy", "alpha_rate_sq", "drag_rate_sq", "cum_dissipation",
)
EVENT_PREFIX = "# critical_event"


def fmt(x):
    # repr of a python float is the shortest string that round-trips
    return repr(float(x))


def trajectory_rows(traj):
    cols = np.column_stack([
        traj.t, traj.a, traj.alpha, traj.energy,
        traj.alpha_rate_sq, traj.drag_rate_sq, traj.accumulated_dissipation,
    ])
    return cols


def write_trajectory_csv(traj, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for row in trajectory_rows(traj):
        w.writerow([fmt(v) for v in row])
    if traj.stopped_early:
        fh.write(f"{EVENT_PREFIX} kind=junction_collision edge={traj.collision_edge} t={fmt(traj.t[-1])}\n")


def network_columns(net):
    topo = net.topology
    cols = ["t"]
    for j in topo.junction_ids:
        cols += [f"a{j}_x", f"a{j}_y"]
    cols += [f"alpha_{g}" for g in topo.grain_ids]
    return cols + ["energy", "cum_dissipation"]


def write_network_csv(ntraj, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(network_columns(ntraj.net))
    body = np.column_stack([ntraj.t, ntraj.y, ntraj.energy, ntraj.accumulated_dissipation])
    for row in body:
        w.writerow([fmt(v) for v in row])
    if ntraj.stopped_early:
        info = " ".join(f"{k}={_flat(v)}" for k, v in sorted(ntraj.critical.items()))
        fh.write(f"{EVENT_PREFIX} {info}\n")


def _flat(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


@dataclass
class CsvTable:
    columns: list
    data: np.ndarray
    events: list = field(default_factory=list)

    def column(self, name):
        return self.data[:, self.columns.index(name)]


def read_csv(fh):
    """Parse a trajectory CSV; ``# critical_event`` lines are collected as dicts."""
    events, lines = [], []
    for line in fh:
        if line.startswith(EVENT_PREFIX):
            parts = line[len(EVENT_PREFIX):].split()
            events.append(dict(p.split("=", 1) for p in parts))
        elif line.startswith("#") or not line.strip():
            continue
        else:
            lines.append(line)
    rows = list(csv.reader(lines))
    if not rows:
        raise UsageError("empty CSV")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    except ValueError as exc:
        raise UsageError(f"malformed CSV row: {exc}") from None
    return CsvTable(header, data, events)


# -- network document -------------------------------------------------------

SECTIONS = {"GRAINS": 2, "NODES": 4, "BOUNDARIES": 5}


def parse_network(text):
    """Parse the sectioned network document.

    ::

        GRAINS        # id alpha0
        1 0.3
        NODES         # id kind x y   (kind: triple_junction | anchor)
        0 triple_junction 0.1 0.05
        BOUNDARIES    # id node_a node_b grain_1 grain_2
        1 0 1 3 1
    """
    section = None
    grains, nodes, bounds = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.upper()
        if head in SECTIONS:
            section = head
            continue
        if section is None:
            raise UsageError(f"line {lineno}: data before any section header")
        tok = line.replace(",", " ").split()
        if len(tok) != SECTIONS[section]:
            raise UsageError(f"line {lineno}: {section} rows need {SECTIONS[section]} fields, got {len(tok)}")
        try:
            if section == "GRAINS":
                grains.append(Grain(int(tok[0]), float(tok[1])))
            elif section == "NODES":
                kind = tok[1].lower()
                if kind not in NODE_KINDS:
                    raise UsageError(f"line {lineno}: unknown node kind {tok[1]!r}")
                nodes.append(NetworkNode(int(tok[0]), kind, (float(tok[2]), float(tok[3]))))
            else:
                i, na, nb, g1, g2 = (int(v) for v in tok)
                bounds.append(BoundarySegment(i, (na, nb), (g1, g2)))
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"line {lineno}: {exc}") from None
    return GrainNetwork(grains, nodes, bounds)


def format_network(net, state=None):
    state = state or net.initial_state()
    out = io.StringIO()
    out.write("GRAINS\n")
    for g in net.grains:
        out.write(f"{g.id} {fmt(state.orientations[g.id])}\n")
    out.write("NODES\n")
    for n in net.nodes:
        x, y = n.position if n.kind == ANCHOR else state.positions[n.id]
        out.write(f"{n.id} {n.kind} {fmt(x)} {fmt(y)}\n")
    out.write("BOUNDARIES\n")
    for b in net.boundaries:
        out.write(f"{b.id} {b.endpoints[0]} {b.endpoints[1]} {b.grains[0]} {b.grains[1]}\n")
    return out.getvalue()


# -- run config ---------------------------------------------------------------

CONFIG_KEYS = {
    "anchors", "a0", "alpha0", "network", "step", "t_end", "scheme",
    "min_edge_length", "record_every", "csv", "report", "svg", "seed",
}


def read_config(text):
    """``key = value`` lines (no sections); '#' starts a comment."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"config parse error: {exc}") from None
    values = dict(cp["run"])
    unknown = set(values) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return values


def parse_floats(text, n=None, what="value"):
    try:
        vals = [float(v) for v in text.replace(";", ",").replace(" ", ",").split(",") if v]
    except ValueError:
        raise UsageError(f"cannot parse {what}: {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals
