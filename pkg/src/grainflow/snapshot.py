"""Deterministic SVG drawings of a junction or network configuration."""
import numpy as np

from .network import ANCHOR

SIZE = 480.0
PAD = 40.0


def _num(v):
    return f"{v:.4f}"


class _Frame:
    def __init__(self, pts):
        pts = np.asarray(pts, dtype=float)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = max(float(np.max(hi - lo)), 1e-12)
        self.lo, self.hi = lo, hi
        self.scale = (SIZE - 2 * PAD) / span

    def __call__(self, p):
        # y axis flipped so +y points up on screen
        x = PAD + (p[0] - self.lo[0]) * self.scale
        y = SIZE - PAD - (p[1] - self.lo[1]) * self.scale
        return _num(x), _num(y)


def render_svg(segments, nodes, labels, title=""):
    """``segments``: list of (p, q); ``nodes``: list of (point, kind); ``labels``: list of (point, text)."""
    pts = [p for s in segments for p in s] + [p for p, _ in nodes]
    frame = _Frame(pts)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(SIZE)}" height="{int(SIZE)}" '
        f'viewBox="0 0 {int(SIZE)} {int(SIZE)}">',
        f"<title>{title}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for p, q in segments:
        (x1, y1), (x2, y2) = frame(p), frame(q)
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="2"/>')
    for p, kind in nodes:
        x, y = frame(p)
        if kind == ANCHOR:
            out.append(f'<circle cx="{x}" cy="{y}" r="4" fill="white" stroke="black"/>')
        else:
            out.append(f'<circle cx="{x}" cy="{y}" r="5" fill="crimson"/>')
    for p, text in labels:
        x, y = frame(p)
        out.append(f'<text x="{x}" y="{y}" font-size="12" text-anchor="middle">{text}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def junction_svg(anchors, state, t=None):
    a = state.a
    segs = [(a, anchors.points[j]) for j in range(3)]
    nodes = [(anchors.points[j], ANCHOR) for j in range(3)] + [(a, "triple_junction")]
    labels = []
    for j in range(3):
        # grain j sits between boundaries j and j+1
        mid = (a + anchors.points[j] + anchors.points[(j + 1) % 3]) / 3.0
        labels.append((mid, f"α{j + 1}={state.alpha[j]:.4f}"))
    title = "junction" if t is None else f"junction t={t:.6g}"
    return render_svg(segs, nodes, labels, title)


def network_svg(net, state, t=None):
    by_id = {n.id: n for n in net.nodes}

    def pos(nid):
        n = by_id[nid]
        return np.asarray(n.position if n.kind == ANCHOR else state.positions[nid], dtype=float)

    segs = [(pos(b.endpoints[0]), pos(b.endpoints[1])) for b in net.boundaries]
    nodes = [(pos(n.id), n.kind) for n in net.nodes]
    # label each grain at the mean midpoint of its boundaries
    mids = {}
    for b, (p, q) in zip(net.boundaries, segs):
        for g in b.grains:
            mids.setdefault(g, []).append(0.5 * (p + q))
    labels = [
        (np.mean(mids[g.id], axis=0), f"α{g.id}={state.orientations[g.id]:.4f}")
        for g in net.grains if g.id in mids
    ]
    title = "network" if t is None else f"network t={t:.6g}"
    return render_svg(segs, nodes, labels, title)
