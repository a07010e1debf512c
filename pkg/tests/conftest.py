import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from grainflow.geometry import AnchorSet, angle_condition, equilateral_anchors, fermat_point
from grainflow.single_junction import JunctionState

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def eq_anchors():
    return equilateral_anchors()


@pytest.fixture
def standard_init():
    return JunctionState([0.1, 0.05], [0.3, -0.2, 0.1])


def interior_angles(pts):
    pts = np.asarray(pts, dtype=float)
    out = []
    for i in range(3):
        u = pts[(i + 1) % 3] - pts[i]
        v = pts[(i + 2) % 3] - pts[i]
        c = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        out.append(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))
    return np.array(out)


def draw_scenario(rng, min_len=0.2, spread=0.05, alpha_scale=0.5):
    """Random anchors satisfying the angle condition, a0 near the Fermat point."""
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        try:
            an = AnchorSet(pts)
        except ValueError:
            continue
        if an.area() < 0.1 or not angle_condition(an).ok:
            continue
        eq = fermat_point(an)
        if eq.b_inf.lengths.min() < min_len:
            continue
        a0 = eq.a_inf + rng.uniform(-spread, spread, size=2)
        return an, JunctionState(a0, rng.uniform(-alpha_scale, alpha_scale, size=3))


def _grid_argmin(pts, cx, cy, half, n):
    g = np.linspace(-half, half, n)
    X, Y = np.meshgrid(cx + g, cy + g)
    f = sum(np.hypot(X - p[0], Y - p[1]) for p in pts)
    k = np.unravel_index(np.argmin(f), f.shape)
    return X[k], Y[k], g[1] - g[0]


def grid_minimizer(anchors, step=1e-4):
    """Brute-force minimiser of the summed distance to the anchors.

    A coarse pass over the bounding box, a pass at spacing ``step`` around
    its best cell, then shrinking local grids down to 1e-10.
    """
    pts = anchors.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    c = 0.5 * (lo + hi)
    half = 0.5 * float(np.max(hi - lo))
    x, y, h = _grid_argmin(pts, c[0], c[1], half, 401)
    x, y, h = _grid_argmin(pts, x, y, 2 * h, int(4 * h / step) + 1)
    while h > 1e-10:
        x, y, h = _grid_argmin(pts, x, y, 2 * h, 41)
    return np.array([x, y])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
