"""A priori estimate checks and Gronwall stability bounds applied to trajectories."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UsageError
from .single_junction import misorientation_vector

EXACT_TOL = 1e-12
ZERO_TOL = 1e-14
GRONWALL_TOL = 1e-8

# A with (A - I) α = (α3 - α1, α1 - α2, α2 - α3)
CYCLIC_SHIFT = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass
class CheckReport:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            **({"detail": self.detail} if self.detail else {}),
        }


def check_maximum_principle(traj):
    """``max_t |α(t)| / |α0|``; passes when ``<= 1 + 1e-12``.

    With ``α0 = 0`` the orientations must stay at zero (to 1e-14) and the
    reported value is the largest ``|α(t)|``.
    """
    norms = np.linalg.norm(traj.alpha, axis=1)
    n0 = norms[0]
    if n0 == 0.0:
        peak = float(norms.max())
        return CheckReport("max_principle", peak, ZERO_TOL, peak <= ZERO_TOL, {"zero_initial": True})
    ratio = float(norms.max() / n0)
    return CheckReport("max_principle", ratio, 1.0 + EXACT_TOL, ratio <= 1.0 + EXACT_TOL)


def check_misorientation_estimate(traj):
    """Misorientation norm never exceeds its initial value, and never increases step to step."""
    m = np.linalg.norm(np.array([misorientation_vector(al) for al in traj.alpha]), axis=1)
    m0 = m[0]
    steps_up = np.diff(m)
    worst_rise = float(steps_up.max()) if len(steps_up) else 0.0
    if m0 <= ZERO_TOL:
        peak = float(m.max())
        return CheckReport("misorientation", peak, ZERO_TOL, peak <= ZERO_TOL, {"zero_initial": True})
    ratio = float(m.max() / m0)
    monotone = worst_rise <= EXACT_TOL * m0
    return CheckReport(
        "misorientation",
        ratio,
        1.0 + EXACT_TOL,
        bool(ratio <= 1.0 + EXACT_TOL and monotone),
        {"worst_step_increase": worst_rise, "monotone": bool(monotone)},
    )


def misorientation_identity_residual(coupling_entries):
    """Max-abs of ``(A-I)^T (A-I) B - 3B``; zero for every coupling matrix."""
    d = CYCLIC_SHIFT - np.eye(3)
    b = np.asarray(coupling_entries, dtype=float)
    return float(np.max(np.abs(d.T @ d @ b - 3.0 * b)))


@dataclass(frozen=True)
class GronwallBound:
    C4: float
    C5: float
    C6: float
    C_lower: float

    def envelope(self, t, initial_gap_sq):
        return np.exp(self.C6 * np.asarray(t)) * initial_gap_sq


def gronwall_constants(alpha01, alpha02, c_lower):
    """Growth rate ``C6 = C4 + C5`` for the squared deviation of two solutions.

    ``C4 = 13(|α01| + |α02|)`` and
    ``C5 = 12(|α01| + |α02|) + (4/c_lower) Σ_j (1 + Δα02_j²/2)``.
    """
    if not (c_lower > 0 and math.isfinite(c_lower)):
        raise DomainError(f"c_lower must be positive, got {c_lower}")
    s = float(np.linalg.norm(alpha01) + np.linalg.norm(alpha02))
    mis = misorientation_vector(alpha02)
    C4 = 13.0 * s
    C5 = 12.0 * s + (4.0 / c_lower) * float(np.sum(1.0 + 0.5 * mis * mis))
    return GronwallBound(C4=C4, C5=C5, C6=C4 + C5, C_lower=float(c_lower))


def min_edge_length(traj):
    b = traj.anchors.points[None, :, :] - traj.a[:, None, :]
    return float(np.sqrt(np.sum(b * b, axis=2)).min())


def check_continuous_dependence(traj1, traj2, bound=None):
    """Check ``|Δα|² + |Δa|² <= e^{C6 t} (|Δα0|² + |Δa0|²)`` at every shared sample.

    ``bound`` defaults to constants built from the two initial orientations and
    the smallest boundary length seen on either trajectory. The reported value
    is the worst ratio of measured deviation to the envelope.
    """
    if len(traj1) != len(traj2) or not np.array_equal(traj1.t, traj2.t):
        raise UsageError("trajectories must share the same time grid")
    if bound is None:
        c_lower = min(min_edge_length(traj1), min_edge_length(traj2))
        bound = gronwall_constants(traj1.alpha[0], traj2.alpha[0], c_lower)
    gap = np.sum((traj1.alpha - traj2.alpha) ** 2, axis=1) + np.sum((traj1.a - traj2.a) ** 2, axis=1)
    env = bound.envelope(traj1.t, gap[0])
    limit = env * (1.0 + GRONWALL_TOL)
    if gap[0] == 0.0:
        worst = float(gap.max())
        return CheckReport(
            "continuous_dependence", worst, 0.0, worst == 0.0,
            {"C6": bound.C6, "C_lower": bound.C_lower, "identical_initial_data": True},
        )
    with np.errstate(over="ignore"):
        ratios = gap / env
    k = int(np.argmax(ratios))
    # the ratio is exactly 1 at t = 0; the later maximum says how much room is left
    later = float(ratios[1:].max()) if len(ratios) > 1 else float("nan")
    return CheckReport(
        "continuous_dependence",
        float(ratios[k]),
        1.0 + GRONWALL_TOL,
        bool(np.all(gap <= limit)),
        {"C6": bound.C6, "C_lower": bound.C_lower, "worst_time": float(traj1.t[k]),
         "worst_ratio_after_start": later},
    )
