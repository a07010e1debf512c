"""The desk-scale verification suite behind ``grainflow verify``."""
import json
from dataclasses import dataclass, field

import numpy as np

from . import coupling, diagnostics, network, picard
from .errors import GrainflowError
from .geometry import AnchorSet, angle_condition, fermat_point
from .single_junction import JunctionState, SimConfig, dissipation_residual, integrate, rhs

DISSIPATION_TOL = 1e-8
CONTRACTION_TOL = 0.80
FIXED_POINT_TOL = 1e-5


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    seed: int = 0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "overall_pass": self.passed,
            "seed": self.seed,
            "checks": [c.as_dict() for c in self.checks],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def random_scenario(rng, max_tries=1000):
    """Anchors passing the angle condition, a0 near their Fermat point, small α0."""
    for _ in range(max_tries):
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        try:
            anchors = AnchorSet(pts)
            if anchors.area() < 0.1 or not angle_condition(anchors).ok:
                continue
        except ValueError:
            continue
        eq = fermat_point(anchors)
        if eq.b_inf.lengths.min() < 0.2:
            continue
        a0 = eq.a_inf + rng.uniform(-0.05, 0.05, size=2)
        alpha0 = rng.uniform(-0.5, 0.5, size=3)
        return anchors, JunctionState(a0, alpha0)
    raise RuntimeError("could not draw a valid scenario")


def _negated(fn):
    def flipped(state, anchors):
        dalpha, da = fn(state, anchors)
        return -dalpha, -da
    return flipped


def run_suite(anchors, init, config, seed=0, n_random=10, corrupt_rhs=False):
    """Run every check; a check that raises is recorded as failed rather than aborting."""
    rng = np.random.default_rng(seed)
    report = VerificationReport(seed=seed)
    stages = _stages(anchors, init, config, rng, n_random, _negated(rhs) if corrupt_rhs else None)
    for name, stage in stages:
        try:
            with np.errstate(all="ignore"):
                report.checks.extend(stage())
        except (GrainflowError, ValueError, ArithmeticError) as exc:
            report.checks.append(diagnostics.CheckReport(
                name, float("nan"), float("nan"), False, {"error": f"{type(exc).__name__}: {exc}"}))
    return report


def _stages(anchors, init, config, rng, n_random, rhs_fn):
    shared = {}

    def trajectory():
        if "traj" not in shared:
            shared["traj"] = integrate(init, anchors, config, rhs_fn=rhs_fn)
        return shared["traj"]

    def dissipation():
        res = dissipation_residual(trajectory())
        return [diagnostics.CheckReport("dissipation_residual", res, DISSIPATION_TOL,
                                        bool(res < DISSIPATION_TOL))]

    def estimates():
        traj = trajectory()
        mp = diagnostics.check_maximum_principle(traj)
        mis = diagnostics.check_misorientation_estimate(traj)
        for _ in range(n_random):
            an, st = random_scenario(rng)
            tr = integrate(st, an, SimConfig(step=config.step, t_end=min(config.t_end, 0.5)),
                           rhs_fn=rhs_fn)
            m2 = diagnostics.check_maximum_principle(tr)
            s2 = diagnostics.check_misorientation_estimate(tr)
            # keep the worst case, failures first
            if (m2.passed, -m2.value) < (mp.passed, -mp.value):
                mp = m2
            if (s2.passed, -s2.value) < (mis.passed, -mis.value):
                mis = s2
        return [mp, mis]

    def identity():
        worst = 0.0
        for _ in range(100):
            c = rng.uniform(0.0, 2.0, size=3)
            worst = max(worst, diagnostics.misorientation_identity_residual(coupling.coupling_entries(*c)))
        return [diagnostics.CheckReport("misorientation_identity", worst, 1e-12, worst <= 1e-12)]

    def spectral():
        worst = 0.0
        for _ in range(1000):
            c = rng.uniform(0.0, 2.0, size=3)
            closed = coupling.closed_form_eigenvalues(*c)
            num = np.linalg.eigvalsh(coupling.coupling_entries(*c))
            worst = max(worst, float(np.max(np.abs(closed - num)) / max(1.0, float(np.max(np.abs(num))))))
        return [diagnostics.CheckReport("spectral_closed_form", worst, 1e-10, worst <= 1e-10)]

    def contraction():
        eq = fermat_point(anchors)
        cert = picard.existence_constants(init, anchors, eq)
        if not cert.hypothesis_ok:
            return [diagnostics.CheckReport("contraction_ratio", float("nan"), CONTRACTION_TOL, False,
                                            {"reason": "existence hypothesis fails"})]
        pr = picard.solve_fixed_point(init, anchors, cert)
        rmax = max(pr.ratios) if pr.ratios else 0.0
        n = len(pr.pair.grid) - 1
        ref = integrate(init, anchors, SimConfig(step=cert.T_exist / n, t_end=cert.T_exist), rhs_fn=rhs_fn)
        gap = float(np.max(np.linalg.norm(ref.alpha - pr.pair.alpha_path, axis=1))
                    + np.max(np.linalg.norm(ref.a - pr.pair.a_path, axis=1)))
        return [
            diagnostics.CheckReport("contraction_ratio", rmax, CONTRACTION_TOL, rmax <= CONTRACTION_TOL,
                                    {"T_exist": cert.T_exist, "iterations": pr.iterations}),
            diagnostics.CheckReport("fixed_point_vs_rk4", gap, FIXED_POINT_TOL, gap <= FIXED_POINT_TOL),
        ]

    def gronwall():
        traj = trajectory()
        pert = JunctionState(init.a + np.array([1e-6, 0.0]), init.alpha)
        traj2 = integrate(pert, anchors, config, rhs_fn=rhs_fn)
        if len(traj2) != len(traj):
            return [diagnostics.CheckReport("continuous_dependence", float("nan"),
                                            1.0 + diagnostics.GRONWALL_TOL, False,
                                            {"reason": "trajectories stopped at different times"})]
        return [diagnostics.check_continuous_dependence(traj, traj2)]

    def psd():
        net, st = network.single_junction_network(anchors, init)
        r1 = network.orientation_coupling_psd(st, net, rng=rng)
        hexa = network.three_junction_network()
        r2 = network.orientation_coupling_psd(hexa.initial_state(), hexa, rng=rng)
        return [diagnostics.CheckReport(
            "coupling_psd", min(r1.min_quadratic_form, r2.min_quadratic_form), -1e-12, r1.ok and r2.ok,
            {"relative_mismatch": max(r1.max_relative_mismatch, r2.max_relative_mismatch)},
        )]

    return [
        ("dissipation_residual", dissipation),
        ("estimates", estimates),
        ("misorientation_identity", identity),
        ("spectral_closed_form", spectral),
        ("contraction_ratio", contraction),
        ("continuous_dependence", gronwall),
        ("coupling_psd", psd),
    ]
