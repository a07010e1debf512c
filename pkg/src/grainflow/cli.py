"""Command line interface.

Exit codes: 0 ok, 1 usage or parse error, 2 angle condition fails,
3 critical event (early stop), 4 verification failed.
"""
import argparse
import itertools
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import records, snapshot
from .errors import (
    CriticalEventError,
    GrainflowError,
    InvalidGeometryError,
    JunctionCollisionError,
    NoInteriorEquilibriumError,
    UsageError,
)
from .geometry import AnchorSet, angle_condition, equilateral_anchors, fermat_point
from .network import integrate_network, validate_network
from .single_junction import JunctionState, SimConfig, integrate

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_CRITICAL, EXIT_VERIFY = 0, 1, 2, 3, 4

STANDARD = {
    "a0": "0.1,0.05",
    "alpha0": "0.3,-0.2,0.1",
    "step": "1e-3",
    "t_end": "1.0",
    "scheme": "rk4",
    "min_edge_length": "1e-6",
    "record_every": "1",
    "seed": "0",
}


@dataclass
class RunConfig:
    anchors: AnchorSet | None
    init: JunctionState | None
    network_path: str | None
    sim: SimConfig
    csv: str | None
    report: str | None
    svg: str | None
    seed: int


def _run_args(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--anchors", help='"x1,y1; x2,y2; x3,y3" (default: equilateral, radius 1)')
    p.add_argument("--a0")
    p.add_argument("--alpha0")
    p.add_argument("--network", help="network description document")
    p.add_argument("--step")
    p.add_argument("--t-end", dest="t_end")
    p.add_argument("--scheme", choices=["rk4", "euler"])
    p.add_argument("--min-edge-length", dest="min_edge_length")
    p.add_argument("--record-every", dest="record_every")
    p.add_argument("--csv")
    p.add_argument("--report")
    p.add_argument("--svg")
    p.add_argument("--seed")


def _anchors_from(text):
    if text is None:
        return equilateral_anchors()
    v = records.parse_floats(text, 6, "anchors")
    return AnchorSet(np.array(v).reshape(3, 2))


def load_run_config(args):
    values = dict(STANDARD)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                values.update(records.read_config(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key in records.CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    try:
        sim = SimConfig(
            step=float(values["step"]),
            t_end=float(values["t_end"]),
            scheme=values["scheme"],
            min_edge_length=float(values["min_edge_length"]),
            record_every=int(values["record_every"]),
        )
        seed = int(values["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    net_path = values.get("network")
    if net_path:
        anchors = init = None
    else:
        anchors = _anchors_from(values.get("anchors"))
        init = JunctionState(records.parse_floats(values["a0"], 2, "a0"),
                             records.parse_floats(values["alpha0"], 3, "alpha0"))
    return RunConfig(anchors, init, net_path, sim, values.get("csv"), values.get("report"),
                     values.get("svg"), seed)


def _load_network(path):
    try:
        with open(path) as fh:
            net = records.parse_network(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read network: {exc}") from None
    problems = validate_network(net)
    if problems:
        raise UsageError("invalid network: " + "; ".join(problems))
    return net


def _open_out(path):
    if path in (None, "-"):
        return _Stdout()
    return open(path, "w", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        return False


def cmd_equilibrium(args):
    anchors = _anchors_from(args.anchors)
    cond = angle_condition(anchors)
    flags = " ".join("ok" if f else "FAIL" for f in cond.flags)
    if not cond.ok:
        print(f"angle condition fails: {flags}")
        return EXIT_PRECONDITION
    eq = fermat_point(anchors, tol=args.tol)
    print(f"a_inf {records.fmt(eq.a_inf[0])} {records.fmt(eq.a_inf[1])}")
    print(f"residual {eq.residual:.3e}")
    print(f"iterations {eq.iterations}")
    print(f"angle_condition {flags}")
    return EXIT_OK


def _simulate_network(cfg):
    net = _load_network(cfg.network_path)
    traj = integrate_network(net.initial_state(), net, cfg.sim)
    with _open_out(cfg.csv) as fh:
        records.write_network_csv(traj, fh)
    if cfg.svg:
        k = len(traj) - 1
        with open(cfg.svg, "w") as fh:
            fh.write(snapshot.network_svg(net, traj.state(k), traj.t[k]))
    if traj.stopped_early:
        print(f"critical event: {traj.critical}", file=sys.stderr)
        return EXIT_CRITICAL
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_run_config(args)
    if cfg.network_path:
        return _simulate_network(cfg)
    traj = integrate(cfg.init, cfg.anchors, cfg.sim)
    with _open_out(cfg.csv) as fh:
        records.write_trajectory_csv(traj, fh)
    if cfg.svg:
        with open(cfg.svg, "w") as fh:
            fh.write(snapshot.junction_svg(cfg.anchors, traj.final_state, traj.t[-1]))
    if traj.stopped_early:
        print(f"critical event: boundary {traj.collision_edge} collapsed at t={traj.t[-1]:.6g}",
              file=sys.stderr)
        return EXIT_CRITICAL
    return EXIT_OK


def cmd_network(args):
    if args.network is None and not args.config:
        raise UsageError("network requires --network or a config with 'network ='")
    cfg = load_run_config(args)
    if not cfg.network_path:
        raise UsageError("no network document given")
    return _simulate_network(cfg)


def cmd_verify(args):
    from .verify import run_suite

    cfg = load_run_config(args)
    if cfg.network_path:
        raise UsageError("verify runs on a single-junction scenario")
    if not angle_condition(cfg.anchors).ok:
        print("angle condition fails; no interior equilibrium", file=sys.stderr)
        return EXIT_PRECONDITION
    rep = run_suite(cfg.anchors, cfg.init, cfg.sim, seed=cfg.seed, n_random=args.n_random,
                    corrupt_rhs=args.corrupt_rhs)
    with _open_out(cfg.report) as fh:
        fh.write(rep.to_json())
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.value:.3e} (tol {c.tolerance:g})",
              file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_snapshot(args):
    cfg = load_run_config(args)
    row = None
    if args.from_csv:
        with open(args.from_csv) as fh:
            table = records.read_csv(fh)
        if not len(table.data):
            raise UsageError("trajectory CSV has no rows")
        row = table.data[args.row]
    if cfg.network_path:
        net = _load_network(cfg.network_path)
        state, t = net.initial_state(), None
        if row is not None:
            state, t = net.topology.unpack(row[1:-2]), row[0]
        svg = snapshot.network_svg(net, state, t)
    else:
        state, t = cfg.init, None
        if row is not None:
            state, t = JunctionState(row[1:3], row[3:6]), row[0]
        svg = snapshot.junction_svg(cfg.anchors, state, t)
    out = args.out or cfg.svg
    try:
        with _open_out(out) as fh:
            fh.write(svg)
    except OSError as exc:
        raise UsageError(f"cannot write snapshot: {exc}") from None
    return EXIT_OK


def cmd_sweep(args):
    cfg = load_run_config(args)
    if cfg.network_path:
        raise UsageError("sweep runs on single-junction scenarios")
    a0s = [records.parse_floats(v, 2, "a0") for v in (args.a0_values or [",".join(map(str, cfg.init.a))])]
    al0s = [records.parse_floats(v, 3, "alpha0")
            for v in (args.alpha0_values or [",".join(map(str, cfg.init.alpha))])]
    os.makedirs(args.outdir, exist_ok=True)
    code = EXIT_OK
    index = ["cell,a0_x,a0_y,alpha0_1,alpha0_2,alpha0_3,status,file"]
    for i, (a0, al0) in enumerate(itertools.product(a0s, al0s)):
        name = f"cell_{i:03d}.csv"
        try:
            traj = integrate(JunctionState(a0, al0), cfg.anchors, cfg.sim)
        except JunctionCollisionError:
            index.append(",".join([str(i)] + [records.fmt(v) for v in (*a0, *al0)] + ["invalid_initial", ""]))
            code = EXIT_CRITICAL
            continue
        with open(os.path.join(args.outdir, name), "w", newline="") as fh:
            records.write_trajectory_csv(traj, fh)
        if traj.stopped_early:
            code = EXIT_CRITICAL
        index.append(",".join([str(i)] + [records.fmt(v) for v in (*a0, *al0)] + [traj.status, name]))
    with open(os.path.join(args.outdir, "index.csv"), "w") as fh:
        fh.write("\n".join(index) + "\n")
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="grainflow", description="Triple-junction and grain-network relaxation.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("equilibrium", help="Fermat point of three anchors")
    q.add_argument("--anchors")
    q.add_argument("--tol", type=float, default=1e-12)
    q.set_defaults(func=cmd_equilibrium)

    q = sub.add_parser("simulate", help="integrate a junction (or a network) and write CSV")
    _run_args(q)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("network", help="simulate a network document")
    _run_args(q)
    q.set_defaults(func=cmd_network)

    q = sub.add_parser("verify", help="run the verification suite and write a JSON report")
    _run_args(q)
    q.add_argument("--n-random", type=int, default=10, dest="n_random")
    q.add_argument("--corrupt-rhs", action="store_true", help=argparse.SUPPRESS)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("snapshot", help="draw a configuration as SVG")
    _run_args(q)
    q.add_argument("--from-csv", dest="from_csv", help="take the state from a trajectory CSV row")
    q.add_argument("--row", type=int, default=-1)
    q.add_argument("--out")
    q.set_defaults(func=cmd_snapshot)

    q = sub.add_parser("sweep", help="grid of initial data, one CSV per cell")
    _run_args(q)
    q.add_argument("--a0-values", nargs="+", dest="a0_values")
    q.add_argument("--alpha0-values", nargs="+", dest="alpha0_values")
    q.add_argument("--outdir", required=True)
    q.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NoInteriorEquilibriumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (JunctionCollisionError, CriticalEventError) as exc:
        print(f"critical event: {exc}", file=sys.stderr)
        return EXIT_CRITICAL
    except (UsageError, InvalidGeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrainflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
