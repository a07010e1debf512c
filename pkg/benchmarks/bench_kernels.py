"""Compare the compiled and pure-Python single-junction kernels.

    python3 benchmarks/bench_kernels.py [--t-end 1.0] [--step 1e-3] [--repeat 5]

Both kernels must produce bit-identical trajectories; the script exits
non-zero if they do not.
"""
import argparse
import sys
import timeit

import numpy as np

from grainflow import _backend
from grainflow.geometry import equilateral_anchors
from grainflow.single_junction import JunctionState


def run(kernels, anchors, init, step, t_end):
    n = max(1, int(np.ceil(t_end / step - 1e-9)))
    return kernels.integrate_junction(
        anchors.points.reshape(-1), init.vector(), step, t_end, n, kernels.RK4, 1e-6, 1
    )


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    anchors = equilateral_anchors()
    init = JunctionState([0.1, 0.05], [0.3, -0.2, 0.1])
    mods = _backend.available()
    results, timings = {}, {}
    for k in mods:
        results[k.NAME] = run(k, anchors, init, args.step, args.t_end)
        number = 1 if k.NAME == "python" else 20
        best = min(timeit.repeat(lambda: run(k, anchors, init, args.step, args.t_end),
                                 number=number, repeat=args.repeat)) / number
        timings[k.NAME] = best
    n_steps = len(results[mods[0].NAME][0]) - 1
    print(f"rk4, {n_steps} steps, h={args.step:g}")
    for name, t in timings.items():
        print(f"  {name:>8s}: {t * 1e3:9.3f} ms   {t / n_steps * 1e6:7.3f} us/step")
    if "cython" in timings:
        print(f"  speedup: {timings['python'] / timings['cython']:.1f}x")
        a, b = results["cython"], results["python"]
        same = all(np.array_equal(x, y) for x, y in zip(a[:5], b[:5])) and a[5:] == b[5:]
        print(f"  bit-identical: {same}")
        if not same:
            return 1
    else:
        print("  compiled kernels not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
