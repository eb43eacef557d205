"""Compare the compiled and pure-Python sweep kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--M M]

Times one image solve and one system-matrix solve on the academic instance
with each backend and reports the speed-up and the largest difference
between the two results.
"""

import argparse
import time

import numpy as np

from jointkaczmarz import RegParams, generate_instance, solve_c, solve_s
from jointkaczmarz._backend import get_kernels


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--M", type=int, default=50)
    ap.add_argument("--c-sweeps", type=int, default=500)
    ap.add_argument("--s-sweeps", type=int, default=300)
    args = ap.parse_args(argv)

    inst = generate_instance(args.M, 0.05, 1)
    p = RegParams(alpha=1.53e-5, lam=4.88e-4, gamma=0.25, mu=1.0)
    try:
        get_kernels("cython")
        backends = ["cython", "python"]
    except ImportError:
        print("compiled kernels not built; timing the fallback only")
        backends = ["python"]

    rows = {}
    for name in backends:
        tc, c = _time(lambda: solve_c(inst.s_mod, inst.u, p, args.c_sweeps,
                                      track_objective=False, backend=name).c_final,
                      args.repeat)
        ts, S = _time(lambda: solve_s(inst, inst.c_true, p, args.s_sweeps,
                                      track_objective=False, backend=name).state.S,
                      args.repeat)
        rows[name] = (tc, ts, c, S)

    print(f"M={args.M}, {args.c_sweeps} image sweeps, {args.s_sweeps} system sweeps, "
          f"best of {args.repeat}")
    print(f"{'backend':8s} {'image [ms]':>12s} {'system [ms]':>12s}")
    for name, (tc, ts, _, _) in rows.items():
        print(f"{name:8s} {tc * 1e3:12.2f} {ts * 1e3:12.2f}")
    if len(rows) == 2:
        (tc1, ts1, c1, S1), (tc2, ts2, c2, S2) = rows["cython"], rows["python"]
        print(f"speed-up: image {tc2 / tc1:.1f}x, system {ts2 / ts1:.1f}x")
        print(f"max |difference|: image {np.max(np.abs(c1 - c2)):.2e}, "
              f"system {np.max(np.abs(S1 - S2)):.2e}")


if __name__ == "__main__":
    main()
