"""Compare the numba and pure-numpy simulation backends.

Each backend runs in its own interpreter because the choice is made at import
time from RCDYN_DISABLE_NUMBA.

    python benchmarks/bench_kernels.py [--steps 12000] [--N 10 100] [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from rcdyn import _kernels, prng
from rcdyn.topology import ReservoirParams, sample_reservoir

steps, Ns, repeat = int(sys.argv[1]), [int(n) for n in sys.argv[2].split(",")], int(sys.argv[3])
out = {"backend": _kernels.BACKEND, "results": {}}
for N in Ns:
    res = sample_reservoir(ReservoirParams(N=N, w=0.5 * (10 / N) ** 0.5), prng.RngStream(0))
    X = prng.uniform(prng.RngStream(1), -1, 1, (steps, 2))
    _kernels.run_kernel(res.W, res.b_w, res.I, res.y0, X[:10], 0, 1.0)  # compile / warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        _kernels.run_kernel(res.W, res.b_w, res.I, res.y0, X, 0, 1.0)
        best = min(best, time.perf_counter() - t0)
    out["results"][N] = best
print(json.dumps(out))
"""


def run_backend(disable: bool, steps: int, Ns, repeat: int) -> dict:
    env = dict(os.environ)
    if disable:
        env["RCDYN_DISABLE_NUMBA"] = "1"
    else:
        env.pop("RCDYN_DISABLE_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", CHILD, str(steps), ",".join(map(str, Ns)), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=12000)
    ap.add_argument("--N", type=int, nargs="+", default=[10, 100])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    fast = run_backend(False, args.steps, args.N, args.repeat)
    slow = run_backend(True, args.steps, args.N, args.repeat)
    print(f"{'N':>5} {'steps':>7} {fast['backend'] + ' [ms]':>14} {'numpy [ms]':>12} {'speedup':>8}")
    for N in args.N:
        a, b = fast["results"][str(N)], slow["results"][str(N)]
        print(f"{N:>5} {args.steps:>7} {a * 1e3:>14.2f} {b * 1e3:>12.2f} {b / a:>8.1f}")


if __name__ == "__main__":
    main()
