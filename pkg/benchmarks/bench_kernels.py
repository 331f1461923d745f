"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

Runs each workload twice in subprocesses -- once normally, once with
FLOQUET_AVG_NO_NUMBA=1 -- and prints a timing table.  Compile time is
excluded by a warmup call inside the timed subprocess.

Usage:  python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, time
import numpy as np
from floquet_avg import pendulum, scan
from floquet_avg._kernels import USING_NUMBA
from floquet_avg.exactmono import exact_monodromy_pc, exact_monodromy_rk, pc_to_ppoly
from floquet_avg.smallmat import matexp

repeat = int(os.environ["BENCH_REPEAT"])
rng = np.random.default_rng(7)
mats = rng.uniform(-1.0, 1.0, size=(64, 4, 4))

def bench(fn):
    fn()  # warmup (includes JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

def matexp_batch():
    for m in mats:
        matexp(m, 2.0)

jpoly = pc_to_ppoly(pendulum.jacobians(pendulum.PendulumParams(0.3, 0.4, 0.1)))

def rk4_batch():
    for _ in range(32):
        exact_monodromy_rk(jpoly, 512)

def scan_batch():
    scan.scan_region((0.0, 0.4, 30), (0.0, 1.0, 30), 0.0, "exact-pc", threads=1)

print(json.dumps({
    "numba": USING_NUMBA,
    "matexp_64x4x4": bench(matexp_batch),
    "rk4_32x512steps": bench(rk4_batch),
    "scan_30x30_exact_pc": bench(scan_batch),
}))
"""


def run_worker(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ, BENCH_REPEAT=str(repeat))
    if no_numba:
        env["FLOQUET_AVG_NO_NUMBA"] = "1"
    else:
        env.pop("FLOQUET_AVG_NO_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", WORKER], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    jit = run_worker(no_numba=False, repeat=args.repeat)
    plain = run_worker(no_numba=True, repeat=args.repeat)
    if not jit["numba"]:
        print("warning: numba unavailable, both columns are the fallback path")

    names = [k for k in jit if k != "numba"]
    width = max(len(n) for n in names)
    print(f"{'workload'.ljust(width)}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name in names:
        a, b = jit[name], plain[name]
        print(f"{name.ljust(width)}  {a * 1e3:>8.2f}ms  {b * 1e3:>8.2f}ms  {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
