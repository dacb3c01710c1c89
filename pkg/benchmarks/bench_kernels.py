#!/usr/bin/env python3
"""Compare the jitted kernels against the interpreted fallback.

The backend is chosen at import time from MATPROPHET_NO_NUMBA, so each side
runs in its own subprocess. Every workload gets one untimed warmup call
(absorbs jit compilation), then the best of --repeat timed passes is kept.
Workloads return a checksum so the two backends can be checked for agreement;
with identical seeds and no fastmath they should match to the last bit.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--trials 50000]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def make_workloads(trials):
    import numpy as np

    from matprophet import (GraphicRandomCut, ProphetInstance,
                            blocking_probability, ex_ante_reduce,
                            expected_value_exact, monte_carlo_ratio)
    from matprophet.generate import (random_distribution, random_graph,
                                     random_polytope_point)

    rng = np.random.default_rng(101)

    def graphic_instance(nv, ne):
        g = random_graph(rng, nv, ne, allow_parallel=True)
        dists = tuple(random_distribution(rng) for _ in range(ne))
        return ProphetInstance(g, dists)

    small = graphic_instance(6, 9)
    big = graphic_instance(14, 28)
    big_algo = GraphicRandomCut(big, mode="mc", reduce_trials=20_000, seed=5)
    small_algo = GraphicRandomCut(small)
    block_inst = graphic_instance(8, 12)
    block_p = random_polytope_point(block_inst.matroid, rng) / 4.0

    def exact_reduce():
        res = ex_ante_reduce(small, mode="exact")
        return res.bound() + float(res.p.sum())

    def mc_reduce():
        res = ex_ante_reduce(big, mode="mc", trials=200_000, seed=3)
        return res.bound()

    def mc_online():
        res = monte_carlo_ratio(big, big_algo, trials=trials, seed=9)
        return res.mean_alg + res.mean_prophet

    def rule_value():
        return expected_value_exact(small, small_algo)

    def blocking():
        g = block_inst.matroid
        full = range(g.n)
        return sum(blocking_probability(g, block_p, full, i, mode="exact")
                   for i in range(g.n))

    return [
        ("exact-reduce", exact_reduce),
        ("mc-reduce", mc_reduce),
        ("mc-online", mc_online),
        ("rule-value-exact", rule_value),
        ("blocking-exact", blocking),
    ]


def run_worker(trials, repeat):
    from matprophet._jit import BACKEND

    times = {}
    checks = {}
    for name, fn in make_workloads(trials):
        checks[name] = float(fn())
        best = None
        for _ in range(repeat):
            start = time.perf_counter()
            fn()
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        times[name] = best
    print(json.dumps({"backend": BACKEND, "times": times, "checks": checks}))


def run_backend(no_numba, args):
    env = dict(os.environ)
    env.pop("MATPROPHET_NO_NUMBA", None)
    if no_numba:
        env["MATPROPHET_NO_NUMBA"] = "1"
    cmd = [sys.executable, os.path.abspath(__file__), "--worker",
           "--trials", str(args.trials), "--repeat", str(args.repeat)]
    out = subprocess.run(cmd, env=env, check=True, capture_output=True,
                         text=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=50_000,
                    help="monte carlo trials for the mc-online workload")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        run_worker(args.trials, args.repeat)
        return 0

    py = run_backend(True, args)
    nb = run_backend(False, args)
    if nb["backend"] != "numba":
        print("numba backend unavailable; timing interpreted path twice",
              file=sys.stderr)

    width = max(len(n) for n in py["times"])
    print(f"{'workload':<{width}}  {'python':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_py in py["times"].items():
        t_nb = nb["times"][name]
        print(f"{name:<{width}}  {t_py:>9.4f}s  {t_nb:>9.4f}s  "
              f"{t_py / t_nb:>7.1f}x")

    drift = max(abs(py["checks"][n] - nb["checks"][n]) for n in py["checks"])
    print(f"max checksum drift across backends: {drift:.3e}")
    return 0 if drift == 0.0 else 1


if __name__ == "__main__":
    sys.exit(main())
