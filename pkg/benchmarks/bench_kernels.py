"""Compiled vs numpy kernels, per kernel and end to end.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Kernel inputs are taken from the peak-PV hour of the 30-bus fixture so the
sizes match real use. The end-to-end rows time a cold solve and one
post-optimal range update with each backend active.
"""
import argparse
import json
import statistics
import sys
import time

import numpy as np

from daopf import kernels
from daopf.post_optimal import ALPHA_TOL, FEAS_TOL, itr, pv_range, r_matrix, update_loads
from daopf.lp_core import solve
from daopf.scheduler import default_config_path, load_config, run_schedule


def median_us(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1e6 * statistics.median(times)


def workloads():
    cfg = load_config(default_config_path())
    sched = run_schedule(cfg, analyse=False)
    hr = sched.hour(int(np.argmax(sched.profile.pv_output)) + 1)
    sol, rowmap, loads = hr.solution, hr.rowmap, hr.instance.bus_loads
    binv = np.array(sol.basis_inverse)
    col = np.array(sol.lp.A[:, 0])
    d = binv @ col
    r = int(np.argmax(np.abs(d)))
    R = r_matrix(sol, rowmap)
    xb = np.array(sol.x_basic)
    frac = kernels.itr_fractions(R, xb, loads, ALPHA_TOL, FEAS_TOL)
    basis = np.array(sol.basis)
    delta = 0.5 * itr(sol, rowmap, loads).dec

    def eta():
        b = binv.copy()
        kernels.eta_update(b, d, r)

    def step():
        new = update_loads(sol, rowmap, delta)
        pv_range(new, rowmap, cfg.pv_bus, pv_mw=hr.instance.pv_mw)
        itr(new, rowmap, loads + delta)

    return {
        "eta_update": eta,
        "ratio_test": lambda: kernels.ratio_test(xb, d, basis, 1e-9, 1e-12),
        "sa_bounds": lambda: kernels.sa_bounds(xb, binv[:, rowmap.balance_row(cfg.pv_bus)], ALPHA_TOL),
        "itr_fractions": lambda: kernels.itr_fractions(R, xb, loads, ALPHA_TOL, FEAS_TOL),
        "itr_bounds": lambda: kernels.itr_bounds(R, frac, loads, ALPHA_TOL),
        "cold_solve": lambda: solve(sol.lp),
        "range_update": step,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)

    backends = [b for b in ("python", "compiled") if b in kernels.BACKENDS]
    if "compiled" not in backends:
        print("compiled kernels are not built; only the numpy backend is timed", file=sys.stderr)
    jobs = workloads()
    results = {}
    for b in backends:
        kernels.use_backend(b)
        results[b] = {}
        for name, fn in jobs.items():
            reps = max(10, args.repeat // 10) if name == "cold_solve" else args.repeat
            results[b][name] = median_us(fn, reps)

    print(f"{'kernel':<16}" + "".join(f"{b + ' us':>14}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for name in jobs:
        line = f"{name:<16}" + "".join(f"{results[b][name]:>14.2f}" for b in backends)
        if len(backends) == 2:
            line += f"{results['python'][name] / results['compiled'][name]:>10.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
