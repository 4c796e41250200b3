"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py --sizes 500 1000 2000 --repeat 3
    CORRMAX_THREADS=1 python benchmarks/bench_kernels.py --json bench.json

Every case is run on each available backend; the best of ``--repeat`` wall
times is reported together with the compiled speedup. Results from the two
backends are cross-checked so a fast but wrong kernel cannot go unnoticed.
"""

import argparse
import json
import sys
import time

import numpy as np

from corrmax import distributions as D
from corrmax._backend import available
from corrmax.kernel import corr_offdiag_max, gram_offdiag_max, prefix_trajectory
from corrmax.sim import PnSchedule, sample_matrix


def _cases(n, workers):
    X = sample_matrix(D.normal(), n, n, seed=n)
    cps = [n // 8, n // 4, n // 2, n]
    return {
        "sample": lambda be: sample_matrix(D.normal(), n, n, seed=n, backend=be).values[-1, -1],
        "sample_t3": lambda be: sample_matrix(D.student_t(3), n, n, seed=n, backend=be).values[-1, -1],
        "gram_max": lambda be: gram_offdiag_max(X, workers=workers, backend=be).value,
        "corr_max": lambda be: corr_offdiag_max(X, workers=workers, backend=be).value,
        "trajectory": lambda be: prefix_trajectory(
            X, PnSchedule.proportional(1), cps, workers=workers, backend=be
        )[-1].L,
    }


def _best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes, repeat, workers, backends):
    rows = []
    for n in sizes:
        for name, fn in _cases(n, workers).items():
            row = {"case": name, "n": n, "p": n}
            vals = {}
            for be in backends:
                row[be], vals[be] = _best_time(lambda: fn(be), repeat)
            if len(vals) == 2:
                a, b = vals.values()
                row["agree"] = bool(np.isclose(a, b, rtol=1e-12, atol=0))
                row["speedup"] = row["python"] / row["compiled"]
            rows.append(row)
    return rows


def _print_table(rows, backends, stream):
    head = f"{'case':<12}{'n':>7}" + "".join(f"{be + ' [s]':>15}" for be in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}{'agree':>7}"
    print(head, file=stream)
    for r in rows:
        line = f"{r['case']:<12}{r['n']:>7}" + "".join(f"{r[be]:>15.4f}" for be in backends)
        if "speedup" in r:
            line += f"{r['speedup']:>10.2f}{'yes' if r['agree'] else 'NO':>7}"
        print(line, file=stream)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None, help="kernel workers (default: CORRMAX_THREADS or CPU count)")
    ap.add_argument("--backend", choices=available(), action="append", help="restrict to one backend (repeatable)")
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args(argv)
    backends = args.backend or available()
    rows = run(args.sizes, args.repeat, args.threads, backends)
    _print_table(rows, backends, sys.stdout)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"threads": args.threads, "backends": backends, "rows": rows}, fh, indent=2)
    return 0 if all(r.get("agree", True) for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
