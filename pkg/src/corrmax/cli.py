"""Command-line front end.

Subcommands::

    corrmax stat FILE [FILE2] [--statistic W|L|T|both] [--format json|csv]
    corrmax test FILE [--level 0.05]
    corrmax simulate --experiment slln|ll|evd|diverge [...]
    corrmax check --dist SPEC --condition slln|ll [--alpha A] [--mc-samples N]

Data go to ``--output`` (default standard output), diagnostics to standard
error. The exit status is 0 iff the report was written, 1 on a data or
domain error and 2 on a usage error.
"""

import argparse
import contextlib
import math
import sys

from . import __version__
from .asymptotics import run_test
from .distributions import DistributionSpec
from .errors import CorrmaxError, ShapeError
from .kernel import corr_offdiag_max, cross_gram_max, gram_offdiag_max
from .matrix import load_matrix
from .moments import ll_condition_verdict, slln_condition_verdict
from .sim import (
    DEFAULT_CHECKPOINTS,
    PnSchedule,
    divergence_probe,
    dumps,
    run_evd_experiment,
    run_ll_experiment,
    run_slln_experiment,
    seed_list,
    summarize,
    write_csv,
    write_jsonl,
)

PROG = "corrmax"


class UsageError(Exception):
    """Invalid flag combination detected after parsing."""


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _level(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return v


def _int_list(text):
    try:
        vals = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _seeds(text):
    """``"20"`` is a count of derived seeds; ``"3,7,11"`` (or ``"5,"``) an explicit list."""
    if "," in text:
        return tuple(_int_list(text))
    return _positive_int(text)


def _dist(text):
    try:
        return DistributionSpec.parse(text)
    except (CorrmaxError, ValueError, NotImplementedError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _schedule(text):
    try:
        return PnSchedule.parse(text)
    except (CorrmaxError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads (default: $CORRMAX_THREADS, else all cores)",
    )
    common.add_argument("-o", "--output", default="-", help="report destination (default stdout)")

    parser = argparse.ArgumentParser(prog=PROG, description="Extremal sample correlations and Gram entries.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{stat,test,simulate,check}")

    p = sub.add_parser("stat", parents=[common], help="W, L or T of data files")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="CSV or CMX1 matrix (two files for T)")
    p.add_argument("--statistic", choices=("W", "L", "T", "both"), default="both")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--header", action="store_true", help="skip the first CSV line")
    p.add_argument("--skip-degenerate", action="store_true", help="drop constant columns for L")

    p = sub.add_parser("test", parents=[common], help="independence test from the extreme-value limit")
    p.add_argument("input", metavar="FILE")
    p.add_argument("--level", type=_level, default=0.05)
    p.add_argument("--header", action="store_true")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo experiments")
    p.add_argument("--experiment", choices=("slln", "ll", "evd", "diverge"), required=True)
    p.add_argument("--dist", type=_dist, default=DistributionSpec.parse("normal"), help="e.g. normal:0,1, std_student_t:3")
    p.add_argument("--alpha", type=float, default=None, help="power exponent for slln (> 1/2)")
    p.add_argument("--gamma", type=float, default=1.0, help="n/p ratio; shorthand for --schedule proportional:GAMMA")
    p.add_argument("--schedule", type=_schedule, default=None, help="proportional:G | ratio_band:LO,HI[,PATTERN] | fixed:P")
    p.add_argument("--checkpoints", type=_int_list, default=list(DEFAULT_CHECKPOINTS))
    p.add_argument("--seeds", type=_seeds, default=20, help="seed count (derived from --seed) or comma list")
    p.add_argument("--replicates", type=_positive_int, default=None, help="evd replicates (>= 100)")
    p.add_argument("--n", type=_positive_int, default=None, help="evd sample size")
    p.add_argument("--p", type=_positive_int, default=None, help="evd dimension (default round(n/gamma))")
    p.add_argument("--records", default=None, help="write per-seed records as JSON lines")
    p.add_argument("--csv", default=None, help="write plot-ready CSV")

    p = sub.add_parser("check", parents=[common], help="moment-condition diagnostics")
    p.add_argument("--dist", type=_dist, required=True)
    p.add_argument("--condition", choices=("slln", "ll"), required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mc-samples", type=_positive_int, default=None)
    return parser


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit_json(obj, path):
    with _sink(path) as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def _pair(res):
    return [res.i + 1, res.j + 1]


def cmd_stat(args):
    want = args.statistic
    if want == "T":
        if len(args.inputs) != 2:
            raise UsageError("--statistic T needs exactly two input files")
    elif len(args.inputs) != 1:
        raise UsageError(f"--statistic {want} takes one input file")
    mats = [load_matrix(f, has_header=args.header) for f in args.inputs]
    X = mats[0]
    rows = []
    report = {"n": X.n, "p": X.p}
    if want == "T":
        U, V = mats
        if U.n != V.n:
            raise ShapeError(f"row counts differ: {U.n} vs {V.n}")
        res = cross_gram_max(U, V, workers=args.threads)
        report = {"n": U.n, "p": U.p, "q": V.p, "T": res.value, "T_pair": _pair(res)}
        rows.append(("T", res))
    if want in ("W", "both"):
        res = gram_offdiag_max(X, workers=args.threads)
        report.update(W=res.value, W_pair=_pair(res))
        rows.append(("W", res))
    if want in ("L", "both"):
        res = corr_offdiag_max(X, skip_degenerate=args.skip_degenerate, workers=args.threads)
        report.update(L=res.value, L_pair=_pair(res))
        rows.append(("L", res))
    if args.format == "json":
        _emit_json(report, args.output)
    else:
        with _sink(args.output) as fh:
            fh.write("statistic,value,i,j,n,p\n")
            for name, res in rows:
                fh.write(f"{name},{res.value!r},{res.i + 1},{res.j + 1},{res.n_used},{res.p_used}\n")


def cmd_test(args):
    X = load_matrix(args.input, has_header=args.header)
    _emit_json(run_test(X, args.level, workers=args.threads).to_dict(), args.output)


def _simulate_schedule(args):
    if args.schedule is not None:
        return args.schedule
    if not (args.gamma > 0 and math.isfinite(args.gamma)):
        raise UsageError(f"--gamma must be positive, got {args.gamma}")
    return PnSchedule.proportional(args.gamma)


def _write_side_files(args, records):
    if args.records:
        with _sink(args.records) as fh:
            write_jsonl(records, fh)
    if args.csv:
        with _sink(args.csv) as fh:
            write_csv(records, fh)


def cmd_simulate(args):
    exp = args.experiment
    seeds = seed_list(args.seeds, args.seed) if exp != "evd" else None
    base = {"experiment": exp, "dist": str(args.dist), "seed": args.seed}
    if exp == "evd":
        if args.alpha is not None:
            raise UsageError("--alpha does not apply to --experiment evd")
        if args.replicates is None or args.replicates < 100:
            raise UsageError("--experiment evd needs --replicates >= 100")
        n = args.n or 500
        p = args.p or max(2, round(n / args.gamma))
        seeds_arg = args.seed if isinstance(args.seeds, int) else args.seeds
        rec = run_evd_experiment(args.dist, n, p, args.replicates, seeds_arg, workers=args.threads)
        if args.records:
            with _sink(args.records) as fh:
                for k, (s, L, t) in enumerate(zip(rec.seeds, rec.L_samples, rec.t_samples)):
                    fh.write(dumps({"replicate": k, "seed": s, "n": n, "p": p, "L": L, "t_stat": t}) + "\n")
        if args.csv:
            with _sink(args.csv) as fh:
                fh.write("seed,n,p,w_slln,l_slln,w_ll,l_ll,colsum_ll,t_stat\n")
                scale = math.sqrt(n / math.log(n))
                for s, L, t in zip(rec.seeds, rec.L_samples, rec.t_samples):
                    fh.write(f"{s},{n},{p},,,,{scale * L!r},,{t!r}\n")
        ts = sorted(rec.t_samples)
        summary = dict(base, n=n, p=p, gamma=rec.gamma, replicates=len(ts), ks=rec.ks, median_t=ts[len(ts) // 2] if len(ts) % 2 else 0.5 * (ts[len(ts) // 2 - 1] + ts[len(ts) // 2]))
        _emit_json(summary, args.output)
        return
    if args.replicates is not None or args.n is not None or args.p is not None:
        raise UsageError("--replicates/--n/--p apply only to --experiment evd")
    schedule = _simulate_schedule(args)
    cps = args.checkpoints
    base.update(schedule=str(schedule), checkpoints=list(cps), seeds=len(seeds))
    if exp == "slln":
        if args.alpha is None:
            raise UsageError("--experiment slln needs --alpha")
        records = run_slln_experiment(args.dist, schedule, args.alpha, cps, seeds, workers=args.threads)
        base["alpha"] = args.alpha
    elif exp == "ll":
        records = run_ll_experiment(args.dist, schedule, cps, seeds, alpha=args.alpha, workers=args.threads)
        base["alpha"] = args.alpha
    else:
        if args.alpha is not None:
            raise UsageError("--alpha does not apply to --experiment diverge")
        probes = divergence_probe(args.dist, schedule, cps, seeds, workers=args.threads)
        ratios = sorted(pr.growth_ratio for pr in probes)
        m = len(ratios)
        base["growth_ratios"] = [pr.growth_ratio for pr in probes]
        base["median_growth_ratio"] = ratios[m // 2] if m % 2 else 0.5 * (ratios[m // 2 - 1] + ratios[m // 2])
        if args.records or args.csv:
            records = run_ll_experiment(args.dist, schedule, cps, seeds, workers=args.threads)
            _write_side_files(args, records)
        _emit_json(base, args.output)
        return
    _write_side_files(args, records)
    base["medians"] = summarize(records)
    _emit_json(base, args.output)


def cmd_check(args):
    if args.condition == "slln":
        if args.alpha is None:
            raise UsageError("--condition slln needs --alpha")
        if args.mc_samples is not None:
            raise UsageError("--mc-samples applies only to --condition ll")
        verdict = slln_condition_verdict(args.dist, args.alpha)
    else:
        if args.alpha is not None:
            raise UsageError("--alpha applies only to --condition slln")
        verdict = ll_condition_verdict(args.dist, n_mc=args.mc_samples, seed=args.seed)
    _emit_json(verdict.to_dict(), args.output)


COMMANDS = {"stat": cmd_stat, "test": cmd_test, "simulate": cmd_simulate, "check": cmd_check}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CorrmaxError, ValueError, NotImplementedError, OSError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
