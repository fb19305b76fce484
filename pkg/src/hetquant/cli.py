"""Command-line interface.

Exit codes: 0 success, 1 domain or runtime error, 2 usage error.
Machine output is CSV; floats are printed with 17 significant digits so
they re-parse to the identical double.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Sequence

import numpy as np

from . import bounds as bd
from .distributions import BaseLaw, DomainError, HeteroSample, load_sample
from .exact import order_stat_cdf, order_stat_upper_tail
from .montecarlo import (
    McConfig,
    MedianAbs,
    MedianTail,
    OrderStatTail,
    empirical_vs_bound,
    run,
    sweep_n2,
    two_group_sample,
)

PLAN_MAX_N2 = 10**6


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _rows_to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument types (failures here are usage errors, exit 2)
# ---------------------------------------------------------------------------

def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _positive_float(text: str) -> float:
    value = _finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text!r}")
    return value


def parse_grid(text: str) -> list[float]:
    """``lo:hi:steps`` with inclusive endpoints; ``steps`` points in total."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:steps, got {text!r}")
    lo, hi = _finite_float(parts[0]), _finite_float(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid steps must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise argparse.ArgumentTypeError(f"grid is empty: {text!r}")
    if steps == 1:
        if lo != hi:
            raise argparse.ArgumentTypeError(f"a one-point grid needs lo == hi: {text!r}")
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, steps)]


def parse_int_range(text: str) -> range:
    """``lo:hi`` inclusive."""
    parts = text.split(":")
    try:
        lo, hi = (int(v) for v in parts) if len(parts) == 2 else (int(parts[0]),) * 2
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like lo:hi, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"range must satisfy 0 <= lo <= hi, got {text!r}")
    return range(lo, hi + 1)


def _t_values(args) -> list[float]:
    if args.t is not None:
        return [args.t]
    return args.t_grid


def _add_t_options(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--t", type=_finite_float, help="single threshold / deviation")
    group.add_argument("--t-grid", type=parse_grid, metavar="LO:HI:STEPS", help="inclusive grid")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_exact(args) -> str:
    sample = load_sample(args.sample_file)
    rows = []
    for t in _t_values(args):
        rows.append((t, order_stat_upper_tail(sample, args.p, t).prob, order_stat_cdf(sample, args.p, t)))
    return _rows_to_csv(["t", "upper_tail", "cdf"], rows)


def _require_base(sample: HeteroSample, base: BaseLaw, which: str) -> None:
    if sample.common_base is not base:
        raise DomainError(f"--which {which} needs every law to be {base.value}")


def cmd_bound(args) -> str:
    sample = load_sample(args.sample_file)
    which = args.which
    if which == "percentile" and args.tau is None:
        raise DomainError("--which percentile needs --tau")
    radius_fns = {
        "normal": (BaseLaw.NORMAL, bd.normal_median_radius),
        "cauchy": (BaseLaw.CAUCHY, bd.cauchy_median_radius),
        "laplace": (BaseLaw.LAPLACE, bd.laplace_median_radius),
    }
    if which in radius_fns:
        _require_base(sample, radius_fns[which][0], which)
    elif which == "percentile":
        _require_base(sample, BaseLaw.NORMAL, which)
        if not 0.0 <= args.tau <= 0.25:
            raise DomainError(f"tau must lie in [0, 0.25], got {args.tau}")
    elif which == "theorem2" and sample.common_base is None:
        raise DomainError("--which theorem2 needs all laws to share one base law")

    rows = []
    for t in _t_values(args):
        if which == "theorem1":
            for side, fn in (("upper", bd.theorem1_upper), ("lower", bd.theorem1_lower)):
                b = fn(sample, args.p, t)
                rows.append((t, side, b.prob_bound, b.condition_ok, b.radius))
        elif which == "corollary1":
            for side, fn in (("upper", bd.corollary1_upper), ("lower", bd.corollary1_lower)):
                b = fn(sample, args.p, t)
                rows.append((t, side, b.prob_bound, b.condition_ok, b.radius))
        elif which == "theorem2":
            b = bd.theorem2_median_bound(sample, t)
            rows.append((t, "two-sided", b.prob_bound, b.condition_ok, b.radius))
        elif which in radius_fns:
            b = radius_fns[which][1](sample.sigmas, t)
            rows.append((t, "two-sided", b.prob_bound, b.condition_ok, b.radius))
        else:
            pb = bd.normal_percentile_bound(sample.sigmas, args.tau, t)
            rows.append((t, "upper", pb.upper.prob_bound, pb.upper.condition_ok, pb.upper.radius))
            rows.append((t, "lower", pb.lower.prob_bound, pb.lower.condition_ok, pb.lower.radius))
    return _rows_to_csv(["t", "side", "bound", "condition_ok", "radius"], rows)


def cmd_simulate(args) -> str:
    sample = load_sample(args.sample_file)
    if args.statistic == "median-abs":
        stat = MedianAbs()
    elif args.t is None:
        raise DomainError(f"--statistic {args.statistic} needs --t")
    elif args.statistic == "median-tail":
        stat = MedianTail(args.t)
    else:
        stat = OrderStatTail(args.p, args.t)
    est = run(McConfig(sample, args.replicates, args.seed, stat, args.median))
    if est.warning:
        print(f"warning: {est.warning}", file=sys.stderr)
    return _rows_to_csv(["mean", "std_error", "replicates", "seed"], [(est.mean, est.std_error, est.replicates, est.seed)])


def cmd_sweep(args) -> str:
    rows = sweep_n2(args.n1, args.sigma1, args.sigma2, args.n2, args.replicates, args.seed, median=args.median)
    text = _rows_to_csv(["n2", "mean", "std_error"], [(n2, e.mean, e.std_error) for n2, e in rows])
    summary = ""
    if args.target is not None:
        hit = next((n2 for n2, e in rows if e.mean <= args.target), None)
        if hit is None:
            summary = f"# no n2 in range reaches mean <= {fmt(args.target)}\n"
        else:
            summary = f"# smallest n2 with mean <= {fmt(args.target)}: {hit}\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise DomainError(f"cannot write {args.out!r}: {exc.strerror}") from None
        return summary
    return text + summary


def plan_n2(n1: int, sigma1: float, sigma2: float, target: float, t: float, max_n2: int = PLAN_MAX_N2):
    """Smallest ``n2`` whose normal median radius is within ``target`` and valid.

    Returns ``(n2, radius)`` or ``None`` when no ``n2 <= max_n2`` qualifies.
    """
    n2 = np.arange(0, max_n2 + 1, dtype=float)
    n = n1 + n2
    h = n1 / sigma1 + n2 / sigma2
    radius = bd.NORMAL_RADIUS_CONSTANT * np.sqrt(n * t) / h
    min_sigma = np.where(n2 > 0, min(sigma1, sigma2), sigma1)
    ok = (radius <= target) & (radius <= 0.5 * min_sigma)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    k = int(hits[0])
    return k, float(radius[k])


def cmd_plan(args) -> str:
    found = plan_n2(args.n1, args.sigma1, args.sigma2, args.target, args.confidence_t)
    header = ["n2", "radius", "condition_ok", "prob_bound", "mc_mean", "mc_se"]
    if found is None:
        msg = f"# infeasible under the bound's conditions for any n2 <= {PLAN_MAX_N2}\n"
        return msg + _rows_to_csv(header, [])
    n2, _ = found
    sample = two_group_sample(args.n1, args.sigma1, n2, args.sigma2)
    b = bd.normal_median_radius(sample.sigmas, args.confidence_t)
    est = run(McConfig(sample, args.replicates, args.seed, MedianAbs()))
    msg = (
        f"# n2 = {n2}: |median| <= {fmt(b.radius)} with probability >= {fmt(b.coverage)}"
        f"; simulated E|median| = {fmt(est.mean)} (se {fmt(est.std_error)})\n"
    )
    return msg + _rows_to_csv(header, [(n2, b.radius, b.condition_ok, b.prob_bound, est.mean, est.std_error)])


def cmd_compare(args) -> str:
    sample = load_sample(args.sample_file)
    rows = empirical_vs_bound(sample, args.p, args.t_grid, args.replicates, args.seed)
    header = ["t", "exact", "mc", "mc_se", "theorem1", "corollary1", "t1_ok", "c1_ok"]
    return _rows_to_csv(
        header,
        [(r.t, r.exact, r.mc, r.mc_se, r.theorem1, r.corollary1, r.t1_ok, r.c1_ok) for r in rows],
    )


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetquant",
        description="Exact tails, concentration bounds and simulation for percentiles "
        "of independent non-identical random variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact order-statistic tail and cdf")
    p.add_argument("sample_file")
    p.add_argument("--p", type=_positive_float, default=0.5)
    _add_t_options(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bound", help="analytic tail bounds")
    p.add_argument("sample_file")
    p.add_argument("--p", type=_positive_float, default=0.5)
    p.add_argument(
        "--which",
        required=True,
        choices=["theorem1", "corollary1", "theorem2", "normal", "cauchy", "laplace", "percentile"],
    )
    p.add_argument("--tau", type=_finite_float)
    _add_t_options(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of one statistic")
    p.add_argument("sample_file")
    p.add_argument("--replicates", type=_positive_int, default=5000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--statistic", choices=["median-abs", "median-tail", "order-tail"], default="median-abs")
    p.add_argument("--p", type=_positive_float, default=0.5)
    p.add_argument("--t", type=_finite_float)
    p.add_argument("--median", choices=["rank", "conventional"], default="rank")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="E|median| of two pooled normal groups as n2 varies")
    p.add_argument("--n1", type=_positive_int, required=True)
    p.add_argument("--sigma1", type=_positive_float, required=True)
    p.add_argument("--sigma2", type=_positive_float, required=True)
    p.add_argument("--n2", type=parse_int_range, required=True, metavar="LO:HI")
    p.add_argument("--replicates", type=_positive_int, default=5000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--target", type=_positive_float)
    p.add_argument("--median", choices=["rank", "conventional"], default="rank")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plan", help="smallest n2 meeting a median radius target")
    p.add_argument("--n1", type=_positive_int, required=True)
    p.add_argument("--sigma1", type=_positive_float, required=True)
    p.add_argument("--sigma2", type=_positive_float, required=True)
    p.add_argument("--target", type=_positive_float, required=True)
    p.add_argument("--confidence-t", type=_positive_float, default=1.0)
    p.add_argument("--replicates", type=_positive_int, default=2000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compare", help="exact vs simulated vs bounded upper tails")
    p.add_argument("sample_file")
    p.add_argument("--p", type=_positive_float, default=0.5)
    p.add_argument("--t-grid", type=parse_grid, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--replicates", type=_positive_int, default=20000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_compare)
    return parser


_NUMERIC_OPTIONS = {"--t", "--t-grid", "--tau", "--p"}


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse reads "-1:1:3" as an option; glue such values to their flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _NUMERIC_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt[:1] == "-" and (nxt[1:2].isdigit() or nxt[1:2] == "."):
                out.append(f"{tok}={nxt}")
            else:
                out.extend((tok, nxt))
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        out = args.func(args)
    except DomainError as exc:
        print(f"hetquant {args.command}: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
