"""Acceptance criteria, one test each.

Every test appends a (name, passed, detail) line to ``ACCEPTANCE_LOG`` before
asserting, so the terminal summary lists all criteria even when one fails.
"""

import csv
import io
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LOG, random_sample, t_for_probability
from hetquant import bounds as bd
from hetquant.distributions import BaseLaw, HeteroSample
from hetquant.exact import exact_two_sided_median, order_stat_cdf, order_stat_upper_tail, poisson_binomial_pmf
from hetquant.mixture import density_min_scan
from hetquant.montecarlo import McConfig, MedianAbs, MedianTail, OrderStatTail, run
from test_exact import brute_force_pmf

SYMMETRIC_RADIUS = {
    BaseLaw.NORMAL: bd.normal_median_radius,
    BaseLaw.CAUCHY: bd.cauchy_median_radius,
    BaseLaw.LAPLACE: bd.laplace_median_radius,
}


def record(name, ok, detail):
    ACCEPTANCE_LOG.append((name, bool(ok), detail))
    assert ok, f"{name}: {detail}"


def cli(*argv, threads=None, check=True):
    env = dict(os.environ)
    if threads is not None:
        env["HETQUANT_THREADS"] = str(threads)
    proc = subprocess.run([sys.executable, "-m", "hetquant", *argv], capture_output=True, env=env)
    if check and proc.returncode != 0:
        raise AssertionError(proc.stderr.decode())
    return proc


def lower_event(sample, p, threshold):
    # P(X^(m) <= threshold); continuous laws make < and <= agree
    return order_stat_cdf(sample, p, float(np.nextafter(threshold, np.inf)))


def test_c1_exact_engine_matches_enumeration():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        probs = rng.uniform(size=int(rng.integers(1, 13)))
        worst = max(worst, float(np.max(np.abs(poisson_binomial_pmf(probs) - brute_force_pmf(probs)))))
    elapsed = time.perf_counter() - start
    record("1 exact engine vs 2^n enumeration", worst <= 1e-12 and elapsed < 10, f"max abs err {worst:.2e}, {elapsed:.2f}s")


def test_c2_order_statistic_vs_monte_carlo():
    rng = np.random.default_rng(2)
    hits = 0
    for case in range(100):
        n = int(rng.integers(1, 11))
        s = random_sample(rng, n)
        p = Fraction(int(rng.integers(1, n + 1)), n)
        # a threshold where the tail is neither tiny nor near 1, so the standard error is informative
        target = float(rng.uniform(0.05, 0.95))
        t = t_for_probability(lambda u: order_stat_upper_tail(s, p, u).prob, target)
        exact = order_stat_upper_tail(s, p, t).prob
        est = run(McConfig(s, 100_000, 1000 + case, OrderStatTail(p, t)))
        hits += abs(est.mean - exact) <= 4 * est.std_error
    record("2 order-statistic tail vs Monte Carlo", hits >= 99, f"{hits}/100 within 4 SE")


def _domination_configs(rng):
    """Yield (family, bound, exact) triples for randomized inputs."""
    p_grid = [0.5, 0.1, 0.25, 0.4, 0.6, 0.75, 0.9]
    for _ in range(140):
        n = int(rng.integers(2, 201))
        s = random_sample(rng, n)
        p = float(rng.choice(p_grid))
        if p * n < 1:
            p = 0.5
        for t in (0.05, 0.2, 0.5, 1.0, 2.0, 5.0):
            b = bd.theorem1_upper(s, p, t)
            yield "hoeffding upper", b, order_stat_upper_tail(s, p, b.threshold).prob
            b = bd.theorem1_lower(s, p, t)
            yield "hoeffding lower", b, lower_event(s, p, b.threshold)
            b = bd.corollary1_upper(s, p, t)
            yield "density-floor upper", b, order_stat_upper_tail(s, p, b.threshold).prob
            b = bd.corollary1_lower(s, p, t)
            yield "density-floor lower", b, lower_event(s, p, b.threshold)
    for _ in range(150):
        n = int(rng.integers(2, 201))
        base = list(BaseLaw)[int(rng.integers(len(BaseLaw)))]
        s = HeteroSample.of(base, np.exp(rng.uniform(-1, 1, size=n)))
        for t in (0.05, 0.1, 0.3, 1.0):
            b = bd.theorem2_median_bound(s, t)
            yield "scale-family median", b, exact_two_sided_median(s, t)
    for _ in range(300):
        n = int(rng.integers(10, 201))
        base = list(SYMMETRIC_RADIUS)[int(rng.integers(3))]
        sig = np.exp(rng.uniform(0, 0.5, size=n))
        s = HeteroSample.of(base, sig)
        for conf in (0.05, 0.2, 0.5, 1.0, 3.0):
            b = SYMMETRIC_RADIUS[base](sig, conf)
            if b.condition_ok:
                yield f"{base.value} radius", b, exact_two_sided_median(s, b.radius)


def test_c3_bound_domination():
    rng = np.random.default_rng(3)
    counts, violations, tightest = {}, [], 0.0
    for family, b, exact in _domination_configs(rng):
        if not b.condition_ok:
            continue
        counts[family] = counts.get(family, 0) + 1
        if exact > b.prob_bound + 1e-12:
            violations.append((family, exact, b.prob_bound))
        if b.prob_bound < 1:
            tightest = max(tightest, exact / b.prob_bound)
    total = sum(counts.values())
    detail = f"{total} valid configs, {len(violations)} violations, max exact/bound {tightest:.3f}; " + ", ".join(
        f"{k}={v}" for k, v in sorted(counts.items())
    )
    record("3 bounds dominate exact tails", total >= 1000 and not violations and len(counts) == 8, detail)


def test_c4_two_group_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    start = time.perf_counter()
    proc = cli(
        "sweep", "--n1", "80", "--sigma1", "1000", "--sigma2", "1", "--n2", "0:40",
        "--replicates", "5000", "--seed", "1", "--target", "5", "--out", str(out),
    )
    elapsed = time.perf_counter() - start
    rows = [(int(r["n2"]), float(r["mean"]), float(r["std_error"])) for r in csv.DictReader(io.StringIO(out.read_text()))]
    bumps = [
        (a[0], b[0]) for a, b in zip(rows, rows[1:]) if b[1] > a[1] + 3 * math.hypot(a[2], b[2])
    ]
    at16 = dict((n2, m) for n2, m, _ in rows)[16]
    summary = proc.stdout.decode().strip()
    hit = int(summary.rsplit(":", 1)[1])
    ok = not bumps and 2.5 <= at16 <= 10 and abs(hit - 16) <= 4 and elapsed < 60
    detail = f"mean(n2=0)={rows[0][1]:.1f}, mean(n2=16)={at16:.2f}, target 5 reached at n2={hit}, increases={bumps}, {elapsed:.1f}s"
    record("4 two-group sweep", ok, detail)


def test_c5_scaling_with_n():
    sigma = 3.0
    ratios = []
    for n in (100, 400, 1600):
        est = run(McConfig(HeteroSample.of("normal", [sigma] * n), 20_000, 5))
        ratios.append(est.mean * math.sqrt(n) / sigma)
    spread = max(ratios) / min(ratios) - 1
    record("5 E|M| scales as sigma/sqrt(n)", spread <= 0.15, "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + f", spread {spread:.2%}")


def test_c6_normal_radius_coverage():
    b = bd.normal_median_radius([1.0] * 100, 1.0)
    est = run(McConfig(HeteroSample.of("normal", [1.0] * 100), 200_000, 6, MedianTail(b.radius)))
    guarantee = 2 * math.exp(-2)
    ok = b.condition_ok and abs(b.radius - 10 / 35) < 1e-15 and est.mean <= guarantee
    record("6 normal median radius coverage", ok, f"radius {b.radius:.5f}, P(|M|>=radius) ~ {est.mean:.5f} (se {est.std_error:.1e}) <= {guarantee:.5f}")


def test_c7_constants():
    normal_min = BaseLaw.NORMAL.pdf(0.5)
    cauchy_min = density_min_scan(BaseLaw.CAUCHY, -0.5, 0.5)
    laplace_min = density_min_scan(BaseLaw.LAPLACE, -0.5, 0.5)
    errs = [
        abs(normal_min - math.exp(-1 / 8) / math.sqrt(2 * math.pi)),
        abs(cauchy_min - 4 / (5 * math.pi)),
        abs(laplace_min - 1 / (2 * math.sqrt(math.e))),
    ]
    ok = normal_min >= 0.35 and max(errs) <= 1e-12
    record("7 density constants", ok, f"normal {normal_min:.6f} >= 0.35, cauchy {cauchy_min:.6f}, laplace {laplace_min:.6f}, max err {max(errs):.1e}")


def test_c8_percentile_theorem():
    rng = np.random.default_rng(8)
    worst_identity = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 500))
        sigma = float(np.exp(rng.uniform(-3, 3)))
        t = float(rng.uniform(1e-3, 10))
        dev = bd.normal_percentile_bound([sigma] * n, 0.0, t).upper.radius
        median_form = bd.median_radius([sigma] * n, t, math.sqrt(8 * math.pi) * math.exp(0.25)).radius
        worst_identity = max(worst_identity, abs(dev / median_form - 1))

    checked, violations = 0, 0
    while checked < 1000:
        n = int(rng.integers(20, 201))
        sig = np.exp(rng.uniform(0, 0.3, size=n))
        s = HeteroSample.of("normal", sig)
        tau = float(rng.uniform(0, 0.25))
        t = float(rng.uniform(1 / n, n / 200))
        pb = bd.normal_percentile_bound(sig, tau, t)
        if pb.upper.condition_ok:
            checked += 1
            violations += order_stat_upper_tail(s, pb.upper_p, pb.upper.threshold).prob > pb.upper.prob_bound + 1e-12
        if pb.lower.condition_ok:
            checked += 1
            violations += lower_event(s, pb.lower_p, pb.lower.threshold) > pb.lower.prob_bound + 1e-12
    ok = worst_identity <= 1e-14 and violations == 0
    record("8 percentile theorem", ok, f"tau=0 identity rel err {worst_identity:.1e}; {checked} valid configs, {violations} violations")


def test_c9_cli_determinism(tmp_path):
    sample = tmp_path / "mix.txt"
    sample.write_text("normal:1 x6\ncauchy:2 x5\nlaplace:0.5 x5\n")
    normals = tmp_path / "normals.txt"
    normals.write_text("normal:1 x100\n")
    commands = {
        "exact": ["exact", str(sample), "--p", "0.5", "--t-grid", "-1:1:5"],
        "bound": ["bound", str(normals), "--which", "percentile", "--tau", "0.1", "--t-grid", "0.01:0.5:4"],
        "simulate": ["simulate", str(sample), "--replicates", "50000", "--seed", "9"],
        "sweep": ["sweep", "--n1", "80", "--sigma1", "1000", "--sigma2", "1", "--n2", "10:14", "--replicates", "3000", "--seed", "9", "--target", "8"],
        "plan": ["plan", "--n1", "80", "--sigma1", "1000", "--sigma2", "1", "--target", "1", "--replicates", "3000", "--seed", "9"],
        "compare": ["compare", str(sample), "--t-grid", "0:2:5", "--replicates", "20000", "--seed", "9"],
    }
    differing = []
    for name, argv in commands.items():
        outputs = set()
        for threads in (1, 4, os.cpu_count() or 1):
            for _ in range(2):
                outputs.add(cli(*argv, threads=threads).stdout)
        if len(outputs) != 1:
            differing.append(name)
    record("9 CLI determinism across worker counts", not differing, f"{len(commands)} commands x threads {{1, 4, {os.cpu_count()}}} x 2 runs; differing: {differing or 'none'}")
