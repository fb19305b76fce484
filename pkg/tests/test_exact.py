import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_sample
from hetquant.distributions import DomainError, HeteroSample
from hetquant.exact import (
    exact_two_sided_median,
    order_stat_cdf,
    order_stat_upper_tail,
    poisson_binomial_pmf,
    poisson_binomial_tail,
    rank_index,
)


def brute_force_pmf(probs):
    q = [0.0] * (len(probs) + 1)
    for outcome in itertools.product((0, 1), repeat=len(probs)):
        w = 1.0
        for b, p in zip(outcome, probs):
            w *= p if b else 1.0 - p
        q[sum(outcome)] += w
    return np.array(q)


def binomial_tail(n, p, m):
    p = Fraction(p)
    return float(sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(m, n + 1)))


class TestPmf:
    def test_fair_coins(self):
        np.testing.assert_array_equal(poisson_binomial_pmf([0.5, 0.5]), [0.25, 0.5, 0.25])

    def test_deterministic(self):
        np.testing.assert_array_equal(poisson_binomial_pmf([1.0, 1.0, 1.0]), [0, 0, 0, 1])

    def test_small(self):
        np.testing.assert_allclose(poisson_binomial_pmf([0.1, 0.2, 0.3]), [0.504, 0.398, 0.092, 0.006], atol=1e-15)

    def test_empty(self):
        np.testing.assert_array_equal(poisson_binomial_pmf([]), [1.0])

    @pytest.mark.parametrize("bad", [[-0.1], [1.01], [0.5, math.nan]])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            poisson_binomial_pmf(bad)

    def test_matches_enumeration(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 13))
            probs = rng.uniform(size=n)
            assert np.max(np.abs(poisson_binomial_pmf(probs) - brute_force_pmf(probs))) <= 1e-12

    def test_sums_to_one_large(self, rng):
        q = poisson_binomial_pmf(rng.uniform(size=10_000))
        assert abs(q.sum() - 1.0) <= 1e-12
        assert q.min() >= 0.0

    def test_deep_tail_relative_precision(self):
        # P(all 50 succeed) = 1e-100 exactly-to-rounding
        q = poisson_binomial_pmf([0.01] * 50)
        assert q[50] == pytest.approx(1e-100, rel=1e-12)


class TestTail:
    def test_symmetric(self):
        assert poisson_binomial_tail([0.5] * 3, 2) == 0.5

    def test_small(self):
        assert poisson_binomial_tail([0.1, 0.2, 0.3], 1) == pytest.approx(1 - 0.9 * 0.8 * 0.7, abs=1e-15)

    def test_edges(self):
        assert poisson_binomial_tail([0.3, 0.4], 0) == 1.0
        assert poisson_binomial_tail([0.3, 0.4], 3) == 0.0
        for m in (-1, 4, 1.5):
            with pytest.raises(DomainError):
                poisson_binomial_tail([0.3, 0.4], m)

    @given(st.integers(1, 20), st.floats(0.0, 1.0), st.data())
    @settings(max_examples=200)
    def test_binomial_oracle(self, n, p, data):
        m = data.draw(st.integers(0, n + 1))
        assert poisson_binomial_tail([p] * n, m) == pytest.approx(binomial_tail(n, p, m), abs=1e-13)


class TestOrderStatistics:
    def test_three_normals(self):
        s = HeteroSample.of("normal", [1] * 3)
        r = order_stat_upper_tail(s, 0.5, 0.0)
        assert (r.prob, r.m, r.t) == (0.875, 1, 0.0)

    def test_four_normals(self):
        assert order_stat_upper_tail(HeteroSample.of("normal", [1] * 4), 0.5, 0.0).prob == 11 / 16

    def test_single_variable(self, rng):
        s = random_sample(rng, 1)
        for t in (-2.0, 0.3, 5.0):
            assert order_stat_upper_tail(s, 1.0, t).prob == pytest.approx(s[0].sf(t), abs=1e-16)
            assert order_stat_cdf(s, 1.0, t) == pytest.approx(s[0].cdf(t), abs=1e-16)

    def test_even_symmetric_cdf(self):
        # all p_k = 1/2 at t = 0: P(Bin(6, 1/2) < 3)
        s = HeteroSample.of("laplace", [1, 2, 3, 4, 5, 6])
        assert order_stat_cdf(s, 0.5, 0.0) == pytest.approx(binomial_tail(6, 0.5, 0) - binomial_tail(6, 0.5, 3), abs=1e-15)

    def test_cauchy_cdf(self):
        assert order_stat_cdf(HeteroSample.of("cauchy", [1] * 3), 0.5, 1.0) == pytest.approx(27 / 64, abs=1e-15)

    def test_domain(self):
        s = HeteroSample.of("normal", [1] * 3)
        with pytest.raises(DomainError):
            order_stat_upper_tail(s, 0.2, 0.0)
        with pytest.raises(DomainError):
            order_stat_cdf(s, 1.5, 0.0)

    def test_rank_index(self):
        assert rank_index(0.29, 100) == 29
        assert rank_index(0.5, 9) == 4
        assert rank_index(Fraction(1, 3), 9) == 3
        assert rank_index(0.3, 10) == 3

    def test_bernoulli_reduction_brute_force(self):
        # P(X^(m) >= t) by integrating over all orderings of 3 independent laws
        s = HeteroSample.of("normal", [0.5, 1.0, 3.0])
        t = 0.4
        probs = s.component_sfs(t)
        for m in (1, 2, 3):
            direct = 0.0
            for outcome in itertools.product((0, 1), repeat=3):
                if sum(outcome) >= m:
                    direct += math.prod(p if b else 1 - p for b, p in zip(outcome, probs))
            assert order_stat_upper_tail(s, Fraction(m, 3), t).prob == pytest.approx(direct, abs=1e-15)

    def test_complement(self, rng):
        for _ in range(50):
            s = random_sample(rng, int(rng.integers(1, 40)))
            p = float(rng.uniform(1 / s.n, 1.0))
            t = float(rng.normal(scale=2))
            total = order_stat_upper_tail(s, p, t).prob + order_stat_cdf(s, p, t)
            assert abs(total - 1.0) <= 1e-12

    def test_monotone(self, rng):
        for _ in range(10):
            s = random_sample(rng, int(rng.integers(2, 25)))
            ts = np.linspace(-5, 5, 41)
            tails = [order_stat_upper_tail(s, 0.5, t).prob for t in ts]
            assert all(a >= b - 1e-15 for a, b in zip(tails, tails[1:]))
            ps = np.linspace(1 / s.n, 1.0, 15)
            by_p = [order_stat_upper_tail(s, p, 0.2).prob for p in ps]
            # larger p means a lower-ranked order statistic, hence a smaller tail
            assert all(a >= b - 1e-15 for a, b in zip(by_p, by_p[1:]))

    def test_permutation_invariance(self, rng):
        for _ in range(10):
            s = random_sample(rng, 12)
            shuffled = HeteroSample(s.laws[i] for i in rng.permutation(s.n))
            for t in (-1.0, 0.0, 0.7):
                a = order_stat_upper_tail(s, 0.4, t).prob
                b = order_stat_upper_tail(shuffled, 0.4, t).prob
                assert abs(a - b) <= 1e-14


class TestTwoSidedMedian:
    def test_small_t(self):
        assert exact_two_sided_median(HeteroSample.of("normal", [1, 1]), 1e-300) == pytest.approx(1.0, abs=1e-15)

    def test_zero_edge_parts(self):
        s = HeteroSample.of("normal", [1, 1])
        assert order_stat_upper_tail(s, 0.5, 0.0).prob == 0.75
        assert order_stat_cdf(s, 0.5, 0.0) == 0.25

    def test_cauchy(self):
        assert exact_two_sided_median(HeteroSample.of("cauchy", [1] * 3), 1.0) == pytest.approx(38 / 64, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            exact_two_sided_median(HeteroSample.of("normal", [1, 1]), 0.0)
        with pytest.raises(DomainError):
            exact_two_sided_median(HeteroSample.of("normal", [1]), 1.0)
