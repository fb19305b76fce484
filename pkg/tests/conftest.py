import numpy as np
import pytest
from scipy.optimize import brentq

from hetquant.distributions import BaseLaw, HeteroSample, ScaledLaw

ALL_BASES = list(BaseLaw)

# acceptance criteria append (name, passed, detail) here
ACCEPTANCE_LOG: list[tuple[str, bool, str]] = []


def random_sample(rng: np.random.Generator, n: int, bases=None, log_sigma_range=(-1.0, 1.0)) -> HeteroSample:
    bases = ALL_BASES if bases is None else bases
    laws = []
    for _ in range(n):
        base = bases[rng.integers(len(bases))]
        sigma = float(np.exp(rng.uniform(*log_sigma_range)))
        laws.append(ScaledLaw(base, sigma))
    return HeteroSample(laws)


def t_for_probability(prob, target, lo=-1e6, hi=1e6):
    """Root of ``prob(t) = target`` for a tail probability decreasing in ``t``."""
    return brentq(lambda t: prob(t) - target, lo, hi, xtol=1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
