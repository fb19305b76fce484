"""Exact distributions and concentration bounds for percentiles of
independent, non-identically distributed random variables."""

from .distributions import BaseLaw, DomainError, HeteroSample, ScaledLaw, load_sample, parse_sample
from .exact import exact_two_sided_median, order_stat_cdf, order_stat_upper_tail, poisson_binomial_pmf
from .mixture import mixture_cdf, mixture_quantile

__version__ = "0.1.0"

__all__ = [
    "BaseLaw",
    "DomainError",
    "HeteroSample",
    "ScaledLaw",
    "load_sample",
    "parse_sample",
    "exact_two_sided_median",
    "order_stat_cdf",
    "order_stat_upper_tail",
    "poisson_binomial_pmf",
    "mixture_cdf",
    "mixture_quantile",
]
