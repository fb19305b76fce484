"""Continuous laws used as building blocks for heterogeneous samples.

Every law here is a scale family member ``F(x) = D(x / sigma)`` where the
standardized base ``D`` is symmetric about zero, so ``D(0) = 1/2``.  All
functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "BaseLaw",
    "ScaledLaw",
    "HeteroSample",
    "cdf",
    "sf",
    "pdf",
    "quantile",
    "sample",
    "parse_law",
    "parse_sample",
    "load_sample",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def _finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _open_unit(p, name="p"):
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
    return arr


def _out(arr):
    # scalars in, python floats out
    return float(arr) if np.ndim(arr) == 0 else arr


# ---------------------------------------------------------------------------
# standardized bases; each works on float arrays and is vectorized
# ---------------------------------------------------------------------------

def _normal_lower(z):
    # Phi(z), accurate in the lower tail through erfc
    return 0.5 * special.erfc(-z / _SQRT2)


def _normal_cdf(z):
    return np.where(z < 0, _normal_lower(z), 1.0 - _normal_lower(-z))


def _normal_pdf(z):
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def _normal_lower_quantile(p):
    # p <= 1/2; rational seed from ndtri, then Newton on the erfc-based cdf
    x = special.ndtri(p)
    for _ in range(2):
        dens = _normal_pdf(x)
        step = np.where(dens > 0, (_normal_lower(x) - p) / np.where(dens > 0, dens, 1.0), 0.0)
        x = x - step
    return x


def _normal_quantile(p):
    # 1 - p is exact for p >= 1/2, so reflect into the lower tail
    lower = np.minimum(p, 1.0 - p)
    x = _normal_lower_quantile(lower)
    return np.where(p > 0.5, -x, x)


def _cauchy_cdf(z):
    with np.errstate(divide="ignore", over="ignore"):
        tail = np.arctan(-1.0 / z) / math.pi  # F(z) for z < 0 without cancellation
    return np.where(z < 0, tail, 0.5 + np.arctan(z) / math.pi)


def _cauchy_pdf(z):
    return 1.0 / (math.pi * (1.0 + z * z))


def _cauchy_quantile(p):
    lower = np.minimum(p, 1.0 - p)
    x = -1.0 / np.tan(math.pi * lower)
    x = np.where(lower == 0.5, 0.0, x)
    return np.where(p > 0.5, -x, x)


def _laplace_cdf(z):
    half = 0.5 * np.exp(-np.abs(z))
    return np.where(z <= 0, half, 1.0 - half)


def _laplace_pdf(z):
    return 0.5 * np.exp(-np.abs(z))


def _laplace_quantile(p):
    lower = np.minimum(p, 1.0 - p)
    x = np.log(2.0 * lower)
    return np.where(p > 0.5, -x, x)


def _uniform_cdf(z):
    return np.clip(0.5 * (z + 1.0), 0.0, 1.0)


def _uniform_pdf(z):
    return np.where(np.abs(z) <= 1.0, 0.5, 0.0)


def _uniform_quantile(p):
    return 2.0 * p - 1.0


def _logistic_cdf(z):
    return special.expit(z)


def _logistic_pdf(z):
    e = np.exp(-np.abs(z))
    return e / (1.0 + e) ** 2


def _logistic_quantile(p):
    return special.logit(p)


class BaseLaw(enum.Enum):
    """Standardized symmetric base distribution ``D`` with density ``d``.

    Uniform is taken on ``(-1, 1)`` so that it is centred like the others.
    """

    NORMAL = "normal"
    CAUCHY = "cauchy"
    LAPLACE = "laplace"
    UNIFORM = "uniform"
    LOGISTIC = "logistic"

    @property
    def symmetric(self) -> bool:
        return True

    @property
    def unimodal(self) -> bool:
        # density nonincreasing in |u|
        return True

    def cdf(self, z):
        return _out(_CDF[self](_finite(z)))

    def sf(self, z):
        # symmetric: 1 - D(z) = D(-z), keeps upper-tail precision
        return _out(_CDF[self](-_finite(z)))

    def pdf(self, z):
        return _out(_PDF[self](_finite(z)))

    def quantile(self, p):
        return _out(_QUANTILE[self](_open_unit(p)))

    def scaled(self, sigma: float = 1.0) -> "ScaledLaw":
        return ScaledLaw(self, sigma)


_CDF = {
    BaseLaw.NORMAL: _normal_cdf,
    BaseLaw.CAUCHY: _cauchy_cdf,
    BaseLaw.LAPLACE: _laplace_cdf,
    BaseLaw.UNIFORM: _uniform_cdf,
    BaseLaw.LOGISTIC: _logistic_cdf,
}
_PDF = {
    BaseLaw.NORMAL: _normal_pdf,
    BaseLaw.CAUCHY: _cauchy_pdf,
    BaseLaw.LAPLACE: _laplace_pdf,
    BaseLaw.UNIFORM: _uniform_pdf,
    BaseLaw.LOGISTIC: _logistic_pdf,
}
_QUANTILE = {
    BaseLaw.NORMAL: _normal_quantile,
    BaseLaw.CAUCHY: _cauchy_quantile,
    BaseLaw.LAPLACE: _laplace_quantile,
    BaseLaw.UNIFORM: _uniform_quantile,
    BaseLaw.LOGISTIC: _logistic_quantile,
}


@dataclass(frozen=True)
class ScaledLaw:
    """The law with CDF ``base.cdf(x / sigma)`` and density ``base.pdf(x / sigma) / sigma``."""

    base: BaseLaw
    sigma: float = 1.0

    def __post_init__(self):
        if not isinstance(self.base, BaseLaw):
            raise DomainError(f"unknown base law {self.base!r}")
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma > 0):
            raise DomainError(f"sigma must be a positive finite number, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)

    def cdf(self, x):
        return _out(_CDF[self.base](_finite(x) / self.sigma))

    def sf(self, x):
        return _out(_CDF[self.base](-_finite(x) / self.sigma))

    def pdf(self, x):
        return _out(_PDF[self.base](_finite(x) / self.sigma) / self.sigma)

    def quantile(self, p):
        return _out(self.sigma * _QUANTILE[self.base](_open_unit(p)))

    def sample(self, u):
        """Inverse-transform draw: the deterministic image of ``u`` in (0, 1)."""
        return _out(self.sigma * _QUANTILE[self.base](_open_unit(u, "u")))

    def __str__(self):
        return f"{self.base.value}:{self.sigma:g}"


def cdf(law: ScaledLaw, x):
    return law.cdf(x)


def sf(law: ScaledLaw, x):
    return law.sf(x)


def pdf(law: ScaledLaw, x):
    return law.pdf(x)


def quantile(law: ScaledLaw, p):
    return law.quantile(p)


def sample(law: ScaledLaw, u):
    return law.sample(u)


class HeteroSample:
    """Independent, non-identically distributed observations ``X_1, ..., X_n``.

    Immutable; laws are kept in the order given.  Columns sharing a base law
    are grouped internally so evaluations vectorize across the sample.
    """

    __slots__ = ("_laws", "_sigmas", "_groups")

    def __init__(self, laws: Iterable[ScaledLaw]):
        laws = tuple(laws)
        if not laws:
            raise DomainError("a sample needs at least one law")
        for law in laws:
            if not isinstance(law, ScaledLaw):
                raise DomainError(f"expected ScaledLaw, got {law!r}")
        self._laws = laws
        self._sigmas = np.array([law.sigma for law in laws])
        self._sigmas.setflags(write=False)
        groups: dict[BaseLaw, list[int]] = {}
        for k, law in enumerate(laws):
            groups.setdefault(law.base, []).append(k)
        self._groups = {b: np.array(idx) for b, idx in groups.items()}

    @classmethod
    def of(cls, base: BaseLaw | str, sigmas: Sequence[float]) -> "HeteroSample":
        """Scale-family sample sharing one base law."""
        if isinstance(base, str):
            base = BaseLaw(base)
        return cls(ScaledLaw(base, s) for s in sigmas)

    @property
    def laws(self) -> tuple[ScaledLaw, ...]:
        return self._laws

    @property
    def n(self) -> int:
        return len(self._laws)

    def __len__(self):
        return len(self._laws)

    def __iter__(self):
        return iter(self._laws)

    def __getitem__(self, k):
        return self._laws[k]

    def __eq__(self, other):
        return isinstance(other, HeteroSample) and self._laws == other._laws

    def __hash__(self):
        return hash(self._laws)

    def __repr__(self):
        return f"HeteroSample({', '.join(map(str, self._laws))})"

    @property
    def sigmas(self) -> np.ndarray:
        return self._sigmas

    @property
    def bases(self) -> frozenset[BaseLaw]:
        return frozenset(self._groups)

    @property
    def common_base(self) -> BaseLaw | None:
        """The shared base law, or None for a mixed sample."""
        return next(iter(self._groups)) if len(self._groups) == 1 else None

    def component_cdfs(self, t: float) -> np.ndarray:
        t = float(_finite(t, "t"))
        out = np.empty(self.n)
        for base, idx in self._groups.items():
            out[idx] = _CDF[base](t / self._sigmas[idx])
        return out

    def component_sfs(self, t: float) -> np.ndarray:
        """``1 - F_k(t)`` for every component, computed without cancellation."""
        t = float(_finite(t, "t"))
        out = np.empty(self.n)
        for base, idx in self._groups.items():
            out[idx] = _CDF[base](-t / self._sigmas[idx])
        return out

    def component_pdfs(self, t: float) -> np.ndarray:
        t = float(_finite(t, "t"))
        out = np.empty(self.n)
        for base, idx in self._groups.items():
            out[idx] = _PDF[base](t / self._sigmas[idx]) / self._sigmas[idx]
        return out

    def component_quantiles(self, p: float) -> np.ndarray:
        p = float(_open_unit(p))
        out = np.empty(self.n)
        for base, idx in self._groups.items():
            out[idx] = self._sigmas[idx] * _QUANTILE[base](np.full(len(idx), p))
        return out

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms of shape ``(..., n)`` column-wise through the quantiles."""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.n:
            raise DomainError(f"last axis must have length {self.n}, got {u.shape}")
        _open_unit(u, "u")
        x = np.empty_like(u)
        for base, idx in self._groups.items():
            x[..., idx] = _QUANTILE[base](u[..., idx]) * self._sigmas[idx]
        return x

    def extended(self, other: "HeteroSample | Iterable[ScaledLaw]") -> "HeteroSample":
        return HeteroSample(self._laws + tuple(other))


# ---------------------------------------------------------------------------
# text format: "normal:1000 x80", one law per line, '#' starts a comment
# ---------------------------------------------------------------------------

_LAW_RE = re.compile(
    r"^(?P<base>[a-z]+)\s*:\s*(?P<sigma>[^\s]+)(?:\s+[xX]\s*(?P<count>\d+))?$"
)


def parse_law(text: str) -> list[ScaledLaw]:
    """Parse one entry such as ``cauchy:2`` or ``normal:1000 x80``."""
    m = _LAW_RE.match(text.strip().lower())
    if m is None:
        raise DomainError(f"cannot parse law {text.strip()!r}")
    try:
        base = BaseLaw(m["base"])
    except ValueError:
        kinds = ", ".join(b.value for b in BaseLaw)
        raise DomainError(f"unknown law {m['base']!r} (expected one of {kinds})") from None
    try:
        sigma = float(m["sigma"])
    except ValueError:
        raise DomainError(f"bad scale {m['sigma']!r}") from None
    count = int(m["count"]) if m["count"] is not None else 1
    if count < 1:
        raise DomainError(f"repetition count must be positive in {text.strip()!r}")
    law = ScaledLaw(base, sigma)
    return [law] * count


def parse_sample(text: str, source: str = "<string>") -> HeteroSample:
    laws: list[ScaledLaw] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            laws.extend(parse_law(line))
        except DomainError as exc:
            raise DomainError(f"{source}:{lineno}: {exc}") from None
    if not laws:
        raise DomainError(f"{source}: sample is empty")
    return HeteroSample(laws)


def load_sample(path: str | Path) -> HeteroSample:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read sample file {str(path)!r}: {exc.strerror}") from None
    return parse_sample(text, source=str(path))
