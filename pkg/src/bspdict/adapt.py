"""Signal-adapted partitions from discrete curvature maxima."""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteCurvature, SignalTooShort
from .partition import Partition, subdivide

MIN_SAMPLES = 6


def uniform_grid(c: float, d: float, count: int) -> np.ndarray:
    """``c + k*h`` for ``k = 0..count-1`` with the last point pinned to ``d``."""
    h = (d - c) / (count - 1)
    g = c + h * np.arange(count)
    g[-1] = d
    return g


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Samples ``f(c + k*h)``, ``k = 0..n``, with ``h = (d - c)/n``."""

    values: np.ndarray
    c: float
    d: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if v.size < MIN_SAMPLES:
            raise SignalTooShort(f"need at least {MIN_SAMPLES} samples, got {v.size}")
        if not self.c < self.d:
            raise ValueError(f"need c < d, got [{self.c!r}, {self.d!r}]")

    @property
    def n(self) -> int:
        """Index of the last sample (sample count minus one)."""
        return self.values.size - 1

    @property
    def h(self) -> float:
        return (self.d - self.c) / self.n

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.c, self.d, self.values.size)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, SampledSignal):
            return NotImplemented
        return self.c == other.c and self.d == other.d and np.array_equal(self.values, other.values)


class CurvatureVariant(enum.Enum):
    PAPER_MINUS = "paper"  # f'' / (1 - f'^2)^(3/2)
    STANDARD_PLUS = "standard"  # f'' / (1 + f'^2)^(3/2)

    @classmethod
    def parse(cls, value) -> "CurvatureVariant":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class CurvatureProfile:
    """Discrete curvature ``c_t`` at every interior sample.

    ``x[i]`` is the sample abscissa of ``curvature[i]``; ``nonfinite``
    counts samples where the minus-form denominator was <= 0.
    """

    x: np.ndarray
    curvature: np.ndarray
    nonfinite: int


def curvature_profile(sig: SampledSignal, variant=CurvatureVariant.PAPER_MINUS) -> CurvatureProfile:
    """Forward first difference and central second difference at samples 1..n-1."""
    variant = CurvatureVariant.parse(variant)
    f = sig.values
    h = sig.h
    df = (f[2:] - f[1:-1]) / h
    ddf = (f[2:] + f[:-2] - 2.0 * f[1:-1]) / h**2
    nonfinite = 0
    if variant is CurvatureVariant.STANDARD_PLUS:
        den = (1.0 + df * df) ** 1.5
        curv = ddf / den
    else:
        u = 1.0 - df * df
        # sign-preserving real power; a zero denominator gives c_t = 0
        den = np.sign(u) * np.abs(u) ** 1.5
        nonfinite = int(np.count_nonzero(u <= 0))
        curv = np.zeros_like(ddf)
        np.divide(ddf, den, out=curv, where=den != 0)
    curv[~np.isfinite(curv)] = 0.0
    idx = np.arange(1, sig.n)
    return CurvatureProfile(sig.c + idx * h, curv, nonfinite)


def curvature_knots(sig: SampledSignal, variant=CurvatureVariant.PAPER_MINUS) -> np.ndarray:
    """Abscissas ``c + (k+1)h`` of strict local maxima of ``|c_t|``, ``k = 2..n-3``."""
    prof = curvature_profile(sig, variant)
    if prof.nonfinite:
        warnings.warn(
            f"{prof.nonfinite} samples with |f'| >= 1; minus-form curvature salvaged "
            "by sign-preserving power",
            NonFiniteCurvature,
            stacklevel=2,
        )
    a = np.abs(prof.curvature)
    # a[i] belongs to sample i+1, so c_t for window k sits at a[k+t-1]
    k = np.arange(2, sig.n - 2)
    c0, c1, c2 = a[k - 1], a[k], a[k + 1]
    hit = k[(c0 < c1) & (c1 > c2)]
    knots = sig.c + (hit + 1) * sig.h
    knots = np.unique(knots)
    return knots[(knots > sig.c) & (knots < sig.d)]


def adapt_partition(sig: SampledSignal, l: int, variant=CurvatureVariant.PAPER_MINUS) -> Partition:
    """Curvature knots plus the endpoints, each gap then split into ``l`` pieces."""
    knots = curvature_knots(sig, variant)
    base = Partition(np.concatenate(([sig.c], knots, [sig.d])))
    return subdivide(base, l)
