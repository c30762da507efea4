"""B-spline basis evaluation by the order recursion.

Basis functions are indexed from 0 here: ``B_{m,j}`` for
``j = 0 .. m+N-1`` is supported on ``[y_j, y_{j+m}]`` of the clamped
knot vector ``y``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import IndexOutOfRange, XOutOfDomain
from .partition import ExtendedPartition, Partition, clamped_extension


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 := 0 for coincident knots
    out = np.zeros(np.broadcast(num, den).shape)
    nz = np.broadcast_to(den != 0, out.shape)
    np.divide(num, den, out=out, where=nz)
    return out


def _check_domain(x: np.ndarray, c: float, d: float) -> None:
    if x.size and (np.any(~np.isfinite(x)) or x.min() < c or x.max() > d):
        bad = x[(x < c) | (x > d) | ~np.isfinite(x)][0]
        raise XOutOfDomain(f"x={bad!r} lies outside [{c!r}, {d!r}]")


def eval_all(ext: ExtendedPartition, x) -> np.ndarray:
    """Values of every order-``m`` B-spline at the points ``x``.

    Returns an array of shape ``(len(x), m + N)``. The order-1 indicators
    are half-open ``[y_j, y_{j+1})`` except the last non-degenerate one,
    which is closed at ``d`` so the basis interpolates at both ends.
    """
    y = ext.knots
    m = ext.m
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(x, ext.partition.c, ext.partition.d)

    xs = x[:, None]
    B = ((y[:-1] <= xs) & (xs < y[1:])).astype(float)
    last = np.flatnonzero(y[:-1] < y[1:])[-1]
    B[x == y[last + 1], last] = 1.0

    for k in range(2, m + 1):
        cols = y.size - k
        left = _safe_ratio(xs - y[:cols], y[k - 1 : k - 1 + cols] - y[:cols])
        right = _safe_ratio(y[k : k + cols] - xs, y[k : k + cols] - y[1 : 1 + cols])
        B = left * B[:, :cols] + right * B[:, 1 : cols + 1]
    return B


def eval_bspline(ext: ExtendedPartition, m: int, j: int, x: float) -> float:
    """Single value ``B_{m,j}(x)`` (0-based ``j``)."""
    if m != ext.m:
        raise ValueError(f"order {m} does not match extended partition order {ext.m}")
    size = len(ext) - m
    if not 0 <= j < size:
        raise IndexOutOfRange(f"basis index {j} outside [0, {size - 1}]")
    return float(eval_all(ext, [x])[0, j])


@dataclass(frozen=True)
class SampledMatrix:
    """Atoms evaluated on a grid: rows are grid points, columns functions."""

    values: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        if self.values.shape[0] != self.grid.shape[0]:
            raise ValueError("row count must match grid length")

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self, path, header=None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if header is None:
                header = ["x"] + [f"atom{i}" for i in range(self.values.shape[1])]
            w.writerow(header)
            for xi, row in zip(self.grid.tolist(), self.values.tolist()):
                w.writerow([repr(xi)] + [repr(v) for v in row])


class Sampleable(Protocol):
    c: float
    d: float

    def evaluate(self, x) -> np.ndarray: ...


class SplineBasis:
    """Clamped B-spline basis of the spline space over ``partition``."""

    def __init__(self, partition: Partition, m: int):
        self.partition = partition
        self.ext = clamped_extension(partition, m)
        self.m = m

    @property
    def size(self) -> int:
        return self.m + self.partition.N

    def __len__(self) -> int:
        return self.size

    @property
    def c(self) -> float:
        return self.partition.c

    @property
    def d(self) -> float:
        return self.partition.d

    def support(self, j: int) -> tuple[float, float]:
        if not 0 <= j < self.size:
            raise IndexOutOfRange(f"basis index {j} outside [0, {self.size - 1}]")
        y = self.ext.knots
        return float(y[j]), float(y[j + self.m])

    def evaluate(self, x) -> np.ndarray:
        return eval_all(self.ext, x)

    def __repr__(self) -> str:
        return f"SplineBasis(m={self.m}, size={self.size}, N={self.partition.N})"


def basis(p: Partition, m: int) -> SplineBasis:
    return SplineBasis(p, m)


def sample(obj: Sampleable, grid) -> SampledMatrix:
    """Evaluate a basis or dictionary at each grid point."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("grid must be nonempty")
    _check_domain(g, obj.c, obj.d)
    return SampledMatrix(obj.evaluate(g), g.copy())


def numerical_rank(mat: np.ndarray, rtol: float = 1e-10) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > s[0] * rtol))
