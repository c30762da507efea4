"""Knot partitions of a compact interval.

A :class:`Partition` holds the strictly increasing points
``c = x_0 < x_1 < ... < x_N < x_{N+1} = d``; ``N`` counts interior knots.
"""
from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadCount,
    EndpointMismatch,
    NonDivisible,
    NonIncreasing,
    TooFewPoints,
)

_DIVISIBILITY_RTOL = 1e-9


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class Partition:
    """Strictly increasing knot sequence on ``[c, d]`` including both ends."""

    __slots__ = ("_points",)

    def __init__(self, points: Iterable[float]):
        pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
        if pts.ndim != 1:
            raise NonIncreasing("partition points must be a flat sequence")
        if pts.size < 2:
            raise TooFewPoints(f"a partition needs at least 2 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise NonIncreasing("partition points must be finite")
        bad = np.flatnonzero(np.diff(pts) <= 0)
        if bad.size:
            i = int(bad[0])
            raise NonIncreasing(
                f"points must be strictly increasing: x[{i}]={pts[i]!r} >= x[{i + 1}]={pts[i + 1]!r}"
            )
        self._points = _frozen(pts)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def c(self) -> float:
        return float(self._points[0])

    @property
    def d(self) -> float:
        return float(self._points[-1])

    @property
    def interior(self) -> np.ndarray:
        return self._points[1:-1]

    @property
    def N(self) -> int:
        """Number of interior knots."""
        return self._points.size - 2

    def __len__(self) -> int:
        return self._points.size

    def __iter__(self):
        return iter(self._points.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __hash__(self) -> int:
        return hash(self._points.tobytes())

    def __repr__(self) -> str:
        return f"Partition(c={self.c!r}, d={self.d!r}, N={self.N})"

    def to_list(self) -> list[float]:
        return self._points.tolist()

    def to_json(self) -> str:
        # json emits repr(float), the shortest round-trip decimal form
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        return cls(json.loads(text))


class ExtendedPartition:
    """Knot vector ``y_1 <= ... <= y_{2m+N}`` built around a partition."""

    __slots__ = ("_knots", "m", "partition")

    def __init__(self, knots: Iterable[float], m: int, partition: Partition):
        self._knots = _frozen(list(knots))
        self.m = int(m)
        self.partition = partition
        if self._knots.size != 2 * self.m + partition.N:
            raise ValueError(
                f"extended partition needs {2 * self.m + partition.N} knots, got {self._knots.size}"
            )
        if np.any(np.diff(self._knots) < 0):
            raise NonIncreasing("extended knots must be non-decreasing")

    @property
    def knots(self) -> np.ndarray:
        return self._knots

    def __len__(self) -> int:
        return self._knots.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtendedPartition):
            return NotImplemented
        return self.m == other.m and np.array_equal(self._knots, other._knots)

    def __hash__(self) -> int:
        return hash((self.m, self._knots.tobytes()))

    def __repr__(self) -> str:
        return f"ExtendedPartition(m={self.m}, knots={self._knots.tolist()!r})"


def new_partition(points: Sequence[float]) -> Partition:
    return Partition(points)


def _integer_ratio(num: float, den: float, what: str) -> int:
    if den <= 0:
        raise NonDivisible(f"{what}: step must be positive, got {den!r}")
    ratio = num / den
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > _DIVISIBILITY_RTOL * max(1.0, abs(ratio)):
        raise NonDivisible(f"{what}: {num!r}/{den!r} = {ratio!r} is not a positive integer")
    return k


def uniform_partition(c: float, d: float, b: float) -> Partition:
    """Equidistant partition with interior knots ``c + j*b``."""
    if not c < d:
        raise NonIncreasing(f"need c < d, got c={c!r}, d={d!r}")
    count = _integer_ratio(d - c, b, "(d-c)/b")
    pts = c + b * np.arange(count + 1, dtype=float)
    pts[-1] = d
    return Partition(pts)


def round_robin_subpartitions(p: Partition, n: int) -> list[Partition]:
    """Split ``p`` into ``n`` subpartitions by interior index modulo ``n``.

    Entry ``j`` (0-based) keeps ``c``, ``d`` and every ``x_k`` with
    ``k mod n == j``, where ``k = 1..N`` numbers the interior knots.
    """
    if n < 1 or n > p.N + 1:
        raise BadCount(f"subpartition count must be in [1, {p.N + 1}], got {n}")
    if n == 1:
        return [p]
    pts = p.points
    k = np.arange(1, p.N + 1)
    subs = []
    for j in range(n):
        idx = np.concatenate(([0], k[k % n == j], [p.N + 1]))
        subs.append(Partition(pts[idx]))
    return subs


def union_partitions(ps: Sequence[Partition]) -> Partition:
    """Sorted union of knot sets sharing the same endpoints (exact dedup)."""
    ps = list(ps)
    if not ps:
        raise TooFewPoints("need at least one partition to union")
    c, d = ps[0].c, ps[0].d
    for q in ps[1:]:
        if q.c != c or q.d != d:
            raise EndpointMismatch(f"endpoints [{q.c!r}, {q.d!r}] differ from [{c!r}, {d!r}]")
    return Partition(np.unique(np.concatenate([q.points for q in ps])))


def clamped_extension(p: Partition, m: int) -> ExtendedPartition:
    """Knot vector with ``m`` copies of each endpoint around the interior knots."""
    if m < 1:
        raise ValueError(f"order m must be >= 1, got {m}")
    knots = np.concatenate((np.full(m, p.c), p.interior, np.full(m, p.d)))
    return ExtendedPartition(knots, m, p)


def subdivide(p: Partition, l: int) -> Partition:
    """Insert ``l - 1`` equally spaced points into every gap of ``p``."""
    if l < 1:
        raise BadCount(f"subdivision level must be >= 1, got {l}")
    if l == 1:
        return p
    pts = p.points
    left, width = pts[:-1, None], np.diff(pts)[:, None]
    t = np.arange(l, dtype=float)[None, :]
    fine = (left + t * width / l).ravel()
    return Partition(np.append(fine, pts[-1]))
