"""Redundant B-spline dictionaries built from subpartition bases."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bspline import SplineBasis, numerical_rank, sample
from .errors import IndexOutOfRange, UnionMismatch
from .partition import (
    Partition,
    _integer_ratio,
    uniform_partition,
    union_partitions,
)


@dataclass(frozen=True)
class Atom:
    sub: int  # subpartition index (0-based)
    index: int  # basis index inside that subpartition's basis
    basis: SplineBasis

    @property
    def support(self) -> tuple[float, float]:
        return self.basis.support(self.index)


class SplineDictionary:
    """Concatenation of the clamped bases of each subpartition.

    Atoms are ordered subpartition-major, basis-index-minor. With a single
    subpartition this is exactly the B-spline basis of the parent.
    """

    def __init__(self, parent: Partition, subs: Sequence[Partition], m: int):
        subs = list(subs)
        if not subs:
            raise UnionMismatch("need at least one subpartition")
        try:
            joined = union_partitions(subs)
        except ValueError as exc:
            raise UnionMismatch(str(exc)) from exc
        if joined != parent:
            raise UnionMismatch("subpartitions do not union to the parent partition")
        self.parent = parent
        self.subs = subs
        self.m = m
        self.bases = [SplineBasis(s, m) for s in subs]
        self.atoms = [Atom(j, k, b) for j, b in enumerate(self.bases) for k in range(b.size)]

    @property
    def n(self) -> int:
        return len(self.subs)

    @property
    def size(self) -> int:
        return len(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def dim(self) -> int:
        """Dimension of the spanned spline space, ``m + N``."""
        return self.m + self.parent.N

    @property
    def c(self) -> float:
        return self.parent.c

    @property
    def d(self) -> float:
        return self.parent.d

    def evaluate(self, x) -> np.ndarray:
        return np.hstack([b.evaluate(x) for b in self.bases])

    def evaluate_atoms(self, indices, x) -> np.ndarray:
        """Evaluate only the listed atoms (columns in the order given)."""
        indices = list(indices)
        for i in indices:
            if not 0 <= i < self.size:
                raise IndexOutOfRange(f"atom index {i} outside [0, {self.size - 1}]")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((x.size, len(indices)))
        cache = {}
        for col, i in enumerate(indices):
            a = self.atoms[i]
            if a.sub not in cache:
                cache[a.sub] = a.basis.evaluate(x)
            out[:, col] = cache[a.sub][:, a.index]
        return out

    def metadata(self) -> dict:
        return {
            "parent": self.parent.to_list(),
            "m": self.m,
            "n": self.n,
            "size": self.size,
            "atoms": [
                {"subpartition": a.sub, "index": a.index, "support": list(a.support)}
                for a in self.atoms
            ],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.metadata())
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def __repr__(self) -> str:
        return f"SplineDictionary(m={self.m}, n={self.n}, size={self.size}, dim={self.dim})"


def build_dictionary(p: Partition, subs: Sequence[Partition], m: int) -> SplineDictionary:
    return SplineDictionary(p, subs, m)


def expected_size(subs: Sequence[Partition], m: int) -> int:
    """Atom count ``n*m + sum of interior-knot counts``."""
    return len(subs) * m + sum(s.N for s in subs)


def cardinal_dictionary(c: float, d: float, b: float, bprime: float, m: int) -> SplineDictionary:
    """Dictionary over the uniform partition of step ``b`` from shifted coarse grids.

    Subpartition ``j0`` (``0 <= j0 < bprime/b``) keeps the knots
    ``c + j0*b + j*bprime`` lying strictly inside ``(c, d)``.
    """
    fine = uniform_partition(c, d, b)
    r = _integer_ratio(bprime, b, "bprime/b")
    total = len(fine) - 1
    pts = fine.points
    subs = []
    for j0 in range(r):
        k = np.arange(j0, total, r)
        k = k[(k > 0) & (k < total)]
        subs.append(Partition(pts[np.concatenate(([0], k, [total]))]))
    return SplineDictionary(fine, subs, m)


def span_rank(dictionary, grid) -> int:
    """Numerical rank of the dictionary sampled on ``grid``."""
    return numerical_rank(sample(dictionary, grid).values)
