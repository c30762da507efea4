import json

import numpy as np
import pytest

from bspdict.bspline import basis, numerical_rank, sample
from bspdict.dictionary import build_dictionary, cardinal_dictionary, expected_size, span_rank
from bspdict.errors import IndexOutOfRange, NonDivisible, UnionMismatch
from bspdict.partition import Partition, round_robin_subpartitions, uniform_partition

from oracles import lstsq_relative_residual


def interior_partition(n_interior, c=0.0, d=1.0):
    return Partition(np.linspace(c, d, n_interior + 2))


def fig1_partition():
    rng = np.random.default_rng(2009)
    return Partition([0, *np.sort(rng.uniform(0, 4, 6)), 4])


def dense_grid(D):
    return np.linspace(D.c, D.d, 20 * D.dim + 100)


class TestBuild:
    @pytest.mark.parametrize(
        "interior, m, n, size",
        [(1160, 4, 10, 1200), (509, 4, 3, 521), (730, 2, 26, 782)],
    )
    def test_reported_cardinalities(self, interior, m, n, size):
        p = interior_partition(interior)
        subs = round_robin_subpartitions(p, n)
        D = build_dictionary(p, subs, m)
        assert D.size == size == expected_size(subs, m)
        assert len(p) == interior + 2

    def test_single_subpartition_is_basis(self):
        p = fig1_partition()
        D = build_dictionary(p, [p], 4)
        grid = dense_grid(D)
        np.testing.assert_array_equal(sample(D, grid).values, sample(basis(p, 4), grid).values)

    def test_union_mismatch(self):
        p = Partition([0, 1, 2, 3, 4])
        with pytest.raises(UnionMismatch):
            build_dictionary(p, [Partition([0, 1, 4]), Partition([0, 3, 4])], 2)

    def test_endpoint_mismatch_is_union_mismatch(self):
        with pytest.raises(UnionMismatch):
            build_dictionary(Partition([0, 4]), [Partition([0, 4]), Partition([0, 5])], 2)

    def test_atom_order_and_metadata(self):
        p = fig1_partition()
        D = build_dictionary(p, round_robin_subpartitions(p, 2), 2)
        assert [(a.sub, a.index) for a in D.atoms[:6]] == [(0, k) for k in range(5)] + [(1, 0)]
        meta = json.loads(D.to_json())
        assert meta["n"] == 2 and meta["m"] == 2 and meta["size"] == D.size == 10
        assert meta["parent"] == p.to_list()
        assert meta["atoms"][0] == {"subpartition": 0, "index": 0, "support": [0.0, float(p.points[2])]}

    def test_evaluate_atoms(self):
        p = fig1_partition()
        D = build_dictionary(p, round_robin_subpartitions(p, 2), 4)
        grid = dense_grid(D)
        full = D.evaluate(grid)
        np.testing.assert_array_equal(D.evaluate_atoms([13, 0, 7], grid), full[:, [13, 0, 7]])
        with pytest.raises(IndexOutOfRange):
            D.evaluate_atoms([14], grid)


class TestCardinal:
    def test_linear_b1_b2(self):
        D = cardinal_dictionary(0, 4, 1, 2, 2)
        assert [s.interior.tolist() for s in D.subs] == [[2.0], [1.0, 3.0]]
        assert D.size == 7
        assert basis(uniform_partition(0, 4, 1), 2).size == 5

    def test_equal_steps_is_basis(self):
        D = cardinal_dictionary(0, 4, 0.5, 0.5, 3)
        assert D.n == 1 and D.size == D.dim

    def test_three_shifts(self):
        D = cardinal_dictionary(0, 6, 1, 3, 1)
        assert [s.interior.tolist() for s in D.subs] == [[3.0], [1.0, 4.0], [2.0, 5.0]]
        assert D.size == 8

    def test_non_divisible(self):
        with pytest.raises(NonDivisible):
            cardinal_dictionary(0, 4, 1, 1.5, 2)
        with pytest.raises(NonDivisible):
            cardinal_dictionary(0, 4, 3, 3, 2)


class TestSpan:
    def test_basis_full_rank(self):
        p = fig1_partition()
        D = build_dictionary(p, [p], 3)
        assert span_rank(D, dense_grid(D)) == D.size

    @pytest.mark.parametrize("m, size, rank", [(4, 14, 10), (2, 10, 8)])
    def test_fig1_configuration(self, m, size, rank):
        p = fig1_partition()
        D = build_dictionary(p, round_robin_subpartitions(p, 2), m)
        assert D.size == size
        assert span_rank(D, dense_grid(D)) == rank

    @pytest.mark.parametrize("seed", range(12))
    def test_two_sided_containment(self, seed):
        rng = np.random.default_rng(seed)
        N = int(rng.integers(1, 13))
        m = int(rng.integers(1, 5))
        n = int(rng.integers(1, N + 1))
        p = Partition([0, *np.sort(rng.uniform(0, 1, N)), 1])
        D = build_dictionary(p, round_robin_subpartitions(p, n), m)
        grid = dense_grid(D)
        Dm = sample(D, grid).values
        Bm = sample(basis(p, m), grid).values
        assert numerical_rank(Dm) == m + N
        assert lstsq_relative_residual(Bm, Dm) <= 1e-8
        assert lstsq_relative_residual(Dm, Bm) <= 1e-8
        assert Dm.min() >= 0
        for j, atom in enumerate(D.atoms):
            lo, hi = atom.support
            assert np.all(Dm[(grid < lo) | (grid > hi), j] == 0)
