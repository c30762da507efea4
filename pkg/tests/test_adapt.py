import warnings

import numpy as np
import pytest

from bspdict.adapt import (
    CurvatureVariant,
    SampledSignal,
    adapt_partition,
    curvature_knots,
    curvature_profile,
)
from bspdict.errors import NonFiniteCurvature, SignalTooShort

from oracles import curvature_maxima

STANDARD = CurvatureVariant.STANDARD_PLUS
PAPER = CurvatureVariant.PAPER_MINUS


def sampled(fn, c, d, L):
    x = np.linspace(c, d, L)
    return SampledSignal(fn(x), c, d)


def sine():
    return sampled(lambda x: np.sin(2 * np.pi * x), 0.0, 1.0, 257)


class TestSampledSignal:
    def test_step(self):
        s = SampledSignal(np.zeros(513), 0.0, 1.0)
        assert s.h == 1 / 512 and s.n == 512
        assert s.grid[0] == 0.0 and s.grid[-1] == 1.0

    def test_too_short(self):
        with pytest.raises(SignalTooShort):
            SampledSignal(np.zeros(5), 0.0, 1.0)


class TestCurvatureKnots:
    @pytest.mark.parametrize("variant", list(CurvatureVariant))
    def test_constant(self, variant):
        assert curvature_knots(SampledSignal(np.full(50, 3.0), 0, 1), variant).size == 0

    @pytest.mark.parametrize("variant", list(CurvatureVariant))
    def test_line(self, variant):
        # dyadic grid: samples are exact, so the second differences vanish exactly
        s = sampled(lambda x: 0.5 * x - 2, 0.0, 1.0, 65)
        assert curvature_knots(s, variant).size == 0

    def test_sine_standard(self):
        s = sine()
        knots = curvature_knots(s, STANDARD)
        assert knots.tolist() == [0.25, 0.75]
        assert knots.tolist() == curvature_maxima(s.values, s.c, s.h, plus=True)
        for k in knots:
            assert min(abs(k - 0.25), abs(k - 0.75)) <= 2 * s.h

    def test_sine_minus_form_matches_oracle(self):
        s = sine()
        with pytest.warns(NonFiniteCurvature):
            knots = curvature_knots(s, PAPER)
        assert knots.tolist() == curvature_maxima(s.values, s.c, s.h, plus=False)
        assert knots.tolist() == [0.22265625, 0.2734375, 0.72265625, 0.7734375]

    def test_no_warning_for_gentle_slopes(self):
        s = sampled(lambda x: 0.1 * np.sin(x), 0.0, 6.0, 200)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            curvature_knots(s, PAPER)

    def test_end_samples_never_knots(self):
        # a sharp kink at the second sample would be a maximum if the loop started earlier
        v = np.zeros(40)
        v[1] = 1.0
        v[-2] = 1.0
        knots = curvature_knots(SampledSignal(v, 0.0, 39.0), STANDARD)
        assert np.all((knots > 2.0) & (knots < 37.0))

    @pytest.mark.parametrize("seed", range(5))
    def test_random_signals_match_oracle(self, seed):
        rng = np.random.default_rng(seed)
        v = np.cumsum(rng.standard_normal(300)) * 0.01
        s = SampledSignal(v, -1.0, 2.0)
        for variant, plus in ((STANDARD, True), (PAPER, False)):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonFiniteCurvature)
                got = curvature_knots(s, variant)
            np.testing.assert_allclose(got, curvature_maxima(v, s.c, s.h, plus), rtol=0, atol=1e-12)

    def test_profile_counts_nonfinite(self):
        prof = curvature_profile(sampled(lambda x: 5 * x, 0.0, 1.0, 17), PAPER)
        assert prof.nonfinite == 15
        assert np.all(prof.curvature == 0)

    def test_variant_parse(self):
        assert CurvatureVariant.parse("standard") is STANDARD
        assert CurvatureVariant.parse("PAPER") is PAPER


class TestAdaptPartition:
    def test_constant_subdivides_interval(self):
        p = adapt_partition(SampledSignal(np.ones(30), 0.0, 2.0), 4)
        assert p.to_list() == [0.0, 0.5, 1.0, 1.5, 2.0]

    def test_constant_level_two(self):
        assert adapt_partition(SampledSignal(np.ones(30), 0.0, 2.0), 2).to_list() == [0.0, 1.0, 2.0]

    @pytest.mark.parametrize("l", [1, 3, 9])
    def test_count_formula(self, l):
        s = sampled(lambda x: np.cos(2 * np.pi * x * x), 0.0, 3.0, 400)
        T = curvature_knots(s, STANDARD)
        p = adapt_partition(s, l, STANDARD)
        assert len(p) == (T.size + 1) * l + 1
        assert p.c == 0.0 and p.d == 3.0

    def test_shift_equivariance(self):
        v = np.cos(2 * np.pi * np.linspace(0, 3, 400) ** 2)
        a = curvature_knots(SampledSignal(v, 0.0, 3.0), STANDARD)
        b = curvature_knots(SampledSignal(v, 5.0, 8.0), STANDARD)
        np.testing.assert_allclose(b - a, 5.0, atol=1e-12)

    @pytest.mark.parametrize("variant", list(CurvatureVariant))
    def test_constant_offset_invariance(self, variant):
        v = np.sin(np.linspace(0, 4, 300)) * 0.3
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonFiniteCurvature)
            a = curvature_knots(SampledSignal(v, 0.0, 4.0), variant)
            b = curvature_knots(SampledSignal(v + 7.5, 0.0, 4.0), variant)
        np.testing.assert_array_equal(a, b)
