"""Return arithmetic: frozen hand-derived values and algebraic identities."""

import math

import numpy as np
import pytest

from factor_bench.errors import DomainError
from factor_bench.returns import (
    ReturnKind,
    ReturnSeries,
    convert_series,
    geometric_average,
    holding_period_return,
    sample_std,
    to_continuous,
    to_discrete,
)


def series(values, kind=ReturnKind.DISCRETE, identity="X"):
    start = (2010, 7)
    months = []
    year, mon = start
    for _ in values:
        months.append((year, mon))
        year, mon = (year + 1, 1) if mon == 12 else (year, mon + 1)
    return ReturnSeries(identity, tuple(months), np.asarray(values, dtype=float), kind)


def random_discrete_series(rng, n):
    # keep values comfortably above -1 so log conversion stays well-posed
    return series(rng.uniform(-0.6, 0.8, n))


class TestHoldingPeriodReturn:
    def test_ten_percent_gain(self):
        assert holding_period_return(100.0, 110.0, 0.0) == pytest.approx(0.10, abs=1e-15)

    def test_no_change(self):
        assert holding_period_return(100.0, 100.0, 0.0) == 0.0

    def test_income_offsets_price_loss(self):
        assert holding_period_return(100.0, 95.0, 5.0) == 0.0

    def test_nonpositive_initial_price_rejected(self):
        with pytest.raises(DomainError):
            holding_period_return(0.0, 100.0, 0.0)
        with pytest.raises(DomainError):
            holding_period_return(-5.0, 100.0, 0.0)


class TestKindConversion:
    def test_zero_maps_to_zero(self):
        assert to_continuous(0.0) == 0.0

    def test_log_identity(self):
        assert to_continuous(math.e - 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_ln_one_point_one(self):
        # independent high-precision evaluation of ln(1.1)
        assert to_continuous(0.10) == pytest.approx(0.09531017980432486, abs=1e-6)

    def test_at_or_below_total_loss_rejected(self):
        with pytest.raises(DomainError):
            to_continuous(-1.0)
        with pytest.raises(DomainError):
            to_continuous(-1.5)

    def test_series_roundtrip_to_1e12(self):
        rng = np.random.default_rng(11)
        for n in (1, 5, 42):
            s = random_discrete_series(rng, n)
            back = convert_series(convert_series(s, ReturnKind.CONTINUOUS), ReturnKind.DISCRETE)
            np.testing.assert_allclose(back.values, s.values, rtol=0, atol=1e-12)

    def test_all_zero_series(self):
        s = series([0.0, 0.0, 0.0])
        out = convert_series(s, ReturnKind.CONTINUOUS)
        assert np.all(out.values == 0.0)

    def test_single_value(self):
        out = convert_series(series([0.10]), ReturnKind.CONTINUOUS)
        assert out.values[0] == pytest.approx(0.09531017980432486, abs=1e-6)

    def test_matching_kind_is_identity(self):
        s = series([0.1, 0.2])
        assert convert_series(s, ReturnKind.DISCRETE) is s

    def test_scalar_inverse_pair(self):
        assert to_discrete(to_continuous(0.37)) == pytest.approx(0.37, abs=1e-15)


class TestReturnSeriesInvariants:
    def test_rejects_gap_in_months(self):
        with pytest.raises(DomainError):
            ReturnSeries("X", ((2010, 1), (2010, 3)), np.array([0.1, 0.1]), ReturnKind.DISCRETE)

    def test_rejects_length_mismatch(self):
        with pytest.raises(DomainError):
            ReturnSeries("X", ((2010, 1),), np.array([0.1, 0.1]), ReturnKind.DISCRETE)

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            ReturnSeries("X", (), np.array([]), ReturnKind.DISCRETE)

    def test_discrete_total_loss_names_month(self):
        with pytest.raises(DomainError, match="2010-08"):
            ReturnSeries("X", ((2010, 7), (2010, 8)), np.array([0.1, -1.0]), ReturnKind.DISCRETE)

    def test_continuous_values_may_be_below_minus_one(self):
        s = ReturnSeries("X", ((2010, 7),), np.array([-2.5]), ReturnKind.CONTINUOUS)
        assert s.values[0] == -2.5

    def test_year_rollover_is_consecutive(self):
        s = series([0.1] * 8)  # crosses 2010-12 -> 2011-01
        assert s.months[-1] == (2011, 2)


class TestGeometricAverage:
    def test_constant_series_both_kinds(self):
        for kind in ReturnKind:
            s = series([0.07, 0.07, 0.07], kind)
            assert geometric_average(s) == pytest.approx(0.07, abs=1e-12)

    def test_doubling_then_halving(self):
        assert geometric_average(series([1.0, -0.5])) == pytest.approx(0.0, abs=1e-15)

    def test_continuous_symmetry(self):
        s = series([0.1, -0.1], ReturnKind.CONTINUOUS)
        assert geometric_average(s) == pytest.approx(0.0, abs=1e-15)

    def test_cross_kind_identity(self):
        # log(1 + discrete geometric mean) equals the continuous mean
        rng = np.random.default_rng(7)
        for _ in range(200):
            s = random_discrete_series(rng, int(rng.integers(1, 60)))
            geo_d = geometric_average(s)
            geo_c = geometric_average(convert_series(s, ReturnKind.CONTINUOUS))
            assert math.log1p(geo_d) == pytest.approx(geo_c, abs=1e-12)

    def test_between_min_and_max_unless_constant(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            s = random_discrete_series(rng, int(rng.integers(2, 30)))
            geo = geometric_average(s)
            assert s.values.min() < geo <= s.values.max()


class TestSampleStd:
    def test_constant_series_is_zero(self):
        assert sample_std(series([0.05, 0.05, 0.05])) == pytest.approx(0.0, abs=1e-15)
        assert sample_std(series([0.25, 0.25, 0.25])) == 0.0  # exactly representable mean

    def test_hand_evaluated_two_point_case(self):
        # mean 1, squared deviations sum to 2, divisor 1, sqrt
        assert sample_std(series([0.0, 2.0], ReturnKind.CONTINUOUS)) == pytest.approx(
            1.4142135623730951, abs=1e-6
        )

    def test_absolute_homogeneity_and_translation_invariance(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            vals = rng.normal(0.0, 0.3, int(rng.integers(2, 40)))
            base = sample_std(series(vals, ReturnKind.CONTINUOUS))
            for c in (-2.5, 0.1, 3.0):
                scaled = sample_std(series(c * vals, ReturnKind.CONTINUOUS))
                assert scaled == pytest.approx(abs(c) * base, abs=1e-12 + 1e-12 * abs(c))
            shifted = sample_std(series(vals + 0.123, ReturnKind.CONTINUOUS))
            assert shifted == pytest.approx(base, abs=1e-12)

    def test_needs_two_observations(self):
        with pytest.raises(DomainError):
            sample_std(series([0.1]))
