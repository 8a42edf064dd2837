import numpy as np
import pytest

from src.sleeve_actuator.errors import RankDeficiencyError, ValidationError
from src.sleeve_actuator.stiffness import (
    ForceDisplacementDataset,
    StiffnessCubic,
    axial_stiffness,
    check_pressure_ordering,
    fit_cubic,
    interval_stiffness,
    stiffness_at,
    stiffness_force,
)


def line_dataset(slope, start=0.0, stop=40.0, count=81, pressure_kpa=None):
    y = np.linspace(start, stop, count)
    return ForceDisplacementDataset(tuple(y.tolist()), tuple((slope * y).tolist()), pressure_kpa)


def cubic_dataset(poly, y, noise=0.0, seed=None):
    force = np.array([poly.force(v) for v in y])
    if noise:
        force = force * (1.0 + noise * np.random.default_rng(seed).standard_normal(len(y)))
    return ForceDisplacementDataset(tuple(float(v) for v in y), tuple(float(f) for f in force))


class TestStiffnessCubic:
    def test_force_at_rest(self, l13_poly):
        assert stiffness_force(l13_poly, 0.0) == pytest.approx(-0.2246)

    def test_force_at_ten_mm(self, l13_poly):
        expected = 4.1481e-4 * 1000 + 1.2865e-2 * 100 + 2.0789 * 10 - 0.2246
        assert stiffness_force(l13_poly, 10.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(22.2657, abs=1e-4)

    def test_zero_polynomial(self):
        zero = StiffnessCubic.zero()
        assert all(zero.force(y) == 0.0 for y in (0.0, 5.0, 40.0))

    def test_stiffness_at_rest(self, l13_poly):
        assert axial_stiffness(l13_poly, 0.0) == pytest.approx(2.0789)

    def test_stiffness_at_ten_mm(self, l13_poly):
        assert axial_stiffness(l13_poly, 10.0) == pytest.approx(2.4606, abs=1e-4)

    def test_derivative_coefficients(self, l13_poly):
        three_a, two_b, c = l13_poly.derivative_coefficients()
        assert three_a == pytest.approx(1.24443e-3, rel=1e-4)
        assert two_b == pytest.approx(2.5730e-2, rel=1e-4)
        assert c == pytest.approx(2.0789, rel=1e-4)

    def test_extrapolation_flag(self, l13_poly):
        assert not l13_poly.is_extrapolated(20.0)
        assert l13_poly.is_extrapolated(45.0)
        assert l13_poly.is_extrapolated(-1.0)

    def test_nonpositive_linear_term_is_flagged(self):
        poly = StiffnessCubic(0.0, 0.0, -1.0, 0.0)
        assert poly.warnings

    def test_empty_range_rejected(self):
        with pytest.raises(ValidationError):
            StiffnessCubic(0.0, 0.0, 1.0, 0.0, (5.0, 5.0))


class TestFitCubic:
    def test_noiseless_recovery(self, l13_poly):
        fitted, report = fit_cubic(cubic_dataset(l13_poly, np.linspace(0.0, 40.0, 41)))
        np.testing.assert_allclose(fitted.coefficients(), l13_poly.coefficients(), rtol=1e-9)
        assert fitted.valid_range == (0.0, 40.0)
        assert report.sample_count == 41

    def test_noisy_linear_term(self, l13_poly):
        fitted, _ = fit_cubic(cubic_dataset(l13_poly, np.linspace(0.0, 40.0, 40), noise=0.01, seed=3))
        assert fitted.c == pytest.approx(l13_poly.c, rel=0.05)

    def test_linear_data(self):
        fitted, _ = fit_cubic(line_dataset(1.71642))
        assert abs(fitted.a) < 1e-9
        assert abs(fitted.b) < 1e-9
        assert fitted.c == pytest.approx(1.71642)

    def test_single_displacement(self):
        data = ForceDisplacementDataset((5.0,) * 6, (1.0, 2.0, 3.0, 4.0, 5.0, 6.0))
        with pytest.raises(RankDeficiencyError):
            fit_cubic(data)

    def test_too_few_samples(self):
        with pytest.raises(ValidationError):
            fit_cubic(line_dataset(1.0, count=3))


class TestIntervalStiffness:
    def test_unloaded_line(self):
        report = interval_stiffness(line_dataset(1.71642))
        assert len(report.intervals) == 8
        assert report.values() == pytest.approx([1716.42] * 8)

    def test_pressurised_line(self):
        assert interval_stiffness(line_dataset(4.08755)).values()[0] == pytest.approx(4087.55)

    def test_single_bin(self):
        y = (0.0, 1.0, 3.0, 7.0)
        f = (0.5, 2.0, 2.5, 9.5)
        report = interval_stiffness(ForceDisplacementDataset(y, f), bin_width=100.0)
        assert report.values() == pytest.approx([(9.5 - 0.5) / 7.0 * 1000.0])

    def test_short_last_bin(self):
        report = interval_stiffness(line_dataset(2.0, stop=12.0, count=13))
        assert [(i.start_mm, i.end_mm) for i in report.intervals] == [(0.0, 5.0), (5.0, 10.0), (10.0, 12.0)]

    def test_lookup(self):
        report = interval_stiffness(line_dataset(2.0))
        assert stiffness_at(report, 12.5) == pytest.approx(2000.0)
        with pytest.raises(ValidationError):
            stiffness_at(report, 50.0)

    def test_rejects_bad_width(self):
        with pytest.raises(ValidationError):
            interval_stiffness(line_dataset(2.0), bin_width=0.0)


class TestPressureOrdering:
    def test_stiffer_with_pressure(self):
        datasets = [line_dataset(slope, pressure_kpa=p) for p, slope in ((100, 3.5), (0, 1.7), (125, 4.1))]
        assert check_pressure_ordering(datasets, 10.0) == []

    def test_reports_violations(self):
        datasets = [line_dataset(slope, pressure_kpa=p) for p, slope in ((0, 1.7), (50, 3.0), (75, 2.5))]
        assert check_pressure_ordering(datasets, 10.0) == [(50, 75)]

    def test_needs_labels(self):
        with pytest.raises(ValidationError):
            check_pressure_ordering([line_dataset(1.0)], 10.0)


class TestDataset:
    def test_decreasing_displacement_reports_row(self):
        with pytest.raises(ValidationError) as info:
            ForceDisplacementDataset((0.0, 2.0, 1.0), (0.0, 1.0, 2.0))
        assert info.value.row == 3

    def test_nonfinite(self):
        with pytest.raises(ValidationError):
            ForceDisplacementDataset((0.0, 1.0), (0.0, float("nan")))
