"""Sweep grids, log-log exponents, and count comparison."""

import numpy as np
import pytest

from stereochain import (
    InfeasibleGridError,
    OpCounter,
    SweepSpec,
    compare_counts,
    itemized_ops_increase,
    predicted_ops_increase,
    predicted_ops_reduce,
    run_sweep,
)
from stereochain.bench import _loglog_slope


class TestSweepSpecValidation:
    def test_minimal_specs(self):
        SweepSpec("reduce", (10,), (4,), 2)
        SweepSpec("increase", (10,), (1, 2), 3)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            SweepSpec("shrink", (10,), (4,), 2)

    @pytest.mark.parametrize("n_values", [(), (0,), (10, 10), (20, 10)])
    def test_bad_n_values(self, n_values):
        with pytest.raises(ValueError):
            SweepSpec("reduce", n_values, (4,), 2)

    def test_bad_repetitions(self):
        with pytest.raises(ValueError):
            SweepSpec("reduce", (10,), (4,), 2, repetitions=0)

    def test_reduce_target_must_fit_under_smallest_dim(self):
        with pytest.raises(InfeasibleGridError):
            SweepSpec("reduce", (10,), (4, 8), 4)
        with pytest.raises(InfeasibleGridError):
            SweepSpec("reduce", (10,), (4,), 0)

    def test_reduce_dims_start_at_three(self):
        with pytest.raises(InfeasibleGridError):
            SweepSpec("reduce", (10,), (2, 4), 1)

    def test_increase_needs_positive_base(self):
        with pytest.raises(InfeasibleGridError):
            SweepSpec("increase", (10,), (2,), 0)


def test_loglog_slope_recovers_exact_power_law():
    xs = [2, 4, 8, 16]
    ys = [4.0 * x**3 for x in xs]
    slope, r2 = _loglog_slope(xs, ys)
    assert slope == pytest.approx(3.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_reduce_sweep_rows_and_exactness():
    spec = SweepSpec("reduce", (5, 10), (4, 8, 16), 2, seed=3)
    result = run_sweep(spec)
    assert [(r.n, r.dim) for r in result.rows] == [
        (5, 4), (5, 8), (5, 16), (10, 4), (10, 8), (10, 16),
    ]
    for row in result.rows:
        assert row.target == 2
        assert row.repetition == 0
        assert row.ops.total() == predicted_ops_reduce(row.n, row.dim - 1, 1)
        assert row.ops.total() == row.predicted_paper == row.predicted_measured
        assert row.wall_time >= 0.0


def test_increase_sweep_dims_are_offsets():
    spec = SweepSpec("increase", (6,), (1, 2, 4), 3, seed=4)
    result = run_sweep(spec)
    for row, offset in zip(result.rows, (1, 2, 4)):
        assert row.dim == offset
        assert row.target == 3 + offset
        assert row.ops.total() == itemized_ops_increase(6, 2, 2 + offset)
        assert row.predicted_measured == row.ops.total()
        assert row.predicted_paper == predicted_ops_increase(6, 2, 2 + offset)
        assert row.predicted_paper > row.predicted_measured


def test_single_axis_sweeps_leave_missing_fits_none():
    only_dim = run_sweep(SweepSpec("reduce", (5,), (4, 8), 2))
    assert only_dim.fitted_exponent_dim is not None
    assert only_dim.fitted_exponent_n is None
    only_n = run_sweep(SweepSpec("reduce", (5, 10), (6,), 2))
    assert only_n.fitted_exponent_dim is None
    assert only_n.fitted_exponent_n is not None
    assert only_n.fit_r2 is not None
    neither = run_sweep(SweepSpec("reduce", (5,), (6,), 2))
    assert neither.fit_r2 is None


def test_count_scales_linearly_in_n():
    result = run_sweep(SweepSpec("reduce", (10, 20, 40), (8, 16), 2, seed=5))
    assert result.fitted_exponent_n == pytest.approx(1.0, abs=1e-12)


def test_reduce_exponent_approaches_two_for_wide_grids():
    result = run_sweep(SweepSpec("reduce", (20,), (16, 32, 64, 128), 2, seed=6))
    assert 1.8 <= result.fitted_exponent_dim <= 2.2
    assert result.fit_r2 > 0.999


def test_sweep_counts_are_deterministic():
    spec = SweepSpec("reduce", (8,), (4, 8), 3, seed=9, repetitions=2)
    a = run_sweep(spec)
    b = run_sweep(spec)
    assert [r.ops.as_dict() for r in a.rows] == [r.ops.as_dict() for r in b.rows]


def test_repetitions_emit_one_row_each():
    result = run_sweep(SweepSpec("reduce", (8,), (4, 8), 3, seed=9, repetitions=3))
    assert [(r.n, r.dim, r.repetition) for r in result.rows] == [
        (8, 4, 0), (8, 4, 1), (8, 4, 2), (8, 8, 0), (8, 8, 1), (8, 8, 2),
    ]
    by_point = {}
    for row in result.rows:
        by_point.setdefault((row.n, row.dim), set()).add(row.ops.total())
    assert all(len(totals) == 1 for totals in by_point.values())
    # duplicated grid points must not skew the fitted exponent
    single = run_sweep(SweepSpec("reduce", (8,), (4, 8), 3, seed=9))
    assert result.fitted_exponent_dim == single.fitted_exponent_dim


class TestCompareCounts:
    def test_reduce_exact_match(self):
        # for reduce mode the fourth argument is the target dimension
        out = compare_counts(predicted_ops_reduce(7, 5, 1), 7, 5, 1, "reduce")
        assert out["difference_paper"] == 0
        assert out["difference_measured"] == 0
        assert out["predicted_paper"] == out["predicted_measured_formula"]

    def test_accepts_counter(self):
        counter = OpCounter(mults=10, adds=10, subs=2, divs=7, sqrts=1)
        out = compare_counts(counter, 1, 2, 1, "reduce")
        assert out["measured_total"] == counter.total()

    def test_increase_reports_per_lift_constants(self):
        n, dim_from, offset = 3, 4, 5
        measured = itemized_ops_increase(n, dim_from, dim_from + offset)
        out = compare_counts(measured, n, dim_from, offset, "increase")
        assert out["per_lift_constant_measured"] == 7
        assert out["per_lift_constant_published"] == 8
        assert out["difference_measured"] == 0
        assert out["difference_paper"] != 0

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            compare_counts(0, 1, 2, 1, "sideways")
