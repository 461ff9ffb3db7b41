import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privshape.privacy import (
    QuantizerSpec,
    empirical_mi,
    entropy_bits,
    evaluate_case_privacy,
    mi_report_rows,
    quantize,
    write_mi_csv,
)


def mi_from_joint(counts: np.ndarray) -> float:
    """Independent direct evaluation of the plug-in formula on a count table."""
    p = counts / counts.sum()
    total = 0.0
    for i in range(p.shape[0]):
        for j in range(p.shape[1]):
            if p[i, j] > 0:
                total += p[i, j] * math.log2(p[i, j] / (p[i].sum() * p[:, j].sum()))
    return total


def series_from_joint(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """A symbol-pair realization whose joint histogram is `counts`."""
    xs, ys = [], []
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            xs += [i] * int(counts[i, j])
            ys += [j] * int(counts[i, j])
    return np.array(xs), np.array(ys)


class TestQuantize:
    def test_fixed_width_midpoint_split(self):
        out = quantize(np.array([0.0, 1.0, 2.0, 3.0]), QuantizerSpec(bins=2))
        np.testing.assert_array_equal(out, [0, 0, 1, 1])

    def test_constant_series_single_symbol(self):
        out = quantize(np.full(5, 3.3), QuantizerSpec(bins=8))
        np.testing.assert_array_equal(out, 0)
        assert entropy_bits(out) == 0.0

    def test_quantile_rank_order(self):
        out = quantize(np.array([1.0, 2.0, 3.0, 4.0]),
                       QuantizerSpec(mode="quantile", bins=4))
        np.testing.assert_array_equal(out, [0, 1, 2, 3])

    def test_constant_series_quantile_fallback(self):
        out = quantize(np.full(5, 1.0), QuantizerSpec(mode="quantile", bins=4))
        np.testing.assert_array_equal(out, 0)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            QuantizerSpec(bins=1)
        with pytest.raises(ValueError):
            QuantizerSpec(mode="fuzzy")

    @given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=40),
           st.integers(2, 16))
    @settings(max_examples=60, deadline=None)
    def test_deterministic_and_in_range(self, values, bins):
        series = np.array(values)
        spec = QuantizerSpec(bins=bins)
        a = quantize(series, spec)
        b = quantize(series, spec)
        np.testing.assert_array_equal(a, b)
        assert a.min() >= 0 and a.max() < bins


class TestEmpiricalMi:
    def test_identical_uniform_binary(self):
        x = np.tile([0, 1], 500)
        assert empirical_mi(x, x) == pytest.approx(1.0)

    def test_constant_side_gives_zero(self):
        x = np.tile([0, 1, 2, 3], 100)
        y = np.zeros(400, dtype=int)
        assert empirical_mi(x, y) == pytest.approx(0.0)

    def test_joint_histogram_matches_direct_formula(self):
        counts = np.array([[2.0, 1.0], [1.0, 4.0]])
        x, y = series_from_joint(counts)
        assert empirical_mi(x, y) == pytest.approx(mi_from_joint(counts), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            empirical_mi(np.zeros(3), np.zeros(4))

    @given(st.lists(st.integers(0, 4), min_size=2, max_size=60),
           st.lists(st.integers(0, 4), min_size=2, max_size=60))
    @settings(max_examples=80, deadline=None)
    def test_symmetry_and_bounds(self, xs, ys):
        n = min(len(xs), len(ys))
        x, y = np.array(xs[:n]), np.array(ys[:n])
        mi_xy = empirical_mi(x, y)
        assert mi_xy == pytest.approx(empirical_mi(y, x), abs=1e-12)
        assert -1e-12 <= mi_xy <= min(entropy_bits(x), entropy_bits(y)) + 1e-12

    @given(st.lists(st.integers(0, 3), min_size=2, max_size=40), st.integers(0, 10))
    @settings(max_examples=40, deadline=None)
    def test_permutation_invariance(self, xs, seed):
        x = np.array(xs)
        y = (x + np.arange(len(x))) % 3
        perm = np.random.default_rng(seed).permutation(len(x))
        assert empirical_mi(x, y) == pytest.approx(
            empirical_mi(x[perm], y[perm]), abs=1e-12)

    def test_self_mi_equals_entropy(self):
        rng = np.random.default_rng(3)
        x = rng.integers(0, 8, 200)
        assert empirical_mi(x, x) == pytest.approx(entropy_bits(x), abs=1e-12)


class TestCasePrivacy:
    def test_case0_mi_is_entropy_of_actual(self, pipeline):
        from privshape.privacy import actual_load_from_case
        case0 = next(r for r in pipeline.matrix.results if r.case.case_id == 0)
        actual = actual_load_from_case(case0)
        np.testing.assert_allclose(actual.aggregate_p, case0.pm, atol=1e-12)
        spec = QuantizerSpec(bins=64)
        report = evaluate_case_privacy(case0, actual, spec)
        assert report.mi_p == pytest.approx(
            entropy_bits(quantize(case0.pm, spec)), abs=1e-12)
        assert report.total == pytest.approx(report.mi_p + report.mi_q, abs=1e-15)

    def test_report_rows_and_csv(self, pipeline, tmp_path):
        reports = pipeline.mi_reports
        rows = mi_report_rows(reports[0])
        assert rows[0][1:3] == ("P", "aggregate")
        scopes = {r[2] for r in rows}
        assert "appliance_avg" in scopes
        path = tmp_path / "mi.csv"
        write_mi_csv(reports, str(path))
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "case,channel,scope,mi_bits"
        assert len(lines) == 1 + sum(len(mi_report_rows(r)) for r in reports)

    def test_grid_mismatch_rejected(self, pipeline):
        from privshape.privacy import ActualLoad
        case0 = next(r for r in pipeline.matrix.results if r.case.case_id == 0)
        bad = ActualLoad(np.zeros(10), np.zeros(10), {}, {})
        with pytest.raises(ValueError, match="different grid"):
            evaluate_case_privacy(case0, bad)
