import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privshape.domain import ApplianceCategory, validate_household
from privshape.ingest import (
    ParseError,
    RawTraces,
    SyntheticSpec,
    TraceSchema,
    extract_day,
    generate_synthetic_household,
    load_household_csv,
    load_irradiance_csv,
    resample_series,
    resample_traces,
    synthetic_irradiance,
    write_traces_csv,
)

SC = ApplianceCategory.SAFETY_CRITICAL
OD = ApplianceCategory.ON_DEMAND


def write_csv(path, header, rows):
    path.write_text(",".join(header) + "\n"
                    + "\n".join(",".join(str(x) for x in row) for row in rows) + "\n")


class TestLoadHouseholdCsv:
    def test_three_row_file(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["timestamp", "a_P_kw", "a_Q_kvar"],
                  [[0, 0.1, 0.0], [1, 0.2, 0.1], [2, 0.1, 0.0]])
        traces = load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))
        assert len(traces) == 3
        assert traces.step_minutes == 1
        np.testing.assert_allclose(traces.p_kw["a"], [0.1, 0.2, 0.1])

    def test_negative_power_names_row(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["timestamp", "a_P_kw", "a_Q_kvar"],
                  [[0, 0.1, 0.0], [1, 0.2, 0.0], [2, -0.5, 0.0]])
        with pytest.raises(ParseError, match="negative power, row 2"):
            load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))

    def test_missing_value_names_row_and_column(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("timestamp,a_P_kw,a_Q_kvar\n0,0.1,0.0\n1,,0.0\n")
        with pytest.raises(ParseError, match="row 1, column a_P_kw"):
            load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))

    def test_full_day_eight_appliances(self, tmp_path):
        rng = np.random.default_rng(0)
        ids = [f"a{i}" for i in range(8)]
        header = ["timestamp"] + [c for i in ids for c in (f"{i}_P_kw", f"{i}_Q_kvar")]
        data = np.hstack([np.arange(1440)[:, None], rng.uniform(0, 1, (1440, 16))])
        write_csv(tmp_path / "t.csv", header, data.tolist())
        schema = TraceSchema(appliances=tuple((i, OD) for i in ids))
        traces = load_household_csv(str(tmp_path / "t.csv"), schema)
        assert len(traces) == 1440 and len(traces.appliances) == 8

    def test_missing_column(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["timestamp", "a_P_kw"], [[0, 0.1]])
        with pytest.raises(ParseError, match="a_Q_kvar"):
            load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))

    def test_irregular_timestamps(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["timestamp", "a_P_kw", "a_Q_kvar"],
                  [[0, 0.1, 0.0], [1, 0.1, 0.0], [3, 0.1, 0.0]])
        with pytest.raises(ParseError, match="constant step"):
            load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))

    def test_iso_timestamps(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["timestamp", "a_P_kw", "a_Q_kvar"],
                  [["2012-12-19T00:00:00Z", 0.1, 0.0],
                   ["2012-12-19T00:01:00Z", 0.2, 0.0]])
        traces = load_household_csv(str(path), TraceSchema(appliances=(("a", OD),)))
        assert traces.step_minutes == 1


class TestLoadIrradianceCsv:
    def test_four_day_columns(self, tmp_path):
        path = tmp_path / "irr.csv"
        rows = [[m, 0.1, 0.2, 0.0, 0.4] for m in range(10)]
        write_csv(path, ["minute", "GTI_a", "GTI_b", "GTI_c", "GTI_d"], rows)
        irr = load_irradiance_csv(str(path))
        assert irr.gti.shape == (4, 10)
        assert irr.day_labels == ("a", "b", "c", "d")

    def test_night_only_day_valid(self, tmp_path):
        path = tmp_path / "irr.csv"
        write_csv(path, ["minute", "GTI_x"], [[m, 0.0] for m in range(5)])
        assert np.all(load_irradiance_csv(str(path)).gti == 0.0)

    def test_negative_gti(self, tmp_path):
        path = tmp_path / "irr.csv"
        write_csv(path, ["minute", "GTI_x"], [[0, 0.1], [1, -1.0]])
        with pytest.raises(ParseError, match="negative GTI"):
            load_irradiance_csv(str(path))


class TestResample:
    def test_mean_preserves_energy(self):
        np.testing.assert_allclose(resample_series(np.array([1.0, 3.0]), 2), [2.0])

    def test_constant_fixed_point(self):
        np.testing.assert_allclose(resample_series(np.full(12, 0.7), 3), np.full(4, 0.7))

    def test_minutely_day_to_quarter_hours(self):
        assert len(resample_series(np.arange(1440.0), 15)) == 96

    def test_non_divisible(self):
        with pytest.raises(ValueError, match="does not divide"):
            resample_series(np.ones(10), 3)

    @given(st.integers(2, 4), st.integers(2, 4),
           st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_composition(self, a, b, chunk):
        values = np.tile(chunk, a * b)
        two_step = resample_series(resample_series(values, a), b)
        one_step = resample_series(values, a * b)
        np.testing.assert_allclose(two_step, one_step, atol=1e-12)

    @given(st.integers(1, 5),
           st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_total_energy_invariant(self, factor, chunk):
        values = np.tile(chunk, factor)
        coarse = resample_series(values, factor)
        assert coarse.sum() * factor == pytest.approx(values.sum(), rel=1e-9, abs=1e-12)


class TestExtractDay:
    def _two_day_traces(self):
        spd = 1440
        return RawTraces(
            step_minutes=1,
            timestamps=np.arange(2 * spd),
            appliances=(("A", SC), ("B", SC), ("tv", OD)),
            p_kw={"A": np.full(2 * spd, 0.1), "B": np.full(2 * spd, 0.2),
                  "tv": np.full(2 * spd, 0.3)},
            q_kvar={"A": np.zeros(2 * spd), "B": np.zeros(2 * spd),
                    "tv": np.full(2 * spd, 0.1)},
        )

    def test_baseline_is_safety_critical_sum(self):
        day = extract_day(self._two_day_traces(), 0)
        np.testing.assert_allclose(day.baseline_p, 0.3)
        assert set(day.on_demand_p) == {"tv"}

    def test_day_slicing(self):
        traces = self._two_day_traces()
        traces.p_kw["A"][1440] = 9.0
        day1 = extract_day(traces, 1)
        assert day1.baseline_p[0] == pytest.approx(9.2)

    def test_out_of_range_day(self):
        with pytest.raises(ValueError, match="day 5"):
            extract_day(self._two_day_traces(), 5)


class TestSyntheticHousehold:
    def test_deterministic_for_fixed_seed(self):
        spec = SyntheticSpec(days=10)
        t1, h1 = generate_synthetic_household(42, spec)
        t2, h2 = generate_synthetic_household(42, spec)
        for key in t1.p_kw:
            np.testing.assert_array_equal(t1.p_kw[key], t2.p_kw[key])
            np.testing.assert_array_equal(t1.q_kvar[key], t2.q_kvar[key])
        assert h1.appliances == h2.appliances

    def test_different_seeds_differ(self):
        spec = SyntheticSpec(days=5)
        t1, _ = generate_synthetic_household(1, spec)
        t2, _ = generate_synthetic_household(2, spec)
        assert any(not np.array_equal(t1.p_kw[k], t2.p_kw[k]) for k in t1.p_kw)

    def test_no_on_demand_appliances(self):
        spec = SyntheticSpec(days=5, on_demand=())
        traces, _ = generate_synthetic_household(0, spec)
        assert traces.ids(OD) == []

    def test_passes_validation(self):
        _, household = generate_synthetic_household(7, SyntheticSpec(days=3))
        report = validate_household(household)
        assert report.ok, report.messages()

    def test_default_day_count(self):
        traces, _ = generate_synthetic_household(0, SyntheticSpec(days=730, step_minutes=15))
        assert traces.num_days == 730

    def test_csv_round_trip(self, tmp_path):
        spec = SyntheticSpec(days=2)
        traces, _ = generate_synthetic_household(3, spec)
        path = str(tmp_path / "traces.csv")
        write_traces_csv(traces, path)
        loaded = load_household_csv(path, TraceSchema(appliances=traces.appliances))
        assert loaded.step_minutes == traces.step_minutes
        for key in traces.p_kw:
            np.testing.assert_allclose(loaded.p_kw[key], traces.p_kw[key], rtol=1e-4,
                                       atol=1e-7)

    def test_resample_traces_to_coarser_grid(self):
        traces, _ = generate_synthetic_household(5, SyntheticSpec(days=2))
        coarse = resample_traces(traces, 4)
        assert coarse.step_minutes == 60
        assert len(coarse) == len(traces) // 4

    def test_synthetic_irradiance_shape(self):
        irr = synthetic_irradiance(42, 15)
        assert irr.gti.shape == (4, 96)
        assert np.all(irr.gti >= 0.0)
