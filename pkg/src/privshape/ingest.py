"""Trace ingestion: CSV loading, resampling, day extraction, synthetic data.

Trace CSVs have a header row with a `timestamp` column (ISO-8601 or integer
minute index) and one `<id>_P_kw` / `<id>_Q_kvar` column pair per appliance.
Irradiance CSVs have a `minute` column and one `GTI_<day>` column per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .domain import (
    Appliance,
    ApplianceCategory,
    BaselineProfiles,
    Battery,
    Capacitor,
    HouseholdConfig,
    ApplianceConfig,
    HouseholdModel,
    PvPanel,
    TariffSpec,
    build_household,
    build_time_grid,
)

MINUTES_PER_DAY = 24 * 60


class ParseError(ValueError):
    """Structured ingestion failure; names the offending row/column when known."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


@dataclass(frozen=True, eq=False)
class RawTraces:
    """Per-appliance P/Q series on a constant-step minute grid."""

    step_minutes: int
    timestamps: np.ndarray                     # minute index, strictly increasing
    appliances: tuple[tuple[str, ApplianceCategory], ...]
    p_kw: dict[str, np.ndarray]
    q_kvar: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def slots_per_day(self) -> int:
        return MINUTES_PER_DAY // self.step_minutes

    @property
    def num_days(self) -> int:
        return len(self) // self.slots_per_day

    def ids(self, category: ApplianceCategory | None = None) -> list[str]:
        return [a for a, cat in self.appliances if category is None or cat is category]


@dataclass(frozen=True, eq=False)
class IrradianceTraces:
    """Per-day global tilted irradiance series, kW/m^2."""

    step_minutes: int
    day_labels: tuple[str, ...]
    gti: np.ndarray                            # shape (num_days, samples_per_day)


@dataclass(frozen=True, eq=False)
class DayProfiles:
    """One day of trace data split by appliance category."""

    step_minutes: int
    baseline_p: np.ndarray
    baseline_q: np.ndarray
    on_demand_p: dict[str, np.ndarray]
    on_demand_q: dict[str, np.ndarray]
    shiftable_p: dict[str, np.ndarray]
    shiftable_q: dict[str, np.ndarray]


@dataclass(frozen=True)
class TraceSchema:
    """Column map for load_household_csv.

    Columns default to `<id>_P_kw` / `<id>_Q_kvar`; `columns` overrides
    per-appliance (id -> (p_column, q_column)).
    """

    appliances: tuple[tuple[str, ApplianceCategory], ...]
    timestamp_column: str = "timestamp"
    columns: dict[str, tuple[str, str]] = field(default_factory=dict)

    def column_pair(self, app_id: str) -> tuple[str, str]:
        return self.columns.get(app_id, (f"{app_id}_P_kw", f"{app_id}_Q_kvar"))


def _minute_index(raw: pd.Series, column: str) -> np.ndarray:
    """Timestamps as integer minutes; accepts plain integers or ISO-8601."""
    if pd.api.types.is_numeric_dtype(raw):
        values = raw.to_numpy()
        if np.any(~np.isfinite(values)):
            row = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ParseError(f"malformed timestamp, row {row}", row=row, column=column)
        return values.astype(np.int64)
    try:
        parsed = pd.to_datetime(raw, utc=True)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"malformed timestamp column {column!r}: {exc}", column=column) from exc
    epoch_min = parsed.astype("int64") // (60 * 10**9)
    return epoch_min.to_numpy()


def _check_numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    series = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(series))
    if bad.size:
        row = int(bad[0])
        raise ParseError(f"missing or malformed value, row {row}, column {column}",
                         row=row, column=column)
    neg = np.flatnonzero(series < 0.0)
    if neg.size:
        row = int(neg[0])
        raise ParseError(f"negative power, row {row}, column {column}", row=row, column=column)
    return series


def load_household_csv(path: str, schema: TraceSchema) -> RawTraces:
    """Load appliance traces; all declared columns must exist and be clean."""
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise
    except Exception as exc:  # ragged rows, encoding, ...
        raise ParseError(f"cannot parse {path}: {exc}") from exc

    missing = [schema.timestamp_column] if schema.timestamp_column not in frame.columns else []
    for app_id, _ in schema.appliances:
        for col in schema.column_pair(app_id):
            if col not in frame.columns:
                missing.append(col)
    if missing:
        raise ParseError(f"{path} missing columns: {', '.join(missing)}")
    if len(frame) == 0:
        raise ParseError(f"{path} has no data rows")

    ts = _minute_index(frame[schema.timestamp_column], schema.timestamp_column)
    steps = np.diff(ts)
    if len(steps) and (np.any(steps <= 0) or np.any(steps != steps[0])):
        row = int(np.flatnonzero((steps <= 0) | (steps != steps[0]))[0]) + 1
        raise ParseError(f"timestamps not strictly increasing at constant step, row {row}",
                         row=row, column=schema.timestamp_column)
    step = int(steps[0]) if len(steps) else 1

    p_kw: dict[str, np.ndarray] = {}
    q_kvar: dict[str, np.ndarray] = {}
    for app_id, _ in schema.appliances:
        p_col, q_col = schema.column_pair(app_id)
        p_kw[app_id] = _check_numeric(frame, p_col)
        q_kvar[app_id] = _check_numeric(frame, q_col)

    return RawTraces(step_minutes=step, timestamps=ts, appliances=tuple(schema.appliances),
                     p_kw=p_kw, q_kvar=q_kvar)


def load_irradiance_csv(path: str) -> IrradianceTraces:
    frame = pd.read_csv(path)
    if "minute" not in frame.columns:
        raise ParseError(f"{path} missing 'minute' column")
    day_cols = [c for c in frame.columns if c.startswith("GTI_")]
    if not day_cols:
        raise ParseError(f"{path} has no GTI_<day> columns")
    minutes = _minute_index(frame["minute"], "minute")
    steps = np.diff(minutes)
    if len(steps) and (np.any(steps <= 0) or np.any(steps != steps[0])):
        raise ParseError("irradiance minutes not strictly increasing at constant step",
                         column="minute")
    series = []
    for col in day_cols:
        values = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise ParseError(f"missing GTI value, row {int(bad[0])}, column {col}",
                             row=int(bad[0]), column=col)
        neg = np.flatnonzero(values < 0.0)
        if neg.size:
            raise ParseError(f"negative GTI, row {int(neg[0])}, column {col}",
                             row=int(neg[0]), column=col)
        series.append(values)
    step = int(steps[0]) if len(steps) else 1
    return IrradianceTraces(step_minutes=step,
                            day_labels=tuple(c[len("GTI_"):] for c in day_cols),
                            gti=np.vstack(series))


def resample_series(values: np.ndarray, factor: int) -> np.ndarray:
    """Bin means: power averaged so energy is preserved across the grid change."""
    values = np.asarray(values, dtype=float)
    if factor <= 0:
        raise ValueError("factor must be positive")
    if len(values) % factor != 0:
        raise ValueError(f"factor {factor} does not divide series length {len(values)}")
    return values.reshape(-1, factor).mean(axis=1)


def resample_traces(traces: RawTraces, factor: int) -> RawTraces:
    if factor == 1:
        return traces
    ts = traces.timestamps[::factor]
    if len(traces) % factor != 0:
        raise ValueError(f"factor {factor} does not divide trace length {len(traces)}")
    return RawTraces(
        step_minutes=traces.step_minutes * factor,
        timestamps=ts,
        appliances=traces.appliances,
        p_kw={k: resample_series(v, factor) for k, v in traces.p_kw.items()},
        q_kvar={k: resample_series(v, factor) for k, v in traces.q_kvar.items()},
    )


def resample_to_grid(traces: RawTraces, slot_minutes: int) -> RawTraces:
    if slot_minutes % traces.step_minutes != 0:
        raise ValueError(
            f"grid step {slot_minutes} min is not a multiple of trace step {traces.step_minutes} min")
    return resample_traces(traces, slot_minutes // traces.step_minutes)


def extract_day(traces: RawTraces, day_index: int) -> DayProfiles:
    """Slice one full day and split it by appliance category."""
    spd = traces.slots_per_day
    if MINUTES_PER_DAY % traces.step_minutes != 0:
        raise ValueError(f"step {traces.step_minutes} min does not divide a day")
    start, stop = day_index * spd, (day_index + 1) * spd
    if day_index < 0 or stop > len(traces):
        raise ValueError(f"day {day_index} not fully covered by traces "
                         f"({traces.num_days} complete days available)")

    baseline_p = np.zeros(spd)
    baseline_q = np.zeros(spd)
    od_p: dict[str, np.ndarray] = {}
    od_q: dict[str, np.ndarray] = {}
    sh_p: dict[str, np.ndarray] = {}
    sh_q: dict[str, np.ndarray] = {}
    for app_id, category in traces.appliances:
        p = traces.p_kw[app_id][start:stop]
        q = traces.q_kvar[app_id][start:stop]
        if category is ApplianceCategory.SAFETY_CRITICAL:
            baseline_p += p
            baseline_q += q
        elif category is ApplianceCategory.ON_DEMAND:
            od_p[app_id], od_q[app_id] = p, q
        else:
            sh_p[app_id], sh_q[app_id] = p, q
    return DayProfiles(step_minutes=traces.step_minutes,
                       baseline_p=baseline_p, baseline_q=baseline_q,
                       on_demand_p=od_p, on_demand_q=od_q,
                       shiftable_p=sh_p, shiftable_q=sh_q)


def write_traces_csv(traces: RawTraces, path: str) -> None:
    data: dict[str, np.ndarray] = {"timestamp": traces.timestamps}
    for app_id, _ in traces.appliances:
        data[f"{app_id}_P_kw"] = traces.p_kw[app_id]
        data[f"{app_id}_Q_kvar"] = traces.q_kvar[app_id]
    pd.DataFrame(data).to_csv(path, index=False, float_format="%.6g")


def write_irradiance_csv(irr: IrradianceTraces, path: str) -> None:
    data: dict[str, np.ndarray] = {
        "minute": np.arange(irr.gti.shape[1]) * irr.step_minutes}
    for label, series in zip(irr.day_labels, irr.gti):
        data[f"GTI_{label}"] = series
    pd.DataFrame(data).to_csv(path, index=False, float_format="%.6g")


# ---------------------------------------------------------------------------
# Synthetic household (substitute for licensed appliance-level datasets)
# ---------------------------------------------------------------------------

def _pf_ratio(pf: float) -> float:
    return math.tan(math.acos(pf))


@dataclass(frozen=True)
class OnDemandSpec:
    id: str
    peak_kw: float
    power_factor: float
    mean_events_per_day: float
    mean_duration_slots: float
    shape_peaks_hours: tuple[float, ...]        # dayparts where usage concentrates


@dataclass(frozen=True)
class SyntheticSpec:
    """Counts and magnitudes for the synthetic household generator."""

    days: int = 730
    step_minutes: int = 15
    on_demand: tuple[OnDemandSpec, ...] = (
        OnDemandSpec("tv", 0.14, 0.62, 1.6, 10.0, (19.5, 21.5)),
        OnDemandSpec("microwave", 0.95, 0.97, 2.2, 1.2, (12.0, 18.5)),
        OnDemandSpec("kettle", 1.25, 0.99, 1.8, 1.0, (7.5, 17.0)),
    )
    include_fridge: bool = True
    include_cctv: bool = True
    fridge_kw: float = 0.16
    fridge_pf: float = 0.80
    cctv_kw: float = 0.055
    cctv_pf: float = 0.95


def _daypart_weights(spd: int, step_minutes: int, peaks_hours: tuple[float, ...]) -> np.ndarray:
    """Smooth arrival-rate profile over the day, normalized to sum 1."""
    hours = (np.arange(spd) + 0.5) * step_minutes / 60.0
    w = np.full(spd, 0.15)
    for peak in peaks_hours:
        w += np.exp(-0.5 * ((hours - peak) / 1.6) ** 2)
    return w / w.sum()


def generate_synthetic_household(seed: int,
                                 spec: SyntheticSpec | None = None,
                                 ) -> tuple[RawTraces, HouseholdModel]:
    """Deterministic synthetic traces plus a matching household model.

    On-demand usage is built as Poisson-arriving rectangular pulses with
    per-event magnitude jitter, which clusters well by day. Safety-critical
    load repeats a daily pattern with small seeded variation; the model's
    baseline is day 0.
    """
    spec = spec or SyntheticSpec()
    if spec.step_minutes <= 0 or MINUTES_PER_DAY % spec.step_minutes != 0:
        raise ValueError(f"step_minutes {spec.step_minutes} does not divide a day")
    rng = np.random.default_rng(seed)
    spd = MINUTES_PER_DAY // spec.step_minutes
    n = spec.days * spd
    hours = (np.arange(spd) + 0.5) * spec.step_minutes / 60.0

    appliances: list[tuple[str, ApplianceCategory]] = []
    p_kw: dict[str, np.ndarray] = {}
    q_kvar: dict[str, np.ndarray] = {}

    if spec.include_fridge:
        # compressor duty cycle: ~45 min on / 45 min off with phase drift and
        # per-slot amplitude texture (real meters never read a clean square wave)
        period = max(2, int(round(90 / spec.step_minutes)))
        phases = rng.integers(0, period, size=spec.days)
        fridge = np.zeros(n)
        for d in range(spec.days):
            slots = (np.arange(spd) + phases[d]) % period
            fridge[d * spd:(d + 1) * spd] = np.where(slots < period // 2, spec.fridge_kw, 0.0)
        fridge *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0, size=n)
        appliances.append(("fridge", ApplianceCategory.SAFETY_CRITICAL))
        p_kw["fridge"] = fridge
        q_kvar["fridge"] = fridge * _pf_ratio(spec.fridge_pf)

    if spec.include_cctv:
        cctv = np.full(n, spec.cctv_kw)
        cctv += 0.01 * np.tile(np.exp(-0.5 * ((hours - 20.0) / 2.5) ** 2), spec.days)
        cctv += rng.uniform(0.0, 0.012, size=n)
        appliances.append(("cctv", ApplianceCategory.SAFETY_CRITICAL))
        p_kw["cctv"] = cctv
        q_kvar["cctv"] = cctv * _pf_ratio(spec.cctv_pf)

    for od in spec.on_demand:
        weights = _daypart_weights(spd, spec.step_minutes, od.shape_peaks_hours)
        series = np.zeros(n)
        counts = rng.poisson(od.mean_events_per_day, size=spec.days)
        for d in range(spec.days):
            for _ in range(counts[d]):
                start = int(rng.choice(spd, p=weights))
                duration = 1 + int(rng.geometric(1.0 / max(od.mean_duration_slots, 1.0)) - 1)
                level = od.peak_kw * float(rng.uniform(0.8, 1.15))
                stop = min(start + duration, spd)
                series[d * spd + start:d * spd + stop] += level
        appliances.append((od.id, ApplianceCategory.ON_DEMAND))
        p_kw[od.id] = series
        q_kvar[od.id] = series * _pf_ratio(od.power_factor)

    traces = RawTraces(step_minutes=spec.step_minutes,
                       timestamps=np.arange(n, dtype=np.int64) * spec.step_minutes,
                       appliances=tuple(appliances), p_kw=p_kw, q_kvar=q_kvar)

    household = build_household(default_household_config(spec.step_minutes),
                                baseline_from_traces(traces, day_index=0))
    return traces, household


def baseline_from_traces(traces: RawTraces, day_index: int) -> BaselineProfiles:
    day = extract_day(traces, day_index)
    return BaselineProfiles(p_kw=day.baseline_p, q_kvar=day.baseline_q)


def default_household_config(slot_minutes: int = 15) -> HouseholdConfig:
    """Reference household: storage/PV/limits at data-sheet scale, four shiftable
    appliances spanning both shiftable categories, and a three-tier ToU tariff."""
    grid = build_time_grid(slot_minutes)
    per_hour = 60 // slot_minutes

    def slot(hour: float) -> int:
        return int(hour * per_hour) + 1

    appliances = (
        ApplianceConfig("fridge", ApplianceCategory.SAFETY_CRITICAL, power_factor=0.80),
        ApplianceConfig("cctv", ApplianceCategory.SAFETY_CRITICAL, power_factor=0.95),
        ApplianceConfig("tv", ApplianceCategory.ON_DEMAND, power_factor=0.62),
        ApplianceConfig("microwave", ApplianceCategory.ON_DEMAND, power_factor=0.97),
        ApplianceConfig("kettle", ApplianceCategory.ON_DEMAND, power_factor=0.99),
        # run lengths in whole hours so 15/30/60-min grids all give integer on-slots
        ApplianceConfig("washer", ApplianceCategory.TIME_SHIFTABLE,
                        alpha=slot(8), beta=slot(14) - 1, p_max_kw=0.45,
                        energy_kwh=0.45 * 1.5, power_factor=0.75),
        ApplianceConfig("dishwasher", ApplianceCategory.TIME_SHIFTABLE,
                        alpha=slot(19), beta=slot(23) - 1, p_max_kw=0.70,
                        energy_kwh=0.70 * 1.0, power_factor=0.90),
        ApplianceConfig("ev", ApplianceCategory.POWER_TIME_SHIFTABLE,
                        alpha=slot(1), beta=slot(9) - 1, p_min_kw=0.0, p_max_kw=1.8,
                        energy_kwh=3.6, power_factor=0.92),
        ApplianceConfig("heater", ApplianceCategory.POWER_TIME_SHIFTABLE,
                        alpha=1, beta=grid.num_slots, p_min_kw=0.05, p_max_kw=1.2,
                        energy_kwh=4.5, power_factor=0.85),
        ApplianceConfig("humidifier", ApplianceCategory.POWER_TIME_SHIFTABLE,
                        alpha=1, beta=grid.num_slots, p_min_kw=0.0, p_max_kw=0.5,
                        energy_kwh=1.2, power_factor=0.60),
    )
    return HouseholdConfig(
        slot_minutes=slot_minutes,
        battery=Battery(e_init_kwh=1.0, e_max_kwh=2.0, eta_charge=0.9, eta_discharge=0.9,
                        r_charge_max_kw=0.4, r_discharge_max_kw=0.4),
        # lossless capacitor: with eta < 1, simultaneous charge/discharge fabricates
        # reactive power, which the privacy objectives would exploit
        capacitor=Capacitor(e_init_kvarh=0.010, e_max_kvarh=0.020, eta_charge=1.0,
                            eta_discharge=1.0, r_charge_max_kvar=0.005,
                            r_discharge_max_kvar=0.005),
        pv=PvPanel(efficiency=0.18, area_m2=12.0),
        tariff_spec=TariffSpec(kind="tou", bands=(
            (0.0, 7.0, 0.0825), (7.0, 16.0, 0.1237), (16.0, 21.0, 0.1781),
            (21.0, 24.0, 0.1237))),
        p_max_kw=10.0,
        appliances=appliances,
        day_index=0,
    )


def synthetic_irradiance(seed: int, step_minutes: int = 15) -> IrradianceTraces:
    """Four seeded weather days: clear, partly cloudy, cloudy, overcast."""
    rng = np.random.default_rng(seed)
    spd = MINUTES_PER_DAY // step_minutes
    hours = (np.arange(spd) + 0.5) * step_minutes / 60.0
    bell = np.clip(np.sin(np.pi * (hours - 6.0) / 13.0), 0.0, None) ** 1.5

    def cloudy(base: float, dip_count: int, dip_depth: float) -> np.ndarray:
        series = base * bell.copy()
        for _ in range(dip_count):
            center = rng.uniform(8.0, 18.0)
            width = rng.uniform(0.3, 1.2)
            series *= 1.0 - dip_depth * np.exp(-0.5 * ((hours - center) / width) ** 2)
        return np.clip(series, 0.0, None)

    days = {
        "clear": 0.82 * bell,
        "partly": cloudy(0.70, 6, 0.55),
        "cloudy": cloudy(0.38, 10, 0.45),
        "overcast": 0.12 * bell,
    }
    return IrradianceTraces(step_minutes=step_minutes,
                            day_labels=tuple(days.keys()),
                            gti=np.vstack(list(days.values())))
