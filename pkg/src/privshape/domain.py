"""Household data model: appliances, storage devices, PV, tariff, time grid.

All quantities use canonical units (kW / kvar for power, kWh / kvarh for
energy, hours for the slot duration) so that power * slot_duration_hours is
an energy with no hidden factors. Config files carry capacitor ratings in
var / varh (the customary data-sheet scale) and are converted on load.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from enum import Enum

import numpy as np

VAR_PER_KVAR = 1000.0


class ApplianceCategory(Enum):
    SAFETY_CRITICAL = "safety_critical"
    ON_DEMAND = "on_demand"
    TIME_SHIFTABLE = "time_shiftable"
    POWER_TIME_SHIFTABLE = "power_time_shiftable"

    @property
    def is_shiftable(self) -> bool:
        return self in (ApplianceCategory.TIME_SHIFTABLE, ApplianceCategory.POWER_TIME_SHIFTABLE)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform scheduling grid: slots are 1-based, t in {1..num_slots}."""

    slot_duration_hours: float
    num_slots: int

    @property
    def horizon_hours(self) -> float:
        return self.slot_duration_hours * self.num_slots

    def slots(self) -> range:
        return range(1, self.num_slots + 1)


def build_time_grid(slot_minutes: int, horizon_hours: float = 24.0) -> TimeGrid:
    """Build a grid of `horizon_hours` split into `slot_minutes` slots.

    Raises ValueError when the slot length does not divide the horizon.
    """
    if slot_minutes <= 0:
        raise ValueError(f"slot_minutes must be positive, got {slot_minutes}")
    total_minutes = horizon_hours * 60.0
    num_slots = total_minutes / slot_minutes
    if abs(num_slots - round(num_slots)) > 1e-9:
        raise ValueError(
            f"slot length {slot_minutes} min does not divide the {horizon_hours} h horizon"
        )
    return TimeGrid(slot_duration_hours=slot_minutes / 60.0, num_slots=int(round(num_slots)))


@dataclass(frozen=True)
class Appliance:
    """A schedulable appliance with an operation window [alpha, beta] (1-based, inclusive)."""

    id: str
    category: ApplianceCategory
    alpha: int
    beta: int
    p_min_kw: float
    p_max_kw: float
    energy_kwh: float
    power_factor: float

    @property
    def window_len(self) -> int:
        return self.beta - self.alpha + 1

    def window_slots(self) -> range:
        return range(self.alpha, self.beta + 1)

    def required_on_slots(self, slot_hours: float) -> int:
        """Number of on-slots a time-shiftable appliance needs to meet its energy."""
        return int(round(self.energy_kwh / (self.p_max_kw * slot_hours)))


@dataclass(frozen=True)
class Battery:
    e_init_kwh: float
    e_max_kwh: float
    eta_charge: float
    eta_discharge: float
    r_charge_max_kw: float
    r_discharge_max_kw: float


@dataclass(frozen=True)
class Capacitor:
    e_init_kvarh: float
    e_max_kvarh: float
    eta_charge: float
    eta_discharge: float
    r_charge_max_kvar: float
    r_discharge_max_kvar: float


@dataclass(frozen=True)
class PvPanel:
    efficiency: float
    area_m2: float


@dataclass(frozen=True, eq=False)
class Tariff:
    """Real-power price per slot, $/kWh."""

    price_per_slot: np.ndarray

    def __len__(self) -> int:
        return len(self.price_per_slot)


@dataclass(frozen=True, eq=False)
class BaselineProfiles:
    """Aggregate safety-critical load per slot (these appliances are parameters, not decisions)."""

    p_kw: np.ndarray
    q_kvar: np.ndarray


@dataclass(frozen=True, eq=False)
class HouseholdModel:
    """Complete static description of one household on one scheduling horizon.

    `appliances` holds only the shiftable ones; safety-critical load lives in
    `baseline` and on-demand load arrives later as weighted scenarios.
    """

    time_grid: TimeGrid
    appliances: tuple[Appliance, ...]
    battery: Battery
    capacitor: Capacitor
    pv: PvPanel
    tariff: Tariff
    baseline: BaselineProfiles
    p_max_kw: float

    @property
    def time_shiftable(self) -> tuple[Appliance, ...]:
        return tuple(a for a in self.appliances if a.category is ApplianceCategory.TIME_SHIFTABLE)

    @property
    def power_time_shiftable(self) -> tuple[Appliance, ...]:
        return tuple(
            a for a in self.appliances if a.category is ApplianceCategory.POWER_TIME_SHIFTABLE
        )


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [f"{v.path}: {v.message}" for v in self.violations]


def _check_storage(
    out: list[Violation], path: str, e_init: float, e_max: float,
    eta_c: float, eta_d: float, r_c: float, r_d: float,
) -> None:
    if not 0.0 <= e_init <= e_max + 1e-12:
        out.append(Violation(f"{path}.e_init", f"initial store {e_init} outside [0, {e_max}]"))
    if e_max < 0.0:
        out.append(Violation(f"{path}.e_max", "capacity must be nonnegative"))
    for name, eta in (("eta_charge", eta_c), ("eta_discharge", eta_d)):
        if not 0.0 < eta <= 1.0:
            out.append(Violation(f"{path}.{name}", f"efficiency {eta} outside (0, 1]"))
    for name, rate in (("r_charge_max", r_c), ("r_discharge_max", r_d)):
        if rate < 0.0:
            out.append(Violation(f"{path}.{name}", "rate limit must be nonnegative"))


def validate_household(model: HouseholdModel, require_daily: bool = True) -> ValidationReport:
    """Check every static invariant; violations are data, not exceptions.

    `require_daily` additionally asserts the grid spans 24 h (standard runs);
    sub-daily grids are used by the micro verification instances.
    """
    out: list[Violation] = []
    grid = model.time_grid
    dt = grid.slot_duration_hours
    T = grid.num_slots

    if dt <= 0.0:
        out.append(Violation("time_grid.slot_duration_hours", "must be positive"))
    if T < 2:
        out.append(Violation("time_grid.num_slots", "need at least 2 slots"))
    if require_daily and dt > 0 and abs(dt * T - 24.0) > 1e-9:
        out.append(Violation("time_grid", f"horizon is {dt * T} h, expected 24 h for daily runs"))

    seen: set[str] = set()
    for app in model.appliances:
        path = f"appliances[{app.id}]"
        if app.id in seen:
            out.append(Violation(path, "duplicate appliance id"))
        seen.add(app.id)
        if not app.category.is_shiftable:
            out.append(Violation(f"{path}.category", "only shiftable appliances are scheduled; "
                                 "safety-critical load belongs in the baseline profiles"))
            continue
        if not 1 <= app.alpha <= app.beta <= T:
            out.append(Violation(f"{path}.window",
                                 f"window [{app.alpha}, {app.beta}] invalid for T={T} "
                                 "(window start must not exceed window end)"))
            continue
        if not 0.0 <= app.p_min_kw <= app.p_max_kw:
            out.append(Violation(f"{path}.power", f"need 0 <= p_min <= p_max, "
                                 f"got [{app.p_min_kw}, {app.p_max_kw}]"))
        if app.p_max_kw <= 0.0:
            out.append(Violation(f"{path}.p_max_kw", "must be positive"))
            continue
        if not 0.0 < app.power_factor <= 1.0:
            out.append(Violation(f"{path}.power_factor", f"{app.power_factor} outside (0, 1]"))
        if app.energy_kwh <= 0.0:
            out.append(Violation(f"{path}.energy_kwh", "must be positive"))
            continue
        cap = app.p_max_kw * dt * app.window_len
        if app.energy_kwh > cap + 1e-9:
            out.append(Violation(f"{path}.energy_kwh",
                                 f"energy {app.energy_kwh} kWh not completable within window "
                                 f"(max deliverable = {cap} kWh)"))
        if app.category is ApplianceCategory.TIME_SHIFTABLE:
            n = app.energy_kwh / (app.p_max_kw * dt)
            if abs(n - round(n)) > 1e-6:
                out.append(Violation(f"{path}.energy_kwh",
                                     "must be an integer multiple of p_max * slot duration "
                                     "for a fixed-power appliance"))
        else:
            floor = app.p_min_kw * dt * app.window_len
            if app.energy_kwh < floor - 1e-9:
                out.append(Violation(f"{path}.energy_kwh",
                                     f"energy {app.energy_kwh} kWh below the window minimum "
                                     f"{floor} kWh implied by p_min over [{app.alpha}, {app.beta}]"))

    b = model.battery
    _check_storage(out, "battery", b.e_init_kwh, b.e_max_kwh, b.eta_charge, b.eta_discharge,
                   b.r_charge_max_kw, b.r_discharge_max_kw)
    c = model.capacitor
    _check_storage(out, "capacitor", c.e_init_kvarh, c.e_max_kvarh, c.eta_charge, c.eta_discharge,
                   c.r_charge_max_kvar, c.r_discharge_max_kvar)

    if not 0.0 < model.pv.efficiency <= 1.0:
        out.append(Violation("pv.efficiency", f"{model.pv.efficiency} outside (0, 1]"))
    if model.pv.area_m2 <= 0.0:
        out.append(Violation("pv.area_m2", "must be positive"))

    if len(model.tariff.price_per_slot) != T:
        out.append(Violation("tariff", f"length {len(model.tariff.price_per_slot)} != T={T}"))
    elif np.any(model.tariff.price_per_slot < 0.0):
        out.append(Violation("tariff", "prices must be nonnegative"))

    for name, series in (("p_kw", model.baseline.p_kw), ("q_kvar", model.baseline.q_kvar)):
        if len(series) != T:
            out.append(Violation(f"baseline.{name}", f"length {len(series)} != T={T}"))
        elif np.any(np.asarray(series) < -1e-12):
            out.append(Violation(f"baseline.{name}", "must be nonnegative"))

    if model.p_max_kw <= 0.0:
        out.append(Violation("p_max_kw", "load capacity must be positive"))

    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Config file I/O
#
# INI-style key/value file with one [appliance:<id>] block per appliance.
# Capacitor keys use var/varh (data-sheet scale) and convert to kvar/kvarh.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TariffSpec:
    """Tariff description as written in config: flat price or time-of-use bands."""

    kind: str                                    # "flat" | "tou"
    flat_price: float = 0.0
    bands: tuple[tuple[float, float, float], ...] = ()   # (start_hour, end_hour, price)

    def per_slot(self, grid: TimeGrid) -> np.ndarray:
        if self.kind == "flat":
            return np.full(grid.num_slots, self.flat_price)
        prices = np.zeros(grid.num_slots)
        prices[:] = np.nan
        for start_h, end_h, price in self.bands:
            for t in range(grid.num_slots):
                mid_h = (t + 0.5) * grid.slot_duration_hours
                if start_h <= mid_h < end_h:
                    prices[t] = price
        if np.any(np.isnan(prices)):
            raise ValueError("tariff bands do not cover the full horizon")
        return prices


@dataclass(frozen=True)
class ApplianceConfig:
    """One [appliance:*] block; scheduling fields apply to shiftable categories only."""

    id: str
    category: ApplianceCategory
    alpha: int = 0
    beta: int = 0
    p_min_kw: float = 0.0
    p_max_kw: float = 0.0
    energy_kwh: float = 0.0
    power_factor: float = 1.0


@dataclass(frozen=True)
class HouseholdConfig:
    """Parsed household config; combine with a baseline day to get a HouseholdModel."""

    slot_minutes: int
    battery: Battery
    capacitor: Capacitor
    pv: PvPanel
    tariff_spec: TariffSpec
    p_max_kw: float
    appliances: tuple[ApplianceConfig, ...]
    day_index: int = 0

    @property
    def grid(self) -> TimeGrid:
        return build_time_grid(self.slot_minutes)

    def shiftable_appliances(self) -> tuple[Appliance, ...]:
        return tuple(
            Appliance(a.id, a.category, a.alpha, a.beta, a.p_min_kw, a.p_max_kw,
                      a.energy_kwh, a.power_factor)
            for a in self.appliances if a.category.is_shiftable
        )

    def trace_appliances(self) -> tuple[tuple[str, ApplianceCategory], ...]:
        """Appliances whose load arrives via trace files (not scheduled)."""
        return tuple((a.id, a.category) for a in self.appliances if not a.category.is_shiftable)


def build_household(config: HouseholdConfig, baseline: BaselineProfiles) -> HouseholdModel:
    grid = config.grid
    return HouseholdModel(
        time_grid=grid,
        appliances=config.shiftable_appliances(),
        battery=config.battery,
        capacitor=config.capacitor,
        pv=config.pv,
        tariff=Tariff(config.tariff_spec.per_slot(grid)),
        baseline=baseline,
        p_max_kw=config.p_max_kw,
    )


def _parse_tariff(section: configparser.SectionProxy) -> TariffSpec:
    kind = section.get("kind", "flat").strip()
    if kind == "flat":
        return TariffSpec(kind="flat", flat_price=section.getfloat("price"))
    if kind == "tou":
        bands = []
        for chunk in section.get("bands", "").split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            start_s, end_s, price_s = chunk.split(":")
            bands.append((float(start_s), float(end_s), float(price_s)))
        if not bands:
            raise ValueError("tou tariff needs at least one band")
        return TariffSpec(kind="tou", bands=tuple(bands))
    raise ValueError(f"unknown tariff kind {kind!r}")


def load_household_config(path: str) -> HouseholdConfig:
    """Parse the INI household config; raises ValueError on malformed content."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep key case (E_bi_kwh etc.)
    read = parser.read(path)
    if not read:
        raise ValueError(f"config file not found or empty: {path}")
    try:
        grid_sec = parser["grid"]
        bat = parser["battery"]
        cap = parser["capacitor"]
        pv = parser["pv"]
        tariff = _parse_tariff(parser["tariff"])
        limits = parser["limits"]
    except KeyError as exc:
        raise ValueError(f"config {path} missing section {exc}") from exc

    battery = Battery(
        e_init_kwh=bat.getfloat("E_bi_kwh"),
        e_max_kwh=bat.getfloat("E_bmax_kwh"),
        eta_charge=bat.getfloat("eta_cp"),
        eta_discharge=bat.getfloat("eta_dp"),
        r_charge_max_kw=bat.getfloat("R_cbmax_kw"),
        r_discharge_max_kw=bat.getfloat("R_dbmax_kw"),
    )
    capacitor = Capacitor(
        e_init_kvarh=cap.getfloat("E_ci_varh") / VAR_PER_KVAR,
        e_max_kvarh=cap.getfloat("E_cmax_varh") / VAR_PER_KVAR,
        eta_charge=cap.getfloat("eta_cq"),
        eta_discharge=cap.getfloat("eta_dq"),
        r_charge_max_kvar=cap.getfloat("R_ccmax_var") / VAR_PER_KVAR,
        r_discharge_max_kvar=cap.getfloat("R_dcmax_var") / VAR_PER_KVAR,
    )
    panel = PvPanel(efficiency=pv.getfloat("eta_pv"), area_m2=pv.getfloat("S_pv_m2"))

    appliances: list[ApplianceConfig] = []
    for name in parser.sections():
        if not name.startswith("appliance:"):
            continue
        sec = parser[name]
        app_id = name.split(":", 1)[1]
        category = ApplianceCategory(sec.get("category"))
        appliances.append(ApplianceConfig(
            id=app_id,
            category=category,
            alpha=sec.getint("alpha", 0),
            beta=sec.getint("beta", 0),
            p_min_kw=sec.getfloat("p_min_kw", 0.0),
            p_max_kw=sec.getfloat("p_max_kw", 0.0),
            energy_kwh=sec.getfloat("energy_kwh", 0.0),
            power_factor=sec.getfloat("power_factor", 1.0),
        ))

    return HouseholdConfig(
        slot_minutes=grid_sec.getint("delta_t_min"),
        battery=battery,
        capacitor=capacitor,
        pv=panel,
        tariff_spec=tariff,
        p_max_kw=limits.getfloat("P_max_kw"),
        appliances=tuple(appliances),
        day_index=parser.getint("run", "day_index", fallback=0),
    )


def write_household_config(config: HouseholdConfig, path: str) -> None:
    """Write a config file that load_household_config reads back identically."""
    lines: list[str] = []
    lines.append("[grid]")
    lines.append(f"delta_t_min = {config.slot_minutes}")
    lines.append("")
    lines.append("[limits]")
    lines.append(f"P_max_kw = {config.p_max_kw:g}")
    lines.append("")
    b = config.battery
    lines.append("[battery]")
    lines.append(f"E_bi_kwh = {b.e_init_kwh:g}")
    lines.append(f"E_bmax_kwh = {b.e_max_kwh:g}")
    lines.append(f"eta_cp = {b.eta_charge:g}")
    lines.append(f"eta_dp = {b.eta_discharge:g}")
    lines.append(f"R_cbmax_kw = {b.r_charge_max_kw:g}")
    lines.append(f"R_dbmax_kw = {b.r_discharge_max_kw:g}")
    lines.append("")
    c = config.capacitor
    lines.append("[capacitor]")
    lines.append(f"E_ci_varh = {c.e_init_kvarh * VAR_PER_KVAR:g}")
    lines.append(f"E_cmax_varh = {c.e_max_kvarh * VAR_PER_KVAR:g}")
    lines.append(f"eta_cq = {c.eta_charge:g}")
    lines.append(f"eta_dq = {c.eta_discharge:g}")
    lines.append(f"R_ccmax_var = {c.r_charge_max_kvar * VAR_PER_KVAR:g}")
    lines.append(f"R_dcmax_var = {c.r_discharge_max_kvar * VAR_PER_KVAR:g}")
    lines.append("")
    lines.append("[pv]")
    lines.append(f"eta_pv = {config.pv.efficiency:g}")
    lines.append(f"S_pv_m2 = {config.pv.area_m2:g}")
    lines.append("")
    lines.append("[tariff]")
    ts = config.tariff_spec
    lines.append(f"kind = {ts.kind}")
    if ts.kind == "flat":
        lines.append(f"price = {ts.flat_price:g}")
    else:
        lines.append("bands = " + ",".join(f"{s:g}:{e:g}:{p:g}" for s, e, p in ts.bands))
    lines.append("")
    lines.append("[run]")
    lines.append(f"day_index = {config.day_index}")
    for app in config.appliances:
        lines.append("")
        lines.append(f"[appliance:{app.id}]")
        lines.append(f"category = {app.category.value}")
        if app.category.is_shiftable:
            lines.append(f"alpha = {app.alpha}")
            lines.append(f"beta = {app.beta}")
            lines.append(f"p_min_kw = {app.p_min_kw:g}")
            lines.append(f"p_max_kw = {app.p_max_kw:g}")
            lines.append(f"energy_kwh = {app.energy_kwh:g}")
        lines.append(f"power_factor = {app.power_factor:g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
