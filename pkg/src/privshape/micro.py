"""Micro-instances (T <= 6) where the MILP optimum is designed to lie on the
brute-force oracle's discretization grid, so the two paths must agree exactly.

Storage instances use unit efficiencies and grid-aligned baselines; minimax
composites use appliance-only instances where every decision is discrete.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    Appliance,
    ApplianceCategory,
    BaselineProfiles,
    Battery,
    Capacitor,
    HouseholdModel,
    PvPanel,
    Tariff,
    TimeGrid,
)
from .model import build_problem
from .scenarios import ApplianceScenarioSet, RenewableScenarioSet
from .solve import (
    CaseSpec,
    OracleGrids,
    SolverBackend,
    brute_force_oracle,
    compute_standalone_optima,
    get_backend,
    solve_minimax,
)

_NO_BATTERY = Battery(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)
_NO_CAPACITOR = Capacitor(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)
_PANEL = PvPanel(efficiency=0.2, area_m2=10.0)


@dataclass(frozen=True, eq=False)
class MicroInstance:
    name: str
    household: HouseholdModel
    app_sc: ApplianceScenarioSet
    ren_sc: RenewableScenarioSet
    grids: OracleGrids
    composite_weights: tuple[float, float, float, float] | None = None


def _zero_app_scenarios(T: int) -> ApplianceScenarioSet:
    return ApplianceScenarioSet(p_kw=np.zeros((1, T)), q_kvar=np.zeros((1, T)),
                                weights=np.array([1.0]))


def _zero_ren_scenarios(T: int) -> RenewableScenarioSet:
    return RenewableScenarioSet(power_kw=np.zeros((1, T)), weights=np.array([1.0]))


def _household(T: int, baseline_p, baseline_q, *, appliances=(), battery=_NO_BATTERY,
               capacitor=_NO_CAPACITOR, prices=None, p_max=10.0) -> HouseholdModel:
    prices = np.full(T, 0.1) if prices is None else np.asarray(prices, dtype=float)
    return HouseholdModel(
        time_grid=TimeGrid(slot_duration_hours=1.0, num_slots=T),
        appliances=tuple(appliances),
        battery=battery, capacitor=capacitor, pv=_PANEL,
        tariff=Tariff(prices),
        baseline=BaselineProfiles(p_kw=np.asarray(baseline_p, dtype=float),
                                  q_kvar=np.asarray(baseline_q, dtype=float)),
        p_max_kw=p_max,
    )


def micro_suite() -> list[MicroInstance]:
    instances: list[MicroInstance] = []

    # battery flattens a step in the real baseline
    bat = Battery(1.0, 3.0, 1.0, 1.0, 0.5, 0.5)
    instances.append(MicroInstance(
        "bat_flatten_step",
        _household(4, [1, 1, 2, 2], [0.3, 0.3, 0.3, 0.3], battery=bat),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(battery_levels=(0.0, 0.25, 0.5))))

    # capacitor flattens a bump in the reactive baseline
    cap = Capacitor(0.1, 0.5, 1.0, 1.0, 0.2, 0.2)
    instances.append(MicroInstance(
        "cap_flatten",
        _household(4, [1, 1, 1, 1], [0.2, 0.4, 0.4, 0.2], capacitor=cap),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(capacitor_levels=(0.0, 0.05, 0.1))))

    # battery arbitrage against falling prices
    instances.append(MicroInstance(
        "bat_price_arbitrage",
        _household(4, [1, 1, 2, 2], [0.3, 0.3, 0.3, 0.3], battery=bat,
                   prices=[0.4, 0.3, 0.2, 0.1]),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(battery_levels=(0.0, 0.25, 0.5))))

    # one fixed-power appliance against rising prices
    ts1 = Appliance("w", ApplianceCategory.TIME_SHIFTABLE, 1, 3, 0.0, 1.0, 1.0, 1.0)
    instances.append(MicroInstance(
        "ts_single_rising",
        _household(4, [0.5] * 4, [0.1] * 4, appliances=(ts1,),
                   prices=[0.1, 0.2, 0.3, 0.4]),
        _zero_app_scenarios(4), _zero_ren_scenarios(4), OracleGrids()))

    # discomfort pulls a fixed-power appliance to its window start
    ts2 = Appliance("w", ApplianceCategory.TIME_SHIFTABLE, 2, 4, 0.0, 1.0, 2.0, 0.8)
    instances.append(MicroInstance(
        "ts_discomfort",
        _household(4, [0.5] * 4, [0.1] * 4, appliances=(ts2,)),
        _zero_app_scenarios(4), _zero_ren_scenarios(4), OracleGrids()))

    # variable-power appliance fills a valley exactly
    pt1 = Appliance("h", ApplianceCategory.POWER_TIME_SHIFTABLE, 1, 4, 0.0, 1.0, 2.0, 0.8)
    instances.append(MicroInstance(
        "pt_flatten",
        _household(4, [1, 0, 0, 1], [0.75, 0, 0, 0.75], appliances=(pt1,)),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(pt_levels={"h": (0.0, 0.5, 1.0)})))

    # variable-power appliance forced on across its whole window
    pt2 = Appliance("h", ApplianceCategory.POWER_TIME_SHIFTABLE, 1, 4, 0.25, 1.0, 2.0, 0.8)
    instances.append(MicroInstance(
        "pt_window_min",
        _household(4, [1, 1, 1, 1], [0.0] * 4, appliances=(pt2,)),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(pt_levels={"h": (0.25, 0.5, 0.75, 1.0)})))

    # PV draw against a flat load
    ren = RenewableScenarioSet(power_kw=np.array([[0.0, 2.0, 2.0, 0.0],
                                                  [0.0, 0.0, 0.0, 0.0]]),
                               weights=np.array([0.5, 0.5]))
    instances.append(MicroInstance(
        "renewable_pv",
        _household(4, [1, 1, 1, 1], [0.2] * 4),
        _zero_app_scenarios(4), ren,
        OracleGrids(pv_levels=(0.0, 1.0, 2.0))))

    # battery and capacitor acting on their own channels at once
    instances.append(MicroInstance(
        "bat_cap_joint",
        _household(4, [1, 1, 2, 2], [0.2, 0.2, 0.4, 0.4], battery=bat,
                   capacitor=Capacitor(0.2, 0.4, 1.0, 1.0, 0.1, 0.1)),
        _zero_app_scenarios(4), _zero_ren_scenarios(4),
        OracleGrids(battery_levels=(0.0, 0.25, 0.5), capacitor_levels=(0.0, 0.05, 0.1))))

    # two appliances, cost against comfort (purely discrete minimax)
    a1 = Appliance("a1", ApplianceCategory.TIME_SHIFTABLE, 1, 4, 0.0, 1.0, 2.0, 0.9)
    a2 = Appliance("a2", ApplianceCategory.TIME_SHIFTABLE, 2, 5, 0.0, 0.6, 0.6, 0.8)
    instances.append(MicroInstance(
        "ts_pair_cost_comfort",
        _household(5, [0.3] * 5, [0.1] * 5, appliances=(a1, a2),
                   prices=[0.5, 0.4, 0.3, 0.2, 0.1]),
        _zero_app_scenarios(5), _zero_ren_scenarios(5), OracleGrids(),
        composite_weights=(0.0, 0.0, 1.0, 1.0)))

    # two appliances, privacy against cost and comfort (purely discrete minimax)
    instances.append(MicroInstance(
        "ts_pair_privacy_cost",
        _household(5, [0.4, 0.1, 0.1, 0.4, 0.7], [0.1] * 5, appliances=(a1, a2),
                   prices=[0.5, 0.4, 0.3, 0.2, 0.1]),
        _zero_app_scenarios(5), _zero_ren_scenarios(5), OracleGrids(),
        composite_weights=(1.0, 0.0, 1.0, 1.0)))

    return instances


@dataclass(frozen=True)
class CrossCheckRow:
    instance: str
    quantity: str            # "O1*".."O4*" or "Z*"
    milp_value: float
    oracle_value: float

    @property
    def abs_error(self) -> float:
        return abs(self.milp_value - self.oracle_value)


def cross_check(instance: MicroInstance,
                backend: SolverBackend | None = None,
                mip_gap: float = 1e-9) -> list[CrossCheckRow]:
    """Solve an instance both ways and report per-quantity value pairs."""
    backend = backend or get_backend()
    oracle = brute_force_oracle(instance.household, instance.app_sc, instance.ren_sc,
                                instance.grids, composite_weights=instance.composite_weights)
    problem = build_problem(instance.household, instance.app_sc, instance.ren_sc)
    optima = compute_standalone_optima(problem, lambda: backend, mip_gap=mip_gap)
    rows = [CrossCheckRow(instance.name, f"O{i}*", optima.values[i], oracle.standalone[i])
            for i in (1, 2, 3, 4)]
    if instance.composite_weights is not None:
        case = CaseSpec(99, instance.composite_weights)
        result = solve_minimax(problem, case, optima, backend, mip_gap=mip_gap)
        rows.append(CrossCheckRow(instance.name, "Z*", result.z_star, oracle.composite))
    return rows


def run_oracle_suite(backend: SolverBackend | None = None) -> list[CrossCheckRow]:
    rows: list[CrossCheckRow] = []
    for instance in micro_suite():
        rows.extend(cross_check(instance, backend))
    return rows
