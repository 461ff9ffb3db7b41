"""Goal-programming orchestration: stand-alone optima, minimax solves for any
weight vector, the canonical case matrix, and a brute-force verification
oracle for micro-instances.

The minimax step minimizes Z subject to Z >= gamma_i * (O_i - O_i*) / O_i*
for all four objectives, where O_i* are the stand-alone optima computed once
per problem. A degenerate O_i* below 1e-6 switches the denominator to that
floor, since a normalized deviation is undefined at zero.
"""

from __future__ import annotations

import itertools
import os
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .domain import ApplianceCategory, HouseholdModel
from .model import (
    Assignment,
    Constraint,
    LinearExpr,
    MilpProblem,
    VarRef,
    build_problem,
    discomfort_coefficient,
    evaluate_objective,
    refine_solution,
)
from .scenarios import ApplianceScenarioSet, RenewableScenarioSet

DEGENERATE_FLOOR = 1e-6
DEFAULT_MIP_GAP = 1e-4
DEFAULT_TIME_LIMIT = 300.0


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"          # stopped with an incumbent above the gap
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIME_LIMIT = "time_limit"


class SolveError(RuntimeError):
    def __init__(self, status: SolveStatus, message: str = ""):
        super().__init__(f"solve failed: {status.value}" + (f" ({message})" if message else ""))
        self.status = status


@dataclass(frozen=True, eq=False)
class SolveOutcome:
    status: SolveStatus
    values: np.ndarray | None
    objective_value: float | None
    gap: float | None
    runtime_s: float
    message: str = ""


class SolverBackend(ABC):
    """One MILP solve at a time; clones of the immutable problem may be solved
    concurrently on separate backend instances."""

    name: str = "abstract"
    supports_warm_start: bool = False

    @abstractmethod
    def solve(self, problem: MilpProblem, objective: LinearExpr, *,
              mip_gap: float = DEFAULT_MIP_GAP,
              time_limit: float = DEFAULT_TIME_LIMIT,
              warm_start: np.ndarray | None = None) -> SolveOutcome:
        ...


class ScipyHighsBackend(SolverBackend):
    """scipy.optimize.milp (HiGHS). Deterministic for a fixed problem."""

    name = "scipy"

    def solve(self, problem: MilpProblem, objective: LinearExpr, *,
              mip_gap: float = DEFAULT_MIP_GAP,
              time_limit: float = DEFAULT_TIME_LIMIT,
              warm_start: np.ndarray | None = None) -> SolveOutcome:
        from scipy.optimize import Bounds, LinearConstraint, milp

        start = time.perf_counter()
        c = problem.objective_vector(objective)
        A, row_lb, row_ub = problem.constraint_matrix()
        lb, ub, integrality = problem.bound_arrays()
        res = milp(c,
                   constraints=LinearConstraint(A, row_lb, row_ub),
                   integrality=integrality,
                   bounds=Bounds(lb, ub),
                   options={"mip_rel_gap": mip_gap, "time_limit": time_limit,
                            "presolve": True, "disp": False})
        runtime = time.perf_counter() - start

        status = {0: SolveStatus.OPTIMAL, 1: SolveStatus.TIME_LIMIT,
                  2: SolveStatus.INFEASIBLE, 3: SolveStatus.UNBOUNDED,
                  }.get(res.status, SolveStatus.INFEASIBLE)
        values = np.asarray(res.x) if res.x is not None else None
        fun = float(res.fun) + objective.const if res.fun is not None else None
        gap = getattr(res, "mip_gap", None)
        gap = float(gap) if gap is not None else None
        return SolveOutcome(status=status, values=values, objective_value=fun,
                            gap=gap, runtime_s=runtime, message=str(res.message))


_BACKENDS = {"scipy": ScipyHighsBackend}


def get_backend(name: str | None = None) -> SolverBackend:
    """Backend by name; falls back to the PRIVSHAPE_BACKEND env var, then scipy."""
    chosen = name or os.environ.get("PRIVSHAPE_BACKEND", "scipy")
    if chosen not in _BACKENDS:
        raise ValueError(f"unknown backend {chosen!r}; available: {sorted(_BACKENDS)}")
    return _BACKENDS[chosen]()


@dataclass(frozen=True)
class CaseSpec:
    """A weight vector (gamma_1..gamma_4); the canonical table uses 0/1 weights."""

    case_id: int
    weights: tuple[float, float, float, float]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if self.case_id != 0 and not any(self.weights):
            raise ValueError("cases other than 0 need at least one positive weight")

    def active_objectives(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, w in enumerate(self.weights) if w > 0)


#: Case id -> weights (gamma_1, gamma_2, gamma_3, gamma_4).
CANONICAL_CASES: dict[int, CaseSpec] = {
    0: CaseSpec(0, (0, 0, 0, 0)),
    1: CaseSpec(1, (1, 0, 0, 0)),
    2: CaseSpec(2, (0, 1, 0, 0)),
    3: CaseSpec(3, (1, 1, 0, 0)),
    4: CaseSpec(4, (1, 0, 1, 1)),
    5: CaseSpec(5, (0, 1, 1, 1)),
    6: CaseSpec(6, (1, 1, 1, 1)),
}


@dataclass(frozen=True, eq=False)
class StandaloneSolve:
    value: float
    assignment: Assignment
    status: SolveStatus
    gap: float | None
    runtime_s: float


@dataclass(frozen=True, eq=False)
class StandaloneOptima:
    """Stand-alone minima O_i* with their witness assignments."""

    values: dict[int, float]
    witnesses: dict[int, Assignment]

    def degenerate(self, i: int) -> bool:
        return self.values[i] < DEGENERATE_FLOOR

    def denominator(self, i: int) -> float:
        return self.values[i] if not self.degenerate(i) else DEGENERATE_FLOOR


@dataclass(eq=False)
class CaseResult:
    case: CaseSpec
    assignment: Assignment | None
    objective_values: dict[int, float]
    z_star: float
    status: str
    gap: float | None
    runtime_s: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def pm(self) -> np.ndarray:
        return self.assignment.series("pm")

    @property
    def qm(self) -> np.ndarray:
        return self.assignment.series("qm")


def solve_standalone(problem: MilpProblem, i: int, backend: SolverBackend, *,
                     mip_gap: float = DEFAULT_MIP_GAP,
                     time_limit: float = DEFAULT_TIME_LIMIT) -> StandaloneSolve:
    """Minimize objective i alone over the full constraint set."""
    outcome = backend.solve(problem, problem.objectives[i],
                            mip_gap=mip_gap, time_limit=time_limit)
    if outcome.values is None:
        raise SolveError(outcome.status, outcome.message)
    refined = refine_solution(problem, outcome.values)
    value = evaluate_objective(problem, i, refined)
    return StandaloneSolve(value=value, assignment=refined, status=outcome.status,
                           gap=outcome.gap, runtime_s=outcome.runtime_s)


def compute_standalone_optima(problem: MilpProblem, backend_factory, needed=(1, 2, 3, 4), *,
                              mip_gap: float = DEFAULT_MIP_GAP,
                              time_limit: float = DEFAULT_TIME_LIMIT,
                              jobs: int = 1) -> StandaloneOptima:
    """Solve the requested stand-alone problems, optionally in parallel."""
    needed = sorted(set(needed))

    def run(i: int) -> tuple[int, StandaloneSolve]:
        return i, solve_standalone(problem, i, backend_factory(),
                                   mip_gap=mip_gap, time_limit=time_limit)

    if jobs > 1 and len(needed) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            solved = dict(pool.map(run, needed))
    else:
        solved = dict(run(i) for i in needed)
    return StandaloneOptima(values={i: s.value for i, s in solved.items()},
                            witnesses={i: s.assignment for i, s in solved.items()})


def minimax_constraints(problem: MilpProblem, case: CaseSpec,
                        optima: StandaloneOptima) -> tuple[Constraint, ...]:
    """Z >= gamma_i * (O_i - O_i*) / O_i* for every i (Z >= 0 when gamma_i = 0)."""
    z = VarRef("z")
    extra = []
    for i in range(1, 5):
        gamma = case.weights[i - 1]
        expr = LinearExpr().add(z, -1.0)
        rhs = 0.0
        if gamma > 0.0:
            if i not in optima.values:
                raise ValueError(f"stand-alone optimum O{i}* missing for case {case.case_id}")
            scale = gamma / optima.denominator(i)
            expr.add_expr(problem.objectives[i], scale)
            rhs = scale * optima.values[i]
        extra.append(Constraint(expr.canonical(), "<=", rhs, "goal_deviation"))
    return tuple(extra)


def max_weighted_deviation(case: CaseSpec, optima: StandaloneOptima,
                           objective_values: dict[int, float]) -> float:
    """max_i gamma_i * (O_i - O_i*) / O_i*, what Z equals at a tight optimum."""
    terms = [0.0]
    for i in range(1, 5):
        gamma = case.weights[i - 1]
        if gamma > 0.0:
            terms.append(gamma * (objective_values[i] - optima.values[i])
                         / optima.denominator(i))
    return max(terms)


def solve_minimax(problem: MilpProblem, case: CaseSpec, optima: StandaloneOptima,
                  backend: SolverBackend, *,
                  mip_gap: float = DEFAULT_MIP_GAP,
                  time_limit: float = DEFAULT_TIME_LIMIT) -> CaseResult:
    """Minimize the largest weighted normalized deviation from the optima.

    Two-stage lexicographic solve: stage one finds the optimal deviation Z*;
    stage two re-solves with Z capped at Z* and total storage flow as the
    objective, picking the least-flow solution among the Z-optimal ones. The
    deviation constraints leave storage activity degenerate at equalized
    optima, and without the tie-break the solver may return spurious
    simultaneous charge/discharge.
    """
    z = VarRef("z")
    extended = problem.extended(minimax_constraints(problem, case, optima))
    outcome = backend.solve(extended, LinearExpr().add(z, 1.0),
                            mip_gap=mip_gap, time_limit=time_limit)
    if outcome.values is None:
        raise SolveError(outcome.status, outcome.message)
    best = outcome.values
    runtime = outcome.runtime_s

    z_star = float(best[extended.variables[z].index])
    cap = Constraint(LinearExpr().add(z, 1.0), "<=", z_star + 1e-9, "goal_cap")
    flow_obj = LinearExpr().add(z, 1e-3)   # keeps z pinned to the binding deviation
    for t in range(1, problem.context.num_slots + 1):
        for kind in ("pcb", "pdb", "qcc", "qdc"):
            flow_obj.add(VarRef(kind, t), 1.0)
    cleanup = backend.solve(extended.extended((cap,)), flow_obj,
                            mip_gap=mip_gap, time_limit=time_limit)
    if cleanup.values is not None:
        best = cleanup.values
        runtime += cleanup.runtime_s

    refined = refine_solution(extended, best)
    objective_values = {i: evaluate_objective(problem, i, refined) for i in range(1, 5)}
    # Z* is the composite value achieved by the returned schedule; the solver's
    # z variable can float within its tolerance band above the binding deviation.
    return CaseResult(case=case, assignment=refined, objective_values=objective_values,
                      z_star=max_weighted_deviation(case, optima, objective_values),
                      status=outcome.status.value, gap=outcome.gap, runtime_s=runtime)


def original_schedule_values(problem: MilpProblem) -> np.ndarray:
    """Earliest-feasible appliance schedule with idle storage and no PV draw.

    Time-shiftable appliances run at full power in the first slots of their
    windows; variable-power appliances front-load greedily while leaving the
    per-slot minimum for the remaining window.
    """
    ctx = problem.context
    values = np.zeros(len(problem.variables))

    def set_var(kind: str, t: int, who: str, val: float) -> None:
        values[problem.variables[VarRef(kind, t, who)].index] = val

    for app in ctx.appliances:
        if app.category is ApplianceCategory.TIME_SHIFTABLE:
            n_on = app.required_on_slots(ctx.dt)
            for j, t in enumerate(app.window_slots()):
                if j < n_on:
                    set_var("y", t, app.id, 1.0)
                    set_var("pca", t, app.id, app.p_max_kw)
        else:
            remaining = app.energy_kwh / ctx.dt        # power-slots still to place
            window = list(app.window_slots())
            for j, t in enumerate(window):
                slots_after = len(window) - j - 1
                p = min(app.p_max_kw, remaining - app.p_min_kw * slots_after)
                p = max(p, app.p_min_kw)
                set_var("pca", t, app.id, p)
                remaining -= p
    return values


def simulate_case0(problem: MilpProblem) -> CaseResult:
    """No load shaping: metered equals the original consumption."""
    start = time.perf_counter()
    refined = refine_solution(problem, original_schedule_values(problem))
    objective_values = {i: evaluate_objective(problem, i, refined) for i in range(1, 5)}
    return CaseResult(case=CANONICAL_CASES[0], assignment=refined,
                      objective_values=objective_values, z_star=0.0,
                      status="simulated", gap=None,
                      runtime_s=time.perf_counter() - start)


@dataclass(eq=False)
class MatrixRun:
    problem: MilpProblem
    optima: StandaloneOptima | None
    results: list[CaseResult]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.results)


def run_case_matrix(household: HouseholdModel,
                    app_sc: ApplianceScenarioSet,
                    ren_sc: RenewableScenarioSet,
                    cases: list[CaseSpec],
                    backend_factory=get_backend, *,
                    allow_export: bool = False,
                    epsilon: float = 1e-3,
                    mip_gap: float = DEFAULT_MIP_GAP,
                    time_limit: float = DEFAULT_TIME_LIMIT,
                    jobs: int = 1) -> MatrixRun:
    """Run the requested cases; stand-alone optima are computed once and shared.

    Individual case failures are recorded and do not stop the matrix.
    """
    problem = build_problem(household, app_sc, ren_sc,
                            allow_export=allow_export, epsilon=epsilon)
    needed = sorted({i for case in cases for i in case.active_objectives()})
    optima = None
    optima_error: str | None = None
    if needed:
        try:
            optima = compute_standalone_optima(problem, backend_factory, needed,
                                               mip_gap=mip_gap, time_limit=time_limit,
                                               jobs=jobs)
        except Exception as exc:
            optima_error = f"stand-alone optima failed: {exc}"

    def run_case(case: CaseSpec) -> CaseResult:
        try:
            if case.case_id == 0 or not any(case.weights):
                return simulate_case0(problem)
            if optima is None:
                raise SolveError(SolveStatus.INFEASIBLE, optima_error or "no optima")
            return solve_minimax(problem, case, optima, backend_factory(),
                                 mip_gap=mip_gap, time_limit=time_limit)
        except Exception as exc:
            return CaseResult(case=case, assignment=None, objective_values={},
                              z_star=float("nan"), status="failed", gap=None,
                              runtime_s=0.0, error=str(exc))

    if jobs > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, cases))
    else:
        results = [run_case(c) for c in cases]
    return MatrixRun(problem=problem, optima=optima, results=results)


# ---------------------------------------------------------------------------
# Brute-force oracle for micro-instances.
#
# Everything below re-derives the objectives and feasibility rules directly
# from the formulas, sharing no expression machinery with the model builder,
# so it can serve as an independent check of the MILP path.
# ---------------------------------------------------------------------------

ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class OracleGrids:
    """Discretization levels the oracle enumerates storage/PV flows over."""

    battery_levels: tuple[float, ...] = (0.0,)
    capacitor_levels: tuple[float, ...] = (0.0,)
    pv_levels: tuple[float, ...] = (0.0,)
    pt_levels: dict[str, tuple[float, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class OracleResult:
    standalone: dict[int, float]
    composite: float | None


def _cartesian(level_sets: list[np.ndarray]) -> np.ndarray:
    out = np.zeros((1, 0))
    for levels in level_sets:
        n = out.shape[0]
        out = np.repeat(out, len(levels), axis=0)
        col = np.tile(levels, n).reshape(-1, 1)
        out = np.hstack([out, col])
    return out


def _pt_options(app, T: int, dt: float, levels: tuple[float, ...]) -> list[np.ndarray]:
    usable = sorted({lv for lv in levels if app.p_min_kw - 1e-12 <= lv <= app.p_max_kw + 1e-12})
    window = list(app.window_slots())
    options = []
    for combo in itertools.product(usable, repeat=len(window)):
        if abs(sum(combo) * dt - app.energy_kwh) > 1e-9:
            continue
        series = np.zeros(T)
        for t, level in zip(window, combo):
            series[t - 1] = level
        options.append(series)
    return options


def _storage_combos(levels: tuple[float, ...], T: int, dt: float, e_init: float,
                    e_max: float, r_charge: float, r_discharge: float) -> np.ndarray:
    """Feasible (charge_1..T, discharge_1..T) rows on the level grid."""
    charge_levels = np.array(sorted({lv for lv in levels if 0.0 <= lv <= r_charge + 1e-12}))
    discharge_levels = np.array(sorted({lv for lv in levels if 0.0 <= lv <= r_discharge + 1e-12}))
    if charge_levels.size == 0:
        charge_levels = np.array([0.0])
    if discharge_levels.size == 0:
        discharge_levels = np.array([0.0])
    count = (len(charge_levels) ** T) * (len(discharge_levels) ** T)
    if count > ENUMERATION_BUDGET:
        raise ValueError(f"storage enumeration {count} exceeds budget {ENUMERATION_BUDGET}")
    combos = _cartesian([charge_levels] * T + [discharge_levels] * T)
    charge, discharge = combos[:, :T], combos[:, T:]
    soc = np.cumsum((charge - discharge) * dt, axis=1)
    feasible = (np.all(soc >= -e_init - 1e-9, axis=1)
                & np.all(soc <= e_max - e_init + 1e-9, axis=1)
                & (np.abs(soc[:, -1]) <= 1e-9))       # sum charged == sum discharged
    return combos[feasible]


def _pv_combos(ren_sc: RenewableScenarioSet, levels: tuple[float, ...]) -> np.ndarray:
    """Rows of v values, flattened over (rs, t); levels filtered per availability."""
    power = ren_sc.power_kw
    level_sets = []
    count = 1
    for rs in range(power.shape[0]):
        for t in range(power.shape[1]):
            avail = np.array(sorted({lv for lv in levels if 0.0 <= lv <= power[rs, t] + 1e-12}
                                    | {0.0}))
            level_sets.append(avail)
            count *= len(avail)
            if count > ENUMERATION_BUDGET:
                raise ValueError("PV enumeration exceeds budget")
    return _cartesian(level_sets)


def brute_force_oracle(household: HouseholdModel,
                       app_sc: ApplianceScenarioSet,
                       ren_sc: RenewableScenarioSet,
                       grids: OracleGrids,
                       composite_weights: tuple[float, float, float, float] | None = None,
                       allow_export: bool = False,
                       epsilon: float = 1e-3) -> OracleResult:
    """Exhaustive minimum of each objective (and optionally the minimax
    composite) over discretized schedules and flows."""
    grid = household.time_grid
    T, dt = grid.num_slots, grid.slot_duration_hours
    if T > 6:
        raise ValueError(f"oracle limited to T <= 6, got {T}")
    if len(household.appliances) > 2:
        raise ValueError("oracle limited to at most 2 shiftable appliances")

    # appliance schedules
    per_app: list[list[np.ndarray]] = []
    ids: list[str] = []
    for app in household.appliances:
        ids.append(app.id)
        if app.category is ApplianceCategory.TIME_SHIFTABLE:
            n_on = app.required_on_slots(dt)
            options = []
            for combo in itertools.combinations(list(app.window_slots()), n_on):
                series = np.zeros(T)
                for t in combo:
                    series[t - 1] = app.p_max_kw
                options.append(series)
        else:
            options = _pt_options(app, T, dt, grids.pt_levels.get(app.id, (0.0,)))
        if not options:
            raise ValueError(f"no feasible discretized schedule for appliance {app.id}")
        per_app.append(options)
    schedules = ([dict(zip(ids, combo)) for combo in itertools.product(*per_app)]
                 if per_app else [{}])

    bat = household.battery
    cap = household.capacitor
    bat_combos = _storage_combos(grids.battery_levels, T, dt, bat.e_init_kwh,
                                 bat.e_max_kwh, bat.r_charge_max_kw, bat.r_discharge_max_kw)
    cap_combos = _storage_combos(grids.capacitor_levels, T, dt, cap.e_init_kvarh,
                                 cap.e_max_kvarh, cap.r_charge_max_kvar,
                                 cap.r_discharge_max_kvar)
    pv_combos = _pv_combos(ren_sc, grids.pv_levels)

    total = len(schedules) * len(pv_combos) * (len(bat_combos) + len(cap_combos))
    if total > ENUMERATION_BUDGET:
        raise ValueError(f"enumeration {total} exceeds budget {ENUMERATION_BUDGET}")

    baseline_p = np.asarray(household.baseline.p_kw, dtype=float)
    baseline_q = np.asarray(household.baseline.q_kvar, dtype=float)
    od_p, od_q = app_sc.expected_p, app_sc.expected_q
    prices = np.asarray(household.tariff.price_per_slot, dtype=float)
    pv_w = ren_sc.weights
    n_rs = ren_sc.num_scenarios

    cb, db = bat_combos[:, :T], bat_combos[:, T:]
    flow_b = (cb + db).sum(axis=1)
    cc, dc = cap_combos[:, :T], cap_combos[:, T:]
    flow_c = (cc + dc).sum(axis=1)

    pf_ratio = {app.id: np.tan(np.arccos(app.power_factor)) for app in household.appliances}
    phi = {app.id: np.array([discomfort_coefficient(app, t) if app.alpha <= t <= app.beta
                             else 0.0 for t in grid.slots()])
           for app in household.appliances}

    best: dict[int, float] = {i: np.inf for i in (1, 2, 3, 4)}
    best_z = np.inf

    for sched in schedules:
        sched_p = sum(sched.values()) if sched else np.zeros(T)
        sched_q = (sum(pf_ratio[a] * sched[a] for a in sched) if sched else np.zeros(T))
        discomfort = float(sum((phi[a] * sched[a]).sum() for a in sched)) if sched else 0.0

        base_q = baseline_q + od_q + sched_q
        qm = base_q[None, :] + cc / cap.eta_charge - dc * cap.eta_discharge
        cap_ok = np.all(qm >= -1e-9, axis=1) if not allow_export else np.ones(len(cc), bool)
        vq = np.abs(np.diff(qm, axis=1)).sum(axis=1)

        for v_row in pv_combos:
            v = v_row.reshape(n_rs, T)
            pv_used = pv_w @ v
            base_p = baseline_p + od_p + sched_p - pv_used
            pm = base_p[None, :] + cb / bat.eta_charge - db * bat.eta_discharge
            bat_ok = np.all(pm <= household.p_max_kw + 1e-9, axis=1)
            if not allow_export:
                bat_ok &= np.all(pm >= -1e-9, axis=1)
            if not np.any(bat_ok) or not np.any(cap_ok):
                continue
            vp = np.abs(np.diff(pm, axis=1)).sum(axis=1)
            cost = (pm * (prices * dt)[None, :]).sum(axis=1)

            o1_b = np.where(bat_ok, vp + epsilon * flow_b, np.inf)
            o2_c = np.where(cap_ok, vq + epsilon * flow_c, np.inf)
            o3_b = np.where(bat_ok, cost, np.inf)
            eps_b = np.where(bat_ok, epsilon * flow_b, np.inf)
            eps_c = np.where(cap_ok, epsilon * flow_c, np.inf)

            best[1] = min(best[1], float(o1_b.min() + eps_c.min()))
            best[2] = min(best[2], float(o2_c.min() + eps_b.min()))
            best[3] = min(best[3], float(o3_b.min()))
            best[4] = min(best[4], float(discomfort + eps_b.min() + eps_c.min()))

    composite = None
    if composite_weights is not None:
        gammas = composite_weights
        dens = {i: (best[i] if best[i] >= DEGENERATE_FLOOR else DEGENERATE_FLOOR)
                for i in (1, 2, 3, 4)}
        for sched in schedules:
            sched_p = sum(sched.values()) if sched else np.zeros(T)
            sched_q = (sum(pf_ratio[a] * sched[a] for a in sched) if sched else np.zeros(T))
            discomfort = (float(sum((phi[a] * sched[a]).sum() for a in sched))
                          if sched else 0.0)
            base_q = baseline_q + od_q + sched_q
            qm = base_q[None, :] + cc / cap.eta_charge - dc * cap.eta_discharge
            cap_ok = (np.all(qm >= -1e-9, axis=1) if not allow_export
                      else np.ones(len(cc), bool))
            vq = np.abs(np.diff(qm, axis=1)).sum(axis=1)
            for v_row in pv_combos:
                v = v_row.reshape(n_rs, T)
                base_p = baseline_p + od_p + sched_p - pv_w @ v
                pm = base_p[None, :] + cb / bat.eta_charge - db * bat.eta_discharge
                bat_ok = np.all(pm <= household.p_max_kw + 1e-9, axis=1)
                if not allow_export:
                    bat_ok &= np.all(pm >= -1e-9, axis=1)
                if len(cb) * len(cc) > ENUMERATION_BUDGET:
                    raise ValueError("composite enumeration exceeds budget")
                vp = np.abs(np.diff(pm, axis=1)).sum(axis=1)
                cost = (pm * (prices * dt)[None, :]).sum(axis=1)
                # pairwise objective values over (battery, capacitor) rows
                o1 = vp[:, None] + epsilon * (flow_b[:, None] + flow_c[None, :])
                o2 = vq[None, :] + epsilon * (flow_b[:, None] + flow_c[None, :])
                o3 = np.broadcast_to(cost[:, None], o1.shape)
                o4 = discomfort + epsilon * (flow_b[:, None] + flow_c[None, :])
                z = np.zeros_like(o1)
                for i, o in ((1, o1), (2, o2), (3, o3), (4, o4)):
                    if gammas[i - 1] > 0:
                        z = np.maximum(z, gammas[i - 1] * (o - best[i]) / dens[i])
                ok = bat_ok[:, None] & cap_ok[None, :]
                if np.any(ok):
                    best_z = min(best_z, float(z[ok].min()))
        composite = best_z

    return OracleResult(standalone=dict(best), composite=composite)
