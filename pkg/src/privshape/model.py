"""MILP construction for joint real/reactive load shaping.

Decision variables (slots t are 1-based):

    pm_t, qm_t        metered real / reactive power
    pca_a_t, qca_a_t  per-appliance real / reactive consumption
    pcb_t, pdb_t      battery charge / discharge
    qcc_t, qdc_t      capacitor charge / discharge
    v_rs_t            PV power drawn, per renewable scenario
    y_a_t             on/off binary, time-shiftable appliances
    d1_t..d4_t        absolute-difference splits for the privacy objectives
    z                 minimax goal variable (free; used by the solve layer)

The four objectives:

    O1  sum of |pm_t - pm_{t-1}| plus a small penalty on storage flows
    O2  the same for qm
    O3  energy cost, sum of price * slot_hours * pm_t
    O4  discomfort, sum of phi_{a,t} * pca_a_t plus the same flow penalty

with phi_{a,t} = (t - alpha_a)^2 / E_a growing quadratically into the window.
The flow penalty (epsilon = 1e-3 by default) makes simultaneous charge and
discharge strictly suboptimal without binaries.

Box relations (window zeros, power bounds, rate caps, PV availability, the
load cap) are variable bounds; multi-term relations are explicit constraint
rows. check_solution audits both, so nothing is lost to the split.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .domain import (
    Appliance,
    ApplianceCategory,
    HouseholdModel,
    Violation,
    validate_household,
)
from .scenarios import ApplianceScenarioSet, RenewableScenarioSet

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class VarRef:
    """Symbolic variable handle: kind plus slot / owner indices."""

    kind: str
    t: int = 0
    who: str = ""

    def name(self) -> str:
        parts = [self.kind]
        if self.who:
            parts.append(_sanitize(self.who))
        if self.t:
            parts.append(str(self.t))
        return "_".join(parts)


def _sanitize(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9]", "_", token)


@dataclass(frozen=True)
class VarDef:
    index: int
    lb: float
    ub: float
    binary: bool = False
    tag: str = ""


class LinearExpr:
    """Sparse linear expression: coefficient map over VarRefs plus a constant."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[VarRef, float] | None = None, const: float = 0.0):
        self.terms: dict[VarRef, float] = dict(terms) if terms else {}
        self.const = const

    def add(self, var: VarRef, coef: float) -> "LinearExpr":
        if coef != 0.0:
            self.terms[var] = self.terms.get(var, 0.0) + coef
        return self

    def add_expr(self, other: "LinearExpr", scale: float = 1.0) -> "LinearExpr":
        for var, coef in other.terms.items():
            self.add(var, scale * coef)
        self.const += scale * other.const
        return self

    def canonical(self) -> "LinearExpr":
        self.terms = {v: c for v, c in self.terms.items() if c != 0.0}
        return self

    def evaluate(self, lookup) -> float:
        return self.const + sum(coef * lookup(var) for var, coef in self.terms.items())


@dataclass(frozen=True, eq=False)
class Constraint:
    expr: LinearExpr
    rel: str                 # "<=", "=", ">="
    rhs: float
    tag: str

    def residual(self, lookup) -> float:
        """Violation magnitude: 0 when satisfied."""
        lhs = self.expr.evaluate(lookup)
        if self.rel == "<=":
            return max(0.0, lhs - self.rhs)
        if self.rel == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True, eq=False)
class ProblemContext:
    """Model data needed to re-derive dependent variables from a raw solution."""

    dt: float
    num_slots: int
    appliances: tuple[Appliance, ...]
    baseline_p: np.ndarray
    baseline_q: np.ndarray
    od_p: np.ndarray
    od_q: np.ndarray
    pv_power: np.ndarray          # (rs, T)
    pv_weights: np.ndarray
    eta_cp: float
    eta_dp: float
    eta_cq: float
    eta_dq: float
    p_max: float
    allow_export: bool


@dataclass(frozen=True, eq=False)
class MilpProblem:
    """Immutable problem description; build once, solve many times."""

    variables: dict[VarRef, VarDef]
    constraints: tuple[Constraint, ...]
    objectives: dict[int, LinearExpr]
    epsilon: float
    context: ProblemContext

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_binary(self) -> int:
        return sum(1 for v in self.variables.values() if v.binary)

    def lookup(self, values: np.ndarray):
        variables = self.variables

        def get(var: VarRef) -> float:
            return float(values[variables[var].index])

        return get

    def bound_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(lb, ub, integrality) in variable-index order."""
        n = self.num_vars
        lb = np.empty(n)
        ub = np.empty(n)
        integrality = np.zeros(n)
        for vdef in self.variables.values():
            lb[vdef.index] = vdef.lb
            ub[vdef.index] = vdef.ub
            if vdef.binary:
                integrality[vdef.index] = 1
        return lb, ub, integrality

    def constraint_matrix(self) -> tuple:
        """Sparse (A, row_lb, row_ub) over all constraint rows."""
        from scipy import sparse

        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        row_lb = np.empty(len(self.constraints))
        row_ub = np.empty(len(self.constraints))
        for i, con in enumerate(self.constraints):
            rhs = con.rhs - con.expr.const
            if con.rel == "<=":
                row_lb[i], row_ub[i] = -np.inf, rhs
            elif con.rel == ">=":
                row_lb[i], row_ub[i] = rhs, np.inf
            else:
                row_lb[i], row_ub[i] = rhs, rhs
            for var, coef in con.expr.terms.items():
                rows.append(i)
                cols.append(self.variables[var].index)
                vals.append(coef)
        A = sparse.csr_matrix((vals, (rows, cols)),
                              shape=(len(self.constraints), self.num_vars))
        return A, row_lb, row_ub

    def objective_vector(self, objective: LinearExpr) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for var, coef in objective.terms.items():
            c[self.variables[var].index] += coef
        return c

    def extended(self, extra: tuple[Constraint, ...]) -> "MilpProblem":
        return replace(self, constraints=self.constraints + tuple(extra))


class Assignment:
    """A full variable assignment bound to its problem."""

    def __init__(self, problem: MilpProblem, values: np.ndarray):
        self.problem = problem
        self.values = np.asarray(values, dtype=float)

    def get(self, var: VarRef) -> float:
        return float(self.values[self.problem.variables[var].index])

    def series(self, kind: str, who: str = "") -> np.ndarray:
        ctx = self.problem.context
        first = 2 if kind in ("d1", "d2", "d3", "d4") else 1
        return np.array([self.get(VarRef(kind, t, who))
                         for t in range(first, ctx.num_slots + 1)])

    def copy(self) -> "Assignment":
        return Assignment(self.problem, self.values.copy())


def discomfort_coefficient(appliance: Appliance, t: int) -> float:
    """Quadratic delay penalty, zero at the window start."""
    if not appliance.alpha <= t <= appliance.beta:
        raise ValueError(f"slot {t} outside window [{appliance.alpha}, {appliance.beta}] "
                         f"of appliance {appliance.id}")
    return (t - appliance.alpha) ** 2 / appliance.energy_kwh


def reactive_from_pf(p_kw: float, power_factor: float) -> float:
    """Reactive power implied by a power factor: q = tan(arccos(pf)) * p."""
    if not 0.0 < power_factor <= 1.0:
        raise ValueError(f"power factor {power_factor} outside (0, 1]")
    return math.tan(math.acos(power_factor)) * p_kw


def _expected_counts(T: int, n_app: int, n_ts: int, n_rs: int) -> tuple[int, int]:
    num_vars = T * (6 + 2 * n_app + n_rs + n_ts) + 4 * (T - 1) + 1
    num_cons = T * (6 + n_app + n_ts) + n_app + 2 * (T - 1) + 2
    return num_vars, num_cons


def build_problem(household: HouseholdModel,
                  app_sc: ApplianceScenarioSet,
                  ren_sc: RenewableScenarioSet,
                  allow_export: bool = False,
                  epsilon: float = DEFAULT_EPSILON) -> MilpProblem:
    """Assemble variables, constraints, and the four objective expressions."""
    report = validate_household(household, require_daily=False)
    if not report.ok:
        raise ValueError("invalid household model:\n  " + "\n  ".join(report.messages()))

    grid = household.time_grid
    T = grid.num_slots
    dt = grid.slot_duration_hours
    if app_sc.p_kw.shape[1] != T or ren_sc.power_kw.shape[1] != T:
        raise ValueError(f"scenario sets not on the model grid (T={T}): "
                         f"appliance {app_sc.p_kw.shape[1]}, renewable {ren_sc.power_kw.shape[1]}")
    for name, w in (("appliance", app_sc.weights), ("renewable", ren_sc.weights)):
        if abs(float(np.sum(w)) - 1.0) > 1e-9 or np.any(w <= 0.0):
            raise ValueError(f"{name} scenario weights must be positive and sum to 1")

    bat = household.battery
    cap = household.capacitor
    apps = household.appliances
    ts_apps = household.time_shiftable
    n_rs = ren_sc.num_scenarios
    inf = np.inf

    variables: dict[VarRef, VarDef] = {}

    def new_var(kind: str, t: int = 0, who: str = "", lb: float = 0.0,
                ub: float = inf, binary: bool = False, tag: str = "") -> VarRef:
        ref = VarRef(kind, t, who)
        variables[ref] = VarDef(len(variables), lb, ub, binary, tag)
        return ref

    pm_lb = 0.0 if not allow_export else -inf
    for t in grid.slots():
        new_var("pm", t, lb=pm_lb, ub=household.p_max_kw, tag="load_cap")
    for t in grid.slots():
        new_var("qm", t, lb=pm_lb, tag="reactive_metered")
    for t in grid.slots():
        new_var("pcb", t, ub=bat.r_charge_max_kw, tag="battery_charge_rate")
    for t in grid.slots():
        new_var("pdb", t, ub=bat.r_discharge_max_kw, tag="battery_discharge_rate")
    for t in grid.slots():
        new_var("qcc", t, ub=cap.r_charge_max_kvar, tag="capacitor_charge_rate")
    for t in grid.slots():
        new_var("qdc", t, ub=cap.r_discharge_max_kvar, tag="capacitor_discharge_rate")
    for app in apps:
        in_window = app.window_slots()
        for t in grid.slots():
            if t not in in_window:
                new_var("pca", t, app.id, ub=0.0, tag="appliance_window")
            elif app.category is ApplianceCategory.POWER_TIME_SHIFTABLE:
                new_var("pca", t, app.id, lb=app.p_min_kw, ub=app.p_max_kw,
                        tag="appliance_power_bounds")
            else:
                new_var("pca", t, app.id, ub=app.p_max_kw, tag="appliance_power_bounds")
        for t in grid.slots():
            new_var("qca", t, app.id, tag="appliance_reactive")
    for app in ts_apps:
        in_window = app.window_slots()
        for t in grid.slots():
            ub = 1.0 if t in in_window else 0.0
            new_var("y", t, app.id, ub=ub, binary=True, tag="on_off")
    for rs in range(n_rs):
        for t in grid.slots():
            new_var("v", t, str(rs), ub=float(ren_sc.power_kw[rs, t - 1]), tag="pv_limit")
    for kind in ("d1", "d2", "d3", "d4"):
        for t in range(2, T + 1):
            new_var(kind, t, tag="abs_split")
    z = new_var("z", lb=-inf, tag="goal")

    constraints: list[Constraint] = []

    def con(expr: LinearExpr, rel: str, rhs: float, tag: str) -> None:
        constraints.append(Constraint(expr.canonical(), rel, rhs, tag))

    # fixed power level while running (time-shiftable appliances)
    for app in ts_apps:
        for t in grid.slots():
            expr = LinearExpr().add(VarRef("pca", t, app.id), 1.0)
            expr.add(VarRef("y", t, app.id), -app.p_max_kw)
            con(expr, "=", 0.0, "ts_power_level")

    # every appliance completes its operation
    for app in apps:
        expr = LinearExpr()
        for t in grid.slots():
            expr.add(VarRef("pca", t, app.id), dt)
        con(expr, "=", app.energy_kwh, "energy_completion")

    # reactive draw tied to real draw through the power factor
    for app in apps:
        ratio = reactive_from_pf(1.0, app.power_factor)
        for t in grid.slots():
            expr = LinearExpr().add(VarRef("qca", t, app.id), 1.0)
            expr.add(VarRef("pca", t, app.id), -ratio)
            con(expr, "=", 0.0, "reactive_pf_link")

    od_p, od_q = app_sc.expected_p, app_sc.expected_q
    pv_w = ren_sc.weights
    for t in grid.slots():
        expr = LinearExpr().add(VarRef("pm", t), 1.0)
        for app in apps:
            expr.add(VarRef("pca", t, app.id), -1.0)
        expr.add(VarRef("pcb", t), -1.0 / bat.eta_charge)
        expr.add(VarRef("pdb", t), bat.eta_discharge)
        for rs in range(n_rs):
            expr.add(VarRef("v", t, str(rs)), float(pv_w[rs]))
        rhs = float(household.baseline.p_kw[t - 1] + od_p[t - 1])
        con(expr, "=", rhs, "real_balance")

    for t in grid.slots():
        expr = LinearExpr().add(VarRef("qm", t), 1.0)
        for app in apps:
            expr.add(VarRef("qca", t, app.id), -1.0)
        expr.add(VarRef("qcc", t), -1.0 / cap.eta_charge)
        expr.add(VarRef("qdc", t), cap.eta_discharge)
        rhs = float(household.baseline.q_kvar[t - 1] + od_q[t - 1])
        con(expr, "=", rhs, "reactive_balance")

    # stored energy stays within capacity at every prefix
    for kind_c, kind_d, e_init, e_max, low_tag, up_tag in (
            ("pcb", "pdb", bat.e_init_kwh, bat.e_max_kwh,
             "battery_soc_lower", "battery_soc_upper"),
            ("qcc", "qdc", cap.e_init_kvarh, cap.e_max_kvarh,
             "capacitor_soc_lower", "capacitor_soc_upper")):
        running: dict[VarRef, float] = {}
        for tau in grid.slots():
            running[VarRef(kind_c, tau)] = dt
            running[VarRef(kind_d, tau)] = -dt
            con(LinearExpr(dict(running)), ">=", -e_init, low_tag)
            con(LinearExpr(dict(running)), "<=", e_max - e_init, up_tag)

    # storage returns to its initial level by the end of the horizon
    for kind_c, kind_d, tag in (("pcb", "pdb", "battery_day_balance"),
                                ("qcc", "qdc", "capacitor_day_balance")):
        expr = LinearExpr()
        for t in grid.slots():
            expr.add(VarRef(kind_c, t), 1.0)
            expr.add(VarRef(kind_d, t), -1.0)
        con(expr, "=", 0.0, tag)

    # absolute-value splits: d+ - d- equals the metered step
    for t in range(2, T + 1):
        expr = LinearExpr().add(VarRef("d1", t), 1.0).add(VarRef("d2", t), -1.0)
        expr.add(VarRef("pm", t), -1.0).add(VarRef("pm", t - 1), 1.0)
        con(expr, "=", 0.0, "abs_link_real")
    for t in range(2, T + 1):
        expr = LinearExpr().add(VarRef("d3", t), 1.0).add(VarRef("d4", t), -1.0)
        expr.add(VarRef("qm", t), -1.0).add(VarRef("qm", t - 1), 1.0)
        con(expr, "=", 0.0, "abs_link_reactive")

    flow_penalty = LinearExpr()
    for t in grid.slots():
        for kind in ("pcb", "pdb", "qcc", "qdc"):
            flow_penalty.add(VarRef(kind, t), epsilon)

    o1 = LinearExpr()
    o2 = LinearExpr()
    for t in range(2, T + 1):
        o1.add(VarRef("d1", t), 1.0).add(VarRef("d2", t), 1.0)
        o2.add(VarRef("d3", t), 1.0).add(VarRef("d4", t), 1.0)
    o1.add_expr(flow_penalty)
    o2.add_expr(flow_penalty)

    o3 = LinearExpr()
    for t in grid.slots():
        o3.add(VarRef("pm", t), float(household.tariff.price_per_slot[t - 1]) * dt)

    o4 = LinearExpr()
    for app in apps:
        for t in app.window_slots():
            o4.add(VarRef("pca", t, app.id), discomfort_coefficient(app, t))
    o4.add_expr(flow_penalty)

    exp_vars, exp_cons = _expected_counts(T, len(apps), len(ts_apps), n_rs)
    assert len(variables) == exp_vars, (len(variables), exp_vars)
    assert len(constraints) == exp_cons, (len(constraints), exp_cons)

    context = ProblemContext(
        dt=dt, num_slots=T, appliances=apps,
        baseline_p=np.asarray(household.baseline.p_kw, dtype=float),
        baseline_q=np.asarray(household.baseline.q_kvar, dtype=float),
        od_p=np.asarray(od_p, dtype=float), od_q=np.asarray(od_q, dtype=float),
        pv_power=np.asarray(ren_sc.power_kw, dtype=float),
        pv_weights=np.asarray(pv_w, dtype=float),
        eta_cp=bat.eta_charge, eta_dp=bat.eta_discharge,
        eta_cq=cap.eta_charge, eta_dq=cap.eta_discharge,
        p_max=household.p_max_kw, allow_export=allow_export,
    )
    return MilpProblem(variables=variables, constraints=tuple(constraints),
                       objectives={1: o1.canonical(), 2: o2.canonical(),
                                   3: o3.canonical(), 4: o4.canonical()},
                       epsilon=epsilon, context=context)


def evaluate_objective(problem: MilpProblem, which: int, assignment: Assignment) -> float:
    if which not in problem.objectives:
        raise ValueError(f"objective {which} not in problem (have {sorted(problem.objectives)})")
    return problem.objectives[which].evaluate(assignment.get)


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_solution(problem: MilpProblem, assignment: Assignment,
                   tol: float = 1e-6) -> FeasibilityReport:
    """Audit constraint rows, variable bounds, and integrality against `tol`;
    simultaneous charge/discharge is reported as a warning, not a violation."""
    violations: list[Violation] = []
    get = assignment.get
    for i, con in enumerate(problem.constraints):
        r = con.residual(get)
        if r > tol:
            violations.append(Violation(f"{con.tag}[{i}]",
                                         f"violated by {r:.3g} ({con.rel} {con.rhs:.6g})"))
    for ref, vdef in problem.variables.items():
        x = float(assignment.values[vdef.index])
        if x < vdef.lb - tol or x > vdef.ub + tol:
            violations.append(Violation(f"{vdef.tag}[{ref.name()}]",
                                         f"value {x:.6g} outside [{vdef.lb:.6g}, {vdef.ub:.6g}]"))
        if vdef.binary and abs(x - round(x)) > tol:
            violations.append(Violation(f"integrality[{ref.name()}]", f"value {x:.6g} not 0/1"))

    warnings: list[str] = []
    ctx = problem.context
    for t in range(1, ctx.num_slots + 1):
        if get(VarRef("pcb", t)) * get(VarRef("pdb", t)) > tol:
            warnings.append(f"simultaneous battery charge/discharge at slot {t}")
        if get(VarRef("qcc", t)) * get(VarRef("qdc", t)) > tol:
            warnings.append(f"simultaneous capacitor charge/discharge at slot {t}")
    return FeasibilityReport(tuple(violations), tuple(warnings))


def refine_solution(problem: MilpProblem, raw_values: np.ndarray) -> Assignment:
    """Make equality relations exact without moving the solver's decisions.

    Binaries are snapped to {0,1}; fixed-power appliance draws are re-derived
    from them; variable-power draws are rescaled (multiplicatively, by ~1e-7
    at solver tolerances) so the energy-completion equality is exact; then the
    reactive links, both balances, and the absolute-difference splits are
    recomputed from their defining relations.
    """
    ctx = problem.context
    values = np.asarray(raw_values, dtype=float).copy()
    variables = problem.variables

    def idx(kind: str, t: int = 0, who: str = "") -> int:
        return variables[VarRef(kind, t, who)].index

    T, dt = ctx.num_slots, ctx.dt
    slots = range(1, T + 1)

    for ref, vdef in variables.items():
        if vdef.binary:
            values[vdef.index] = float(round(values[vdef.index]))

    for app in ctx.appliances:
        if app.category is ApplianceCategory.TIME_SHIFTABLE:
            for t in slots:
                values[idx("pca", t, app.id)] = (
                    values[idx("y", t, app.id)] * app.p_max_kw)
        else:
            cols = [idx("pca", t, app.id) for t in slots]
            total = float(values[cols].sum()) * dt
            if total > 0.0:
                values[cols] *= app.energy_kwh / total
        ratio = reactive_from_pf(1.0, app.power_factor)
        for t in slots:
            values[idx("qca", t, app.id)] = ratio * values[idx("pca", t, app.id)]

    n_rs = len(ctx.pv_weights)
    for t in slots:
        pca_sum = sum(values[idx("pca", t, a.id)] for a in ctx.appliances)
        qca_sum = sum(values[idx("qca", t, a.id)] for a in ctx.appliances)
        pv = sum(ctx.pv_weights[rs] * values[idx("v", t, str(rs))] for rs in range(n_rs))
        values[idx("pm", t)] = (pca_sum + ctx.baseline_p[t - 1] + ctx.od_p[t - 1]
                                + values[idx("pcb", t)] / ctx.eta_cp
                                - values[idx("pdb", t)] * ctx.eta_dp - pv)
        values[idx("qm", t)] = (qca_sum + ctx.baseline_q[t - 1] + ctx.od_q[t - 1]
                                + values[idx("qcc", t)] / ctx.eta_cq
                                - values[idx("qdc", t)] * ctx.eta_dq)

    for t in range(2, T + 1):
        dp = values[idx("pm", t)] - values[idx("pm", t - 1)]
        values[idx("d1", t)] = max(dp, 0.0)
        values[idx("d2", t)] = max(-dp, 0.0)
        dq = values[idx("qm", t)] - values[idx("qm", t - 1)]
        values[idx("d3", t)] = max(dq, 0.0)
        values[idx("d4", t)] = max(-dq, 0.0)

    return Assignment(problem, values)


# ---------------------------------------------------------------------------
# LP text export (CPLEX LP format); byte-stable for a fixed problem.
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _expr_text(expr: LinearExpr) -> str:
    parts: list[str] = []
    for var, coef in expr.terms.items():
        sign = "-" if coef < 0 else "+"
        if not parts and sign == "+":
            parts.append(f"{_fmt(abs(coef))} {var.name()}")
        else:
            parts.append(f"{sign} {_fmt(abs(coef))} {var.name()}")
    return " ".join(parts) if parts else "0"


def lp_text(problem: MilpProblem, objective: int | LinearExpr = 1,
            extra_constraints: tuple[Constraint, ...] = ()) -> str:
    """Render the problem with the chosen objective in LP interchange format."""
    obj = problem.objectives[objective] if isinstance(objective, int) else objective
    rel_text = {"<=": "<=", ">=": ">=", "=": "="}
    lines = ["Minimize", f" obj: {_expr_text(obj)}", "Subject To"]
    for i, con in enumerate(tuple(problem.constraints) + tuple(extra_constraints)):
        rhs = con.rhs - con.expr.const
        lines.append(f" c{i}_{con.tag}: {_expr_text(con.expr)} {rel_text[con.rel]} {_fmt(rhs)}")
    lines.append("Bounds")
    binaries: list[str] = []
    for ref, vdef in problem.variables.items():
        name = ref.name()
        if vdef.binary:
            binaries.append(name)
            if vdef.ub == 0.0:
                lines.append(f" {name} = 0")
            continue
        if vdef.lb == vdef.ub:
            lines.append(f" {name} = {_fmt(vdef.lb)}")
        elif vdef.lb == -np.inf and vdef.ub == np.inf:
            lines.append(f" {name} free")
        elif vdef.ub == np.inf:
            lines.append(f" {_fmt(vdef.lb)} <= {name}")
        else:
            lines.append(f" {_fmt(vdef.lb)} <= {name} <= {_fmt(vdef.ub)}")
    if binaries:
        lines.append("Binaries")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(problem: MilpProblem, path: str, objective: int | LinearExpr = 1) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(lp_text(problem, objective))
