import math

import numpy as np
import pytest

from privshape.domain import (
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
from privshape.model import (
    VarRef,
    build_problem,
    check_solution,
    discomfort_coefficient,
    evaluate_objective,
    lp_text,
    reactive_from_pf,
    refine_solution,
)
from privshape.scenarios import ApplianceScenarioSet, RenewableScenarioSet
from privshape.solve import get_backend, simulate_case0, solve_standalone

TS = ApplianceCategory.TIME_SHIFTABLE
PT = ApplianceCategory.POWER_TIME_SHIFTABLE

OFF_BATTERY = Battery(0, 0, 1, 1, 0, 0)
OFF_CAPACITOR = Capacitor(0, 0, 1, 1, 0, 0)


def micro_household(T=4, baseline_p=None, baseline_q=None, appliances=(),
                    battery=OFF_BATTERY, capacitor=OFF_CAPACITOR, prices=None):
    return HouseholdModel(
        time_grid=TimeGrid(1.0, T),
        appliances=tuple(appliances),
        battery=battery, capacitor=capacitor, pv=PvPanel(0.2, 10.0),
        tariff=Tariff(np.full(T, 0.1) if prices is None else np.asarray(prices, float)),
        baseline=BaselineProfiles(
            np.zeros(T) if baseline_p is None else np.asarray(baseline_p, float),
            np.zeros(T) if baseline_q is None else np.asarray(baseline_q, float)),
        p_max_kw=10.0,
    )


def zero_scenarios(T):
    app = ApplianceScenarioSet(np.zeros((1, T)), np.zeros((1, T)), np.array([1.0]))
    ren = RenewableScenarioSet(np.zeros((1, T)), np.array([1.0]))
    return app, ren


class TestDiscomfortCoefficient:
    def test_quadratic_growth(self):
        app = Appliance("a", PT, 100, 200, 0.0, 1.0, 2.0, 0.9)
        assert discomfort_coefficient(app, 110) == pytest.approx(50.0)

    def test_zero_at_window_start(self):
        app = Appliance("a", PT, 5, 10, 0.0, 1.0, 2.0, 0.9)
        assert discomfort_coefficient(app, 5) == 0.0

    def test_energy_normalization(self):
        app = Appliance("a", PT, 1, 10, 0.0, 1.0, 4.0, 0.9)
        assert discomfort_coefficient(app, 5) == pytest.approx(4.0)

    def test_outside_window_rejected(self):
        app = Appliance("a", PT, 5, 10, 0.0, 1.0, 2.0, 0.9)
        with pytest.raises(ValueError, match="outside window"):
            discomfort_coefficient(app, 4)


class TestReactiveFromPf:
    def test_unity_pf_has_no_reactive(self):
        assert reactive_from_pf(5.0, 1.0) == pytest.approx(0.0)

    def test_three_four_five_triangle(self):
        assert reactive_from_pf(2.0, 0.8) == pytest.approx(1.5)

    def test_point_six(self):
        assert reactive_from_pf(1.0, 0.6) == pytest.approx(4.0 / 3.0)

    def test_invalid_pf(self):
        with pytest.raises(ValueError):
            reactive_from_pf(1.0, 0.0)


class TestBuildProblem:
    def test_variable_and_constraint_counts(self):
        # independent tally: 6 metered/storage series + 2 per appliance + one
        # per renewable scenario + binaries, 4 difference splits, 1 goal var
        T = 6
        apps = (Appliance("w", TS, 1, 4, 0.0, 1.0, 2.0, 0.9),
                Appliance("h", PT, 1, 6, 0.0, 1.0, 2.0, 0.8))
        household = micro_household(T=T, baseline_p=np.ones(T), appliances=apps)
        app_sc = ApplianceScenarioSet(np.zeros((3, T)), np.zeros((3, T)),
                                      np.array([0.5, 0.25, 0.25]))
        ren_sc = RenewableScenarioSet(np.zeros((2, T)), np.array([0.5, 0.5]))
        problem = build_problem(household, app_sc, ren_sc)

        n_app, n_ts, n_rs = 2, 1, 2
        expected_vars = T * (6 + 2 * n_app + n_rs + n_ts) + 4 * (T - 1) + 1
        expected_cons = T * (6 + n_app + n_ts) + n_app + 2 * (T - 1) + 2
        assert problem.num_vars == expected_vars
        assert len(problem.constraints) == expected_cons
        assert problem.num_binary == n_ts * T

        by_kind = {}
        for ref in problem.variables:
            by_kind[ref.kind] = by_kind.get(ref.kind, 0) + 1
        assert by_kind["pm"] == T and by_kind["v"] == n_rs * T
        assert by_kind["pca"] == n_app * T and by_kind["y"] == T
        assert by_kind["d1"] == T - 1 and by_kind["z"] == 1

    def test_invalid_household_rejected(self):
        bad = micro_household(appliances=(Appliance("x", TS, 3, 2, 0, 1, 0.5, 0.9),))
        with pytest.raises(ValueError, match="invalid household"):
            build_problem(bad, *zero_scenarios(4))

    def test_mismatched_grid_rejected(self):
        household = micro_household(T=4)
        app_sc, _ = zero_scenarios(4)
        ren_sc = RenewableScenarioSet(np.zeros((1, 8)), np.array([1.0]))
        with pytest.raises(ValueError, match="grid"):
            build_problem(household, app_sc, ren_sc)

    def test_disabled_battery_forces_zero_flows(self):
        problem = build_problem(micro_household(baseline_p=[1, 1, 1, 1]),
                                *zero_scenarios(4))
        for t in range(1, 5):
            for kind in ("pcb", "pdb", "qcc", "qdc"):
                assert problem.variables[VarRef(kind, t)].ub == 0.0

    def test_two_on_slots_forced_by_energy(self):
        # fixed-power appliance with energy for exactly two slots
        app = Appliance("w", TS, 1, 4, 0.0, 1.0, 2.0, 0.9)
        household = micro_household(baseline_p=[0.5] * 4, appliances=(app,))
        problem = build_problem(household, *zero_scenarios(4))
        solve = solve_standalone(problem, 3, get_backend())
        y = solve.assignment.series("y", "w")
        assert y.sum() == pytest.approx(2.0)
        assert set(np.round(y, 9)) <= {0.0, 1.0}

    def test_epsilon_matches_stated_value(self):
        problem = build_problem(micro_household(), *zero_scenarios(4))
        assert problem.epsilon == 1e-3
        coef = problem.objectives[1].terms[VarRef("pcb", 1)]
        assert coef == pytest.approx(1e-3)

    def test_allow_export_relaxes_metered_lower_bounds(self):
        household = micro_household(baseline_p=[1, 1, 1, 1])
        fixed = build_problem(household, *zero_scenarios(4))
        assert fixed.variables[VarRef("pm", 1)].lb == 0.0
        assert fixed.variables[VarRef("qm", 1)].lb == 0.0
        free = build_problem(household, *zero_scenarios(4), allow_export=True)
        assert free.variables[VarRef("pm", 1)].lb == -np.inf
        assert free.variables[VarRef("qm", 1)].lb == -np.inf


class TestEvaluateObjective:
    def test_flat_profile_has_zero_o1(self):
        household = micro_household(T=3, baseline_p=[2, 2, 2])
        problem = build_problem(household, *zero_scenarios(3))
        result = simulate_case0(problem)
        assert result.objective_values[1] == pytest.approx(0.0)

    def test_absolute_steps_summed(self):
        household = micro_household(T=3, baseline_p=[1, 3, 2])
        problem = build_problem(household, *zero_scenarios(3))
        result = simulate_case0(problem)
        assert result.objective_values[1] == pytest.approx(3.0)   # |+2| + |-1|

    def test_cost_is_price_times_energy(self):
        household = micro_household(T=2, baseline_p=[1, 2], prices=[0.1, 0.1])
        problem = build_problem(household, *zero_scenarios(2))
        result = simulate_case0(problem)
        assert result.objective_values[3] == pytest.approx(0.3)

    def test_unknown_objective(self):
        problem = build_problem(micro_household(), *zero_scenarios(4))
        result = simulate_case0(problem)
        with pytest.raises(ValueError):
            evaluate_objective(problem, 5, result.assignment)


class TestCheckSolution:
    def test_case0_witness_is_feasible(self):
        apps = (Appliance("w", TS, 2, 4, 0.0, 1.0, 2.0, 0.9),
                Appliance("h", PT, 1, 4, 0.1, 1.0, 1.0, 0.8))
        household = micro_household(baseline_p=[1, 1, 1, 1], appliances=apps)
        problem = build_problem(household, *zero_scenarios(4))
        report = check_solution(problem, simulate_case0(problem).assignment)
        assert report.ok, [v.message for v in report.violations]
        assert report.warnings == ()

    def test_day_balance_violation_tagged(self):
        bat = Battery(1.0, 2.0, 0.9, 0.9, 0.5, 0.5)
        problem = build_problem(micro_household(baseline_p=[1, 1, 1, 1], battery=bat),
                                *zero_scenarios(4))
        assignment = simulate_case0(problem).assignment.copy()
        assignment.values[problem.variables[VarRef("pcb", 2)].index] = 0.3
        report = check_solution(problem, assignment)
        assert any(v.path.startswith("battery_day_balance") for v in report.violations)

    def test_simultaneous_flow_warning(self):
        bat = Battery(1.0, 2.0, 0.9, 0.9, 0.5, 0.5)
        problem = build_problem(micro_household(baseline_p=[1, 1, 1, 1], battery=bat),
                                *zero_scenarios(4))
        values = simulate_case0(problem).assignment.values.copy()
        values[problem.variables[VarRef("pcb", 2)].index] = 0.1
        values[problem.variables[VarRef("pdb", 2)].index] = 0.1
        refined = refine_solution(problem, values)
        report = check_solution(problem, refined)
        assert any("simultaneous battery" in w for w in report.warnings)

    def test_binary_integrality_checked(self):
        app = Appliance("w", TS, 1, 4, 0.0, 1.0, 2.0, 0.9)
        problem = build_problem(micro_household(appliances=(app,)), *zero_scenarios(4))
        assignment = simulate_case0(problem).assignment.copy()
        assignment.values[problem.variables[VarRef("y", 1, "w")].index] = 0.4
        report = check_solution(problem, assignment)
        assert any(v.path.startswith("integrality") for v in report.violations)


class TestRefinement:
    def test_energy_completion_exact_after_refinement(self):
        app = Appliance("h", PT, 1, 4, 0.0, 1.0, 2.0, 0.8)
        problem = build_problem(micro_household(baseline_p=[1, 0, 0, 1],
                                                appliances=(app,)), *zero_scenarios(4))
        solve = solve_standalone(problem, 1, get_backend())
        pca = solve.assignment.series("pca", "h")
        assert pca.sum() * 1.0 == pytest.approx(2.0, abs=1e-12)

    def test_reactive_link_exact(self):
        app = Appliance("h", PT, 1, 4, 0.0, 1.0, 2.0, 0.8)
        problem = build_problem(micro_household(baseline_p=[1, 0, 0, 1],
                                                appliances=(app,)), *zero_scenarios(4))
        solve = solve_standalone(problem, 4, get_backend())
        pca = solve.assignment.series("pca", "h")
        qca = solve.assignment.series("qca", "h")
        np.testing.assert_allclose(qca, math.tan(math.acos(0.8)) * pca, atol=1e-15)

    def test_objective_matches_backend_report(self):
        bat = Battery(1.0, 3.0, 1.0, 1.0, 0.5, 0.5)
        problem = build_problem(micro_household(baseline_p=[1, 1, 2, 2], battery=bat),
                                *zero_scenarios(4))
        backend = get_backend()
        outcome = backend.solve(problem, problem.objectives[1], mip_gap=1e-9)
        refined = refine_solution(problem, outcome.values)
        assert evaluate_objective(problem, 1, refined) == pytest.approx(
            outcome.objective_value, abs=1e-6)

    def test_abs_split_complementarity_at_optimum(self):
        bat = Battery(1.0, 3.0, 1.0, 1.0, 0.5, 0.5)
        problem = build_problem(micro_household(baseline_p=[1, 1, 2, 2], battery=bat),
                                *zero_scenarios(4))
        solve = solve_standalone(problem, 1, get_backend())
        pm = solve.assignment.series("pm")
        d1 = solve.assignment.series("d1")
        d2 = solve.assignment.series("d2")
        np.testing.assert_allclose(d1 + d2, np.abs(np.diff(pm)), atol=1e-9)
        assert np.all(d1 * d2 <= 1e-12)


class TestLpExport:
    def _problem(self):
        app = Appliance("w", TS, 1, 3, 0.0, 1.0, 1.0, 0.9)
        return build_problem(micro_household(baseline_p=[1, 1, 1, 1],
                                             appliances=(app,)), *zero_scenarios(4))

    def test_sections_present(self):
        text = lp_text(self._problem(), objective=3)
        for section in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            assert section in text

    def test_variable_names(self):
        text = lp_text(self._problem(), objective=1)
        assert "pm_1" in text and "y_w_2" in text and "pca_w_1" in text

    def test_bit_reproducible(self):
        problem = self._problem()
        assert lp_text(problem, 2) == lp_text(problem, 2)

    def test_write(self, tmp_path):
        from privshape.model import write_lp
        path = tmp_path / "o1.lp"
        write_lp(self._problem(), str(path), objective=1)
        assert path.read_text().startswith("Minimize")
