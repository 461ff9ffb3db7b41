"""Batch experiment runner.

Subcommands:

    gen-data      write synthetic traces, irradiance, and a household config
    run           full pipeline: ingest -> scenarios -> solve cases -> MI -> artifacts
    report        summary tables from a finished run directory
    export-lp     write the problem in LP interchange format
    oracle-check  compare MILP optima against the brute-force oracle

Exit codes: 0 success, 1 config/I-O error, 2 one or more cases failed.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .domain import (
    BaselineProfiles,
    build_household,
    load_household_config,
    validate_household,
    write_household_config,
)
from .ingest import (
    SyntheticSpec,
    TraceSchema,
    extract_day,
    generate_synthetic_household,
    load_household_csv,
    load_irradiance_csv,
    resample_to_grid,
    synthetic_irradiance,
    write_irradiance_csv,
    write_traces_csv,
)
from .micro import run_oracle_suite
from .model import build_problem, write_lp
from .privacy import (
    MiReport,
    QuantizerSpec,
    actual_load_from_case,
    evaluate_case_privacy,
    write_mi_csv,
)
from .scenarios import build_appliance_scenarios, build_renewable_scenarios, write_scenarios_csv
from .solve import (
    CANONICAL_CASES,
    CaseSpec,
    MatrixRun,
    get_backend,
    run_case_matrix,
)


@dataclass
class RunConfig:
    config_path: str
    traces_path: str
    irradiance_path: str
    out_dir: str
    slot_minutes: int | None = None      # None: use the household config's grid
    k: int = 10
    seed: int = 0
    bins: int = 64
    cases: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6)
    mip_gap: float = 1e-4
    time_limit: float = 300.0
    jobs: int = 1
    allow_export: bool = False
    backend: str | None = None


@dataclass
class RunManifest:
    config: dict
    versions: dict
    case_status: dict
    standalone_optima: dict
    artifacts: list = field(default_factory=list)
    wall_times_s: dict = field(default_factory=dict)


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_objectives_csv(matrix: MatrixRun, path: str) -> None:
    lines = ["case,O1,O2,O3,O4,Z,gap,runtime_s"]
    for res in matrix.results:
        if res.ok:
            vals = [f"{res.objective_values[i]:.10g}" for i in (1, 2, 3, 4)]
            gap = f"{res.gap:.3g}" if res.gap is not None else ""
            lines.append(f"{res.case.case_id},{','.join(vals)},"
                         f"{res.z_star:.10g},{gap},{res.runtime_s:.3f}")
        else:
            lines.append(f"{res.case.case_id},nan,nan,nan,nan,nan,,{res.runtime_s:.3f}")
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_schedule_csv(matrix: MatrixRun, path: str) -> None:
    ctx = matrix.problem.context
    n_rs = len(ctx.pv_weights)
    app_ids = [a.id for a in ctx.appliances]
    header = (["case", "t", "pm_kw", "qm_kvar", "pcb", "pdb", "qcc", "qdc"]
              + [f"v_{rs}" for rs in range(n_rs)] + [f"pca_{a}" for a in app_ids])
    lines = [",".join(header)]
    for res in matrix.results:
        if not res.ok:
            continue
        series = {k: res.assignment.series(k) for k in
                  ("pm", "qm", "pcb", "pdb", "qcc", "qdc")}
        v = {rs: res.assignment.series("v", str(rs)) for rs in range(n_rs)}
        pca = {a: res.assignment.series("pca", a) for a in app_ids}
        for t in range(ctx.num_slots):
            row = [str(res.case.case_id), str(t + 1)]
            row += [f"{series[k][t]:.8g}" for k in ("pm", "qm", "pcb", "pdb", "qcc", "qdc")]
            row += [f"{v[rs][t]:.8g}" for rs in range(n_rs)]
            row += [f"{pca[a][t]:.8g}" for a in app_ids]
            lines.append(",".join(row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _plot_mi_bars(reports: list[MiReport], path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cases = [r.case_id for r in reports]
    x = np.arange(len(cases))
    width = 0.27
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(x - width, [r.mi_p for r in reports], width, label="real (P)")
    ax.bar(x, [r.mi_q for r in reports], width, label="reactive (Q)")
    ax.bar(x + width, [r.total for r in reports], width, label="total")
    ax.set_xticks(x, [f"case {c}" for c in cases])
    ax.set_ylabel("MI between metered and actual load (bits)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_case_loads(matrix: MatrixRun, out_dir: str) -> list[str]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    for res in matrix.results:
        if not res.ok:
            continue
        fig, (ax_p, ax_q) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
        slots = np.arange(1, matrix.problem.context.num_slots + 1)
        ax_p.step(slots, res.pm, where="mid")
        ax_p.set_ylabel("metered P (kW)")
        ax_q.step(slots, res.qm, where="mid", color="tab:orange")
        ax_q.set_ylabel("metered Q (kvar)")
        ax_q.set_xlabel("time slot")
        fig.suptitle(f"case {res.case.case_id}")
        fig.tight_layout()
        path = os.path.join(out_dir, f"load_case_{res.case.case_id}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def _parse_cases(text: str) -> list[CaseSpec]:
    cases = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        case_id = int(token)
        if case_id not in CANONICAL_CASES:
            raise ValueError(f"unknown case {case_id}; canonical cases are 0..6")
        cases.append(CANONICAL_CASES[case_id])
    if not cases:
        raise ValueError("no cases requested")
    return cases


def cmd_gen_data(seed: int, out_dir: str, days: int = 730,
                 slot_minutes: int = 15) -> list[str]:
    """Write synthetic traces.csv, irradiance.csv, and household.conf."""
    os.makedirs(out_dir, exist_ok=True)
    spec = SyntheticSpec(days=days, step_minutes=slot_minutes)
    traces, household = generate_synthetic_household(seed, spec)
    report = validate_household(household)
    if not report.ok:
        raise RuntimeError("synthetic household invalid:\n" + "\n".join(report.messages()))
    paths = [os.path.join(out_dir, name)
             for name in ("traces.csv", "irradiance.csv", "household.conf")]
    write_traces_csv(traces, paths[0])
    write_irradiance_csv(synthetic_irradiance(seed, slot_minutes), paths[1])
    write_household_config(_gen_config(slot_minutes), paths[2])
    return paths


def _gen_config(slot_minutes: int):
    from .ingest import default_household_config
    return default_household_config(slot_minutes)


def cmd_run(config: RunConfig) -> RunManifest:
    """Execute the full pipeline and write all artifacts plus the manifest."""
    manifest, _, _ = run_pipeline(config)
    return manifest


def run_pipeline(config: RunConfig) -> tuple[RunManifest, MatrixRun, list[MiReport]]:
    """cmd_run's engine; returns the solved matrix and MI reports as well."""
    t0 = time.perf_counter()
    os.makedirs(config.out_dir, exist_ok=True)

    def stage(name: str, func, *args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as exc:
            raise RuntimeError(f"stage {name!r}: {exc}") from exc

    household_cfg = stage("config", load_household_config, config.config_path)
    if config.slot_minutes is not None and config.slot_minutes != household_cfg.slot_minutes:
        raise ValueError(
            f"config {config.config_path} is authored for {household_cfg.slot_minutes}-minute "
            f"slots (appliance windows are slot indices); regenerate it for "
            f"{config.slot_minutes}-minute slots instead of overriding")
    grid = household_cfg.grid

    schema = TraceSchema(appliances=household_cfg.trace_appliances())
    traces = stage("traces", lambda: resample_to_grid(
        load_household_csv(config.traces_path, schema), household_cfg.slot_minutes))
    day = stage("traces", extract_day, traces, household_cfg.day_index)
    household = build_household(household_cfg,
                                BaselineProfiles(day.baseline_p, day.baseline_q))
    report = validate_household(household)
    if not report.ok:
        raise ValueError("household config invalid:\n  " + "\n  ".join(report.messages()))

    app_sc = stage("scenarios", build_appliance_scenarios,
                   traces, k=config.k, seed=config.seed)
    ren_sc = stage("scenarios", lambda: build_renewable_scenarios(
        load_irradiance_csv(config.irradiance_path), household_cfg.pv, grid))
    t_ingest = time.perf_counter()

    cases = [CANONICAL_CASES[c] for c in config.cases]
    matrix = run_case_matrix(household, app_sc, ren_sc, cases,
                             backend_factory=lambda: get_backend(config.backend),
                             allow_export=config.allow_export,
                             mip_gap=config.mip_gap, time_limit=config.time_limit,
                             jobs=config.jobs)
    t_solve = time.perf_counter()

    spec = QuantizerSpec(bins=config.bins)
    reports = [evaluate_case_privacy(res, actual_load_from_case(res), spec)
               for res in matrix.results if res.ok]

    artifacts = []

    def emit(name: str, writer) -> str:
        path = os.path.join(config.out_dir, name)
        writer(path)
        artifacts.append(path)
        return path

    emit("objectives.csv", lambda p: _write_objectives_csv(matrix, p))
    emit("schedule.csv", lambda p: _write_schedule_csv(matrix, p))
    emit("mi_report.csv", lambda p: write_mi_csv(reports, p))
    emit("scenarios.csv", lambda p: write_scenarios_csv(app_sc, p))
    emit("mi_bars.png", lambda p: _plot_mi_bars(reports, p))
    artifacts.extend(_plot_case_loads(matrix, config.out_dir))
    t_artifacts = time.perf_counter()

    import scipy

    manifest = RunManifest(
        config={**config.__dict__, "cases": list(config.cases)},
        versions={"privshape": __version__, "python": platform.python_version(),
                  "numpy": np.__version__, "scipy": scipy.__version__},
        case_status={str(r.case.case_id): (r.status if r.ok else f"failed: {r.error}")
                     for r in matrix.results},
        standalone_optima=({str(i): v for i, v in matrix.optima.values.items()}
                           if matrix.optima else {}),
        wall_times_s={"ingest": round(t_ingest - t0, 3),
                      "solve": round(t_solve - t_ingest, 3),
                      "artifacts": round(t_artifacts - t_solve, 3)},
    )
    manifest_path = os.path.join(config.out_dir, "manifest.json")
    manifest.artifacts = [os.path.basename(p) for p in artifacts] + ["manifest.json"]
    _atomic_write(manifest_path, json.dumps(manifest.__dict__, indent=2, sort_keys=True) + "\n")
    return manifest, matrix, reports


def cmd_report(results_dir: str) -> str:
    """Percent increases of cost/discomfort over their stand-alone optima and
    MI reduction ratios against the no-shaping case."""
    manifest_path = os.path.join(results_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise FileNotFoundError(f"no manifest.json in {results_dir}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)

    objectives: dict[int, dict[str, float]] = {}
    with open(os.path.join(results_dir, "objectives.csv"), encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.strip().split(",")
            row = dict(zip(header, parts))
            objectives[int(row["case"])] = {k: float(v) if v else float("nan")
                                            for k, v in row.items() if k != "case"}

    totals: dict[int, float] = {}
    with open(os.path.join(results_dir, "mi_report.csv"), encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            case_s, channel, scope, value = line.strip().split(",")
            if channel == "total" and scope == "aggregate":
                totals[int(case_s)] = float(value)

    optima = {int(k): float(v) for k, v in manifest.get("standalone_optima", {}).items()}
    lines = ["# Run report", ""]
    if 3 in optima and 4 in optima:
        lines.append("## Cost and discomfort against stand-alone optima")
        lines.append("")
        lines.append(f"O3* = {optima[3]:.4g}, O4* = {optima[4]:.4g}")
        lines.append("")
        lines.append("| case | O3 | O3 increase | O4 | O4 increase |")
        lines.append("|------|----|-------------|----|-------------|")
        for case_id in sorted(objectives):
            row = objectives[case_id]
            if case_id == 0 or np.isnan(row["O3"]):
                continue
            inc3 = 100.0 * (row["O3"] - optima[3]) / optima[3]
            inc4 = 100.0 * (row["O4"] - optima[4]) / optima[4]
            lines.append(f"| {case_id} | {row['O3']:.4g} | {inc3:+.1f}% "
                         f"| {row['O4']:.4g} | {inc4:+.1f}% |")
        lines.append("")
    if 0 in totals:
        lines.append("## Total MI relative to case 0 (no shaping)")
        lines.append("")
        lines.append("| case | total MI (bits) | ratio vs case 0 |")
        lines.append("|------|-----------------|-----------------|")
        for case_id in sorted(totals):
            ratio = totals[case_id] / totals[0] if totals[0] > 0 else float("nan")
            lines.append(f"| {case_id} | {totals[case_id]:.4g} | {ratio:.3f} |")
        lines.append("")
    text = "\n".join(lines)
    _atomic_write(os.path.join(results_dir, "report.md"), text + "\n")
    return text


def cmd_export_lp(config: RunConfig, lp_path: str, objective: int) -> str:
    household_cfg = load_household_config(config.config_path)
    schema = TraceSchema(appliances=household_cfg.trace_appliances())
    traces = resample_to_grid(load_household_csv(config.traces_path, schema),
                              household_cfg.slot_minutes)
    day = extract_day(traces, household_cfg.day_index)
    household = build_household(household_cfg,
                                BaselineProfiles(day.baseline_p, day.baseline_q))
    app_sc = build_appliance_scenarios(traces, k=config.k, seed=config.seed)
    ren_sc = build_renewable_scenarios(load_irradiance_csv(config.irradiance_path),
                                       household_cfg.pv, household_cfg.grid)
    problem = build_problem(household, app_sc, ren_sc, allow_export=config.allow_export)
    write_lp(problem, lp_path, objective=objective)
    return lp_path


def cmd_oracle_check(tolerance: float = 1e-6) -> int:
    rows = run_oracle_suite()
    width = max(len(r.instance) for r in rows)
    failures = 0
    for row in rows:
        ok = row.abs_error <= tolerance
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'}  {row.instance:<{width}}  {row.quantity:<4} "
              f"milp={row.milp_value:.9g}  oracle={row.oracle_value:.9g}  "
              f"err={row.abs_error:.2e}")
    print(f"{len(rows) - failures}/{len(rows)} comparisons within {tolerance:g}")
    return 0 if failures == 0 else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privshape",
                                     description="Joint real/reactive load-shaping experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-data", help="write synthetic inputs")
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--days", type=int, default=730)
    p_gen.add_argument("--slot-minutes", type=int, default=15)

    p_run = sub.add_parser("run", help="run the case matrix end to end")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--traces", required=True)
    p_run.add_argument("--irradiance", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--slot-minutes", type=int, default=None)
    p_run.add_argument("--k", type=int, default=10)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--cases", default="0,1,2,3,4,5,6")
    p_run.add_argument("--bins", type=int, default=64)
    p_run.add_argument("--mip-gap", type=float, default=1e-4)
    p_run.add_argument("--time-limit", type=float, default=300.0)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--allow-export", action="store_true")

    p_rep = sub.add_parser("report", help="summary tables from a run directory")
    p_rep.add_argument("results_dir")

    p_lp = sub.add_parser("export-lp", help="write the LP interchange file")
    p_lp.add_argument("--config", required=True)
    p_lp.add_argument("--traces", required=True)
    p_lp.add_argument("--irradiance", required=True)
    p_lp.add_argument("--out", required=True)
    p_lp.add_argument("--objective", type=int, default=1, choices=(1, 2, 3, 4))
    p_lp.add_argument("--k", type=int, default=10)
    p_lp.add_argument("--seed", type=int, default=0)
    p_lp.add_argument("--allow-export", action="store_true")

    p_orc = sub.add_parser("oracle-check", help="MILP vs brute-force oracle")
    p_orc.add_argument("--tolerance", type=float, default=1e-6)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen-data":
            for path in cmd_gen_data(args.seed, args.out, args.days, args.slot_minutes):
                print(path)
            return 0
        if args.command == "run":
            config = RunConfig(
                config_path=args.config, traces_path=args.traces,
                irradiance_path=args.irradiance, out_dir=args.out,
                slot_minutes=args.slot_minutes, k=args.k, seed=args.seed,
                bins=args.bins, cases=tuple(c.case_id for c in _parse_cases(args.cases)),
                mip_gap=args.mip_gap, time_limit=args.time_limit, jobs=args.jobs,
                allow_export=args.allow_export)
            manifest = cmd_run(config)
            failed = [c for c, s in manifest.case_status.items() if s.startswith("failed")]
            for case_id, status in sorted(manifest.case_status.items()):
                print(f"case {case_id}: {status}")
            print(f"artifacts in {config.out_dir}")
            return 2 if failed else 0
        if args.command == "report":
            print(cmd_report(args.results_dir))
            return 0
        if args.command == "export-lp":
            config = RunConfig(config_path=args.config, traces_path=args.traces,
                               irradiance_path=args.irradiance, out_dir=".",
                               k=args.k, seed=args.seed, allow_export=args.allow_export)
            print(cmd_export_lp(config, args.out, args.objective))
            return 0
        if args.command == "oracle-check":
            return cmd_oracle_check(args.tolerance)
        raise AssertionError(f"unhandled command {args.command}")
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
