"""Shared fixtures. The expensive end-to-end pipeline (730 synthetic days,
T = 96, all seven cases) runs once per session and is reused by the solve,
model, privacy, and acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass

import pytest

from privshape.cli import RunConfig, cmd_gen_data, run_pipeline
from privshape.ingest import generate_synthetic_household, synthetic_irradiance
from privshape.scenarios import build_appliance_scenarios, build_renewable_scenarios


@dataclass
class PipelineRun:
    data_dir: str
    out_dir: str
    config: RunConfig
    manifest: object
    matrix: object
    mi_reports: list
    gen_seconds: float
    run_seconds: float

    @property
    def total_seconds(self) -> float:
        return self.gen_seconds + self.run_seconds


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory) -> PipelineRun:
    data_dir = str(tmp_path_factory.mktemp("data"))
    out_dir = str(tmp_path_factory.mktemp("results"))
    t0 = time.perf_counter()
    cmd_gen_data(seed=42, out_dir=data_dir, days=730, slot_minutes=15)
    t1 = time.perf_counter()
    config = RunConfig(
        config_path=f"{data_dir}/household.conf",
        traces_path=f"{data_dir}/traces.csv",
        irradiance_path=f"{data_dir}/irradiance.csv",
        out_dir=out_dir,
        k=10, seed=0, bins=64, cases=(0, 1, 2, 3, 4, 5, 6),
        mip_gap=1e-4, time_limit=300.0, jobs=4,
    )
    manifest, matrix, reports = run_pipeline(config)
    t2 = time.perf_counter()
    return PipelineRun(data_dir=data_dir, out_dir=out_dir, config=config,
                       manifest=manifest, matrix=matrix, mi_reports=reports,
                       gen_seconds=t1 - t0, run_seconds=t2 - t1)


@pytest.fixture(scope="session")
def synthetic_bundle():
    """In-memory synthetic inputs on the default grid (no CSV round-trip)."""
    traces, household = generate_synthetic_household(42)
    app_sc = build_appliance_scenarios(traces, k=10, seed=0)
    ren_sc = build_renewable_scenarios(synthetic_irradiance(42), household.pv,
                                       household.time_grid)
    return traces, household, app_sc, ren_sc
