"""privshape: joint real/reactive load shaping for smart-meter privacy."""

__version__ = "0.1.0"

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
    build_time_grid,
    load_household_config,
    validate_household,
)
from .ingest import (
    RawTraces,
    TraceSchema,
    extract_day,
    generate_synthetic_household,
    load_household_csv,
    load_irradiance_csv,
    resample_traces,
)
from .model import (
    MilpProblem,
    build_problem,
    check_solution,
    discomfort_coefficient,
    evaluate_objective,
    lp_text,
    reactive_from_pf,
    refine_solution,
)
from .privacy import (
    MiReport,
    QuantizerSpec,
    actual_load_from_case,
    empirical_mi,
    evaluate_case_privacy,
    quantize,
)
from .scenarios import (
    ApplianceScenarioSet,
    RenewableScenarioSet,
    build_appliance_scenarios,
    build_renewable_scenarios,
    irradiance_to_power,
    kmeans_cluster,
)
from .solve import (
    CANONICAL_CASES,
    CaseResult,
    CaseSpec,
    ScipyHighsBackend,
    SolverBackend,
    StandaloneOptima,
    brute_force_oracle,
    get_backend,
    run_case_matrix,
    solve_minimax,
    solve_standalone,
)
