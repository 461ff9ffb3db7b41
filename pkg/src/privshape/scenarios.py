"""Stochastic inputs: weighted on-demand appliance scenarios via k-means over
daily usage vectors, and renewable scenarios from irradiance traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import PvPanel, TimeGrid
from .ingest import ApplianceCategory, IrradianceTraces, RawTraces, resample_series


@dataclass(frozen=True, eq=False)
class ApplianceScenarioSet:
    """On-demand scenarios: p/q have shape (num_scenarios, T), weights sum to 1."""

    p_kw: np.ndarray
    q_kvar: np.ndarray
    weights: np.ndarray

    @property
    def num_scenarios(self) -> int:
        return len(self.weights)

    @property
    def expected_p(self) -> np.ndarray:
        return self.weights @ self.p_kw

    @property
    def expected_q(self) -> np.ndarray:
        return self.weights @ self.q_kvar


@dataclass(frozen=True, eq=False)
class RenewableScenarioSet:
    """PV output scenarios: power has shape (num_scenarios, T)."""

    power_kw: np.ndarray
    weights: np.ndarray

    @property
    def num_scenarios(self) -> int:
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    centroids: np.ndarray          # (k, dim)
    assignment: np.ndarray         # (n,) centroid index per point
    sizes: np.ndarray              # (k,)
    inertia: float
    n_iter: int
    inertia_history: tuple[float, ...] = ()   # after each iteration's update step


def irradiance_to_power(gti: np.ndarray, panel: PvPanel) -> np.ndarray:
    """PV output = efficiency * panel area * irradiance, elementwise."""
    gti = np.asarray(gti, dtype=float)
    if np.any(gti < 0.0):
        raise ValueError("irradiance must be nonnegative")
    return panel.efficiency * panel.area_m2 * gti


def build_renewable_scenarios(irr: IrradianceTraces, panel: PvPanel,
                              grid: TimeGrid) -> RenewableScenarioSet:
    """One equal-weight scenario per recorded day, resampled onto the model grid."""
    num_days = irr.gti.shape[0]
    if num_days < 1:
        raise ValueError("need at least one irradiance day")
    slot_minutes = round(grid.slot_duration_hours * 60)
    if slot_minutes % irr.step_minutes != 0:
        raise ValueError(f"grid step {slot_minutes} min not a multiple of "
                         f"irradiance step {irr.step_minutes} min")
    factor = slot_minutes // irr.step_minutes
    power = np.vstack([
        resample_series(irradiance_to_power(day, panel), factor) for day in irr.gti])
    if power.shape[1] != grid.num_slots:
        raise ValueError(f"irradiance days have {power.shape[1]} slots, grid has {grid.num_slots}")
    weights = np.full(num_days, 1.0 / num_days)
    return RenewableScenarioSet(power_kw=power, weights=weights)


def _farthest_point_init(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy farthest-point selection: seeded first pick, then max-min distance."""
    n = len(vectors)
    chosen = [int(rng.integers(n))]
    dist = np.linalg.norm(vectors - vectors[chosen[0]], axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(vectors - vectors[nxt], axis=1))
    return vectors[chosen].copy()


def _fill_empty_clusters(assignment: np.ndarray, point_d2: np.ndarray, k: int) -> None:
    """Re-seed each empty cluster with the farthest point that can be spared
    (its donor cluster keeps at least one member). Mutates `assignment`."""
    sizes = np.bincount(assignment, minlength=k)
    for j in range(k):
        if sizes[j] > 0:
            continue
        candidates = np.flatnonzero(sizes[assignment] >= 2)
        stray = int(candidates[np.argmax(point_d2[candidates])])
        sizes[assignment[stray]] -= 1
        assignment[stray] = j
        sizes[j] = 1
        point_d2[stray] = 0.0


def kmeans_cluster(vectors: np.ndarray, k: int, seed: int,
                   max_iters: int = 300, tol: float = 1e-6) -> ClusteringResult:
    """Lloyd's algorithm with deterministic farthest-point initialization.

    Empty clusters are re-seeded with the point farthest from its assigned
    centroid. Converged when no centroid moves more than `tol`.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2:
        raise ValueError("vectors must be a 2-D array (points x features)")
    n = len(vectors)
    if k < 1 or k > n:
        raise ValueError(f"k={k} must be in [1, {n}]")

    rng = np.random.default_rng(seed)
    centroids = _farthest_point_init(vectors, k, rng)
    assignment = np.zeros(n, dtype=int)
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignment = np.argmin(d2, axis=1)
        _fill_empty_clusters(assignment, d2[np.arange(n), assignment], k)

        new_centroids = np.vstack([vectors[assignment == j].mean(axis=0) for j in range(k)])
        shift = np.max(np.abs(new_centroids - centroids))
        centroids = new_centroids
        history.append(float(((vectors - centroids[assignment]) ** 2).sum()))
        if shift < tol:
            break

    d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assignment = np.argmin(d2, axis=1)
    # final reassignment can in principle empty a cluster; patch it the same way
    _fill_empty_clusters(assignment, d2[np.arange(n), assignment], k)
    sizes = np.bincount(assignment, minlength=k)
    inertia = float(((vectors - centroids[assignment]) ** 2).sum())
    return ClusteringResult(centroids=centroids, assignment=assignment,
                            sizes=sizes, inertia=inertia, n_iter=n_iter,
                            inertia_history=tuple(history))


def build_appliance_scenarios(traces: RawTraces, k: int, seed: int) -> ApplianceScenarioSet:
    """Cluster aggregated daily on-demand usage into k weighted scenarios.

    Each day's vector concatenates the day's aggregate on-demand P series and
    Q series, so one clustering yields consistent real/reactive profiles.
    """
    od_ids = traces.ids(ApplianceCategory.ON_DEMAND)
    spd = traces.slots_per_day
    num_days = traces.num_days
    if num_days < k:
        raise ValueError(f"need at least k={k} complete days, have {num_days}")

    if od_ids:
        agg_p = sum(traces.p_kw[a] for a in od_ids)[: num_days * spd]
        agg_q = sum(traces.q_kvar[a] for a in od_ids)[: num_days * spd]
    else:
        agg_p = np.zeros(num_days * spd)
        agg_q = np.zeros(num_days * spd)
    daily = np.hstack([agg_p.reshape(num_days, spd), agg_q.reshape(num_days, spd)])

    result = kmeans_cluster(daily, k=k, seed=seed)
    weights = result.sizes / num_days
    return ApplianceScenarioSet(p_kw=result.centroids[:, :spd].copy(),
                                q_kvar=result.centroids[:, spd:].copy(),
                                weights=weights)


def write_scenarios_csv(scenarios: ApplianceScenarioSet, path: str) -> None:
    """Long-format export: scenario_id, rho, slot, p_kw, q_kvar."""
    lines = ["scenario_id,rho,slot,p_kw,q_kvar"]
    for s in range(scenarios.num_scenarios):
        rho = scenarios.weights[s]
        for t in range(scenarios.p_kw.shape[1]):
            lines.append(f"{s},{rho:.12g},{t + 1},"
                         f"{scenarios.p_kw[s, t]:.12g},{scenarios.q_kvar[s, t]:.12g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
