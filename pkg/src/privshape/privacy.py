"""Empirical mutual information between metered and actual load series.

Slots are treated as i.i.d. samples of the (actual, metered) pair; both series
are quantized over their own observed ranges and MI is the plug-in estimate on
the joint histogram, in bits. Absolute values depend on the binning, so only
orderings and ratios across cases are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solve import CaseResult


@dataclass(frozen=True)
class QuantizerSpec:
    mode: str = "fixed_width"        # "fixed_width" | "quantile"
    bins: int = 64

    def __post_init__(self):
        if self.mode not in ("fixed_width", "quantile"):
            raise ValueError(f"unknown quantizer mode {self.mode!r}")
        if self.bins < 2:
            raise ValueError("need at least 2 bins")


def quantize(series: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Map a real series to integer symbols in [0, bins)."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("cannot quantize an empty series")
    lo, hi = float(series.min()), float(series.max())
    if hi <= lo:
        return np.zeros(series.shape, dtype=int)
    if spec.mode == "fixed_width":
        width = (hi - lo) / spec.bins
        symbols = np.floor((series - lo) / width).astype(int)
        return np.minimum(symbols, spec.bins - 1)
    edges = np.quantile(series, np.arange(1, spec.bins) / spec.bins)
    return np.searchsorted(edges, series, side="right").astype(int)


def entropy_bits(symbols: np.ndarray) -> float:
    _, counts = np.unique(symbols, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def empirical_mi(x: np.ndarray, y: np.ndarray) -> float:
    """Plug-in MI over the joint histogram of (x_t, y_t), bits; 0*log 0 = 0."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError(f"need two equal-length nonempty 1-D series, "
                         f"got {x.shape} and {y.shape}")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    joint = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(joint, (xi, yi), 1.0)
    p = joint / joint.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    contributions = p[mask] * np.log2(p[mask] / (px @ py)[mask])
    # canonical summation order makes MI(x, y) == MI(y, x) bit-exact
    return float(np.sort(contributions).sum())


@dataclass(frozen=True, eq=False)
class ActualLoad:
    """What the consumer actually drew, behind any storage/PV masking."""

    aggregate_p: np.ndarray
    aggregate_q: np.ndarray
    per_appliance_p: dict[str, np.ndarray]
    per_appliance_q: dict[str, np.ndarray]


def actual_load_from_case(case: CaseResult) -> ActualLoad:
    """Actual consumption realized by a case: the solved appliance schedules
    plus the safety-critical baseline and expected on-demand load."""
    ctx = case.assignment.problem.context
    per_p = {app.id: case.assignment.series("pca", app.id) for app in ctx.appliances}
    per_q = {app.id: case.assignment.series("qca", app.id) for app in ctx.appliances}
    agg_p = ctx.baseline_p + ctx.od_p + (np.sum(list(per_p.values()), axis=0)
                                         if per_p else 0.0)
    agg_q = ctx.baseline_q + ctx.od_q + (np.sum(list(per_q.values()), axis=0)
                                         if per_q else 0.0)
    return ActualLoad(aggregate_p=np.asarray(agg_p), aggregate_q=np.asarray(agg_q),
                      per_appliance_p=per_p, per_appliance_q=per_q)


@dataclass(frozen=True, eq=False)
class MiReport:
    case_id: int
    mi_p: float                      # actual aggregate P vs metered P
    mi_q: float
    per_appliance_p: dict[str, float]
    per_appliance_q: dict[str, float]

    @property
    def total(self) -> float:
        return self.mi_p + self.mi_q

    @property
    def avg_appliance_p(self) -> float:
        return float(np.mean(list(self.per_appliance_p.values()))) \
            if self.per_appliance_p else 0.0

    @property
    def avg_appliance_q(self) -> float:
        return float(np.mean(list(self.per_appliance_q.values()))) \
            if self.per_appliance_q else 0.0

    @property
    def avg_appliance_total(self) -> float:
        return self.avg_appliance_p + self.avg_appliance_q


def evaluate_case_privacy(case: CaseResult, actual: ActualLoad,
                          spec: QuantizerSpec = QuantizerSpec()) -> MiReport:
    """MI between metered and actual series: aggregate and per-appliance."""
    pm, qm = case.pm, case.qm
    if actual.aggregate_p.shape != pm.shape:
        raise ValueError(f"actual series on a different grid: "
                         f"{actual.aggregate_p.shape} vs {pm.shape}")
    sym_pm = quantize(pm, spec)
    sym_qm = quantize(qm, spec)
    mi_p = empirical_mi(quantize(actual.aggregate_p, spec), sym_pm)
    mi_q = empirical_mi(quantize(actual.aggregate_q, spec), sym_qm)
    per_p = {aid: empirical_mi(quantize(series, spec), sym_pm)
             for aid, series in actual.per_appliance_p.items()}
    per_q = {aid: empirical_mi(quantize(series, spec), sym_qm)
             for aid, series in actual.per_appliance_q.items()}
    return MiReport(case_id=case.case.case_id, mi_p=mi_p, mi_q=mi_q,
                    per_appliance_p=per_p, per_appliance_q=per_q)


def mi_report_rows(report: MiReport) -> list[tuple]:
    """Rows for the CSV export: (case, channel, scope, mi_bits)."""
    rows = [(report.case_id, "P", "aggregate", report.mi_p),
            (report.case_id, "Q", "aggregate", report.mi_q),
            (report.case_id, "total", "aggregate", report.total)]
    for aid in sorted(report.per_appliance_p):
        rows.append((report.case_id, "P", aid, report.per_appliance_p[aid]))
        rows.append((report.case_id, "Q", aid, report.per_appliance_q[aid]))
    rows.append((report.case_id, "P", "appliance_avg", report.avg_appliance_p))
    rows.append((report.case_id, "Q", "appliance_avg", report.avg_appliance_q))
    rows.append((report.case_id, "total", "appliance_avg", report.avg_appliance_total))
    return rows


def write_mi_csv(reports: list[MiReport], path: str) -> None:
    lines = ["case,channel,scope,mi_bits"]
    for report in reports:
        for case_id, channel, scope, value in mi_report_rows(report):
            lines.append(f"{case_id},{channel},{scope},{value:.12g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
