"""Monte-Carlo harness: seeded trials, experiment grids, probes, and the
CSV/JSON output formats.

Determinism contract: a trial is fully determined by (seed, trial_index) and
the cell parameters.  Trials are independent substreams, so parallel
execution and trial-count extensions never change existing rows, and
aggregation sorts by trial index so summaries are schedule independent.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backends
from .game import (
    GREEN,
    RED,
    GameState,
    StrategyParams,
    new_game,
    probe_rng,
    trial_inputs,
)
from .potential import CQ, cosh_potential, cosh_table, power_potential, sinh_table
from .strategies import canonical_kind

KIND_CODES = {"random": 0, "power_greedy": 1, "cosh_greedy": 2, "majority": 3, "combined": 4}
TRACE_LEVELS = ("none", "summary", "full")

RULE_NAMES = {-1: "init", 0: "random", 1: "1", 2: "2"}


@dataclass
class ExperimentConfig:
    strategy: str
    n: list[int]
    T: list[int] | None = None  # None: horizon equals n per cell
    trials: int = 100
    seed: int = 0
    c: float = StrategyParams().c
    p: int = StrategyParams().p
    H: float = StrategyParams().H
    c_cosh: float = StrategyParams().c_cosh
    workers: int = 1
    trace: str = "summary"
    out_dir: str | None = None

    def __post_init__(self) -> None:
        self.strategy = canonical_kind(self.strategy)
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(v) for v in self.n]
        if any(v < 1 for v in self.n):
            raise ValueError("n must be >= 1")
        if self.T is not None:
            if isinstance(self.T, int):
                self.T = [self.T]
            self.T = [int(v) for v in self.T]
            if any(v < 1 for v in self.T):
                raise ValueError("T must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.trace not in TRACE_LEVELS:
            raise ValueError(f"trace must be one of {TRACE_LEVELS}")

    def params(self) -> StrategyParams:
        return StrategyParams(c=self.c, p=self.p, H=self.H, c_cosh=self.c_cosh, seed=self.seed)

    def cells(self) -> list[tuple[int, int]]:
        if self.T is None:
            return [(n, n) for n in self.n]
        return [(n, T) for n in self.n for T in self.T]

    def identity(self) -> dict:
        """Experiment-defining fields echoed into outputs.  Execution details
        (workers, trace level, paths) are excluded so parallelism cannot
        change output bytes."""
        return {
            "strategy": self.strategy,
            "n": list(self.n),
            "T": list(self.T) if self.T is not None else None,
            "trials": self.trials,
            "seed": self.seed,
            "c": self.c,
            "p": self.p,
            "H": self.H,
            "c_cosh": self.c_cosh,
        }


@dataclass
class TrialResult:
    trial_index: int
    n: int
    T: int
    final_V: int
    running_max_V: int
    phi_max: float
    breach_count: int
    tie_count: int
    phase_count: int
    red_time_fraction: float
    wall_time: float


@dataclass
class TraceArrays:
    x: np.ndarray
    V: np.ndarray
    phi: np.ndarray
    L: np.ndarray
    Q: np.ndarray
    rule: np.ndarray


def run_trial(
    config: ExperimentConfig,
    trial_index: int,
    cell: tuple[int, int] | None = None,
    initial_state: GameState | None = None,
    record_trace: bool = False,
    backend: str | None = None,
) -> tuple[TrialResult, TraceArrays | None]:
    """Play one seeded trial of the configured strategy on one cell.

    The strategy never sees T: the kernels consume the pregenerated input
    block one round at a time and carry no horizon information.
    """
    n, T = cell if cell is not None else config.cells()[0]
    params = config.params()
    kind = KIND_CODES[config.strategy]
    v, u = trial_inputs(config.seed, trial_index, n, T)
    if initial_state is not None:
        if initial_state.n != n:
            raise ValueError("initial state dimension does not match the cell")
        d0 = initial_state.d.astype(np.int64)
        red0 = (initial_state.colors == RED).astype(np.uint8)
    else:
        d0 = np.zeros(n, dtype=np.int64)
        red0 = np.zeros(n, dtype=np.uint8)
    lam = params.lam(n)
    if kind == KIND_CODES["cosh_greedy"]:
        top = int(np.abs(d0).max()) + T + 2
        ctab = cosh_table(lam, top)
        stab = sinh_table(lam, top)
    else:
        ctab = np.zeros(1, dtype=np.float64)
        stab = np.zeros(1, dtype=np.float64)
    kernels = backends.get_kernels(backend)
    t0 = time.perf_counter()
    (
        _d,
        _red,
        final_V,
        running_max,
        phi_max,
        breach_count,
        tie_count,
        phase_count,
        red_steps,
        tx,
        tV,
        tphi,
        tL,
        tQ,
        trule,
    ) = kernels.run_trial(
        kind, v, u, d0, red0, params.c * n, params.p, params.H, lam, ctab, stab, record_trace
    )
    wall = time.perf_counter() - t0
    result = TrialResult(
        trial_index=trial_index,
        n=n,
        T=T,
        final_V=int(final_V),
        running_max_V=int(running_max),
        phi_max=float(phi_max),
        breach_count=int(breach_count),
        tie_count=int(tie_count),
        phase_count=int(phase_count),
        red_time_fraction=(red_steps / T) if T > 0 else 0.0,
        wall_time=wall,
    )
    trace = TraceArrays(x=tx, V=tV, phi=tphi, L=tL, Q=tQ, rule=trule) if record_trace else None
    return result, trace


def _quantiles(vals: np.ndarray) -> dict:
    qs = np.quantile(vals, [0.0, 0.25, 0.5, 0.75, 0.95, 1.0])
    return {
        "min": float(qs[0]),
        "q25": float(qs[1]),
        "median": float(qs[2]),
        "q75": float(qs[3]),
        "q95": float(qs[4]),
        "max": float(qs[5]),
    }


def _mean_stderr(vals: np.ndarray) -> dict:
    # n=1 cells divide by sqrt(n log n) = 0; keep the non-finite ratios out of
    # the moment computation instead of letting numpy warn about inf - inf.
    with np.errstate(invalid="ignore"):
        mean = float(np.mean(vals))
        stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return {"mean": _jsonable(mean), "stderr": _jsonable(stderr)}


def _jsonable(x: float):
    return x if math.isfinite(x) else None


@dataclass
class CellSummary:
    n: int
    T: int
    strategy: str
    trials: int
    final_V: dict
    running_max_V: dict
    v_over_sqrt_n: dict
    v_over_sqrt_nlogn: dict
    breach_total: int
    tie_total: int
    phase_total: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "T": self.T,
            "strategy": self.strategy,
            "trials": self.trials,
            "final_V": self.final_V,
            "running_max_V": self.running_max_V,
            "v_over_sqrt_n": self.v_over_sqrt_n,
            "v_over_sqrt_nlogn": self.v_over_sqrt_nlogn,
            "breach_total": self.breach_total,
            "tie_total": self.tie_total,
            "phase_total": self.phase_total,
        }


@dataclass
class ExperimentSummary:
    config: dict
    cells: list[CellSummary]
    results: dict = field(default_factory=dict, repr=False)  # (n, T) -> list[TrialResult]

    def to_dict(self) -> dict:
        return {"config": self.config, "cells": [c.to_dict() for c in self.cells]}


def summarize_cell(config: ExperimentConfig, n: int, T: int, results: list[TrialResult]) -> CellSummary:
    results = sorted(results, key=lambda r: r.trial_index)
    fv = np.array([r.final_V for r in results], dtype=np.float64)
    rv = np.array([r.running_max_V for r in results], dtype=np.float64)
    sqrt_n = math.sqrt(n)
    nlogn = n * math.log(n)
    ratio1 = fv / sqrt_n
    ratio2 = fv / math.sqrt(nlogn) if nlogn > 0 else np.full_like(fv, np.inf)
    return CellSummary(
        n=n,
        T=T,
        strategy=config.strategy,
        trials=len(results),
        final_V=_quantiles(fv),
        running_max_V=_quantiles(rv),
        v_over_sqrt_n=_mean_stderr(ratio1),
        v_over_sqrt_nlogn=_mean_stderr(ratio2),
        breach_total=sum(r.breach_count for r in results),
        tie_total=sum(r.tie_count for r in results),
        phase_total=sum(r.phase_count for r in results),
    )


def run_experiment(config: ExperimentConfig, backend: str | None = None) -> ExperimentSummary:
    """Run every cell x trial, aggregate, and (when out_dir is set) write
    summary.json plus per-trial and trace CSVs per the trace level."""
    cells = config.cells()
    all_results: dict[tuple[int, int], list[TrialResult]] = {}
    traces: dict[tuple[int, int], TraceArrays] = {}

    def one(cell: tuple[int, int], i: int):
        record = config.trace == "full" or (config.trace == "summary" and i == 0)
        return run_trial(config, i, cell=cell, record_trace=record, backend=backend)

    for cell in cells:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                pairs = list(pool.map(lambda i: one(cell, i), range(config.trials)))
        else:
            pairs = [one(cell, i) for i in range(config.trials)]
        results = [r for r, _ in pairs]
        all_results[cell] = results
        if config.trace != "none":
            tr = pairs[0][1]
            if tr is not None:
                traces[cell] = tr
    summaries = [summarize_cell(config, n, T, all_results[(n, T)]) for (n, T) in cells]
    summary = ExperimentSummary(config=config.identity(), cells=summaries, results=all_results)
    if config.out_dir is not None:
        write_experiment_outputs(Path(config.out_dir), config, summary, traces)
    return summary


def scaling_sweep(config: ExperimentConfig, backend: str | None = None) -> ExperimentSummary:
    """run_experiment for a grid with at least three n values; sweep.csv rows
    are derived from the same per-trial results as summary.json."""
    if len(config.n) < 3:
        raise ValueError("scaling sweep needs at least 3 n values")
    return run_experiment(config, backend=backend)


# ---------------------------------------------------------------------------
# injected states and probes


def inject_state(
    d_values,
    colors=None,
    params: StrategyParams | None = None,
    allow_breach: bool = False,
) -> GameState:
    """Build a synthetic state (exempt from trajectory invariants).  Positions
    at or past the gap boundary need allow_breach=True."""
    params = params or StrategyParams()
    d = np.asarray(d_values, dtype=np.int64)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("d_values must be a nonempty 1-d array")
    n = d.size
    boundary = math.sqrt(params.c * n)
    if not allow_breach and np.any(np.abs(d) >= boundary):
        raise ValueError("|d_j| >= sqrt(c*n) requires allow_breach=True")
    if colors is None:
        col = np.full(n, GREEN, dtype=np.uint8)
    else:
        col = np.asarray(colors, dtype=np.uint8)
        if col.shape != (n,):
            raise ValueError("colors must match d_values in length")
    return GameState(n=n, t=0, d=d, colors=col, params=params, synthetic=True)


@dataclass
class DriftReport:
    n: int
    samples: int
    phi: float
    Q: float
    mean_delta_phi: float
    max_delta_phi: float
    p_large_L: float
    p_large_L_vs_bound: float
    threshold: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "phi": self.phi,
            "Q": self.Q,
            "mean_delta_phi": self.mean_delta_phi,
            "max_delta_phi": self.max_delta_phi,
            "p_large_L": self.p_large_L,
            "p_large_L_vs_bound": self.p_large_L_vs_bound,
            "threshold": self.threshold,
        }


def drift_probe(
    state: GameState,
    samples: int = 10_000,
    seed: int = 0,
    multiplier: float = 10.0,
) -> DriftReport:
    """Sample fresh vectors at a fixed state with potential in [H/2, H]; record
    the greedy one-step potential change and how often |L| clears
    multiplier * Q."""
    params = state.params
    n = state.n
    cn = params.c * n
    p = params.p
    phi0 = power_potential(state)
    if not (params.H / 2 <= phi0 <= params.H):
        raise ValueError(f"probe contract: potential {phi0:.4g} outside [H/2, H]")
    green = state.colors == GREEN
    d_eff = np.where(green, state.d, 0).astype(np.float64)
    g = cn - d_eff * d_eff
    s = cn / g
    a = (2.0 * p / (n * cn)) * d_eff * s ** (p + 1)
    a[~green] = 0.0
    qj = (4.0 * p * (p + 1) / (params.c * n * n)) * s ** (p + 2)
    Q = float(qj.sum())
    rng = probe_rng(seed, 1)
    v = (2 * rng.integers(0, 2, size=(samples, n), dtype=np.int8) - 1).astype(np.float64)
    L = v @ a
    dp = d_eff[None, :] + v
    dm = d_eff[None, :] - v
    mask = green[None, :]
    php = np.where(mask, (cn / (cn - dp * dp)) ** p, 1.0).sum(axis=1) / n
    phm = np.where(mask, (cn / (cn - dm * dm)) ** p, 1.0).sum(axis=1) / n
    delta = np.minimum(php, phm) - phi0
    bound = multiplier * CQ * float(n) ** (-1.0 + 2.0 / p)
    return DriftReport(
        n=n,
        samples=samples,
        phi=float(phi0),
        Q=Q,
        mean_delta_phi=float(delta.mean()),
        max_delta_phi=float(delta.max()),
        p_large_L=float((np.abs(L) >= multiplier * Q).mean()),
        p_large_L_vs_bound=float((np.abs(L) >= bound).mean()),
        threshold=multiplier,
    )


def cosh_drift_probe(state: GameState, samples: int = 10_000, seed: int = 0) -> DriftReport:
    """Same shape of probe for the cosh potential: requires potential >= 2n and
    measures how often |L| >= (c_cosh / 2) * Q with Q = lam^2 * potential."""
    params = state.params
    n = state.n
    lam = params.lam(n)
    phi0 = cosh_potential(state)
    if phi0 < 2 * n:
        raise ValueError(f"probe contract: cosh potential {phi0:.4g} < 2n")
    Q = lam * lam * phi0
    folded = np.abs(state.d)
    stab = sinh_table(lam, int(folded.max()) + 1)
    sinh_d = np.sign(state.d).astype(np.float64) * stab[folded]
    rng = probe_rng(seed, 2)
    v = (2 * rng.integers(0, 2, size=(samples, n), dtype=np.int8) - 1).astype(np.float64)
    L = lam * (v @ sinh_d)
    ctab = cosh_table(lam, int(folded.max()) + 2)
    php = ctab[np.abs(state.d[None, :] + v.astype(np.int64))].sum(axis=1)
    phm = ctab[np.abs(state.d[None, :] - v.astype(np.int64))].sum(axis=1)
    delta = np.minimum(php, phm) - phi0
    thr = (params.c_cosh / 2.0) * Q
    return DriftReport(
        n=n,
        samples=samples,
        phi=float(phi0),
        Q=float(Q),
        mean_delta_phi=float(delta.mean()),
        max_delta_phi=float(delta.max()),
        p_large_L=float((np.abs(L) >= thr).mean()),
        p_large_L_vs_bound=float((np.abs(L) >= thr).mean()),
        threshold=params.c_cosh / 2.0,
    )


@dataclass
class TailReport:
    n: int
    T: int
    trials: int
    max_position: int
    slope: float
    intercept: float
    r_squared: float
    drift_mean: float
    positions: np.ndarray
    counts: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "T": self.T,
            "trials": self.trials,
            "max_position": self.max_position,
            "slope": _jsonable(self.slope),
            "intercept": _jsonable(self.intercept),
            "r_squared": _jsonable(self.r_squared),
            "drift_mean": self.drift_mean,
        }


def majority_tail_probe(
    n: int,
    T: int,
    trials: int = 20,
    seed: int = 0,
    hist_size: int = 4096,
    backend: str | None = None,
) -> TailReport:
    """Run majority-rule trials long enough to mix (T >= 100 n), histogram the
    folded positions over the second half, and fit the log-frequency tail."""
    if T < 100 * n:
        raise ValueError("tail probe needs T >= 100 * n")
    kernels = backends.get_kernels(backend)
    hist = np.zeros(hist_size, dtype=np.int64)
    vmax = 0
    drift_sum = 0.0
    drift_count = 0
    for i in range(trials):
        v, u = trial_inputs(seed, i, n, T)
        d0 = np.zeros(n, dtype=np.int64)
        _d, m, _ties, ds, dc, h = kernels.run_majority_tail(v, u, d0, T // 2, hist_size)
        hist += h
        vmax = max(vmax, int(m))
        drift_sum += ds
        drift_count += dc
    positions = np.nonzero(hist)[0]
    fit_pos = positions[positions >= 1]
    if fit_pos.size >= 2:
        y = np.log(hist[fit_pos].astype(np.float64))
        slope, intercept = np.polyfit(fit_pos.astype(np.float64), y, 1)
        yhat = slope * fit_pos + intercept
        ss_res = float(((y - yhat) ** 2).sum())
        ss_tot = float(((y - y.mean()) ** 2).sum())
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    else:
        slope, intercept, r2 = float("nan"), float("nan"), float("nan")
    return TailReport(
        n=n,
        T=T,
        trials=trials,
        max_position=vmax,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r2),
        drift_mean=(drift_sum / drift_count) if drift_count else 0.0,
        positions=positions,
        counts=hist[positions],
    )


# ---------------------------------------------------------------------------
# output files


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def config_comment(identity: dict, **extra) -> str:
    d = dict(identity)
    d.update(extra)
    return "# config: " + json.dumps(d, sort_keys=True, separators=(", ", ": "))


def write_summary_json(path: Path, summary: ExperimentSummary) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(summary.to_dict(), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="ascii")


TRIALS_HEADER = "trial_index,final_V,running_max_V,phi_max,breach_count,tie_count,phase_count,red_time_fraction"


def write_trials_csv(path: Path, results: list[TrialResult], comment: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [comment, TRIALS_HEADER]
    for r in sorted(results, key=lambda r: r.trial_index):
        lines.append(
            ",".join(
                [
                    str(r.trial_index),
                    str(r.final_V),
                    str(r.running_max_V),
                    _fmt(r.phi_max),
                    str(r.breach_count),
                    str(r.tie_count),
                    str(r.phase_count),
                    _fmt(r.red_time_fraction),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


TRACE_HEADER = "t,x,V_t,phi,L,Q,rule_used"


def write_trace_csv(path: Path, trace: TraceArrays, comment: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [comment, TRACE_HEADER]
    for t in range(trace.x.shape[0]):
        lines.append(
            ",".join(
                [
                    str(t),
                    str(int(trace.x[t])),
                    str(int(trace.V[t])),
                    _fmt(trace.phi[t]),
                    _fmt(trace.L[t]),
                    _fmt(trace.Q[t]),
                    RULE_NAMES[int(trace.rule[t])],
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


SWEEP_HEADER = "n,T,strategy,median_V,median_V_over_sqrt_n,median_V_over_sqrt_nlogn,q95_V,trials"


def sweep_rows(summary: ExperimentSummary) -> list[str]:
    rows = []
    for cell in summary.cells:
        med = cell.final_V["median"]
        nlogn = cell.n * math.log(cell.n)
        med_nlogn = med / math.sqrt(nlogn) if nlogn > 0 else math.inf
        rows.append(
            ",".join(
                [
                    str(cell.n),
                    str(cell.T),
                    cell.strategy,
                    _fmt(med),
                    _fmt(med / math.sqrt(cell.n)),
                    _fmt(med_nlogn),
                    _fmt(cell.final_V["q95"]),
                    str(cell.trials),
                ]
            )
        )
    return rows


def write_sweep_csv(path: Path, summaries: list[ExperimentSummary], comment: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [comment, SWEEP_HEADER]
    for s in summaries:
        lines.extend(sweep_rows(s))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


TAIL_HEADER = "position,count"


def write_tail_csv(path: Path, report: TailReport, comment: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [comment, TAIL_HEADER]
    for pos, cnt in zip(report.positions.tolist(), report.counts.tolist()):
        lines.append(f"{pos},{cnt}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_experiment_outputs(
    out_dir: Path,
    config: ExperimentConfig,
    summary: ExperimentSummary,
    traces: dict[tuple[int, int], TraceArrays],
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary_json(out_dir / "summary.json", summary)
    if config.trace == "none":
        return
    cells = config.cells()
    single = len(cells) == 1
    for (n, T) in cells:
        suffix = "" if single else f"_n{n}_T{T}"
        comment = config_comment(config.identity(), cell_n=n, cell_T=T)
        write_trials_csv(out_dir / f"trials{suffix}.csv", summary.results[(n, T)], comment)
        if (n, T) in traces:
            trace_comment = config_comment(config.identity(), cell_n=n, cell_T=T, trial=0)
            write_trace_csv(out_dir / f"trace{suffix}.csv", traces[(n, T)], trace_comment)
