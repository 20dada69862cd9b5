import json
import math

import numpy as np
import pytest

from signbalance.game import GREEN, StrategyParams, new_game
from signbalance.harness import (
    ExperimentConfig,
    TrialResult,
    config_comment,
    cosh_drift_probe,
    drift_probe,
    inject_state,
    majority_tail_probe,
    run_experiment,
    run_trial,
    scaling_sweep,
    summarize_cell,
    sweep_rows,
    write_sweep_csv,
)
from signbalance.potential import CQ, cosh_potential, power_potential
from signbalance.strategies import KINDS


def test_config_validation():
    with pytest.raises(ValueError, match="n must be >= 1"):
        ExperimentConfig(strategy="random", n=[0])
    with pytest.raises(ValueError, match="T must be >= 1"):
        ExperimentConfig(strategy="random", n=[4], T=[0])
    with pytest.raises(ValueError, match="trials"):
        ExperimentConfig(strategy="random", n=[4], trials=0)
    with pytest.raises(ValueError, match="unknown strategy"):
        ExperimentConfig(strategy="frobnicate", n=[4])
    with pytest.raises(ValueError, match="trace"):
        ExperimentConfig(strategy="random", n=[4], trace="everything")


def test_config_cells_default_horizon():
    cfg = ExperimentConfig(strategy="random", n=[4, 8])
    assert cfg.cells() == [(4, 4), (8, 8)]
    cfg = ExperimentConfig(strategy="random", n=[4, 8], T=[16, 32])
    assert cfg.cells() == [(4, 16), (4, 32), (8, 16), (8, 32)]


def test_config_identity_excludes_execution_details():
    cfg = ExperimentConfig(strategy="random", n=[4], workers=8, trace="full", out_dir="/tmp/x")
    ident = cfg.identity()
    assert "workers" not in ident and "trace" not in ident and "out_dir" not in ident
    assert ident["strategy"] == "random" and ident["n"] == [4]


@pytest.mark.parametrize("kind", KINDS)
def test_single_step_trial_value(kind):
    cfg = ExperimentConfig(strategy=kind, n=[1], T=[1], trials=1, seed=5)
    result, _ = run_trial(cfg, 0)
    assert result.final_V == 1
    assert result.running_max_V == 1


def test_run_trial_deterministic():
    cfg = ExperimentConfig(strategy="combined", n=[16], T=[64], trials=1, seed=9)
    a, _ = run_trial(cfg, 0)
    b, _ = run_trial(cfg, 0)
    assert a.final_V == b.final_V
    assert a.phi_max == b.phi_max
    assert a.tie_count == b.tie_count


def test_trial_result_invariants():
    cfg = ExperimentConfig(strategy="random", n=[8], T=[40], trials=20, seed=2)
    summary = run_experiment(cfg)
    for r in summary.results[(8, 40)]:
        assert r.final_V <= r.running_max_V <= r.T


def test_doubling_trials_keeps_prefix():
    base = ExperimentConfig(strategy="power_greedy", n=[8], T=[32], trials=5, seed=4)
    doubled = ExperimentConfig(strategy="power_greedy", n=[8], T=[32], trials=10, seed=4)
    rows_a = run_experiment(base).results[(8, 32)]
    rows_b = run_experiment(doubled).results[(8, 32)][:5]
    for a, b in zip(rows_a, rows_b):
        assert (a.trial_index, a.final_V, a.running_max_V, a.phi_max) == (
            b.trial_index,
            b.final_V,
            b.running_max_V,
            b.phi_max,
        )


def test_workers_do_not_change_results():
    serial = ExperimentConfig(strategy="majority", n=[8], T=[100], trials=12, seed=6, workers=1)
    threaded = ExperimentConfig(strategy="majority", n=[8], T=[100], trials=12, seed=6, workers=4)
    sa = run_experiment(serial)
    sb = run_experiment(threaded)
    assert sa.to_dict() == sb.to_dict()


def test_summary_single_trial_quantiles_collapse():
    cfg = ExperimentConfig(strategy="random", n=[4], T=[4], trials=1, seed=3)
    cell = run_experiment(cfg).cells[0]
    v = cell.final_V
    assert v["min"] == v["median"] == v["max"]
    assert cell.v_over_sqrt_n["stderr"] == 0.0


def test_summarize_cell_quantile_monotonicity():
    results = [
        TrialResult(i, 4, 4, fv, fv + 1, 1.0, 0, 0, 0, 0.0, 0.0)
        for i, fv in enumerate([0, 2, 2, 4, 6, 8])
    ]
    cell = summarize_cell(ExperimentConfig(strategy="random", n=[4]), 4, 4, results)
    q = cell.final_V
    assert q["min"] <= q["q25"] <= q["median"] <= q["q75"] <= q["q95"] <= q["max"]
    assert cell.trials == 6


def test_random_two_step_distribution():
    # n=1, T=2: the walk returns to 0 or reaches +-2 with equal probability
    cfg = ExperimentConfig(strategy="random", n=[1], T=[2], trials=10_000, seed=12)
    summary = run_experiment(cfg)
    finals = np.array([r.final_V for r in summary.results[(1, 2)]])
    assert set(np.unique(finals)) <= {0, 2}
    frac_zero = float((finals == 0).mean())
    assert abs(frac_zero - 0.5) < 0.02


def test_random_running_max_is_sqrt_nlogn_scale():
    # median running max for the random baseline sits between 1x and 3x sqrt(n ln n)
    n = 256
    cfg = ExperimentConfig(strategy="random", n=[n], T=[n], trials=200, seed=21)
    cell = run_experiment(cfg).cells[0]
    lo = math.sqrt(n * math.log(n))
    assert lo <= cell.running_max_V["median"] <= 3 * lo


def test_scaling_sweep_requires_three_sizes():
    cfg = ExperimentConfig(strategy="random", n=[4, 8], trials=2)
    with pytest.raises(ValueError, match="at least 3"):
        scaling_sweep(cfg)


def test_inject_state_all_zero_matches_new_game():
    params = StrategyParams()
    injected = inject_state([0, 0, 0], params=params)
    fresh = new_game(3, params)
    assert np.array_equal(injected.d, fresh.d)
    assert np.array_equal(injected.colors, fresh.colors)
    assert injected.synthetic and not fresh.synthetic
    assert power_potential(injected) == power_potential(fresh)


def test_inject_state_breach_gate():
    params = StrategyParams()
    boundary = math.isqrt(int(params.c * 4))
    with pytest.raises(ValueError, match="allow_breach"):
        inject_state([boundary + 1, 0, 0, 0], params=params)
    state = inject_state([boundary + 1, 0, 0, 0], params=params, allow_breach=True)
    assert power_potential(state) == math.inf


def test_inject_state_half_kappa_potential():
    params = StrategyParams()
    n = 64
    d = math.floor(0.5 * math.sqrt(params.c * n))
    state = inject_state(np.full(n, d), params=params)
    assert power_potential(state) == pytest.approx(256.0 / 81.0, rel=0.02)


def test_injected_continuation_deterministic():
    params = StrategyParams()
    state = inject_state([4, -2, 0, 6], params=params)
    cfg = ExperimentConfig(strategy="power_greedy", n=[4], T=[32], trials=1, seed=8)
    a, _ = run_trial(cfg, 0, initial_state=state)
    b, _ = run_trial(cfg, 0, initial_state=state)
    assert a.final_V == b.final_V and a.phi_max == b.phi_max
    fresh, _ = run_trial(cfg, 0)
    assert fresh.phi_max != a.phi_max  # the injected start actually mattered


def test_drift_probe_contract_errors():
    params = StrategyParams()
    with pytest.raises(ValueError, match="probe contract"):
        drift_probe(new_game(16, params), samples=10)
    with pytest.raises(ValueError, match="probe contract"):
        cosh_drift_probe(new_game(16, params), samples=10)


def test_drift_probe_reports():
    params = StrategyParams()
    n = 64
    d = math.floor(0.8 * math.sqrt(params.c * n))
    state = inject_state(np.full(n, d), params=params)
    rep = drift_probe(state, samples=4000, seed=1)
    assert params.H / 2 <= rep.phi <= params.H
    assert rep.mean_delta_phi < 0.0
    assert rep.max_delta_phi <= CQ * n ** (-0.5)
    assert rep.p_large_L >= 0.23
    assert rep.Q > 0.0
    # determinism
    rep2 = drift_probe(state, samples=4000, seed=1)
    assert rep2.p_large_L == rep.p_large_L and rep2.mean_delta_phi == rep.mean_delta_phi


def test_cosh_drift_probe_reports():
    params = StrategyParams()
    n = 64
    lam = params.lam(n)
    d = math.ceil(math.acosh(2.0) / lam)
    state = inject_state(np.full(n, d), params=params)
    rep = cosh_drift_probe(state, samples=4000, seed=1)
    assert rep.phi >= 2 * n
    assert rep.Q == lam * lam * cosh_potential(state)
    assert rep.p_large_L >= 0.23


def test_majority_tail_probe_contract_and_totals():
    with pytest.raises(ValueError, match="100"):
        majority_tail_probe(16, 100, trials=1)
    rep = majority_tail_probe(16, 1600, trials=3, seed=2)
    assert rep.counts.sum() == 3 * (1600 - 800) * 16
    assert rep.max_position >= 1
    assert rep.slope < 0.0
    assert rep.drift_mean < 0.0


def test_sweep_rows_format():
    cfg = ExperimentConfig(strategy="power_greedy", n=[4], T=[4], trials=3, seed=1)
    summary = run_experiment(cfg)
    rows = sweep_rows(summary)
    assert len(rows) == 1
    cols = rows[0].split(",")
    assert cols[0] == "4" and cols[1] == "4" and cols[2] == "power_greedy"
    assert cols[7] == "3"
    float(cols[3])  # parses


def test_write_sweep_csv_and_comment(tmp_path):
    cfg = ExperimentConfig(strategy="random", n=[4, 8, 16], trials=2, seed=0)
    summary = scaling_sweep(cfg)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, [summary], config_comment(cfg.identity()))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: {")
    assert lines[1] == "n,T,strategy,median_V,median_V_over_sqrt_n,median_V_over_sqrt_nlogn,q95_V,trials"
    assert len(lines) == 2 + 3
    embedded = json.loads(lines[0][len("# config: ") :])
    assert embedded["seed"] == 0 and embedded["n"] == [4, 8, 16]


def test_experiment_outputs_written(tmp_path):
    out = tmp_path / "exp"
    cfg = ExperimentConfig(
        strategy="combined", n=[8], T=[50], trials=4, seed=13, trace="summary", out_dir=str(out)
    )
    run_experiment(cfg)
    assert (out / "summary.json").exists()
    trials = (out / "trials.csv").read_text().splitlines()
    assert trials[1] == (
        "trial_index,final_V,running_max_V,phi_max,breach_count,tie_count,phase_count,red_time_fraction"
    )
    assert len(trials) == 2 + 4
    trace = (out / "trace.csv").read_text().splitlines()
    assert trace[1] == "t,x,V_t,phi,L,Q,rule_used"
    first = trace[2].split(",")
    assert first[0] == "0" and first[3] == "1.0" and first[6] == "init"
    assert len(trace) == 2 + 51
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["strategy"] == "combined"
    assert "workers" not in summary["config"]
