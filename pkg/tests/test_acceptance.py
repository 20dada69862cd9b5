"""End-to-end acceptance battery.

One test per acceptance criterion. Each test prints a single
``ACCEPTANCE PASS/FAIL: <criterion>`` line (visible with ``pytest -s``;
``pytest -v`` shows the same verdict per test name) and then asserts.

Monte-Carlo thresholds were frozen after one calibration run
(scripts/calibrate.py reproduces them); the deterministic criteria use
exact or 1e-12 tolerances.
"""

import math

import numpy as np
import pytest

from signbalance.game import StrategyParams, new_game, probe_rng, trial_inputs
from signbalance.harness import (
    ExperimentConfig,
    cosh_drift_probe,
    drift_probe,
    inject_state,
    majority_tail_probe,
    run_experiment,
    run_trial,
    scaling_sweep,
)
from signbalance.oracles import (
    all_ones_interval_fraction,
    offline_optimum,
    pz_enumerate,
    spread_enumerate,
    taylor_bound_sweep,
)
from signbalance.potential import CQ, power_potential
from signbalance.verify import check_class_bound, check_greedy_dominance, check_parity


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status}: {name}{suffix}", flush=True)
    assert ok, f"{name}{suffix}"


# --- exact invariants (deterministic, fast) ---------------------------------


def test_initial_potential_is_one():
    params = StrategyParams()
    worst = 0.0
    for n in range(1, 1025):
        worst = max(worst, abs(power_potential(new_game(n, params)) - 1.0))
    _verdict("fresh-state potential equals 1 for n in 1..1024", worst <= 1e-12, f"max dev {worst:.2e}")


def test_parity_invariant():
    res = check_parity(trajectories=100)
    _verdict("position parity d_j == t (mod 2) on 100 trajectories", res.ok, res.detail)


def test_greedy_dominance_every_step():
    res = check_greedy_dominance(trajectories=100)
    _verdict("greedy picks the smaller-potential sign on 100 trajectories", res.ok, res.detail)


def test_class_count_bound():
    res = check_class_bound(states=10_000)
    _verdict("class-count bound on 10^4 states under the cap", res.ok, res.detail)


def test_taylor_bound_full_sweep():
    params = StrategyParams()
    checked = 0
    for n in (16, 64):
        total, failures = taylor_bound_sweep(params.c, n, params.p)
        checked += total
        if failures:
            _verdict("second-order expansion bound sweep at n in {16, 64}", False,
                     f"n={n} failures {failures[:3]}")
    _verdict("second-order expansion bound sweep at n in {16, 64}", True, f"{checked} points")


# --- enumeration oracles ----------------------------------------------------


def test_pz_fraction_tight_and_random():
    tight = pz_enumerate([1.0, 1.0, 1.0])
    if tight.fraction != 0.25:
        _verdict("anti-concentration fraction >= 1/4", False, f"tight case {tight.fraction}")
    rng = probe_rng(53, 6)
    worst = 1.0
    for _ in range(1000):
        m = int(rng.integers(1, 17))
        a = rng.normal(size=m) * 3.0
        a[np.abs(a) < 1e-9] = 1.0
        worst = min(worst, pz_enumerate(a).fraction)
    _verdict("anti-concentration fraction >= 1/4 (tight case + 10^3 vectors, m <= 16)",
             worst >= 0.25, f"tight exact, min fraction {worst:.4f}")


def test_spread_all_ones_maximal():
    rng = probe_rng(59, 7)
    for i in range(1000):
        m = int(rng.integers(1, 13))
        a = 1.0 + rng.exponential(size=m) * 2.0
        a *= rng.choice([-1.0, 1.0], size=m)
        S = float(rng.uniform(0.5, 2.0) * math.sqrt(m))
        frac = spread_enumerate(a, S).fraction
        best = all_ones_interval_fraction(m, S)
        if frac > best + 1e-12:
            _verdict("all-ones weights maximize interval mass (10^3 vectors, m <= 12)",
                     False, f"vector {i}: {frac} > {best}")
    _verdict("all-ones weights maximize interval mass (10^3 vectors, m <= 12)", True)


def test_online_value_dominates_offline_optimum():
    checked = 0
    for seed in range(100):
        for n in range(1, 7):
            for T in range(1, 13):
                v, _ = trial_inputs(seed, 0, n, T)
                best = offline_optimum(v)
                for strat in ("power_greedy", "majority", "combined"):
                    cfg = ExperimentConfig(strategy=strat, n=[n], T=[T], trials=1, seed=seed)
                    res, _ = run_trial(cfg, 0)
                    checked += 1
                    if res.final_V < best:
                        _verdict("online value >= offline optimum (n <= 6, T <= 12, 100 seeds)",
                                 False, f"{strat} n={n} T={T} seed={seed}: {res.final_V} < {best}")
    _verdict("online value >= offline optimum (n <= 6, T <= 12, 100 seeds)",
             True, f"{checked} instances")


# --- drift probes (Monte-Carlo, 10^4 samples, 3-sigma tolerances) -----------


@pytest.mark.parametrize("n", [64, 256])
def test_power_drift_probe(n):
    params = StrategyParams()
    d = math.floor(0.8 * math.sqrt(params.c * n))
    state = inject_state(np.full(n, d), params=params)
    rep = drift_probe(state, samples=10_000, seed=0)
    cap = CQ * n ** (-1.0 + 2.0 / params.p)
    ok = (
        params.H / 2 <= rep.phi <= params.H
        and rep.mean_delta_phi < 0.0
        and rep.max_delta_phi <= cap
        and rep.p_large_L >= 0.23
    )
    _verdict(
        f"near-cap drift probe at n={n}",
        ok,
        f"phi={rep.phi:.2f} E[dphi]={rep.mean_delta_phi:.2e} "
        f"max={rep.max_delta_phi:.2e}<={cap:.2e} P(|L|>=10Q)={rep.p_large_L:.4f}",
    )


@pytest.mark.parametrize("n", [64, 256])
def test_cosh_drift_probe(n):
    params = StrategyParams()
    d = math.ceil(math.acosh(2.0) / params.lam(n))
    state = inject_state(np.full(n, d), params=params)
    rep = cosh_drift_probe(state, samples=10_000, seed=0)
    ok = rep.phi >= 2 * n and rep.p_large_L >= 0.23
    _verdict(
        f"exponential-potential drift probe at n={n}",
        ok,
        f"phi={rep.phi:.1f}>={2 * n} P(|L|>=6Q)={rep.p_large_L:.4f}",
    )


# --- scaling ----------------------------------------------------------------

_SCALING_NS = [64, 256, 1024]


def _spread(vals):
    return (max(vals) - min(vals)) / min(vals)


def test_scaling_power_greedy():
    cfg = ExperimentConfig(strategy="power_greedy", n=_SCALING_NS, trials=200, seed=7, c=5.0)
    summary = scaling_sweep(cfg)
    medians = [cell.final_V["median"] for cell in summary.cells]
    ratios = [m / math.sqrt(n) for m, n in zip(medians, _SCALING_NS)]
    breaches = sum(r.breach_count for rows in summary.results.values() for r in rows)
    ok = _spread(ratios) < 0.25 and breaches == 0
    _verdict(
        "greedy median V scales like sqrt(n) with zero gap breaches",
        ok,
        f"medians {medians} spread {_spread(ratios):.1%} breaches {breaches}",
    )
    assert medians == [10.0, 22.0, 48.0]  # frozen regression values, seed 7


def test_scaling_random_baseline():
    cfg = ExperimentConfig(strategy="random", n=_SCALING_NS, trials=200, seed=7, c=5.0)
    summary = scaling_sweep(cfg)
    medians = [cell.final_V["median"] for cell in summary.cells]
    r_sqrt = [m / math.sqrt(n) for m, n in zip(medians, _SCALING_NS)]
    r_nlogn = [m / math.sqrt(n * math.log(n)) for m, n in zip(medians, _SCALING_NS)]
    ok = all(a < b for a, b in zip(r_sqrt, r_sqrt[1:])) and _spread(r_nlogn) < 0.25
    _verdict(
        "random baseline grows like sqrt(n log n), not sqrt(n)",
        ok,
        f"V/sqrt(n) {['%.3f' % r for r in r_sqrt]} "
        f"V/sqrt(n log n) spread {_spread(r_nlogn):.1%}",
    )


# --- arbitrary horizon ------------------------------------------------------


def test_majority_tail_bounded_and_geometric():
    n, T = 32, 100_000
    rep = majority_tail_probe(n, T, trials=20, seed=0)
    cap = 8.0 * math.sqrt(n) * math.log(n)
    ok = rep.max_position <= cap and rep.slope < 0.0 and rep.r_squared >= 0.9
    _verdict(
        "majority rule: bounded folded positions with geometric tail",
        ok,
        f"max {rep.max_position} <= {cap:.1f}, slope {rep.slope:.4f}, R^2 {rep.r_squared:.4f}",
    )


def test_combined_value_flat_in_horizon():
    medians = {}
    reds = []
    for T in (10_000, 1_000_000):
        cfg = ExperimentConfig(strategy="combined", n=[32], T=[T], trials=15, seed=0)
        summary = run_experiment(cfg)
        medians[T] = summary.cells[0].running_max_V["median"]
        reds.extend(r.red_time_fraction for r in summary.results[(32, T)])
    ratio = medians[1_000_000] / medians[10_000]
    ok = ratio <= 1.25 and all(f < 0.01 for f in reds)
    _verdict(
        "combined strategy: value flat from T=10^4 to 10^6, recovery time negligible",
        ok,
        f"medians {medians[10_000]} -> {medians[1_000_000]} ratio {ratio:.3f}, "
        f"max red fraction {max(reds):.2e}",
    )


# --- reproducibility --------------------------------------------------------


def test_reproducibility_byte_identical(tmp_path):
    def run(tag, workers):
        out = tmp_path / tag
        cfg = ExperimentConfig(
            strategy="power_greedy", n=[64], T=[256], trials=16, seed=5,
            workers=workers, out_dir=str(out),
        )
        run_experiment(cfg)
        return (out / "summary.json").read_bytes()

    a = run("a", 1)
    b = run("b", 1)
    c = run("c", 8)
    ok = a == b == c
    _verdict("byte-identical summaries across reruns and 1 vs 8 workers", ok,
             f"{len(a)} bytes")
