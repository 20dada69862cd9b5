"""Deterministic self-checks: exact invariants, enumeration oracles, and the
Taylor inequality sweep.  The whole battery runs in well under a minute and is
exposed as the `verify` CLI subcommand (exit 0 iff every check passes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import (
    GameState,
    StrategyParams,
    apply_step,
    new_game,
    probe_rng,
    sample_vector,
    trial_rng,
)
from .harness import inject_state
from .oracles import offline_optimum, pz_enumerate, spread_enumerate, all_ones_interval_fraction, taylor_bound_sweep
from .potential import class_count_bound, class_histogram, power_potential
from .strategies import play_step


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def check_phi_initial() -> CheckResult:
    worst = 0.0
    for n in range(1, 1025):
        phi = power_potential(new_game(n))
        worst = max(worst, abs(phi - 1.0))
    ok = worst <= 1e-12
    return CheckResult("phi-initial-one", ok, f"max |phi(0) - 1| = {worst:.3e} over n in 1..1024")


def check_parity(trajectories: int = 20, n: int = 16, T: int = 64) -> CheckResult:
    params = StrategyParams()
    for i in range(trajectories):
        rng = trial_rng(11, i)
        state = new_game(n, params)
        for _ in range(T):
            v = sample_vector(rng, n)
            state, _diag = play_step(state, v, "random", params, rng)
            if np.any((state.d - state.t) % 2 != 0):
                return CheckResult("parity", False, f"parity broken at t={state.t} trajectory {i}")
            if np.any(np.abs(state.d) > state.t):
                return CheckResult("parity", False, f"|d| > t at t={state.t} trajectory {i}")
    return CheckResult("parity", True, f"{trajectories} trajectories, T={T}")


def check_greedy_dominance(trajectories: int = 20, n: int = 16, T: int = 32) -> CheckResult:
    params = StrategyParams()
    checked = 0
    for i in range(trajectories):
        rng = trial_rng(13, i)
        state = new_game(n, params)
        for _ in range(T):
            v = sample_vector(rng, n)
            next_state, diag = play_step(state, v, "power_greedy", params, rng)
            other = apply_step(state, v, -diag.x)
            phi_chosen = power_potential(apply_step(state, v, diag.x))
            phi_other = power_potential(other)
            if phi_chosen > phi_other:
                return CheckResult(
                    "greedy-dominance",
                    False,
                    f"chosen {phi_chosen!r} > other {phi_other!r} at t={state.t} trajectory {i}",
                )
            checked += 1
            state = next_state
    return CheckResult("greedy-dominance", True, f"{checked} steps dominated")


def _crafted_class_state(params: StrategyParams) -> GameState:
    # 590 coordinates deep in one class, rest at the origin: potential stays
    # under H while the occupied class sits near its count bound, so a
    # misplaced class boundary is guaranteed to trip the check.
    n = 1024
    d = np.zeros(n, dtype=np.int64)
    d[:590] = 8509
    return inject_state(d, params=params)


def check_class_bound(states: int = 200, induce_fault: bool = False) -> CheckResult:
    params = StrategyParams()
    rng = probe_rng(29, 3)
    checked = 0

    def verify_state(state: GameState) -> str | None:
        phi = power_potential(state)
        if not (phi <= params.H):
            return None
        hist = class_histogram(state)
        for k, n_k in sorted(hist.counts.items()):
            bound_k = k + 1 if induce_fault else k
            bound = class_count_bound(bound_k, state.n, params.p, params.H)
            if n_k > bound:
                return f"n_{k} = {n_k} exceeds bound {bound:.1f} (n={state.n}, phi={phi:.2f})"
        return None

    fail = verify_state(_crafted_class_state(params))
    if fail:
        return CheckResult("class-count bound", False, fail)
    checked += 1
    beta = params.beta
    for _ in range(states):
        n = int(rng.choice([64, 256, 1024]))
        cn = params.c * n
        k0 = int(rng.integers(0, 9))
        m = int(rng.integers(1, n + 1))
        # place m coordinates mid-class-k0, rest at 0
        g_target = cn * beta ** (-(k0 + 0.5))
        d_val = int(math.floor(math.sqrt(cn - g_target)))
        d = np.zeros(n, dtype=np.int64)
        d[:m] = d_val
        fail = verify_state(inject_state(d, params=params))
        if fail:
            return CheckResult("class-count bound", False, fail)
        checked += 1
    return CheckResult("class-count bound", True, f"{checked} states under H all within bounds")


def check_taylor() -> CheckResult:
    params = StrategyParams()
    checked, failures = taylor_bound_sweep(c=params.c, n=16, p=params.p)
    ok = not failures and checked > 0
    detail = f"{checked} (d, eta) pairs at n=16"
    if failures:
        detail = f"{len(failures)} failures, first at d={failures[0][0]}, eta={failures[0][1]}"
    return CheckResult("taylor-bound", ok, detail)


def check_pz(random_vectors: int = 100) -> CheckResult:
    tight = pz_enumerate([1.0, 1.0, 1.0])
    if tight.fraction != 0.25:
        return CheckResult("pz-enumeration", False, f"tight case fraction {tight.fraction} != 0.25")
    rng = probe_rng(31, 4)
    for _ in range(random_vectors):
        m = int(rng.integers(1, 13))
        a = rng.normal(size=m) * 3.0
        a[np.abs(a) < 1e-9] = 1.0
        rep = pz_enumerate(a)
        if rep.fraction < 0.25:
            return CheckResult("pz-enumeration", False, f"fraction {rep.fraction} < 1/4 for m={m}")
    return CheckResult("pz-enumeration", True, f"tight case exact, {random_vectors} random vectors >= 1/4")


def check_spread(random_vectors: int = 100) -> CheckResult:
    rng = probe_rng(37, 5)
    for _ in range(random_vectors):
        m = int(rng.integers(1, 11))
        a = 1.0 + rng.exponential(size=m) * 2.0
        a *= rng.choice([-1.0, 1.0], size=m)
        S = float(rng.uniform(0.5, 2.0) * math.sqrt(m))
        rep = spread_enumerate(a, S)
        best = all_ones_interval_fraction(m, S)
        if rep.fraction > best + 1e-12:
            return CheckResult(
                "spread-maximality", False, f"fraction {rep.fraction} > all-ones {best} for m={m}, S={S:.3f}"
            )
    return CheckResult("spread-maximality", True, f"{random_vectors} random vectors vs all-ones mass")


def check_offline_dominance(seeds: int = 20, n: int = 4, T: int = 8) -> CheckResult:
    params = StrategyParams()
    checked = 0
    for seed in range(seeds):
        rng = trial_rng(41, seed)
        vectors = np.stack([sample_vector(rng, n) for _ in range(T)])
        best = offline_optimum(vectors)
        for kind in ("power_greedy", "majority", "combined"):
            rng2 = trial_rng(43, seed)
            state = new_game(n, params)
            for t in range(T):
                state, _ = play_step(state, vectors[t], kind, params, rng2)
            online = int(np.abs(state.d).max())
            if online < best:
                return CheckResult(
                    "offline-dominance", False, f"{kind} V={online} < offline {best} at seed {seed}"
                )
            checked += 1
    return CheckResult("offline-dominance", True, f"{checked} strategy runs >= offline optimum")


def run_all(induce_fault: bool = False) -> list[CheckResult]:
    return [
        check_phi_initial(),
        check_parity(),
        check_greedy_dominance(),
        check_class_bound(induce_fault=induce_fault),
        check_taylor(),
        check_pz(),
        check_spread(),
        check_offline_dominance(),
    ]


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status}  {r.name.ljust(width)}  {r.detail}")
    return "\n".join(lines)
