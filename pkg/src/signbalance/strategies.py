"""Online sign-choosing rules.

Every rule sees only the current state and the arriving vector; none knows
the horizon.  Exact ties (bitwise-equal candidate potentials, or a tied
majority vote) are broken by the caller-supplied stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GREEN, RED, GameState, RngStream, StrategyParams, apply_step
from .potential import cosh_table, ipow, lq_decomposition, power_potential, seqsum, sinh_table

KINDS = ("random", "power_greedy", "cosh_greedy", "majority", "combined")

# rule_used codes as written to traces
RULE_RANDOM = 0
RULE_POTENTIAL = 1
RULE_MAJORITY = 2


@dataclass
class StepDiagnostics:
    x: int
    delta_phi: float = 0.0
    L: float = 0.0
    Q: float = 0.0
    tie: bool = False
    breach: bool = False
    recolored: bool = False
    rule_used: int = RULE_RANDOM


def canonical_kind(name: str) -> str:
    aliases = {"power": "power_greedy", "cosh": "cosh_greedy"}
    kind = aliases.get(name, name)
    if kind not in KINDS:
        raise ValueError(f"unknown strategy {name!r}; expected one of {', '.join(KINDS)}")
    return kind


def _tie_sign(rng: RngStream) -> int:
    return 1 if rng.random() < 0.5 else -1


def _masked_phi_candidates(state: GameState, v: np.ndarray, c: float, p: int):
    """Candidate masked potentials after moving +v and -v.

    Returns (phi_plus, phi_minus, breach_plus, breach_minus, max_abs_plus,
    max_abs_minus).  Potentials are the bare green sums; the constant red
    contribution is identical on both sides and irrelevant to the choice.
    """
    n = state.n
    cn = c * n
    green = state.colors == GREEN
    dp = (state.d + v).astype(np.float64)
    dm = (state.d - v).astype(np.float64)
    gp = cn - dp * dp
    gm = cn - dm * dm
    bp = int(np.count_nonzero(gp[green] <= 0.0))
    bm = int(np.count_nonzero(gm[green] <= 0.0))
    php = seqsum(ipow(cn / gp[green & (gp > 0.0)], p)) if bp == 0 else math.inf
    phm = seqsum(ipow(cn / gm[green & (gm > 0.0)], p)) if bm == 0 else math.inf
    return php, phm, bp, bm, float(np.abs(dp).max()), float(np.abs(dm).max())


def _greedy_select(php, phm, bp, bm, maxp, maxm, rng: RngStream):
    """Pick the sign with the smaller candidate potential.  Breached
    candidates are infinite; double breaches compare (breach count, max |d|)."""
    tie = False
    if bp != bm:
        x = 1 if bp < bm else -1
    elif bp == 0:
        if php < phm:
            x = 1
        elif phm < php:
            x = -1
        else:
            tie = True
            x = _tie_sign(rng)
    else:
        if maxp < maxm:
            x = 1
        elif maxm < maxp:
            x = -1
        else:
            tie = True
            x = _tie_sign(rng)
    breach = (bp if x == 1 else bm) > 0
    return x, tie, breach


def choose_sign_random(rng: RngStream) -> int:
    return _tie_sign(rng)


def choose_sign_power_greedy(
    state: GameState, v: np.ndarray, params: StrategyParams, rng: RngStream
) -> tuple[int, StepDiagnostics]:
    php, phm, bp, bm, maxp, maxm = _masked_phi_candidates(state, v, params.c, params.p)
    x, tie, breach = _greedy_select(php, phm, bp, bm, maxp, maxm, rng)
    n_red = int(np.count_nonzero(state.colors == RED))
    phi_before = power_potential(state, params.c, params.p)
    chosen = php if x == 1 else phm
    phi_after = chosen * (1.0 / state.n) + n_red * (1.0 / state.n) if not breach else math.inf
    diag = StepDiagnostics(x=x, tie=tie, breach=breach, rule_used=RULE_POTENTIAL)
    diag.delta_phi = phi_after - phi_before
    if not breach and phi_before != math.inf:
        lq = lq_decomposition(state, v, params.c, params.p)
        diag.L, diag.Q = lq.L, lq.Q
    return x, diag


def choose_sign_cosh_greedy(
    state: GameState, v: np.ndarray, params: StrategyParams, rng: RngStream
) -> tuple[int, StepDiagnostics]:
    lam = params.lam(state.n)
    dp = state.d + v.astype(np.int64)
    dm = state.d - v.astype(np.int64)
    top = int(max(np.abs(dp).max(), np.abs(dm).max(), np.abs(state.d).max())) + 1
    ctab = cosh_table(lam, top)
    stab = sinh_table(lam, top)
    php = seqsum(ctab[np.abs(dp)])
    phm = seqsum(ctab[np.abs(dm)])
    tie = False
    if php < phm:
        x = 1
    elif phm < php:
        x = -1
    else:
        tie = True
        x = _tie_sign(rng)
    folded = np.abs(state.d)
    phi_before = seqsum(ctab[folded])
    diag = StepDiagnostics(x=x, tie=tie, rule_used=RULE_POTENTIAL)
    diag.delta_phi = (php if x == 1 else phm) - phi_before
    sinh_d = np.sign(state.d) * stab[folded]
    diag.L = lam * seqsum(sinh_d * v.astype(np.float64))
    diag.Q = lam * lam * phi_before
    return x, diag


def majority_vote(d: np.ndarray, v: np.ndarray) -> int:
    """Summed votes of nonzero chips; chip j wants the sign moving it toward 0."""
    votes = np.where(d > 0, -v.astype(np.int64), np.where(d < 0, v.astype(np.int64), 0))
    return int(votes.sum())


def choose_sign_majority(state: GameState, v: np.ndarray, rng: RngStream) -> tuple[int, StepDiagnostics]:
    s = majority_vote(state.d, np.asarray(v))
    tie = s == 0
    if s > 0:
        x = 1
    elif s < 0:
        x = -1
    else:
        x = _tie_sign(rng)
    return x, StepDiagnostics(x=x, tie=tie, rule_used=RULE_MAJORITY)


def choose_sign_combined(
    state: GameState, v: np.ndarray, params: StrategyParams, rng: RngStream
) -> tuple[int, StepDiagnostics]:
    """Alternate the two rules by round index (rounds count from 1):
    odd rounds run the masked power greedy, even rounds the majority rule
    over all chips."""
    round_index = state.t + 1
    if round_index % 2 == 1:
        return choose_sign_power_greedy(state, v, params, rng)
    return choose_sign_majority(state, v, rng)


def recolor(state: GameState, params: StrategyParams) -> tuple[GameState, bool, bool]:
    """Post-step recoloring for the combined strategy.

    First every red coordinate sitting at 0 turns green, then if the masked
    potential exceeds H all coordinates turn red (a new phase).  Returns
    (state, changed, phase_started).
    """
    out = state.copy()
    changed = False
    promote = (out.colors == RED) & (out.d == 0)
    if promote.any():
        out.colors[promote] = GREEN
        changed = True
    phi = power_potential(out, params.c, params.p)
    phase = phi > params.H
    if phase:
        out.colors[:] = RED
        changed = True
    return out, changed, phase


def play_step(
    state: GameState, v: np.ndarray, kind: str, params: StrategyParams, rng: RngStream
) -> tuple[GameState, StepDiagnostics]:
    """Choose a sign with the named rule, apply it, and (for combined)
    recolor.  Reference path used by tests and probes; the harness runs the
    compiled kernels instead."""
    kind = canonical_kind(kind)
    if kind == "random":
        x = choose_sign_random(rng)
        diag = StepDiagnostics(x=x, rule_used=RULE_RANDOM)
    elif kind == "power_greedy":
        x, diag = choose_sign_power_greedy(state, v, params, rng)
    elif kind == "cosh_greedy":
        x, diag = choose_sign_cosh_greedy(state, v, params, rng)
    elif kind == "majority":
        x, diag = choose_sign_majority(state, v, rng)
    else:
        x, diag = choose_sign_combined(state, v, params, rng)
    new_state = apply_step(state, v, x)
    if kind == "combined":
        new_state, changed, _ = recolor(new_state, params)
        diag.recolored = changed
    return new_state, diag
