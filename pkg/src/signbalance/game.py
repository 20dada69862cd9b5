"""Core game state for online sign balancing.

A game tracks the running position vector d after a sequence of rounds.
In round t a vector v with +-1 entries arrives, the player picks a sign x,
and every coordinate moves: d[j] += x * v[j].  The quantity of interest is
V = max_j |d[j]|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

GREEN = 0
RED = 1

DEFAULT_C = 1.0e5
DEFAULT_P = 4
DEFAULT_H = 4.0 * math.e**3
DEFAULT_C_COSH = 12.0


class BreachError(ValueError):
    """Raised when a computation requires positive gaps but a counted gap is <= 0."""


@dataclass(frozen=True)
class StrategyParams:
    """Parameters shared by the potential-based strategies.

    beta and gamma are exact functions of p; lam depends on the active
    dimension and is exposed as a method.
    """

    c: float = DEFAULT_C
    p: int = DEFAULT_P
    H: float = DEFAULT_H
    c_cosh: float = DEFAULT_C_COSH
    seed: int = 0

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be > 0")
        if self.p < 2 or int(self.p) != self.p:
            raise ValueError("p must be an integer >= 2")
        if self.H <= 1:
            raise ValueError("H must be > 1")
        if self.c_cosh <= 0:
            raise ValueError("c_cosh must be > 0")

    @property
    def beta(self) -> float:
        return 1.0 + 1.0 / self.p

    @property
    def gamma(self) -> float:
        return 1.0 - 2.0 / self.p

    def lam(self, n: int) -> float:
        return 1.0 / (self.c_cosh * math.sqrt(n))


@dataclass
class GameState:
    """Position vector plus bookkeeping.

    colors marks coordinates GREEN (counted by masked potentials) or RED
    (frozen at position 0 for potential purposes).  synthetic marks states
    built by injection; those are exempt from the parity and |d| <= t
    trajectory invariants.
    """

    n: int
    t: int
    d: np.ndarray
    colors: np.ndarray
    params: StrategyParams = field(default_factory=StrategyParams)
    synthetic: bool = False

    def copy(self) -> "GameState":
        return replace(self, d=self.d.copy(), colors=self.colors.copy())


RngStream = np.random.Generator


def new_game(n: int, params: StrategyParams | None = None) -> GameState:
    if n < 1:
        raise ValueError("n must be >= 1")
    if params is None:
        params = StrategyParams()
    d = np.zeros(n, dtype=np.int64)
    colors = np.full(n, GREEN, dtype=np.uint8)
    return GameState(n=n, t=0, d=d, colors=colors, params=params)


def trial_rng(seed: int, trial_index: int) -> RngStream:
    """Independent substream for one trial, keyed by (seed, trial_index)."""
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial_index)]))


def probe_rng(seed: int, tag: int) -> RngStream:
    """Substream for probes, kept disjoint from trial substreams by a tag namespace."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), 0x9E3779B9, int(tag)]))


def sample_vector(rng: RngStream, n: int) -> np.ndarray:
    """One uniform +-1 vector; consumes a fixed amount of stream state."""
    return (2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1).astype(np.int8)


def trial_inputs(seed: int, trial_index: int, n: int, T: int) -> tuple[np.ndarray, np.ndarray]:
    """All randomness one trial consumes, in a fixed documented order.

    First the (T, n) block of +-1 vectors is drawn, then T uniforms.  The
    uniform for round t is the round's decision draw: the random strategy
    reads its sign from it and the others use it to break exact ties.
    Consuming it unconditionally keeps the stream layout independent of the
    trajectory.
    """
    rng = trial_rng(seed, trial_index)
    v = (2 * rng.integers(0, 2, size=(T, n), dtype=np.int8) - 1).astype(np.int8)
    u = rng.random(T)
    return v, u


def apply_step(state: GameState, v: np.ndarray, x: int) -> GameState:
    if x not in (-1, 1):
        raise ValueError("x must be -1 or +1")
    v = np.asarray(v)
    if v.shape != (state.n,):
        raise ValueError(f"vector length {v.shape} does not match n={state.n}")
    d = state.d + int(x) * v.astype(np.int64)
    return replace(state, d=d, t=state.t + 1, colors=state.colors.copy())


def current_value(state: GameState) -> int:
    return int(np.abs(state.d).max())


def folded_positions(state: GameState) -> np.ndarray:
    """Chip positions in the folded view (distance from the origin)."""
    return np.abs(state.d)
