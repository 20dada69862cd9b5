"""Potentials over game states and their first/second order move bounds.

The power potential for gap g = c*n - d^2 is accumulated per coordinate in
the normalized form ((c*n)/g)**p / n, which keeps magnitudes near 1 and
makes the fresh-state value exactly the sum of n copies of 1/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GREEN, BreachError, GameState, StrategyParams

# Largest per-step quadratic bound Q over states with power potential <= H,
# divided by n**(-1+2/p).  Calibrated once over synthetic states at
# n in {16..1024} (see scripts/calibrate.py); the supremum is attained by
# concentrating the whole potential budget on one coordinate.
CQ = 0.6

# Gap threshold (in units of sqrt(c*n), plus an absolute constant) above
# which the one-step Taylor bound below is valid for unit moves.  Verified
# by exhaustive scan in scripts/calibrate.py; at factor 4 the bound is
# violated for moves toward the boundary, at 10 it holds with margin.
TAYLOR_GAP_FACTOR = 10.0


def ipow(x, e: int):
    """x**e for integer e >= 0 by binary exponentiation.

    Works elementwise on arrays.  Both kernel backends use the same
    multiplication sequence so results agree bitwise.
    """
    if e < 0:
        raise ValueError("e must be >= 0")
    r = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    b = x
    while e:
        if e & 1:
            r = r * b
        b = b * b
        e >>= 1
    return r


def seqsum(a: np.ndarray) -> float:
    """Strict left-to-right float sum (matches a scalar accumulation loop)."""
    if a.size == 0:
        return 0.0
    return float(np.cumsum(a)[-1])


def cosh_table(lam: float, size: int) -> np.ndarray:
    """cosh(lam * k) for integer positions k in [0, size).

    Built with scalar libm cosh so the compiled and fallback kernels read
    identical values (vectorized cosh differs in the last ulp).
    """
    out = np.empty(size, dtype=np.float64)
    for k in range(size):
        out[k] = math.cosh(lam * k)
    return out


def sinh_table(lam: float, size: int) -> np.ndarray:
    out = np.empty(size, dtype=np.float64)
    for k in range(size):
        out[k] = math.sinh(lam * k)
    return out


def gap(d, c: float, n: int) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    return c * n - d * d


def _counted(state: GameState) -> np.ndarray:
    return state.colors == GREEN


def power_potential(state: GameState, c: float | None = None, p: int | None = None) -> float:
    """Masked power potential: green coordinates at their true position,
    red coordinates at 0.  Infinite if any counted gap is <= 0."""
    c = state.params.c if c is None else c
    p = state.params.p if p is None else p
    n = state.n
    cn = c * n
    green = _counted(state)
    g = gap(state.d[green], c, n)
    if np.any(g <= 0.0):
        return math.inf
    acc = seqsum(ipow(cn / g, p))
    n_red = int(n - green.sum())
    return acc * (1.0 / n) + n_red * (1.0 / n)


def cosh_potential(state: GameState, lam: float | None = None) -> float:
    lam = state.params.lam(state.n) if lam is None else lam
    folded = np.abs(state.d)
    tab = cosh_table(lam, int(folded.max()) + 1)
    return seqsum(tab[folded])


@dataclass
class LQDiagnostics:
    """Linear and quadratic pieces of the one-step potential change bound
    delta_phi <= L * x + Q."""

    L: float
    Q: float
    a: np.ndarray
    per_class_Q: dict[int, float]


def lq_decomposition(state: GameState, v: np.ndarray, c: float | None = None, p: int | None = None) -> LQDiagnostics:
    """First/second order decomposition of the masked power potential.

    Red coordinates contribute 0 to L and their g = c*n baseline value to Q.
    Raises BreachError if any counted gap is <= 0.
    """
    c = state.params.c if c is None else c
    p = state.params.p if p is None else p
    n = state.n
    cn = c * n
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"vector length {v.shape} does not match n={n}")
    green = _counted(state)
    d_eff = np.where(green, state.d, 0).astype(np.float64)
    g = cn - d_eff * d_eff
    if np.any(g[green] <= 0.0):
        raise BreachError("counted gap <= 0; potential is infinite")
    s = cn / g
    a = (2.0 * p / (n * cn)) * d_eff * ipow(s, p + 1)
    a[~green] = 0.0
    qj = (4.0 * p * (p + 1) / (c * n * n)) * ipow(s, p + 2)
    L = seqsum(a * v)
    Q = seqsum(qj)
    per_class: dict[int, float] = {}
    ks = class_index(g, c, n, beta=1.0 + 1.0 / p)
    for k, q in zip(ks.tolist(), qj.tolist()):
        per_class[k] = per_class.get(k, 0.0) + q
    return LQDiagnostics(L=L, Q=Q, a=a, per_class_Q=per_class)


def class_index(g, c: float, n: int, beta: float):
    """Dyadic-style class of a gap: class k collects gaps in
    (c*n*beta**-(k+1), c*n*beta**-k], closed on the right.

    A half-ulp nudge keeps exact right endpoints in their class despite
    float rounding in the logarithm.
    """
    g_arr = np.asarray(g, dtype=np.float64)
    cn = c * n
    if np.any(g_arr <= 0.0):
        raise BreachError("class_index requires g > 0")
    if np.any(g_arr > cn * (1.0 + 1e-12)):
        raise ValueError("class_index requires g <= c*n")
    ratio = np.log(cn / g_arr) / math.log(beta)
    k = np.maximum(np.floor(ratio + 1e-9).astype(np.int64), 0)
    if k.ndim == 0:
        return int(k)
    return k


@dataclass
class ClassHistogram:
    counts: dict[int, int]
    n: int

    def total(self) -> int:
        return sum(self.counts.values())


def class_histogram(state: GameState, c: float | None = None, p: int | None = None) -> ClassHistogram:
    """Counts of coordinates per gap class; red coordinates sit at g = c*n
    and land in class 0."""
    c = state.params.c if c is None else c
    p = state.params.p if p is None else p
    n = state.n
    green = _counted(state)
    d_eff = np.where(green, state.d, 0).astype(np.float64)
    g = c * n - d_eff * d_eff
    if np.any(g <= 0.0):
        raise BreachError("class_histogram requires all counted gaps > 0")
    ks = class_index(g, c, n, beta=1.0 + 1.0 / p)
    counts: dict[int, int] = {}
    for k in np.atleast_1d(ks).tolist():
        counts[k] = counts.get(k, 0) + 1
    return ClassHistogram(counts=counts, n=n)


def class_count_bound(k: int, n: int, p: int, H: float) -> float:
    """Upper bound on the class-k population whenever the potential is <= H."""
    beta = 1.0 + 1.0 / p
    return min(float(n), n * beta ** (-k * p) * H)
