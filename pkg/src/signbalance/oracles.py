"""Exhaustive small-instance oracles.

These enumerate complete sign spaces and exist to pin down ground truth for
the Monte-Carlo harness and the test suite.  Hard size caps keep them exact;
past the caps they refuse and point at the sampling path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import TAYLOR_GAP_FACTOR

MAX_OFFLINE_T = 24
MAX_OFFLINE_N = 64
MAX_ENUM_M = 24


@dataclass(frozen=True)
class EnumerationReport:
    total: int
    hits: int
    fraction: float
    threshold: float


def offline_optimum(vectors) -> int:
    """Smallest final max-coordinate over all 2^T sign assignments.

    The global sign flip x -> -x preserves the value, so only assignments
    with x_1 = +1 are enumerated.
    """
    V = np.asarray(vectors, dtype=np.int64)
    if V.ndim != 2:
        raise ValueError("vectors must be a (T, n) array")
    T, n = V.shape
    if T < 1:
        raise ValueError("need at least one vector")
    if not np.all(np.abs(V) == 1):
        raise ValueError("vector entries must be +-1")
    if T > MAX_OFFLINE_T or n > MAX_OFFLINE_N:
        raise ValueError(
            f"instance too large for enumeration (T <= {MAX_OFFLINE_T}, n <= {MAX_OFFLINE_N}); "
            "use the sampling harness (run/sweep) instead"
        )
    Vf = V.astype(np.float64)
    total = 1 << (T - 1)
    chunk = 1 << 16
    shifts = np.arange(T - 1, dtype=np.uint64)
    best = math.inf
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.uint64)
        bits = (idx[:, None] >> shifts[None, :]) & 1
        signs = np.empty((stop - start, T), dtype=np.float64)
        signs[:, 0] = 1.0
        signs[:, 1:] = 1.0 - 2.0 * bits
        sums = signs @ Vf
        vals = np.abs(sums).max(axis=1)
        m = vals.min()
        if m < best:
            best = m
    return int(best)


def _signed_sums(weights: np.ndarray) -> np.ndarray:
    """All 2^m signed sums of the weights, by doubling."""
    sums = np.zeros(1, dtype=np.float64)
    for a in weights:
        sums = np.concatenate([sums - a, sums + a])
    return sums


def pz_enumerate(weights) -> EnumerationReport:
    """Fraction of sign patterns whose weighted sum has magnitude at least
    sqrt(sum(a^2)/2).  That fraction is at least 1/4 for every weight vector."""
    a = np.asarray(weights, dtype=np.float64).ravel()
    m = a.size
    if m < 1:
        raise ValueError("weights must be nonempty")
    if m > MAX_ENUM_M:
        raise ValueError(f"too many weights for enumeration (m <= {MAX_ENUM_M})")
    threshold = math.sqrt(float(np.sum(a * a)) / 2.0)
    sums = _signed_sums(a)
    hits = int(np.count_nonzero(np.abs(sums) >= threshold))
    total = 1 << m
    return EnumerationReport(total=total, hits=hits, fraction=hits / total, threshold=threshold)


def spread_enumerate(weights, halfwidth: float, center: float = 0.0) -> EnumerationReport:
    """Fraction of sign patterns whose weighted sum lands in the closed
    interval [center - halfwidth, center + halfwidth].

    Requires every |a_i| >= 1; among such weights the all-ones vector with a
    centered interval maximizes the fraction (see all_ones_interval_fraction).
    """
    a = np.asarray(weights, dtype=np.float64).ravel()
    m = a.size
    if m < 1:
        raise ValueError("weights must be nonempty")
    if m > MAX_ENUM_M:
        raise ValueError(f"too many weights for enumeration (m <= {MAX_ENUM_M})")
    if np.any(np.abs(a) < 1.0):
        raise ValueError("every |a_i| must be >= 1")
    if halfwidth < 0:
        raise ValueError("halfwidth must be >= 0")
    sums = _signed_sums(a)
    hits = int(np.count_nonzero((sums >= center - halfwidth) & (sums <= center + halfwidth)))
    total = 1 << m
    return EnumerationReport(total=total, hits=hits, fraction=hits / total, threshold=float(halfwidth))


def all_ones_interval_fraction(m: int, halfwidth: float) -> float:
    """Extremal fraction for spread_enumerate: the mass a best-placed closed
    interval of length 2*halfwidth can capture when all weights are 1.

    All-ones sums sit on a lattice of spacing 2, so the window covers at most
    floor(halfwidth) + 1 of them, and the unimodal binomial weights make the
    central run of that length optimal.  Comparing against a fixed window
    instead would be wrong: for odd m a window at 0 narrower than 1 captures
    nothing, yet shifted weight vectors can land sums inside it."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if halfwidth < 0:
        raise ValueError("halfwidth must be >= 0")
    r = min(int(math.floor(halfwidth)) + 1, m + 1)
    coeffs = sorted((math.comb(m, k) for k in range(m + 1)), reverse=True)
    return sum(coeffs[:r]) / (1 << m)


def taylor_bound_check(d: float, eta: float, c: float, n: int, p: int) -> bool:
    """Check the one-step bound on f(x) = (c*n - x^2)^(-p):

        f(d + eta) - f(d) <= 2*p*d*g^-(p+1)*eta + 4*p*(p+1)*c*n*g^-(p+2)

    with g = c*n - d^2, for |eta| <= 1.  Requires the gap to clear
    TAYLOR_GAP_FACTOR * (sqrt(c*n) + 1); below that the quadratic remainder
    is not controlled and the check refuses."""
    if abs(eta) > 1.0:
        raise ValueError("|eta| must be <= 1")
    cn = c * n
    g = cn - d * d
    g_after = cn - (d + eta) * (d + eta)
    if g <= 0.0 or g_after <= 0.0:
        raise ValueError("gap must stay positive")
    if g < TAYLOR_GAP_FACTOR * (math.sqrt(cn) + 1.0):
        raise ValueError(
            f"precondition violated: need c*n - d^2 >= {TAYLOR_GAP_FACTOR} * (sqrt(c*n) + 1)"
        )
    lhs = g_after ** (-p) - g ** (-p)
    rhs = 2.0 * p * d * g ** (-(p + 1)) * eta + 4.0 * p * (p + 1) * cn * g ** (-(p + 2))
    return lhs <= rhs


def taylor_bound_sweep(c: float, n: int, p: int) -> tuple[int, list[tuple[int, int]]]:
    """Run taylor_bound_check at every integer position satisfying the
    precondition, for both unit moves.  Returns (checked, failures)."""
    cn = c * n
    d_max = int(math.floor(math.sqrt(cn - TAYLOR_GAP_FACTOR * (math.sqrt(cn) + 1.0))))
    failures: list[tuple[int, int]] = []
    checked = 0
    for d in range(0, d_max + 1):
        for eta in (-1, 1):
            checked += 1
            if not taylor_bound_check(float(d), float(eta), c, n, p):
                failures.append((d, eta))
    return checked, failures
