"""Compiled whole-trial loops.

Each kernel consumes the pregenerated (T, n) vector block and the T
per-round decision uniforms, plays the trial, and returns aggregate
statistics plus optional step-level trace arrays (length T+1 with row 0
describing the initial state).

Float accumulation is strictly left to right and integer powers use binary
exponentiation, matching the numpy fallback bitwise.
"""

from __future__ import annotations

import numpy as np
from numba import njit

JIT_OPTS = dict(cache=True, nogil=True)

RULE_INIT = -1
RULE_RANDOM = 0
RULE_POTENTIAL = 1
RULE_MAJORITY = 2


@njit(**JIT_OPTS)
def _ipow(x, e):
    r = 1.0
    b = x
    while e:
        if e & 1:
            r = r * b
        b = b * b
        e >>= 1
    return r


@njit(**JIT_OPTS)
def _masked_power_phi(d, red, cn, p, invn):
    """(phi, breached): masked power potential, red coordinates at 0."""
    acc = 0.0
    nred = 0
    breached = False
    for j in range(d.shape[0]):
        if red[j]:
            nred += 1
        else:
            dj = float(d[j])
            g = cn - dj * dj
            if g <= 0.0:
                breached = True
            else:
                acc += _ipow(cn / g, p)
    if breached:
        return np.inf, True
    return acc * invn + nred * invn, False


@njit(**JIT_OPTS)
def _power_lq(d, red, vrow, cn, p, n):
    """L and Q of the masked power potential for the arriving vector."""
    L = 0.0
    Q = 0.0
    ca = 2.0 * p / (n * cn)
    cq = 4.0 * p * (p + 1) / (cn * n)
    for j in range(n):
        if red[j]:
            Q += cq
        else:
            dj = float(d[j])
            g = cn - dj * dj
            if g <= 0.0:
                return np.nan, np.nan
            s = cn / g
            L += ca * dj * _ipow(s, p + 1) * vrow[j]
            Q += cq * _ipow(s, p + 2)
    return L, Q


@njit(**JIT_OPTS)
def _greedy_candidates(d, red, vrow, cn, p, n):
    """Candidate potentials and breach counts for the +v / -v moves."""
    php = 0.0
    phm = 0.0
    bp = 0
    bm = 0
    maxp = 0
    maxm = 0
    for j in range(n):
        dpj = d[j] + vrow[j]
        dmj = d[j] - vrow[j]
        apj = dpj if dpj >= 0 else -dpj
        amj = dmj if dmj >= 0 else -dmj
        if apj > maxp:
            maxp = apj
        if amj > maxm:
            maxm = amj
        if red[j]:
            continue
        fpj = float(dpj)
        fmj = float(dmj)
        gp = cn - fpj * fpj
        gm = cn - fmj * fmj
        if gp <= 0.0:
            bp += 1
        else:
            php += _ipow(cn / gp, p)
        if gm <= 0.0:
            bm += 1
        else:
            phm += _ipow(cn / gm, p)
    return php, phm, bp, bm, maxp, maxm


@njit(**JIT_OPTS)
def _select_greedy(php, phm, bp, bm, maxp, maxm, u):
    """Returns (x, tie, breach) for the greedy comparison."""
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
            x = 1 if u < 0.5 else -1
    else:
        if maxp < maxm:
            x = 1
        elif maxm < maxp:
            x = -1
        else:
            tie = True
            x = 1 if u < 0.5 else -1
    breach = (bp if x == 1 else bm) > 0
    return x, tie, breach


@njit(**JIT_OPTS)
def _majority_vote(d, vrow, n):
    s = 0
    for j in range(n):
        if d[j] > 0:
            s -= vrow[j]
        elif d[j] < 0:
            s += vrow[j]
    return s


@njit(**JIT_OPTS)
def _apply(d, vrow, x, n):
    """Move all chips; returns the new max folded position."""
    m = 0
    for j in range(n):
        d[j] = d[j] + x * vrow[j]
        a = d[j] if d[j] >= 0 else -d[j]
        if a > m:
            m = a
    return m


@njit(**JIT_OPTS)
def run_trial(kind, v, u, d0, red0, cn, p, H, lam, ctab, stab, record):
    """Play one trial with strategy `kind`:
    0 random, 1 power greedy, 2 cosh greedy, 3 majority, 4 combined.
    """
    T, n = v.shape
    invn = 1.0 / n
    d = d0.copy()
    red = red0.copy()
    nred0 = 0
    m0 = 0
    for j in range(n):
        nred0 += red[j]
        a = d[j] if d[j] >= 0 else -d[j]
        if a > m0:
            m0 = a
    running_max = m0
    if kind == 2:
        phi = 0.0
        for j in range(n):
            a = d[j] if d[j] >= 0 else -d[j]
            phi += ctab[a]
    else:
        phi, _br = _masked_power_phi(d, red, cn, p, invn)
    phi_max = phi
    breach_count = 0
    tie_count = 0
    phase_count = 0
    red_steps = 0

    size = T + 1 if record else 0
    tx = np.zeros(size, dtype=np.int8)
    tV = np.zeros(size, dtype=np.int64)
    tphi = np.zeros(size, dtype=np.float64)
    tL = np.zeros(size, dtype=np.float64)
    tQ = np.zeros(size, dtype=np.float64)
    trule = np.zeros(size, dtype=np.int8)
    if record:
        tV[0] = m0
        tphi[0] = phi
        trule[0] = RULE_INIT

    for t in range(T):
        vrow = v[t]
        ut = u[t]
        L = 0.0
        Q = 0.0
        tie = False
        step_breach = False

        if kind == 0:
            rule = RULE_RANDOM
            x = 1 if ut < 0.5 else -1
            m = _apply(d, vrow, x, n)
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            step_breach = br
        elif kind == 1:
            rule = RULE_POTENTIAL
            if record:
                L, Q = _power_lq(d, red, vrow, cn, p, n)
            php, phm, bp, bm, maxp, maxm = _greedy_candidates(d, red, vrow, cn, p, n)
            x, tie, step_breach = _select_greedy(php, phm, bp, bm, maxp, maxm, ut)
            m = _apply(d, vrow, x, n)
            if step_breach:
                phi = np.inf
            else:
                phi = (php if x == 1 else phm) * invn + nred0 * invn
        elif kind == 2:
            rule = RULE_POTENTIAL
            php = 0.0
            phm = 0.0
            for j in range(n):
                dpj = d[j] + vrow[j]
                dmj = d[j] - vrow[j]
                php += ctab[dpj if dpj >= 0 else -dpj]
                phm += ctab[dmj if dmj >= 0 else -dmj]
            if record:
                acc = 0.0
                for j in range(n):
                    a = d[j] if d[j] >= 0 else -d[j]
                    sgn = 1.0 if d[j] > 0 else (-1.0 if d[j] < 0 else 0.0)
                    acc += sgn * stab[a] * vrow[j]
                L = lam * acc
                Q = lam * lam * phi
            if php < phm:
                x = 1
            elif phm < php:
                x = -1
            else:
                tie = True
                x = 1 if ut < 0.5 else -1
            m = _apply(d, vrow, x, n)
            phi = php if x == 1 else phm
        elif kind == 3:
            rule = RULE_MAJORITY
            s = _majority_vote(d, vrow, n)
            if s > 0:
                x = 1
            elif s < 0:
                x = -1
            else:
                tie = True
                x = 1 if ut < 0.5 else -1
            m = _apply(d, vrow, x, n)
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            step_breach = br
        else:
            # combined: odd rounds masked power greedy, even rounds majority
            if (t + 1) % 2 == 1:
                rule = RULE_POTENTIAL
                if record:
                    L, Q = _power_lq(d, red, vrow, cn, p, n)
                php, phm, bp, bm, maxp, maxm = _greedy_candidates(d, red, vrow, cn, p, n)
                x, tie, step_breach = _select_greedy(php, phm, bp, bm, maxp, maxm, ut)
            else:
                rule = RULE_MAJORITY
                s = _majority_vote(d, vrow, n)
                if s > 0:
                    x = 1
                elif s < 0:
                    x = -1
                else:
                    tie = True
                    x = 1 if ut < 0.5 else -1
            m = _apply(d, vrow, x, n)
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            if br:
                step_breach = True
            # recolor: red chips at 0 turn green, then phase reset if phi > H
            for j in range(n):
                if red[j] and d[j] == 0:
                    red[j] = 0
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            if br or phi > H:
                for j in range(n):
                    red[j] = 1
                phase_count += 1
                phi, br = _masked_power_phi(d, red, cn, p, invn)
            nred = 0
            for j in range(n):
                nred += red[j]
            if nred > 0:
                red_steps += 1

        if m > running_max:
            running_max = m
        if step_breach:
            breach_count += 1
        if tie:
            tie_count += 1
        if phi > phi_max:
            phi_max = phi
        if record:
            tx[t + 1] = x
            tV[t + 1] = m
            tphi[t + 1] = phi
            tL[t + 1] = L
            tQ[t + 1] = Q
            trule[t + 1] = rule

    final_V = 0
    for j in range(n):
        a = d[j] if d[j] >= 0 else -d[j]
        if a > final_V:
            final_V = a
    return (
        d,
        red,
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
    )


@njit(**JIT_OPTS)
def run_majority_tail(v, u, d0, hist_from, hist_size):
    """Majority-rule trial that accumulates a folded-position histogram over
    steps t >= hist_from and the one-step displacement of nonzero chips."""
    T, n = v.shape
    d = d0.copy()
    hist = np.zeros(hist_size, dtype=np.int64)
    vmax = 0
    ties = 0
    drift_sum = 0.0
    drift_count = 0
    for t in range(T):
        vrow = v[t]
        s = _majority_vote(d, vrow, n)
        if s > 0:
            x = 1
        elif s < 0:
            x = -1
        else:
            ties += 1
            x = 1 if u[t] < 0.5 else -1
        for j in range(n):
            old = d[j] if d[j] >= 0 else -d[j]
            d[j] = d[j] + x * vrow[j]
            a = d[j] if d[j] >= 0 else -d[j]
            if a > vmax:
                vmax = a
            if old != 0:
                drift_sum += a - old
                drift_count += 1
        if t >= hist_from:
            for j in range(n):
                a = d[j] if d[j] >= 0 else -d[j]
                if a < hist_size:
                    hist[a] += 1
    return d, vmax, ties, drift_sum, drift_count, hist
