"""Pure-numpy fallback for the compiled kernels.

Same API and bit-identical results: sums are sequential (cumsum), integer
powers use the same binary exponentiation, and cosh values come from the
shared lookup table.  Selected by setting SIGNBALANCE_BACKEND=numpy.
"""

from __future__ import annotations

import numpy as np

from .potential import ipow, seqsum

RULE_INIT = -1
RULE_RANDOM = 0
RULE_POTENTIAL = 1
RULE_MAJORITY = 2


def _masked_power_phi(d, red, cn, p, invn):
    green = red == 0
    df = d[green].astype(np.float64)
    g = cn - df * df
    if np.any(g <= 0.0):
        return np.inf, True
    acc = seqsum(ipow(cn / g, p))
    nred = int(d.shape[0] - np.count_nonzero(green))
    return acc * invn + nred * invn, False


def _power_lq(d, red, vrow, cn, p, n):
    green = red == 0
    df = d.astype(np.float64)
    g = cn - df * df
    if np.any(g[green] <= 0.0):
        return np.nan, np.nan
    ca = 2.0 * p / (n * cn)
    cq = 4.0 * p * (p + 1) / (cn * n)
    s = np.where(green, cn / np.where(green, g, 1.0), 1.0)
    lj = ca * df * ipow(s, p + 1) * vrow.astype(np.float64)
    L = seqsum(lj[green])
    qj = np.where(green, cq * ipow(s, p + 2), cq)
    Q = seqsum(qj)
    return L, Q


def _greedy_candidates(d, red, vrow, cn, p, n):
    dp = d + vrow.astype(np.int64)
    dm = d - vrow.astype(np.int64)
    fp = dp.astype(np.float64)
    fm = dm.astype(np.float64)
    gp = cn - fp * fp
    gm = cn - fm * fm
    green = red == 0
    bp = int(np.count_nonzero(green & (gp <= 0.0)))
    bm = int(np.count_nonzero(green & (gm <= 0.0)))
    php = seqsum(ipow(cn / gp[green & (gp > 0.0)], p))
    phm = seqsum(ipow(cn / gm[green & (gm > 0.0)], p))
    maxp = int(np.abs(dp).max())
    maxm = int(np.abs(dm).max())
    return php, phm, bp, bm, maxp, maxm


def _select_greedy(php, phm, bp, bm, maxp, maxm, u):
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


def _majority_vote(d, vrow):
    v64 = vrow.astype(np.int64)
    votes = np.where(d > 0, -v64, np.where(d < 0, v64, 0))
    return int(votes.sum())


def _cosh_phi(d, ctab):
    return seqsum(ctab[np.abs(d)])


def run_trial(kind, v, u, d0, red0, cn, p, H, lam, ctab, stab, record):
    """Mirror of the compiled run_trial; see kernels_numba.run_trial."""
    T, n = v.shape
    invn = 1.0 / n
    d = d0.astype(np.int64).copy()
    red = red0.copy()
    nred0 = int(np.count_nonzero(red))
    m0 = int(np.abs(d).max())
    running_max = m0
    if kind == 2:
        phi = _cosh_phi(d, ctab)
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
            d += x * vrow.astype(np.int64)
            m = int(np.abs(d).max())
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            step_breach = br
        elif kind == 1:
            rule = RULE_POTENTIAL
            if record:
                L, Q = _power_lq(d, red, vrow, cn, p, n)
            php, phm, bp, bm, maxp, maxm = _greedy_candidates(d, red, vrow, cn, p, n)
            x, tie, step_breach = _select_greedy(php, phm, bp, bm, maxp, maxm, ut)
            d += x * vrow.astype(np.int64)
            m = int(np.abs(d).max())
            if step_breach:
                phi = np.inf
            else:
                phi = (php if x == 1 else phm) * invn + nred0 * invn
        elif kind == 2:
            rule = RULE_POTENTIAL
            dp = d + vrow.astype(np.int64)
            dm = d - vrow.astype(np.int64)
            php = _cosh_phi(dp, ctab)
            phm = _cosh_phi(dm, ctab)
            if record:
                sinh_d = np.sign(d).astype(np.float64) * stab[np.abs(d)]
                L = lam * seqsum(sinh_d * vrow.astype(np.float64))
                Q = lam * lam * phi
            if php < phm:
                x = 1
            elif phm < php:
                x = -1
            else:
                tie = True
                x = 1 if ut < 0.5 else -1
            d = dp if x == 1 else dm
            m = int(np.abs(d).max())
            phi = php if x == 1 else phm
        elif kind == 3:
            rule = RULE_MAJORITY
            s = _majority_vote(d, vrow)
            if s > 0:
                x = 1
            elif s < 0:
                x = -1
            else:
                tie = True
                x = 1 if ut < 0.5 else -1
            d += x * vrow.astype(np.int64)
            m = int(np.abs(d).max())
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            step_breach = br
        else:
            if (t + 1) % 2 == 1:
                rule = RULE_POTENTIAL
                if record:
                    L, Q = _power_lq(d, red, vrow, cn, p, n)
                php, phm, bp, bm, maxp, maxm = _greedy_candidates(d, red, vrow, cn, p, n)
                x, tie, step_breach = _select_greedy(php, phm, bp, bm, maxp, maxm, ut)
            else:
                rule = RULE_MAJORITY
                s = _majority_vote(d, vrow)
                if s > 0:
                    x = 1
                elif s < 0:
                    x = -1
                else:
                    tie = True
                    x = 1 if ut < 0.5 else -1
            d += x * vrow.astype(np.int64)
            m = int(np.abs(d).max())
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            if br:
                step_breach = True
            red[(red == 1) & (d == 0)] = 0
            phi, br = _masked_power_phi(d, red, cn, p, invn)
            if br or phi > H:
                red[:] = 1
                phase_count += 1
                phi, br = _masked_power_phi(d, red, cn, p, invn)
            if np.any(red == 1):
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

    final_V = int(np.abs(d).max())
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


def run_majority_tail(v, u, d0, hist_from, hist_size):
    """Mirror of kernels_numba.run_majority_tail."""
    T, n = v.shape
    d = d0.astype(np.int64).copy()
    hist = np.zeros(hist_size, dtype=np.int64)
    vmax = 0
    ties = 0
    drift_sum = 0.0
    drift_count = 0
    for t in range(T):
        vrow = v[t]
        s = _majority_vote(d, vrow)
        if s > 0:
            x = 1
        elif s < 0:
            x = -1
        else:
            ties += 1
            x = 1 if u[t] < 0.5 else -1
        old = np.abs(d)
        d += x * vrow.astype(np.int64)
        folded = np.abs(d)
        m = int(folded.max())
        if m > vmax:
            vmax = m
        nz = old != 0
        drift_sum += float((folded[nz] - old[nz]).sum())
        drift_count += int(np.count_nonzero(nz))
        if t >= hist_from:
            np.add.at(hist, folded[folded < hist_size], 1)
    return d, vmax, ties, drift_sum, drift_count, hist
