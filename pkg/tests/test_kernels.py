"""Backend equivalence: the numba and numpy kernels must produce bit-identical
trajectories, and both must replay the pure-python reference path exactly.
"""

import numpy as np
import pytest

from signbalance import backends
from signbalance.game import RED, StrategyParams, new_game, trial_inputs
from signbalance.harness import KIND_CODES, ExperimentConfig, run_trial
from signbalance.potential import cosh_potential, cosh_table, power_potential, sinh_table
from signbalance.strategies import KINDS, play_step

pytestmark = pytest.mark.skipif(
    not backends.HAS_NUMBA, reason="numba backend unavailable; nothing to compare"
)


class ScriptedRng:
    """Feeds the kernel's per-round uniform draw into the reference path."""

    def __init__(self):
        self.value = 0.5

    def random(self) -> float:
        return self.value


@pytest.mark.parametrize("kind", KINDS)
def test_backends_bitwise_identical(kind):
    cfg = ExperimentConfig(strategy=kind, n=[24], T=[300], trials=3, seed=29)
    for i in range(3):
        res_np, tr_np = run_trial(cfg, i, record_trace=True, backend="numpy")
        res_nb, tr_nb = run_trial(cfg, i, record_trace=True, backend="numba")
        assert res_np == res_nb or _results_equal(res_np, res_nb)
        for field in ("x", "V", "phi", "L", "Q", "rule"):
            a, b = getattr(tr_np, field), getattr(tr_nb, field)
            assert np.array_equal(a, b, equal_nan=False), (kind, i, field)


def _results_equal(a, b) -> bool:
    # wall_time legitimately differs; everything else must match exactly
    keys = (
        "trial_index",
        "n",
        "T",
        "final_V",
        "running_max_V",
        "phi_max",
        "breach_count",
        "tie_count",
        "phase_count",
        "red_time_fraction",
    )
    return all(getattr(a, k) == getattr(b, k) for k in keys)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
@pytest.mark.parametrize("kind", KINDS)
def test_kernel_matches_reference_replay(kind, backend):
    """Replay each kernel round through the pure-python strategy path using
    the same pregenerated inputs; every state, sign, potential, and rule code
    must agree bitwise."""
    params = StrategyParams()
    n, T, seed, trial = 8, 48, 51, 0
    cfg = ExperimentConfig(strategy=kind, n=[n], T=[T], trials=1, seed=seed)
    result, trace = run_trial(cfg, trial, record_trace=True, backend=backend)
    v, u = trial_inputs(seed, trial, n, T)

    rng = ScriptedRng()
    state = new_game(n, params)
    ties = 0
    red_steps = 0
    phi_fn = cosh_potential if kind == "cosh_greedy" else power_potential
    assert trace.phi[0] == phi_fn(state)
    assert trace.V[0] == 0 and trace.rule[0] == -1
    for t in range(T):
        rng.value = u[t]
        state, diag = play_step(state, v[t], kind, params, rng)
        ties += int(diag.tie)
        if np.any(state.colors == RED):
            red_steps += 1
        assert trace.x[t + 1] == diag.x, (kind, backend, t)
        assert trace.V[t + 1] == int(np.abs(state.d).max())
        assert trace.rule[t + 1] == diag.rule_used
        assert trace.phi[t + 1] == phi_fn(state), (kind, backend, t)
        if kind == "power_greedy":
            assert trace.L[t + 1] == diag.L
            assert trace.Q[t + 1] == diag.Q
    assert result.final_V == int(np.abs(state.d).max())
    assert result.tie_count == ties
    assert result.breach_count == 0
    if kind == "combined":
        assert result.red_time_fraction == red_steps / T


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_trace_zero_row_contract(backend):
    cfg = ExperimentConfig(strategy="power_greedy", n=[6], T=[10], trials=1, seed=1)
    _, trace = run_trial(cfg, 0, record_trace=True, backend=backend)
    assert trace.x.shape == (11,)
    assert trace.x[0] == 0
    assert trace.V[0] == 0
    assert trace.phi[0] == 1.0
    assert trace.L[0] == 0.0 and trace.Q[0] == 0.0
    assert trace.rule[0] == -1


def test_majority_tail_kernel_backend_equality():
    n, T = 16, 2000
    v, u = trial_inputs(3, 0, n, T)
    d0 = np.zeros(n, dtype=np.int64)
    out_np = backends.get_kernels("numpy").run_majority_tail(v, u, d0.copy(), T // 2, 256)
    out_nb = backends.get_kernels("numba").run_majority_tail(v, u, d0.copy(), T // 2, 256)
    d_a, m_a, ties_a, ds_a, dc_a, h_a = out_np
    d_b, m_b, ties_b, ds_b, dc_b, h_b = out_nb
    assert np.array_equal(d_a, d_b)
    assert m_a == m_b and ties_a == ties_b
    assert ds_a == ds_b and dc_a == dc_b
    assert np.array_equal(h_a, h_b)
    # histogram covers every chip at every sampled step
    assert h_a.sum() == (T - T // 2) * n


def test_cosh_tables_agree_across_backends():
    # the table is the only transcendental surface shared by the kernels;
    # both backends must read the very same float64 values
    lam = StrategyParams().lam(64)
    ctab = cosh_table(lam, 128)
    stab = sinh_table(lam, 128)
    assert ctab.dtype == np.float64 and stab.dtype == np.float64
    assert ctab[0] == 1.0 and stab[0] == 0.0
    assert np.all(np.diff(ctab) > 0)


def test_backend_selection(monkeypatch):
    assert backends.backend_name("numpy") == "numpy"
    assert backends.backend_name("numba") == "numba"
    monkeypatch.setenv(backends.ENV_VAR, "numpy")
    assert backends.backend_name() == "numpy"
    monkeypatch.delenv(backends.ENV_VAR)
    assert backends.backend_name() == "numba"
    with pytest.raises(ValueError):
        backends.backend_name("fortran")
    monkeypatch.setenv(backends.ENV_VAR, "fortran")
    with pytest.raises(ValueError):
        backends.backend_name()
