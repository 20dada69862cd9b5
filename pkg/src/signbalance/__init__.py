"""Online vector balancing: keep the L-infinity norm of a running signed sum
of random +-1 vectors small by choosing each sign as the vector arrives.

The package bundles the game state and RNG plumbing (game), the gap/potential
functions with their drift diagnostics (potential), five signing strategies
(strategies), exact enumeration oracles (oracles), a seeded Monte-Carlo
harness (harness), and a CLI (cli).  Hot loops run through numba kernels with
a pure-numpy fallback selected by the SIGNBALANCE_BACKEND environment
variable.
"""

from .backends import backend_name, get_kernels
from .game import (
    GREEN,
    RED,
    BreachError,
    GameState,
    StrategyParams,
    apply_step,
    current_value,
    folded_positions,
    new_game,
    probe_rng,
    sample_vector,
    trial_inputs,
    trial_rng,
)
from .harness import (
    ExperimentConfig,
    ExperimentSummary,
    TrialResult,
    cosh_drift_probe,
    drift_probe,
    inject_state,
    majority_tail_probe,
    run_experiment,
    run_trial,
    scaling_sweep,
)
from .oracles import (
    EnumerationReport,
    all_ones_interval_fraction,
    offline_optimum,
    pz_enumerate,
    spread_enumerate,
    taylor_bound_check,
)
from .potential import (
    CQ,
    ClassHistogram,
    LQDiagnostics,
    class_histogram,
    class_index,
    cosh_potential,
    gap,
    lq_decomposition,
    power_potential,
)
from .strategies import KINDS, StepDiagnostics, canonical_kind, play_step, recolor

__version__ = "0.1.0"

__all__ = [
    "BreachError",
    "CQ",
    "ClassHistogram",
    "EnumerationReport",
    "ExperimentConfig",
    "ExperimentSummary",
    "GREEN",
    "GameState",
    "KINDS",
    "LQDiagnostics",
    "RED",
    "StepDiagnostics",
    "StrategyParams",
    "TrialResult",
    "all_ones_interval_fraction",
    "apply_step",
    "backend_name",
    "canonical_kind",
    "class_histogram",
    "class_index",
    "cosh_drift_probe",
    "cosh_potential",
    "current_value",
    "drift_probe",
    "folded_positions",
    "gap",
    "get_kernels",
    "inject_state",
    "lq_decomposition",
    "majority_tail_probe",
    "new_game",
    "offline_optimum",
    "play_step",
    "power_potential",
    "probe_rng",
    "pz_enumerate",
    "recolor",
    "run_experiment",
    "run_trial",
    "sample_vector",
    "scaling_sweep",
    "spread_enumerate",
    "taylor_bound_check",
    "trial_inputs",
    "trial_rng",
]
