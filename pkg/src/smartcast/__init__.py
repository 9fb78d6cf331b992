"""Predictive single-slot NACK feedback for network-coded wireless broadcast.

Analytic completion-time model, slotted simulator, and genie / NORM-like
baselines.
"""

from .analytic import (
    BetaCurve,
    ContinuousParams,
    DiscreteParams,
    SaturatedError,
    StragglerStats,
    accommodated_n,
    beta_continuous,
    beta_discrete,
    beta_hat,
    first_time_discrete,
    per_node_completion_discrete,
    regularized_upper_gamma,
    straggler_stats,
    t_star_continuous,
)
from .config import ScenarioConfig
from .sim import ExperimentSummary, TrialMetrics, run_experiment, run_paired, run_trial

__version__ = "0.1.0"
