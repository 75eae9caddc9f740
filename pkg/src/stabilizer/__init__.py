"""Adaptive stabilization of circuits under drifting readout and rotation noise."""

from .estimators import ChannelEstimator, ReadoutMitigator
from .exceptions import (
    ConfigError,
    FitError,
    InvalidDriftSpecError,
    MitigationSingularError,
    StabilizerError,
)
from .inference import (
    Chain,
    ChainConfig,
    MapEstimate,
    PriorSpec,
    infer_register,
    log_likelihood,
    log_posterior,
    log_prior,
    map_estimate,
    metropolis_hastings,
    sequential_prior_update,
    zero_count,
)
from .metrics import StabilityReport, bhattacharyya, hellinger, stability_report
from .mitigation import ConfusionMatrix, compensation_offsets, confusion_matrix, invert_readout
from .noise import (
    BetaSpec,
    DriftModel,
    ErrorParams,
    beta_from_mean_std,
    fit_beta_moments,
    sample_drift,
)
from .simulator import (
    OutcomeDistribution,
    ShotCounts,
    counts_to_distribution,
    execute,
    ideal_distribution,
    p_zero,
)

__version__ = "0.1.0"
