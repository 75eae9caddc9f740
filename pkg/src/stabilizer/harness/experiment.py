"""Unmitigated / static / adaptive comparison under drifting noise.

Seeds come from ``SeedSequence(root, spawn_key=...)`` keyed by what a draw is
for, never by how many draws came before, so runs are reproducible in
isolation. The drift realization of run ``r`` is keyed by ``r`` alone and is
therefore shared by all arms, which makes per-run comparisons paired.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..exceptions import StabilizerError
from ..inference import MapEstimate, PriorSpec, infer_register, sequential_prior_update
from ..metrics import StabilityReport, hellinger, stability_report
from ..mitigation import compensation_offsets, invert_readout
from ..noise import ErrorParams, sample_drift
from ..simulator import counts_to_distribution, execute, ideal_distribution
from .config import ARMS, ExperimentConfig

logger = logging.getLogger(__name__)

ARM_IDS = {"unmitigated": 1, "static": 2, "adaptive": 3}
_DRIFT_STREAM = 0

PHASE_EXECUTE = 0
PHASE_PROBE = 1
PHASE_INFER = 2


def derive_seed(root: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(root, spawn_key=tuple(int(k) for k in key))


def _rng(root, *key):
    return np.random.default_rng(derive_seed(root, *key))


def drift_for_run(config: ExperimentConfig, run: int) -> list[ErrorParams]:
    return sample_drift(config.drift, _rng(config.seed, _DRIFT_STREAM, run))


@dataclass
class RunRecord:
    arm: str
    run: int
    hellinger: Optional[float]
    true_params: list
    map_params: Optional[list] = None
    acceptance: Optional[list] = None
    error: str = ""


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    reports: dict = field(default_factory=dict)

    def distances(self, arm: str) -> list:
        return [r.hellinger for r in self.records if r.arm == arm]

    def paired_wins(self, better: str = "adaptive", than: str = "unmitigated") -> int:
        a = {r.run: r.hellinger for r in self.records if r.arm == better}
        b = {r.run: r.hellinger for r in self.records if r.arm == than}
        return sum(
            1 for run in a
            if run in b and a[run] is not None and b[run] is not None and a[run] < b[run]
        )


def _score(config, counts):
    return hellinger(counts_to_distribution(counts), ideal_distribution(config.n))


def run_unmitigated(config: ExperimentConfig, run: int) -> float:
    """Execute once without compensation or post-processing."""
    noise = drift_for_run(config, run)
    counts = execute(noise, [0.0] * config.n, config.shots,
                     _rng(config.seed, ARM_IDS["unmitigated"], run, PHASE_EXECUTE))
    return _score(config, counts)


def _static_params(config):
    means = config.drift_means
    return [ErrorParams(float(m[0]), float(m[1]), float(m[2])) for m in means]


def run_static(config: ExperimentConfig, run: int) -> float:
    """Compensate and mitigate with the configured (true-mean) parameters."""
    noise = drift_for_run(config, run)
    reference = _static_params(config)
    counts = execute(noise, compensation_offsets(reference), config.shots,
                     _rng(config.seed, ARM_IDS["static"], run, PHASE_EXECUTE))
    mitigated = invert_readout(counts_to_distribution(counts), reference)
    return hellinger(mitigated, ideal_distribution(config.n))


def initial_prior(config: ExperimentConfig) -> PriorSpec:
    if config.prior == "configured":
        return PriorSpec.from_drift(config.drift)
    return PriorSpec.uniform(config.n)


def run_adaptive(
    config: ExperimentConfig,
    run: int,
    prior: Optional[PriorSpec] = None,
    estimator: Optional[Callable] = None,
):
    """Probe, infer, re-execute with compensation, then invert readout.

    Both executions of the run see the same drifted parameters. ``estimator``
    replaces MCMC inference; it is called as ``estimator(counts, prior, seed,
    noise)`` and must return a MapEstimate.

    Returns
    -------
    (distance, MapEstimate, PriorSpec)
        The prior for the next run is the sequential update in ``sequential``
        mode and ``prior`` unchanged otherwise.
    """
    if prior is None:
        prior = initial_prior(config)
    noise = drift_for_run(config, run)
    arm = ARM_IDS["adaptive"]
    probe = execute(noise, [0.0] * config.n, config.shots,
                    _rng(config.seed, arm, run, PHASE_PROBE))
    seed = derive_seed(config.seed, arm, run, PHASE_INFER)
    if estimator is None:
        est = infer_register(probe, prior, config.chain, seed)
    else:
        est = estimator(probe, prior, seed, noise)
    counts = execute(noise, compensation_offsets(est), config.shots,
                     _rng(config.seed, arm, run, PHASE_EXECUTE))
    mitigated = invert_readout(counts_to_distribution(counts), est.params)
    distance = hellinger(mitigated, ideal_distribution(config.n))
    next_prior = prior
    if config.prior == "sequential" and est.chains:
        next_prior = sequential_prior_update(est.chains)
    return distance, est, next_prior


def oracle_estimator(counts, prior, seed, noise) -> MapEstimate:
    """Test hook: report the true drifted parameters as the MAP estimate."""
    n = len(noise)
    return MapEstimate(tuple(noise), (1.0,) * n, (0.0,) * n)


def run_experiment(config: ExperimentConfig, estimator: Optional[Callable] = None) -> ExperimentResult:
    """Run every configured arm ``config.runs`` times.

    A run that fails (for example a singular readout estimate) becomes a
    record with an error message; the remaining runs still execute.
    """
    records = []
    for arm in ARMS:
        if arm not in config.arms:
            continue
        prior = initial_prior(config)
        for run in range(config.runs):
            noise = drift_for_run(config, run)
            rec = RunRecord(arm, run, None, noise)
            try:
                if arm == "unmitigated":
                    rec.hellinger = run_unmitigated(config, run)
                elif arm == "static":
                    rec.hellinger = run_static(config, run)
                else:
                    rec.hellinger, est, prior = run_adaptive(config, run, prior, estimator)
                    rec.map_params = list(est.params)
                    rec.acceptance = list(est.acceptance)
            except (StabilizerError, ValueError, ArithmeticError) as exc:
                logger.warning("%s run %d failed: %s", arm, run, exc)
                rec.error = f"{type(exc).__name__}: {exc}"
            records.append(rec)
    reports = {}
    for arm in config.arms:
        ok = [r.hellinger for r in records if r.arm == arm and r.hellinger is not None]
        if ok:
            reports[arm] = stability_report(ok)
    return ExperimentResult(config, records, reports)
