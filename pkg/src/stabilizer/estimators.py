"""scikit-learn compatible wrappers around inference and mitigation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_counts, check_distributions, check_seed
from .inference import ChainConfig, PriorSpec, infer_register, sequential_prior_update
from .mitigation import clip_and_renormalize, compensation_offsets, invert_readout_raw
from .simulator import OutcomeDistribution, p_zero


class ChannelEstimator(BaseEstimator):
    """MAP estimate of per-qubit readout and rotation errors from shot data.

    Parameters
    ----------
    prior : {"uniform"} or PriorSpec, default="uniform"
        Beta priors over (e0, e1, e2) for every qubit.
    steps : int, default=10000
        Metropolis-Hastings steps per qubit chain.
    burn_in_fraction : float, default=0.2
    proposal_scales : tuple of float, default=(0.02, 0.02, 0.01)
    random_state : int, SeedSequence or None
    n_jobs : int or None
        Chains to run in parallel (joblib semantics).

    Attributes
    ----------
    estimate_ : MapEstimate
    params_ : tuple of ErrorParams
    acceptance_ : ndarray of shape (n_qubits,)
    n_qubits_ : int
    prior_ : PriorSpec
        Prior used by the most recent fit.
    """

    def __init__(self, prior="uniform", steps=10_000, burn_in_fraction=0.2,
                 proposal_scales=(0.02, 0.02, 0.01), random_state=None, n_jobs=None):
        self.prior = prior
        self.steps = steps
        self.burn_in_fraction = burn_in_fraction
        self.proposal_scales = proposal_scales
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _chain_config(self):
        return ChainConfig(self.steps, self.burn_in_fraction, tuple(self.proposal_scales))

    def _resolve_prior(self, n):
        if isinstance(self.prior, PriorSpec):
            if self.prior.n != n:
                raise ValueError(f"prior covers {self.prior.n} qubits, data has {n}")
            return self.prior
        if self.prior == "uniform":
            return PriorSpec.uniform(n)
        raise ValueError(f"prior must be 'uniform' or a PriorSpec, got {self.prior!r}")

    def _fit_with(self, counts, prior):
        seed = check_seed(self.random_state)
        est = infer_register(counts, prior, self._chain_config(), seed, self.n_jobs)
        self.prior_ = prior
        self.estimate_ = est
        self.params_ = est.params
        self.acceptance_ = np.asarray(est.acceptance)
        self.n_qubits_ = counts.n
        return self

    def fit(self, X, y=None):
        """Infer error parameters from one execution's outcomes.

        ``X`` is ShotCounts, a bitstring->count mapping or a (shots, n) array.
        """
        counts = check_counts(X)
        return self._fit_with(counts, self._resolve_prior(counts.n))

    def partial_fit(self, X, y=None):
        """Fit using the previous fit's posterior (moment-matched) as the prior."""
        counts = check_counts(X)
        if hasattr(self, "estimate_"):
            if counts.n != self.n_qubits_:
                raise ValueError(f"data has {counts.n} qubits, estimator was fit on {self.n_qubits_}")
            prior = sequential_prior_update(self.estimate_.chains)
        else:
            prior = self._resolve_prior(counts.n)
        return self._fit_with(counts, prior)

    def predict_proba(self, X=None):
        """Per-qubit probability of reading 0 under the fitted parameters."""
        check_is_fitted(self, "estimate_")
        return np.array([p_zero(e) for e in self.params_])

    def compensation(self):
        """Angle offsets that cancel the estimated rotation errors."""
        check_is_fitted(self, "estimate_")
        return compensation_offsets(self.estimate_)


class ReadoutMitigator(TransformerMixin, BaseEstimator):
    """Tensor-structured inverse of independent per-qubit readout channels.

    Parameters
    ----------
    error_params : sequence of ErrorParams, MapEstimate, or None
        Channel estimates; when None, ``fit`` takes them from ``y``.
    clip : bool, default=True
        Clip negative quasi-probabilities and renormalize.
    """

    def __init__(self, error_params=None, clip=True):
        self.error_params = error_params
        self.clip = clip

    def fit(self, X=None, y=None):
        params = y if self.error_params is None else self.error_params
        if params is None:
            raise ValueError("no error parameters given")
        params = tuple(getattr(params, "params", params))
        probe = OutcomeDistribution(len(params), np.full(2 ** len(params), 2.0 ** -len(params)))
        invert_readout_raw(probe, params)  # raises if any channel is singular
        self.params_ = params
        self.n_qubits_ = len(params)
        return self

    def transform(self, X):
        """Mitigate one distribution or rows of a (m, 2**n) array."""
        check_is_fitted(self, "params_")
        single_obj = isinstance(X, OutcomeDistribution) or hasattr(X, "counts")
        probs, n, single = check_distributions(X)
        if n != self.n_qubits_:
            raise ValueError(f"distribution has {n} qubits, mitigator was fit on {self.n_qubits_}")
        out = np.empty_like(probs)
        for i, row in enumerate(probs):
            raw = invert_readout_raw(OutcomeDistribution(n, row), self.params_)
            out[i] = clip_and_renormalize(raw) if self.clip else raw
        if single_obj:
            return OutcomeDistribution(n, out[0])
        return out[0] if single else out
