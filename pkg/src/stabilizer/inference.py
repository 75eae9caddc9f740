"""Bayesian estimation of per-qubit error parameters from shot counts.

The posterior over the 3n parameters factorizes over qubits, and each factor
depends on the data only through that qubit's zero count. Every qubit is
therefore handled by its own three-parameter random-walk Metropolis-Hastings
chain.

Log densities use ``-inf`` for impossible states instead of raising, so the
sampler never needs exception handling in its inner loop.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import FitError
from .noise import E2_LIMIT, UNIFORM, BetaSpec, ErrorParams, fit_beta_moments
from .simulator import ShotCounts

logger = logging.getLogger(__name__)

NEG_INF = -math.inf

# Sampler support for (e0, e1, e2). e2 lives where both the beta prior (0, 1)
# and the admissible rotation range |e2| <= pi/4 allow it.
BOUNDS = ((0.0, 1.0), (0.0, 1.0), (0.0, E2_LIMIT))

PRIOR_MODES = ("uniform", "configured", "sequential")


@dataclass(frozen=True)
class PriorSpec:
    """Independent beta priors, ``specs[j][k]`` for parameter k of qubit j."""

    specs: tuple
    mode: str = "configured"

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.specs)
        if any(len(r) != 3 for r in rows):
            raise ValueError("each qubit needs exactly three BetaSpec priors")
        if self.mode not in PRIOR_MODES:
            raise ValueError(f"unknown prior mode {self.mode!r}")
        is_uniform = all(s.is_uniform for r in rows for s in r)
        if (self.mode == "uniform") != is_uniform and self.mode != "sequential":
            raise ValueError("mode 'uniform' requires (and is implied by) all-(1, 1) priors")
        object.__setattr__(self, "specs", rows)

    @property
    def n(self) -> int:
        return len(self.specs)

    @classmethod
    def uniform(cls, n: int) -> "PriorSpec":
        return cls(tuple((UNIFORM,) * 3 for _ in range(n)), "uniform")

    @classmethod
    def from_drift(cls, model) -> "PriorSpec":
        """Use a drift model's beta distributions as priors.

        Pinned (non-beta) entries get a uniform prior.
        """
        rows = tuple(
            tuple(e if isinstance(e, BetaSpec) else UNIFORM for e in row)
            for row in model.specs
        )
        if all(s.is_uniform for r in rows for s in r):
            return cls(rows, "uniform")
        return cls(rows, "configured")

    def mean(self, qubit: int) -> np.ndarray:
        return np.array([s.mean for s in self.specs[qubit]])


class _Triple:
    """Precomputed constants of a three-parameter beta prior."""

    __slots__ = ("am1", "bm1", "log_norm", "uniform")

    def __init__(self, prior):
        prior = tuple(prior)
        if len(prior) != 3:
            raise ValueError("prior must hold three BetaSpec entries")
        self.am1 = tuple(s.alpha - 1.0 for s in prior)
        self.bm1 = tuple(s.beta - 1.0 for s in prior)
        self.log_norm = sum(
            math.lgamma(s.alpha) + math.lgamma(s.beta) - math.lgamma(s.alpha + s.beta)
            for s in prior
        )
        self.uniform = all(s.is_uniform for s in prior)


def _xlogy(a, x):
    if a == 0.0:
        return 0.0
    if x <= 0.0:
        return -math.inf if a > 0 else math.inf
    return a * math.log(x)


def _log_prior(x0, x1, x2, t: _Triple) -> float:
    if not (0.0 <= x0 <= 1.0 and 0.0 <= x1 <= 1.0 and 0.0 <= x2 <= 1.0):
        return NEG_INF
    if t.uniform:
        return 0.0
    total = -t.log_norm
    for a, b, x in zip(t.am1, t.bm1, (x0, x1, x2)):
        total += _xlogy(a, x) + _xlogy(b, 1.0 - x)
    return total


def _log_lik(z, s, x0, x1, x2) -> float:
    p = (1.0 + x1 - x0) / 2.0 - math.sin(2.0 * x2) * (x0 + x1 - 1.0) / 2.0
    p = min(1.0, max(0.0, p))
    out = 0.0
    if z:
        if p <= 0.0:
            return NEG_INF
        out += z * math.log(p)
    if s - z:
        if p >= 1.0:
            return NEG_INF
        out += (s - z) * math.log1p(-p)
    return out


def _coerce(e):
    if isinstance(e, ErrorParams):
        return e.e0, e.e1, e.e2
    x0, x1, x2 = (float(v) for v in e)
    return x0, x1, x2


def log_prior(e, prior) -> float:
    """Log density of the factorized beta prior for one qubit.

    ``prior`` is a triple of BetaSpec. Points outside the beta support give
    ``-inf``.
    """
    return _log_prior(*_coerce(e), _Triple(prior))


def log_likelihood(zeros: int, shots: int, e) -> float:
    """Bernoulli log-likelihood of ``zeros`` zero outcomes in ``shots`` shots."""
    if not 0 <= zeros <= shots:
        raise ValueError(f"zero count {zeros} outside [0, {shots}]")
    return _log_lik(zeros, shots, *_coerce(e))


def log_posterior(zeros: int, shots: int, e, prior) -> float:
    """Unnormalized log posterior for one qubit."""
    return Posterior(zeros, shots, prior)(e)


@dataclass(frozen=True)
class Posterior:
    """Unnormalized single-qubit log posterior, callable on a triple."""

    zeros: int
    shots: int
    prior: tuple = (UNIFORM, UNIFORM, UNIFORM)
    _t: _Triple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.zeros <= self.shots:
            raise ValueError(f"zero count {self.zeros} outside [0, {self.shots}]")
        object.__setattr__(self, "prior", tuple(self.prior))
        object.__setattr__(self, "_t", _Triple(self.prior))

    def __call__(self, e) -> float:
        x0, x1, x2 = _coerce(e)
        lp = _log_prior(x0, x1, x2, self._t)
        if lp == NEG_INF:
            return NEG_INF
        return lp + _log_lik(self.zeros, self.shots, x0, x1, x2)


def zero_count(counts: ShotCounts, qubit: int) -> int:
    """Number of shots in which ``qubit`` (0-based position) read 0."""
    if not 0 <= qubit < counts.n:
        raise IndexError(f"qubit index {qubit} out of range for n={counts.n}")
    return sum(v for k, v in counts.counts.items() if k[qubit] == "0")


@dataclass(frozen=True)
class ChainConfig:
    steps: int = 10_000
    burn_in_fraction: float = 0.2
    proposal_scales: tuple = (0.02, 0.02, 0.01)

    def __post_init__(self):
        if self.steps < 100:
            raise ValueError("chains need at least 100 steps")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        scales = tuple(float(s) for s in self.proposal_scales)
        if len(scales) != 3 or any(s < 0 for s in scales) or not any(scales):
            raise ValueError("proposal_scales must be three nonnegative reals, not all zero")
        object.__setattr__(self, "proposal_scales", scales)


@dataclass
class Chain:
    """States visited by one chain, including the initial state at index 0."""

    samples: np.ndarray
    log_post: np.ndarray
    accepted: int
    burn_in: int
    scales: tuple = (0.02, 0.02, 0.01)
    target: Optional[Posterior] = None

    def __post_init__(self):
        if len(self.samples) != len(self.log_post):
            raise ValueError("samples and log_post differ in length")
        if not 0 <= self.accepted <= max(len(self.samples) - 1, 0):
            raise ValueError("accepted count out of range")

    def __len__(self):
        return len(self.samples)

    @property
    def steps(self) -> int:
        return len(self.samples) - 1

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0

    @property
    def kept(self) -> np.ndarray:
        """Post-burn-in samples, shape ``(m, 3)``."""
        return self.samples[self.burn_in:]

    @property
    def kept_log_post(self) -> np.ndarray:
        return self.log_post[self.burn_in:]


def _reflect(v, lo, hi):
    width = hi - lo
    t = (v - lo) % (2.0 * width)
    return lo + (t if t <= width else 2.0 * width - t)


def metropolis_hastings(
    zeros: int,
    shots: int,
    prior,
    steps: int,
    proposal_scales,
    init,
    rng: np.random.Generator,
    burn_in_fraction: float = 0.2,
) -> Chain:
    """Random-walk Metropolis-Hastings on one qubit's posterior.

    The joint Gaussian proposal has an independent scale per parameter and
    is folded back into the support box by reflection, which keeps it
    symmetric. A zero scale pins that parameter at its initial value.
    """
    config = ChainConfig(steps, burn_in_fraction, tuple(proposal_scales))
    target = Posterior(zeros, shots, prior)
    x = list(_coerce(init))
    lp = target(x)
    if lp == NEG_INF or math.isnan(lp):
        raise ValueError(f"initial state {tuple(x)} is outside the posterior support")
    for v, (lo, hi) in zip(x, BOUNDS):
        if not lo <= v <= hi:
            raise ValueError(f"initial state {tuple(x)} is outside the sampler bounds")

    scales = config.proposal_scales
    steps = config.steps
    jumps = rng.standard_normal((steps, 3)) * np.asarray(scales)
    with np.errstate(divide="ignore"):
        log_u = np.log(rng.random(steps))
    free = [k for k in range(3) if scales[k] > 0]

    samples = np.empty((steps + 1, 3))
    log_post = np.empty(steps + 1)
    samples[0] = x
    log_post[0] = lp
    accepted = 0
    for i in range(steps):
        y = list(x)
        row = jumps[i]
        for k in free:
            lo, hi = BOUNDS[k]
            y[k] = _reflect(x[k] + row[k], lo, hi)
        lpy = target(y)
        if log_u[i] < lpy - lp:
            x, lp = y, lpy
            accepted += 1
        samples[i + 1] = x
        log_post[i + 1] = lp
    burn_in = int(config.burn_in_fraction * (steps + 1))
    return Chain(samples, log_post, accepted, burn_in, scales, target)


def map_estimate(chain: Chain, refine: bool = True, tol: float = 1e-6, max_sweeps: int = 50):
    """Best post-burn-in state, optionally polished by coordinate ascent.

    Each sweep tries ``x +/- h`` along every free coordinate, moves to the best
    of the three points and halves ``h`` where neither neighbour improves.
    The refinement never lowers the log posterior.

    Returns
    -------
    (ErrorParams, dict)
        The estimate and diagnostics: ``log_post`` after refinement,
        ``chain_log_post`` of the selected sample, ``index`` of that sample,
        ``sweeps`` performed and ``acceptance_rate``.
    """
    lps = chain.kept_log_post
    if len(lps) == 0:
        raise ValueError("chain has no post-burn-in samples")
    i = int(np.argmax(lps))
    x = [float(v) for v in chain.kept[i]]
    best = float(lps[i])
    sweeps = 0
    if refine and chain.target is not None and best > NEG_INF:
        x, best, sweeps = _coordinate_ascent(chain.target, x, best, chain.scales, tol, max_sweeps)
    x[2] = min(x[2], E2_LIMIT)
    info = {
        "log_post": best,
        "chain_log_post": float(lps[i]),
        "index": chain.burn_in + i,
        "sweeps": sweeps,
        "acceptance_rate": chain.acceptance_rate,
    }
    return ErrorParams(*x), info


def _coordinate_ascent(target, x, fx, scales, tol, max_sweeps):
    steps = [float(s) for s in scales]
    sweeps = 0
    while sweeps < max_sweeps and max(steps) >= tol:
        sweeps += 1
        for k in range(3):
            h = steps[k]
            if h < tol:
                continue
            lo, hi = BOUNDS[k]
            best_v, best_f = x[k], fx
            for v in (x[k] - h, x[k] + h):
                if not lo <= v <= hi:
                    continue
                trial = list(x)
                trial[k] = v
                f = target(trial)
                if f > best_f:
                    best_v, best_f = v, f
            if best_f > fx:
                x[k], fx = best_v, best_f
            else:
                steps[k] = h / 2.0
    return x, fx, sweeps


@dataclass(frozen=True)
class MapEstimate:
    params: tuple
    acceptance: tuple
    log_post: tuple
    chains: tuple = field(default=(), repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.params)

    def as_array(self) -> np.ndarray:
        return np.array([e.as_array() for e in self.params])


def qubit_seeds(seed, n):
    """Per-qubit SeedSequences spawned from ``seed``.

    ``seed`` may be an int, a SeedSequence (its spawn key is extended with the
    qubit index), or an explicit sequence of ``n`` per-qubit seeds.
    """
    if isinstance(seed, (list, tuple)):
        if len(seed) != n:
            raise ValueError(f"need {n} per-qubit seeds, got {len(seed)}")
        return [s if isinstance(s, np.random.SeedSequence) else np.random.SeedSequence(s)
                for s in seed]
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key + (j,))
            for j in range(n)]


def _run_qubit(zeros, shots, prior_row, init, config, seed):
    rng = np.random.default_rng(seed)
    chain = metropolis_hastings(
        zeros, shots, prior_row, config.steps, config.proposal_scales, init, rng,
        config.burn_in_fraction,
    )
    params, info = map_estimate(chain)
    return chain, params, info


def _initial_state(prior_row):
    x = np.array([s.mean for s in prior_row])
    return [min(max(v, lo), hi) for v, (lo, hi) in zip(x, BOUNDS)]


def infer_register(
    counts: ShotCounts,
    prior: Optional[PriorSpec] = None,
    config: ChainConfig = ChainConfig(),
    seed=None,
    n_jobs: Optional[int] = None,
) -> MapEstimate:
    """MAP error parameters for every qubit of a register.

    One chain per qubit, initialised at the prior mean. ``n_jobs`` > 1 runs
    the chains in parallel through joblib; results do not depend on it.
    """
    n = counts.n
    if prior is None:
        prior = PriorSpec.uniform(n)
    if prior.n != n:
        raise ValueError(f"prior covers {prior.n} qubits, counts cover {n}")
    seeds = qubit_seeds(seed, n)
    jobs = [
        (zero_count(counts, j), counts.total, prior.specs[j], _initial_state(prior.specs[j]),
         config, seeds[j])
        for j in range(n)
    ]
    if n_jobs is not None and n_jobs != 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(delayed(_run_qubit)(*job) for job in jobs)
    else:
        results = [_run_qubit(*job) for job in jobs]
    for j, (chain, _, _) in enumerate(results):
        rate = chain.acceptance_rate
        if not 0.1 <= rate <= 0.7:
            logger.warning("qubit %d: acceptance rate %.3f outside [0.1, 0.7]", j + 1, rate)
    return MapEstimate(
        params=tuple(p for _, p, _ in results),
        acceptance=tuple(c.acceptance_rate for c, _, _ in results),
        log_post=tuple(info["log_post"] for _, _, info in results),
        chains=tuple(c for c, _, _ in results),
    )


def sequential_prior_update(chains: Sequence[Chain]) -> PriorSpec:
    """Moment-matched beta priors from the post-burn-in samples of each chain.

    Parameters whose samples cannot be fitted (for example a chain that never
    moved) fall back to a uniform prior.
    """
    if not chains:
        raise ValueError("no chains to update from")
    rows = []
    for j, chain in enumerate(chains):
        kept = chain.kept
        if len(kept) == 0:
            raise ValueError(f"chain for qubit {j + 1} has no post-burn-in samples")
        row = []
        for k in range(3):
            try:
                row.append(fit_beta_moments(kept[:, k]))
            except FitError:
                row.append(UNIFORM)
        rows.append(tuple(row))
    return PriorSpec(tuple(rows), "sequential")
