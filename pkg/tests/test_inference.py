import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import binned, restricted_posterior_grid, total_variation
from stabilizer.inference import (
    UNIFORM,
    Chain,
    ChainConfig,
    Posterior,
    PriorSpec,
    infer_register,
    log_likelihood,
    log_posterior,
    log_prior,
    map_estimate,
    metropolis_hastings,
    sequential_prior_update,
)
from stabilizer.inference import zero_count
from stabilizer.noise import BetaSpec, ErrorParams, beta_from_mean_std
from stabilizer.simulator import ShotCounts, execute, p_zero

FLAT = (UNIFORM, UNIFORM, UNIFORM)

TRUTH = [
    ErrorParams(0.9, 0.85, math.radians(3.1)),
    ErrorParams(0.8, 0.75, math.radians(4.1)),
    ErrorParams(0.85, 0.8, math.radians(4.9)),
    ErrorParams(0.75, 0.7, math.radians(2.9)),
]


class TestZeroCount:
    def test_all_zero(self):
        assert zero_count(ShotCounts(4, 100, {"0000": 100}), 2) == 100

    def test_position_convention(self):
        # "01": qubit 1 reads 0, "10": qubit 1 reads 1
        counts = ShotCounts(2, 8, {"10": 3, "01": 5})
        assert zero_count(counts, 0) == 5
        assert zero_count(counts, 1) == 3

    def test_from_execution(self):
        counts = execute([ErrorParams(0, 0, math.pi / 4)] * 4, [0] * 4, 8192, np.random.default_rng(0))
        assert zero_count(counts, 3) == 8192

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            zero_count(ShotCounts(2, 1, {"00": 1}), 2)


class TestDensities:
    def test_uniform_prior_is_zero(self):
        for e in [(0.3, 0.7, 0.1), (0, 1, 0.5), (1, 0, 0)]:
            assert log_prior(e, FLAT) == 0.0

    def test_beta22_at_half(self):
        b = BetaSpec(2, 2)
        assert log_prior((0.5, 0.5, 0.5), (b, b, b)) == pytest.approx(3 * math.log(1.5), abs=1e-12)
        assert log_prior((0.5, 0.5, 0.5), (b, b, b)) == pytest.approx(1.216395, abs=1e-6)

    def test_prior_boundary_sentinel(self):
        b = BetaSpec(2, 2)
        assert log_prior((0.0, 0.5, 0.5), (b, b, b)) == -math.inf
        assert log_prior((-0.1, 0.5, 0.5), FLAT) == -math.inf

    def test_prior_matches_scipy(self):
        from scipy import stats

        specs = (BetaSpec(2.5, 7.0), BetaSpec(9.1, 1.0111), BetaSpec(0.7, 1.3))
        e = (0.21, 0.93, 0.4)
        expected = sum(stats.beta(s.alpha, s.beta).logpdf(x) for s, x in zip(specs, e))
        assert log_prior(e, specs) == pytest.approx(expected, rel=1e-12)

    def test_likelihood_examples(self):
        assert log_likelihood(1, 1, ErrorParams(0, 0, 0)) == pytest.approx(math.log(0.5))
        assert log_likelihood(7, 7, ErrorParams(0, 0, math.pi / 4)) == 0.0
        assert log_likelihood(0, 7, ErrorParams(0, 0, math.pi / 4)) == -math.inf

    def test_likelihood_bad_count(self):
        with pytest.raises(ValueError):
            log_likelihood(5, 3, ErrorParams(0, 0, 0))

    def test_posterior_examples(self):
        e = ErrorParams(0.2, 0.3, 0.1)
        assert log_posterior(40, 100, e, FLAT) == log_likelihood(40, 100, e)
        assert log_posterior(1, 2, ErrorParams(0, 0, 0), FLAT) == pytest.approx(2 * math.log(0.5))
        b = BetaSpec(2, 2)
        assert log_posterior(0, 5, ErrorParams(0, 0, math.pi / 4), (b, b, b)) == -math.inf
        assert log_posterior(3, 5, ErrorParams(0, 0.5, 0.5), (b, b, b)) == -math.inf

    def test_joint_density_factorizes(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = 3
            shots = int(rng.integers(1, 500))
            zeros = rng.integers(0, shots + 1, n)
            es = [ErrorParams(*rng.uniform(0.01, 0.99, 2), rng.uniform(0.01, 0.7)) for _ in range(n)]
            specs = [tuple(BetaSpec(*rng.uniform(0.5, 5, 2)) for _ in range(3)) for _ in range(n)]
            per_qubit = sum(log_posterior(int(z), shots, e, s) for z, e, s in zip(zeros, es, specs))
            # direct evaluation of the joint product, written out independently
            joint = 0.0
            for z, e, s in zip(zeros, es, specs):
                pz = (1 + e.e1 - e.e0) / 2 - math.sin(2 * e.e2) * (e.e0 + e.e1 - 1) / 2
                joint += z * math.log(pz) + (shots - z) * math.log(1 - pz)
                for x, b in zip(e.as_array(), s):
                    joint += (b.alpha - 1) * math.log(x) + (b.beta - 1) * math.log(1 - x)
                    joint -= math.lgamma(b.alpha) + math.lgamma(b.beta) - math.lgamma(b.alpha + b.beta)
            assert per_qubit == pytest.approx(joint, rel=1e-10, abs=1e-9)


class TestSampler:
    def test_flat_target_accepts_everything(self):
        chain = metropolis_hastings(0, 0, FLAT, 500, (0.02, 0.02, 0.01), (0.5, 0.5, 0.5),
                                    np.random.default_rng(0))
        assert chain.acceptance_rate == 1.0
        assert len(chain.samples) == len(chain.log_post) == 501

    def test_deterministic(self):
        args = (420, 1000, FLAT, 300, (0.02, 0.02, 0.01), (0.5, 0.5, 0.5))
        a = metropolis_hastings(*args, np.random.default_rng(3))
        b = metropolis_hastings(*args, np.random.default_rng(3))
        np.testing.assert_array_equal(a.samples, b.samples)
        assert a.accepted == b.accepted

    def test_stays_in_bounds(self):
        chain = metropolis_hastings(0, 0, FLAT, 2000, (0.3, 0.3, 0.3), (0.01, 0.99, 0.7),
                                    np.random.default_rng(1))
        assert chain.samples.min() >= 0.0
        assert chain.samples[:, :2].max() <= 1.0
        assert chain.samples[:, 2].max() <= math.pi / 4

    def test_init_outside_support(self):
        with pytest.raises(ValueError):
            metropolis_hastings(0, 0, (BetaSpec(2, 2),) * 3, 100, (0.1, 0.1, 0.1), (0, 0.5, 0.5),
                                np.random.default_rng(0))

    def test_too_few_steps(self):
        with pytest.raises(ValueError):
            metropolis_hastings(0, 0, FLAT, 50, (0.1, 0.1, 0.1), (0.5, 0.5, 0.5), np.random.default_rng(0))

    def test_matches_grid_oracle(self):
        grid, w = restricted_posterior_grid(300, 1000)
        chain = metropolis_hastings(300, 1000, FLAT, 12_500, (0.02, 0.0, 0.0), (0.5, 0.0, 0.0),
                                    np.random.default_rng(2022))
        assert len(chain.kept) >= 10_000
        hist, _ = np.histogram(chain.kept[:, 0], bins=np.linspace(0, 1, 101))
        assert total_variation(hist / hist.sum(), binned(w)) <= 0.05
        mapped, _ = map_estimate(chain)
        assert abs(mapped.e0 - grid[np.argmax(w)]) <= 0.02


class TestMap:
    def _chain(self, log_post):
        samples = np.array([[0.1, 0.1, 0.1], [0.2, 0.2, 0.2], [0.3, 0.3, 0.3]])
        return Chain(samples, np.array(log_post, dtype=float), 0, 0)

    def test_argmax(self):
        params, info = map_estimate(self._chain([-5, -2, -9]), refine=False)
        assert params == ErrorParams(0.2, 0.2, 0.2)
        assert info["log_post"] == -2

    def test_empty(self):
        with pytest.raises(ValueError):
            map_estimate(Chain(np.empty((0, 3)), np.empty(0), 0, 0))

    def test_flat_refinement_changes_nothing(self):
        chain = metropolis_hastings(0, 0, FLAT, 200, (0.02, 0.02, 0.01), (0.5, 0.5, 0.5),
                                    np.random.default_rng(0))
        _, info = map_estimate(chain)
        assert info["log_post"] == info["chain_log_post"] == 0.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 400), st.integers(0, 2**31))
    def test_refinement_monotone(self, zeros, seed):
        prior = (BetaSpec(2, 5), BetaSpec(3, 3), BetaSpec(1.5, 8))
        chain = metropolis_hastings(zeros, 400, prior, 200, (0.05, 0.05, 0.05), (0.3, 0.5, 0.2),
                                    np.random.default_rng(seed))
        _, info = map_estimate(chain)
        assert info["log_post"] >= info["chain_log_post"]


def _paper_counts(seed, shots=8192):
    return execute(TRUTH, [0.0] * 4, shots, np.random.default_rng(seed))


class TestRegister:
    def test_zero_probability_consistent(self):
        counts = _paper_counts(0)
        est = infer_register(counts, seed=0)
        for j, e in enumerate(est.params):
            assert abs(p_zero(e) - zero_count(counts, j) / counts.total) <= 0.01

    def test_no_shots_returns_chain_argmax(self):
        est = infer_register(ShotCounts(2, 0, {}), config=ChainConfig(200), seed=1)
        for e, chain in zip(est.params, est.chains):
            assert e.as_array() in chain.kept
        assert est.log_post == (0.0, 0.0)

    def test_informative_prior_recovers_truth(self):
        prior = PriorSpec(tuple(
            tuple(beta_from_mean_std(v, v / 10) for v in t.as_array()) for t in TRUTH
        ))
        hits = 0
        for seed in range(20):
            est = infer_register(_paper_counts(100 + seed), prior, seed=seed)
            hits += all(
                abs(a - b) <= 3 * b / 10
                for e, t in zip(est.params, TRUTH)
                for a, b in zip(e.as_array(), t.as_array())
            )
        assert hits >= 18

    def test_qubit_relabeling(self):
        counts = _paper_counts(5)
        perm = [2, 0, 3, 1]
        permuted = ShotCounts(4, counts.total, {
            "".join(k[p] for p in perm): v for k, v in counts.counts.items()
        })
        seeds = [np.random.SeedSequence(1000 + j) for j in range(4)]
        base = infer_register(counts, config=ChainConfig(1000), seed=seeds)
        moved = infer_register(permuted, config=ChainConfig(1000), seed=[seeds[p] for p in perm])
        for i, p in enumerate(perm):
            assert moved.params[i] == base.params[p]

    def test_prior_size_mismatch(self):
        with pytest.raises(ValueError):
            infer_register(_paper_counts(0, 10), PriorSpec.uniform(3))

    def test_acceptance_in_diagnostic_range(self):
        est = infer_register(_paper_counts(1), seed=1)
        for rate in est.acceptance:
            assert 0.1 <= rate <= 0.7

    def test_parallel_matches_serial(self):
        counts = _paper_counts(2, 500)
        a = infer_register(counts, config=ChainConfig(300), seed=9)
        b = infer_register(counts, config=ChainConfig(300), seed=9, n_jobs=2)
        assert a.params == b.params


class TestSequential:
    def test_uniform_chain_refits_uniform(self):
        rng = np.random.default_rng(0)
        kept = rng.uniform(size=(200_000, 3)) * [1, 1, 0.999]
        chain = Chain(kept, np.zeros(len(kept)), 0, 0)
        prior = sequential_prior_update([chain])
        for spec in prior.specs[0][:2]:
            assert spec.alpha == pytest.approx(1.0, abs=0.03)
            assert spec.beta == pytest.approx(1.0, abs=0.03)
        assert prior.mode == "sequential"

    def test_constant_chain_falls_back(self):
        chain = Chain(np.full((50, 3), 0.3), np.zeros(50), 0, 0)
        assert sequential_prior_update([chain]).specs[0] == (UNIFORM,) * 3

    def test_second_run_narrows_posterior(self):
        ratios = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            first = infer_register(execute(TRUTH, [0] * 4, 8192, rng), seed=seed)
            prior = sequential_prior_update(first.chains)
            second = infer_register(execute(TRUTH, [0] * 4, 8192, rng), prior, seed=1000 + seed)
            v1 = np.array([c.kept.var(axis=0) for c in first.chains])
            v2 = np.array([c.kept.var(axis=0) for c in second.chains])
            ratios.append(v2 / v1)
        assert np.all(np.median(ratios, axis=0) <= 1.0)


def test_posterior_callable_matches_function():
    post = Posterior(12, 40, FLAT)
    e = ErrorParams(0.3, 0.2, 0.1)
    assert post(e) == log_posterior(12, 40, e, FLAT)


def test_prior_spec_modes():
    with pytest.raises(ValueError):
        PriorSpec(((BetaSpec(2, 2),) * 3,), "uniform")
    with pytest.raises(ValueError):
        PriorSpec(((UNIFORM,) * 3,), "configured")
    assert PriorSpec.uniform(2).mode == "uniform"
