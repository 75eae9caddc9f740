import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilizer.exceptions import FitError, InvalidDriftSpecError
from stabilizer.noise import (
    BetaSpec,
    DriftModel,
    ErrorParams,
    beta_from_mean_std,
    fit_beta_moments,
    sample_drift,
)

PAPER_E0 = (0.9, 0.8, 0.85, 0.75)


def test_uniform_moments_give_unit_shapes():
    spec = beta_from_mean_std(0.5, math.sqrt(1 / 12))
    assert spec.alpha == pytest.approx(1.0, rel=1e-12)
    assert spec.beta == pytest.approx(1.0, rel=1e-12)


def test_mean_std_point_nine():
    # by hand: k = 0.9*0.1/0.0081 - 1 = 10.111..., alpha = 0.9 k, beta = 0.1 k
    spec = beta_from_mean_std(0.9, 0.09)
    assert spec.alpha == pytest.approx(9.1, abs=1e-9)
    assert spec.beta == pytest.approx(1.01111111, abs=1e-6)
    draws = np.random.default_rng(0).beta(spec.alpha, spec.beta, 10**6)
    assert draws.mean() == pytest.approx(0.9, abs=1e-3)
    assert draws.std() == pytest.approx(0.09, abs=1e-3)


@pytest.mark.parametrize("mean,std", [(0.5, 0.6), (0.5, 0.5), (0.0, 0.1), (1.0, 0.1), (0.3, 0.0)])
def test_invalid_drift_spec(mean, std):
    with pytest.raises(InvalidDriftSpecError):
        beta_from_mean_std(mean, std)


@settings(max_examples=200, deadline=None)
@given(
    mean=st.floats(0.01, 0.99),
    frac=st.floats(0.01, 0.99),
)
def test_moment_matching_is_exact(mean, frac):
    std = frac * math.sqrt(mean * (1 - mean))
    spec = beta_from_mean_std(mean, std)
    assert spec.mean == pytest.approx(mean, rel=1e-9)
    assert spec.std == pytest.approx(std, rel=1e-9)


def test_error_params_ranges():
    ErrorParams(0.0, 1.0, -math.pi / 4)
    with pytest.raises(ValueError):
        ErrorParams(1.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        ErrorParams(0.0, 0.0, 0.8)


def test_beta_spec_rejects_nonpositive():
    with pytest.raises(InvalidDriftSpecError):
        BetaSpec(0.0, 1.0)


def _model(spec, n=4):
    return DriftModel(tuple((spec,) * 3 for _ in range(n)))


def test_samples_inside_support():
    model = _model(BetaSpec(9.1, 1.0111))
    rng = np.random.default_rng(1)
    for _ in range(200):
        for e in sample_drift(model, rng):
            assert 0 < e.e0 < 1 and 0 < e.e1 < 1 and 0 < e.e2 <= math.pi / 4


def test_sample_drift_deterministic():
    model = _model(BetaSpec(9.1, 1.0111))
    a = sample_drift(model, np.random.default_rng(42))
    b = sample_drift(model, np.random.default_rng(42))
    assert a == b


def test_paper_e0_means_recovered():
    means = np.array([PAPER_E0, PAPER_E0, [0.05] * 4]).T
    model = DriftModel.from_mean_std(means, means / 10)
    rng = np.random.default_rng(7)
    draws = np.array([[e.e0 for e in sample_drift(model, rng)] for _ in range(10**5)])
    # standard error is at most 0.09 / sqrt(1e5) ~ 3e-4, so 0.005 is > 15 SE
    np.testing.assert_allclose(draws.mean(axis=0), PAPER_E0, atol=0.005)


def test_pinned_entries_are_constant():
    model = DriftModel.from_mean_std(np.zeros((2, 3)), np.zeros((2, 3)))
    assert sample_drift(model, np.random.default_rng(0)) == [ErrorParams(0, 0, 0)] * 2


def test_drift_model_needs_three_entries():
    with pytest.raises(InvalidDriftSpecError):
        DriftModel(((BetaSpec(1, 1),) * 2,))


def test_fit_uniform_round_trip():
    x = np.random.default_rng(3).beta(1.0, 1.0, 10**6)
    spec = fit_beta_moments(x)
    assert spec.alpha == pytest.approx(1.0, abs=0.02)
    assert spec.beta == pytest.approx(1.0, abs=0.02)


def test_fit_skewed_round_trip():
    x = np.random.default_rng(4).beta(9.1, 1.0111, 10**6)
    spec = fit_beta_moments(x)
    assert spec.mean == pytest.approx(0.9, abs=0.01)
    assert spec.alpha == pytest.approx(9.1, rel=0.05)
    assert spec.beta == pytest.approx(1.0111, rel=0.05)


@pytest.mark.parametrize("samples", [[0.5, 0.5], [0.3], [0.0, 0.5], [0.2, 1.0]])
def test_fit_degenerate(samples):
    with pytest.raises(FitError):
        fit_beta_moments(samples)
