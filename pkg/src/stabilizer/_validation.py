"""Input coercion shared by the estimator classes and the harness."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .simulator import OutcomeDistribution, ShotCounts


def check_counts(X) -> ShotCounts:
    """Accept ShotCounts, an outcome->count mapping, or a (shots, n) bit array."""
    if isinstance(X, ShotCounts):
        return X
    if isinstance(X, Mapping):
        return ShotCounts.from_counts(X)
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(
            "expected ShotCounts, a mapping of bitstrings to counts, or a 2-D bit array; "
            f"got array with shape {arr.shape}"
        )
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit array may only contain 0 and 1")
    return ShotCounts.from_bits(arr)


def check_distributions(X):
    """Return ``(probs, n, single)`` with probs of shape (m, 2**n).

    ``single`` tells whether the input was one distribution, so callers can
    hand back the same kind of object.
    """
    if isinstance(X, OutcomeDistribution):
        return X.probs[None, :], X.n, True
    if isinstance(X, ShotCounts):
        return (X.to_vector() / X.total)[None, :], X.n, True
    arr = np.asarray(X, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D probabilities, got shape {arr.shape}")
    width = arr.shape[1]
    n = width.bit_length() - 1
    if width < 2 or 1 << n != width:
        raise ValueError(f"row length {width} is not a power of two")
    if not np.all(np.isfinite(arr)):
        raise ValueError("probabilities must be finite")
    return arr, n, single


def check_seed(seed):
    """Normalise ``seed`` to a SeedSequence (None draws fresh entropy)."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)
