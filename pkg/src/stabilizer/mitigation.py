"""Readout-error inversion and coherent angle compensation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import MitigationSingularError
from .noise import ErrorParams
from .simulator import OutcomeDistribution

SINGULAR_TOL = 1e-6


@dataclass(frozen=True)
class ConfusionMatrix:
    """Single-qubit readout channel, columns = true state, rows = observed."""

    e0: float
    e1: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.e0, self.e1], [self.e0, 1.0 - self.e1]])

    @property
    def margin(self) -> float:
        """Distance ``|e0 + e1 - 1|`` from the singular channel."""
        return abs(self.e0 + self.e1 - 1.0)

    @property
    def invertible(self) -> bool:
        return self.margin > SINGULAR_TOL

    def inverse(self) -> np.ndarray:
        det = 1.0 - self.e0 - self.e1
        return np.array([[1.0 - self.e1, -self.e1], [-self.e0, 1.0 - self.e0]]) / det


def confusion_matrix(e0: float, e1: float) -> ConfusionMatrix:
    if not (0.0 <= e0 <= 1.0 and 0.0 <= e1 <= 1.0):
        raise ValueError(f"flip probabilities must lie in [0, 1], got ({e0}, {e1})")
    return ConfusionMatrix(float(e0), float(e1))


def apply_per_qubit(probs: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Apply ``M_1 (x) ... (x) M_n`` to a little-endian vector, one qubit at a time."""
    n = len(matrices)
    t = np.asarray(probs, dtype=float).reshape((2,) * n)
    for j, m in enumerate(matrices):
        # qubit j is bit j of the index, i.e. axis n-1-j of the C-ordered tensor
        axis = n - 1 - j
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def forward_readout(dist: OutcomeDistribution, estimates: Sequence[ErrorParams]) -> OutcomeDistribution:
    """Push a true-state distribution through the per-qubit readout channels."""
    mats = [confusion_matrix(e.e0, e.e1).matrix for e in estimates]
    _check_len(dist, mats)
    return OutcomeDistribution(dist.n, apply_per_qubit(dist.probs, mats))


def _check_len(dist, mats):
    if len(mats) != dist.n:
        raise ValueError(f"{len(mats)} estimates for a {dist.n}-qubit distribution")


def invert_readout_raw(dist: OutcomeDistribution, estimates: Sequence[ErrorParams]) -> np.ndarray:
    """Unclipped inverse; may contain negative quasi-probabilities."""
    cms = [confusion_matrix(e.e0, e.e1) for e in estimates]
    _check_len(dist, cms)
    for j, cm in enumerate(cms):
        if not cm.invertible:
            raise MitigationSingularError(j + 1, cm.margin)
    return apply_per_qubit(dist.probs, [cm.inverse() for cm in cms])


def clip_and_renormalize(quasi: np.ndarray) -> np.ndarray:
    p = np.clip(quasi, 0.0, None)
    total = p.sum()
    if total <= 0.0:
        # every entry clipped: fall back to uniform
        return np.full_like(p, 1.0 / p.size)
    return p / total


def invert_readout(dist: OutcomeDistribution, estimates: Sequence[ErrorParams]) -> OutcomeDistribution:
    """Undo per-qubit readout noise by tensor-structured matrix inversion.

    Negative entries of the inverted vector are clipped to zero and the
    result renormalized.

    Raises
    ------
    MitigationSingularError
        If any qubit has ``|e0 + e1 - 1| <= 1e-6``.
    """
    return OutcomeDistribution(dist.n, clip_and_renormalize(invert_readout_raw(dist, estimates)))


def compensation_offsets(estimate) -> list[float]:
    """Angle offsets to subtract from each qubit's commanded rotation.

    ``estimate`` is a MapEstimate or any sequence of ErrorParams; the offset of
    qubit ``j`` is its estimated ``e2``.
    """
    params = getattr(estimate, "params", estimate)
    return [float(e.e2) for e in params]
