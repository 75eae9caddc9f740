"""Distribution distances and run-to-run stability statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .simulator import OutcomeDistribution


def _as_probs(dist):
    if isinstance(dist, OutcomeDistribution):
        return dist.probs
    return np.asarray(dist, dtype=float)


def bhattacharyya(f, g) -> float:
    """Bhattacharyya coefficient ``sum_i sqrt(f_i g_i)``, clamped to [0, 1].

    Accepts OutcomeDistribution objects or plain probability vectors.
    """
    f, g = _as_probs(f), _as_probs(g)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {g.shape}")
    bc = float(np.sum(np.sqrt(f * g)))
    return min(1.0, max(0.0, bc))


def hellinger(f, g) -> float:
    """Hellinger distance ``sqrt(1 - BC(f, g))``.

    Evaluated as ``sqrt(sum_i (sqrt f_i - sqrt g_i)**2 / 2)``, which equals the
    above for normalized inputs but does not lose precision when ``BC`` is
    close to 1, so ``hellinger(f, f)`` is exactly 0.
    """
    f, g = _as_probs(f), _as_probs(g)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {g.shape}")
    diff = np.sqrt(f) - np.sqrt(g)
    d = float(np.sqrt(0.5 * np.dot(diff, diff)))
    return min(1.0, d)


@dataclass(frozen=True)
class StabilityReport:
    distances: tuple
    mean: float
    std: float
    observable_variance: Optional[float] = None

    def as_dict(self):
        out = {"runs": len(self.distances), "mean": self.mean, "std": self.std}
        if self.observable_variance is not None:
            out["observable_variance"] = self.observable_variance
        return out


def stability_report(
    distances: Sequence[float], observables: Optional[Sequence[float]] = None
) -> StabilityReport:
    """Summarise per-run distances (and optionally an observable series).

    The mean over runs is the Monte-Carlo estimate of the expected distance
    under drift. Standard deviation and variance use the ``n - 1`` denominator;
    with a single value they are reported as 0.
    """
    d = np.asarray(distances, dtype=float)
    if d.size == 0:
        raise ValueError("need at least one distance")
    std = float(d.std(ddof=1)) if d.size > 1 else 0.0
    var = None
    if observables is not None:
        o = np.asarray(observables, dtype=float)
        if o.size == 0:
            raise ValueError("observable series is empty")
        var = float(o.var(ddof=1)) if o.size > 1 else 0.0
    return StabilityReport(tuple(float(x) for x in d), float(d.mean()), std, var)
