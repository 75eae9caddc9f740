"""Error parameters, beta drift distributions and moment-matched beta fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .exceptions import FitError, InvalidDriftSpecError

# Names of the three per-qubit parameters, in storage order.
PARAM_NAMES = ("e0", "e1", "e2")

E2_LIMIT = math.pi / 4


@dataclass(frozen=True)
class ErrorParams:
    """Error triple of a single qubit.

    ``e0`` and ``e1`` are readout flip probabilities for true states 0 and 1,
    ``e2`` is the rotation-angle offset of the Hadamard in radians.
    """

    e0: float
    e1: float
    e2: float

    def __post_init__(self):
        for name in ("e0", "e1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0 or math.isnan(value):
                raise ValueError(f"{name}={value!r} is not a probability")
        if not abs(self.e2) <= E2_LIMIT:
            raise ValueError(f"|e2|={abs(self.e2)!r} exceeds pi/4")

    def as_array(self) -> np.ndarray:
        return np.array([self.e0, self.e1, self.e2], dtype=float)

    @classmethod
    def from_array(cls, values) -> "ErrorParams":
        e0, e1, e2 = (float(v) for v in values)
        return cls(e0, e1, e2)


@dataclass(frozen=True)
class BetaSpec:
    """Shape parameters of a beta distribution on [0, 1]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidDriftSpecError(
                f"beta shapes must be positive, got ({self.alpha}, {self.beta})"
            )

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def var(self) -> float:
        a, b = self.alpha, self.beta
        return a * b / ((a + b) ** 2 * (a + b + 1))

    @property
    def std(self) -> float:
        return math.sqrt(self.var)

    @property
    def is_uniform(self) -> bool:
        return self.alpha == 1.0 and self.beta == 1.0


UNIFORM = BetaSpec(1.0, 1.0)

# A drift entry is either a beta distribution or a value pinned for every run.
DriftEntry = Union[BetaSpec, float]


def beta_from_mean_std(mean: float, std: float) -> BetaSpec:
    """Moment-match a beta distribution to a mean and standard deviation.

    Raises
    ------
    InvalidDriftSpecError
        If ``mean`` is outside (0, 1), ``std`` is not positive, or the
        variance bound ``std**2 < mean * (1 - mean)`` is violated.
    """
    if not 0.0 < mean < 1.0:
        raise InvalidDriftSpecError(f"mean {mean!r} must lie in (0, 1)")
    if not std > 0.0:
        raise InvalidDriftSpecError(f"std {std!r} must be positive")
    bound = mean * (1.0 - mean)
    var = std * std
    if var >= bound:
        raise InvalidDriftSpecError(
            f"std={std!r} too large for mean={mean!r}: "
            f"variance {var:.6g} >= mean*(1-mean) = {bound:.6g}"
        )
    common = bound / var - 1.0
    return BetaSpec(mean * common, (1.0 - mean) * common)


def fit_beta_moments(samples: Sequence[float]) -> BetaSpec:
    """Fit a beta distribution to samples in (0, 1) by the method of moments.

    Uses the sample mean and the unbiased sample variance.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise FitError("at least two samples are required")
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise FitError("samples must lie strictly inside (0, 1)")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    if var <= 0.0 or np.all(x == x[0]):
        raise FitError("samples have zero variance")
    try:
        return beta_from_mean_std(mean, math.sqrt(var))
    except InvalidDriftSpecError as exc:
        raise FitError(str(exc)) from exc


@dataclass(frozen=True)
class DriftModel:
    """Per-qubit drift distributions for (e0, e1, e2).

    ``specs[j][k]`` is the distribution of parameter ``k`` on qubit ``j``.
    A float entry pins that parameter to a fixed value on every draw, which
    is how noiseless or drift-free registers are described.
    """

    specs: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.specs)
        if not rows:
            raise InvalidDriftSpecError("drift model needs at least one qubit")
        for j, row in enumerate(rows):
            if len(row) != 3:
                raise InvalidDriftSpecError(
                    f"qubit {j + 1}: expected 3 parameter specs, got {len(row)}"
                )
            for name, entry in zip(PARAM_NAMES, row):
                if isinstance(entry, BetaSpec):
                    continue
                if not isinstance(entry, (int, float)):
                    raise InvalidDriftSpecError(
                        f"qubit {j + 1} {name}: unsupported spec {entry!r}"
                    )
        object.__setattr__(self, "specs", rows)
        for row in rows:
            _pinned_check(row)

    @property
    def n(self) -> int:
        return len(self.specs)

    @classmethod
    def from_mean_std(cls, means, stds) -> "DriftModel":
        """Build a model from ``(n, 3)`` arrays of means and stds (e2 in radians).

        A zero standard deviation pins the parameter at its mean.
        """
        means = np.asarray(means, dtype=float)
        stds = np.asarray(stds, dtype=float)
        if means.ndim != 2 or means.shape[1] != 3 or means.shape != stds.shape:
            raise InvalidDriftSpecError("means and stds must both have shape (n, 3)")
        rows = []
        for mrow, srow in zip(means, stds):
            rows.append(
                tuple(
                    float(m) if s == 0.0 else beta_from_mean_std(float(m), float(s))
                    for m, s in zip(mrow, srow)
                )
            )
        return cls(tuple(rows))

    def means(self) -> np.ndarray:
        """Mean of every entry as an ``(n, 3)`` array."""
        return np.array(
            [[e.mean if isinstance(e, BetaSpec) else float(e) for e in row]
             for row in self.specs]
        )


def _pinned_check(row):
    # beta entries are admissible by construction (e2 draws are clipped)
    values = [0.0 if isinstance(e, BetaSpec) else float(e) for e in row]
    try:
        ErrorParams(*values)
    except ValueError as exc:
        raise InvalidDriftSpecError(str(exc)) from exc


def sample_drift(model: DriftModel, rng: np.random.Generator) -> list[ErrorParams]:
    """Draw one noise realization, one ErrorParams per qubit.

    Parameters are drawn independently in qubit-major, parameter-minor order.
    Beta draws for ``e2`` are read directly as radians; draws above pi/4 (only
    possible for very wide e2 distributions) are clipped to the admissible
    range.
    """
    out = []
    for row in model.specs:
        values = []
        for entry in row:
            if isinstance(entry, BetaSpec):
                values.append(float(rng.beta(entry.alpha, entry.beta)))
            else:
                values.append(float(entry))
        values[2] = min(values[2], E2_LIMIT)
        out.append(ErrorParams(*values))
    return out
