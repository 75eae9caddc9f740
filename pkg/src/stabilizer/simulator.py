"""Shot-sampling model of the uniform-superposition circuit under noise.

Every qubit sees a Hadamard with a rotation offset followed by an asymmetric
readout channel. There is no crosstalk, so a shot is a vector of independent
Bernoulli bits and no statevector is needed.

Bit-ordering convention: an outcome string lists qubit 1 first, i.e. the
character at position ``j`` is the bit of qubit ``j + 1``. In probability
vectors the same bit is bit ``j`` of the integer index (little-endian), so
``"10"`` maps to index 1 and ``"01"`` to index 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .noise import ErrorParams

MAX_QUBITS = 12


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"register size must be an integer in [1, {MAX_QUBITS}], got {n!r}")


def bitstring_to_index(key: str) -> int:
    return sum(1 << j for j, ch in enumerate(key) if ch == "1")


def index_to_bitstring(index: int, n: int) -> str:
    return "".join("1" if (index >> j) & 1 else "0" for j in range(n))


@dataclass(frozen=True)
class ShotCounts:
    """Outcome histogram of one execution of ``total`` shots."""

    n: int
    total: int
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        _check_n(self.n)
        clean = {}
        for key, value in self.counts.items():
            if len(key) != self.n or set(key) - {"0", "1"}:
                raise ValueError(f"outcome {key!r} is not a {self.n}-bit string")
            if int(value) != value or value < 0:
                raise ValueError(f"count for {key!r} must be a nonnegative integer")
            if value:
                clean[key] = int(value)
        if sum(clean.values()) != self.total:
            raise ValueError(
                f"counts sum to {sum(clean.values())}, expected total {self.total}"
            )
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "ShotCounts":
        """Infer ``n`` and ``total`` from a non-empty histogram."""
        if not counts:
            raise ValueError("cannot infer register size from empty counts")
        n = len(next(iter(counts)))
        return cls(n, int(sum(counts.values())), counts)

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "ShotCounts":
        """Histogram a ``(shots, n)`` 0/1 array; column ``j`` is qubit ``j + 1``."""
        bits = np.asarray(bits, dtype=np.int64)
        shots, n = bits.shape
        index = bits @ (1 << np.arange(n, dtype=np.int64))
        tally = np.bincount(index, minlength=2**n)
        counts = {
            index_to_bitstring(i, n): int(c) for i, c in enumerate(tally) if c
        }
        return cls(n, int(shots), counts)

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(2**self.n, dtype=np.int64)
        for key, value in self.counts.items():
            vec[bitstring_to_index(key)] = value
        return vec


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability vector over the ``2**n`` outcomes, indexed little-endian."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        probs = np.array(self.probs, dtype=float)
        if probs.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} probabilities, got shape {probs.shape}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, key: str) -> float:
        return float(self.probs[bitstring_to_index(key)])

    def as_dict(self) -> dict:
        return {index_to_bitstring(i, self.n): float(p) for i, p in enumerate(self.probs)}


def p_zero(e: ErrorParams) -> float:
    """Probability of reading 0 on one qubit after the noisy Hadamard.

    ``(1 + e1 - e0) / 2 - sin(2 e2) (e0 + e1 - 1) / 2``
    """
    p = (1.0 + e.e1 - e.e0) / 2.0 - math.sin(2.0 * e.e2) * (e.e0 + e.e1 - 1.0) / 2.0
    # only round-off can push p outside [0, 1]
    return min(1.0, max(0.0, p))


def ideal_distribution(n: int) -> OutcomeDistribution:
    """Noiseless output of n Hadamards on ``|0...0>``: uniform over ``2**n``."""
    _check_n(n)
    return OutcomeDistribution(n, np.full(2**n, 2.0**-n))


def execute(
    noise: Sequence[ErrorParams],
    compensation: Sequence[float],
    shots: int,
    rng: np.random.Generator,
) -> ShotCounts:
    """Sample ``shots`` executions of the circuit.

    Qubit ``j`` reads 0 with probability ``p_zero`` evaluated at the rotation
    offset ``e2 - compensation[j]``. One uniform draw is consumed per qubit per
    shot, shot-major.
    """
    noise = list(noise)
    compensation = [float(c) for c in compensation]
    if len(noise) != len(compensation):
        raise ValueError(
            f"{len(noise)} noise entries but {len(compensation)} compensation offsets"
        )
    if shots < 1:
        raise ValueError("shots must be at least 1")
    _check_n(len(noise))
    p0 = np.array([_p_zero_offset(e, c) for e, c in zip(noise, compensation)])
    u = rng.random((int(shots), len(noise)))
    return ShotCounts.from_bits(u >= p0)


def _p_zero_offset(e: ErrorParams, c: float) -> float:
    # compensated offset may leave the nominal e2 range, so skip ErrorParams validation
    p = (1.0 + e.e1 - e.e0) / 2.0 - math.sin(2.0 * (e.e2 - c)) * (e.e0 + e.e1 - 1.0) / 2.0
    return min(1.0, max(0.0, p))


def counts_to_distribution(counts: ShotCounts) -> OutcomeDistribution:
    """Empirical frequencies; unobserved outcomes get probability 0."""
    if counts.total < 1:
        raise ValueError("counts are empty")
    return OutcomeDistribution(counts.n, counts.to_vector() / counts.total)
