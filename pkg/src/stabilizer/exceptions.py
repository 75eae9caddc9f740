class StabilizerError(Exception):
    """Base class for errors raised by this package."""


class InvalidDriftSpecError(StabilizerError, ValueError):
    """A drift or beta specification cannot describe a valid distribution."""


class FitError(StabilizerError, ValueError):
    """Samples are unsuitable for a moment-matched beta fit."""


class MitigationSingularError(StabilizerError, ArithmeticError):
    """A readout confusion matrix is too close to singular to invert."""

    def __init__(self, qubit, margin):
        self.qubit = qubit
        self.margin = margin
        super().__init__(
            f"confusion matrix of qubit {qubit} is singular "
            f"(|e0 + e1 - 1| = {margin:.3g})"
        )


class ConfigError(StabilizerError, ValueError):
    """An experiment configuration is malformed or out of range."""
