"""Semantic exception hierarchy. Public functions never raise bare ValueError."""


class InfoLossError(Exception):
    """Base class for all errors raised by this package."""


class NegativeMass(InfoLossError):
    """A probability vector carries a negative entry."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"negative mass {value!r} at index {index}")


class NotNormalized(InfoLossError):
    """A probability vector does not sum to one within tolerance."""

    def __init__(self, total, tol):
        self.total = total
        self.deviation = total - 1.0
        super().__init__(f"mass sums to {total!r} (deviation {total - 1.0:+.3e}, tol {tol:g})")


class ShapeMismatch(InfoLossError):
    """Array shapes disagree with the operation's contract."""


class SupportMismatch(InfoLossError):
    """A ratio p/q or log q is requested where q = 0 but p > 0."""


class DomainError(InfoLossError):
    """A scalar argument lies outside its mathematical domain."""


class InsufficientData(InfoLossError):
    """Too few observations to fit the requested model."""


class CurveMismatch(InfoLossError):
    """Two solution curves share no alignable compression levels."""


class MaxIterExceeded(InfoLossError):
    """An iterative solver hit its iteration cap before converging."""


class CounterexampleFound(InfoLossError):
    """A machine-checked inequality failed; this falsifies the implementation."""


class ConfigError(InfoLossError):
    """An experiment or CLI configuration is malformed; message names the key."""
