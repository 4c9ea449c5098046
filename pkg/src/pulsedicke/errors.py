"""Exception types for the simulator's distinct failure channels."""


class PulseDickeError(Exception):
    """Base class for all package errors."""


class DimensionCapError(PulseDickeError):
    """Requested Hilbert-space (or dense-solver) size exceeds the configured cap."""


class TruncationLeakError(PulseDickeError):
    """Occupation of the top Fock levels exceeded tolerance: n_max too small."""

    def __init__(self, message, t=None, leak=None):
        super().__init__(message)
        self.t = t
        self.leak = leak


class StiffnessError(PulseDickeError):
    """Step-size underflow: the requested integration is pathologically stiff."""


class PositivityError(PulseDickeError):
    """Density-matrix positivity violated beyond tolerance during open evolution."""


class ConfigError(PulseDickeError):
    """Invalid or inconsistent run configuration."""
