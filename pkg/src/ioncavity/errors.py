"""Exception types raised across the package."""


class OutOfRangeError(ValueError):
    """A label, trap index or case id lies outside the configured range."""


class TruncationRiskError(ValueError):
    """A pulse would push population past the Fock cutoff."""


class StepSizeError(RuntimeError):
    """A fixed-step integrator drifted beyond its norm or trace bound."""


class ZeroCouplingError(ValueError):
    """A pulse duration was requested for a vanishing coupling rate."""


class GatePreconditionError(ValueError):
    """A named gate was run with the targeted ion not in its ground state."""


class ValidationError(ValueError):
    """Input amplitudes or configuration failed validation."""
