"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad gate, bad file, inconsistent parameters."""


class SimulationCapError(RuntimeError):
    """A circuit is wider than the simulator is configured to handle."""
