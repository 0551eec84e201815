"""Exception types shared across the package."""


class DelayConsensusError(Exception):
    """Base class for package-specific errors."""


class NoSpanningTreeError(DelayConsensusError):
    """The interaction graph has no spanning tree (zero Laplacian eigenvalue is not simple)."""


class NonCommensurateDelayError(DelayConsensusError):
    """A communication delay is not an integer multiple of the step size."""


class BadGainError(DelayConsensusError):
    """A gain matrix is not symmetric positive definite, or a scalar gain is not positive."""


class DimensionMismatchError(DelayConsensusError):
    """Array dimensions are inconsistent with the scenario."""


class IllConditionedError(DelayConsensusError):
    """An inertia matrix is numerically singular (invalid model parameters)."""


class ConfigError(DelayConsensusError):
    """A configuration or trace document is malformed."""


class ValidationError(DelayConsensusError):
    """A scenario failed pre-run validation.  Carries the issue list."""

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(f"[{i.code}] {i.location}: {i.message}" for i in self.issues)
        super().__init__(f"scenario validation failed: {lines}")


class DivergedError(DelayConsensusError):
    """A simulation state exceeded the divergence limit.  Carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
