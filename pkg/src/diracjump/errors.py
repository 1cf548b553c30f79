"""Exception hierarchy shared by every stage of the pipeline."""


class DiracJumpError(Exception):
    """Base class. ``stage`` names the pipeline step that failed, if known."""

    def __init__(self, message, *, stage=None):
        super().__init__(message)
        self.stage = stage

    def with_stage(self, stage):
        self.stage = stage
        if self.args and not str(self.args[0]).startswith(f"[{stage}]"):
            self.args = (f"[{stage}] {self.args[0]}",) + self.args[1:]
        return self


class DomainError(DiracJumpError, ValueError):
    """Parameters outside the region where an operation is defined.

    ``decay_rate`` carries the evanescent decay constant when the failure is
    an energy below a mass gap.
    """

    def __init__(self, message, *, decay_rate=None, stage=None):
        super().__init__(message, stage=stage)
        self.decay_rate = decay_rate


class PoleProximityError(DomainError):
    pass


class SolverError(DiracJumpError):
    pass


class AccuracyError(DiracJumpError):
    """Requested tolerance not met. ``estimate`` and ``error`` hold the best effort."""

    def __init__(self, message, *, estimate=None, error=None, stage=None):
        super().__init__(message, stage=stage)
        self.estimate = estimate
        self.error = error


class ResolutionError(AccuracyError):
    pass


class RegularizationError(DiracJumpError):
    pass


class ConfigError(DiracJumpError):
    pass
