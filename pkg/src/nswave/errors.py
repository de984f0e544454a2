"""Exception types raised across the package."""


class NSWaveError(Exception):
    """Base class for every error raised by nswave."""


class NumericalFailure(NSWaveError):
    """A numerical procedure could not produce a valid result."""


class ConvergenceFailure(NumericalFailure):
    pass


class NoIntersection(NumericalFailure):
    """The 1-rarefaction and 3-rarefaction curves do not meet admissibly."""


class TruncationTooSmall(NumericalFailure):
    pass


class DegenerateWave(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class InsufficientSamples(NSWaveError):
    pass


class PositivityViolation(NumericalFailure):
    """Specific volume or temperature reached a non-positive value.

    Attributes record where it happened so a run can be diagnosed without
    re-running it.
    """

    def __init__(self, message, *, field=None, node=None, margin=None, t=None,
                 suggested_dt=None):
        super().__init__(message)
        self.field = field
        self.node = node
        self.margin = margin
        self.t = t
        self.suggested_dt = suggested_dt


class BlowUp(NumericalFailure):
    pass


class ConfigInvalid(NSWaveError):
    """Configuration failed validation. ``errors`` maps field paths to messages."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = {"config": errors}
        self.errors = dict(errors)
        lines = [f"{k}: {v}" for k, v in self.errors.items()]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
