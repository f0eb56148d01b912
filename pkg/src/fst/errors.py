"""Exception hierarchy shared by all modules."""


class FSTError(Exception):
    """Base class for every error raised by this package."""


class DegenerateVelocities(FSTError, ValueError):
    pass


class DomainError(FSTError, ValueError):
    pass


class NoValidT0(FSTError):
    pass


class OutOfDomain(FSTError, ValueError):
    pass


class IncompatibleDomains(FSTError, ValueError):
    pass


class SuperluminalSample(FSTError, ValueError):
    pass


class SuperluminalInput(FSTError, ValueError):
    pass


class NonUniformStep(FSTError, ValueError):
    pass


class TailMismatch(FSTError, ValueError):
    pass


class NoConvergence(FSTError):
    """Light-cone fixed point did not settle within the iteration cap."""


class DomainExceeded(FSTError):
    """A cone iterate left the evaluable domain (grid plus right margin)."""


class SeparationUnderflow(FSTError):
    pass


class PicardDivergence(FSTError):
    pass


class NonScattering(FSTError):
    pass


class ScheduleExhausted(FSTError):
    """Raised with the partial run attached as ``.run``."""

    def __init__(self, run=None, message=None):
        self.run = run
        if message is None and run is not None:
            last = f"{run.deltas[-1]:.3e}" if run.deltas else "none"
            message = f"no convergence within {len(run.family)} schedule members (last delta {last})"
        super().__init__(message or "schedule exhausted")


class InsufficientFamily(FSTError, ValueError):
    pass


class EmptySamples(FSTError, ValueError):
    pass


class ConfigError(FSTError, ValueError):
    pass


class CrossedTrajectories(FSTError, ValueError):
    """The right particle a does not stay strictly right of b."""
