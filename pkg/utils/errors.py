"""Exception hierarchy for the spin-wave memory simulator."""


class SpinWaveLabError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(SpinWaveLabError, ValueError):
    """A physical parameter lies outside the range a model accepts."""


class PoleProximityError(DomainError):
    """Stark detuning too close to an atomic resonance for the analytic shift model."""


class EvanescentError(DomainError):
    """Transverse wavevector at or beyond the read-out wavevector (no propagating readout)."""


class UnsupportedOrderError(SpinWaveLabError):
    """Moment of more than four number operators requested."""


class UndefinedResultError(SpinWaveLabError, ArithmeticError):
    """A normalised quantity has a zero denominator (e.g. no herald flux)."""


class CompletionError(SpinWaveLabError):
    """A truncated transformation could not be completed to a unitary one."""


class ConfigError(SpinWaveLabError, ValueError):
    """Unknown scenario, unknown configuration key or uncoercible value."""


class NumericalError(SpinWaveLabError):
    """A scenario self-check failed."""
