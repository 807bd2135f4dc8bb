"""Exception types shared across the package.

Errors split into two families: invalid inputs (subclasses of ValueError,
CLI exit code 2) and numerical-guard failures detected during a run
(subclasses of RuntimeError, CLI exit code 3).
"""


class InvalidParameterError(ValueError):
    """A physical parameter or grid specification violates its constraints."""


class DomainError(ValueError):
    """An evaluation point lies outside the domain of a closed form."""


class OutOfRegimeError(ValueError):
    """An asymptotic formula was requested outside its validity regime."""


class UnknownPresetError(KeyError):
    """The requested experiment preset does not exist."""


class SingularStepError(RuntimeError):
    """The marching diagonal 1 + lambda*w_00 vanished for this step/kernel."""


class NonConvergenceError(RuntimeError):
    """A quadrature did not stabilize under node doubling."""


class DegenerateFitError(RuntimeError):
    """Refinement errors sit at the rounding floor; no order can be fitted."""


class GridTooCoarseError(RuntimeError):
    """A survival integral cannot be trusted on the supplied grid."""


class InsufficientPointsError(RuntimeError):
    """A fit window contains too few grid points."""


class NoVanishingError(RuntimeError):
    """No finite vanishing time is supported by the data."""


class NormalizationError(ValueError):
    """Normalization was requested for a state without a finite norm."""


class BoundaryLeakageError(RuntimeError):
    """Field amplitude at the box walls exceeded the leakage threshold."""


class NonphysicalNegativityError(RuntimeError):
    """A density field developed negative values beyond tolerance."""


class StepResolutionError(RuntimeError):
    """Halving the time step changed the boundary amplitude by too much."""
