"""Exception and warning types shared across the package."""


class GrwsimError(Exception):
    """Base class for every package-specific error."""


class ValidationError(GrwsimError):
    """An argument or configuration violates a documented invariant."""


class ParseError(GrwsimError):
    """A config file could not be parsed (bad section, key, or literal)."""


class ZeroNormError(GrwsimError):
    """State norm too small to renormalize (squared norm below 1e-30)."""


class GridMismatchError(GrwsimError):
    """Operands live on different grids or have different level counts."""


class UnresolvedWidthError(GrwsimError):
    """Localization width narrower than four grid spacings."""


class ZeroDensityError(GrwsimError):
    """Collapse-center density integrates to (numerically) zero."""


class UnstableStepError(GrwsimError):
    """A propagation call drifted the norm beyond its tolerance."""


class NonConvergentError(GrwsimError):
    """Undecided-trajectory fraction exceeded the 1% budget."""


class InvalidHorizonError(GrwsimError):
    """Requested horizon reaches the exact recurrence time of the ring."""


class InsufficientDataError(GrwsimError):
    """Too few decided trajectories for a meaningful statistic."""


class DegenerateFitError(GrwsimError):
    """Scaling fit attempted on fewer than three distinct abscissae."""


class EnsembleFailureError(GrwsimError):
    """Per-trajectory failure budget (1%) exceeded; ensemble aborted."""


class InsufficientSeparationWarning(UserWarning):
    """Pointer packets overlap more than a readout scenario assumes."""
