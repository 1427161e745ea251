"""Exception hierarchy shared by the analysis modules and the CLI."""


class ChainrecError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ChainrecError):
    """Malformed run configuration (CLI exit code 1)."""


class FamilyError(ConfigError):
    """A map family violates its construction invariants."""


class NumericalError(ChainrecError):
    """A numerical procedure failed (CLI exit code 2)."""


class FlatIntervalError(NumericalError):
    """The derivative vanishes on a whole subinterval."""


class NoBirthEventError(NumericalError):
    """A parameter bracket does not contain an orbit birth."""


class BranchNotStabilizedError(NumericalError):
    """Unstable branch endpoints did not converge within the depth cap.

    The partial intervals are kept on ``partial``.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class DegenerateTangencyError(NumericalError):
    """The tangency point is not a local extremum of the landing iterate."""


class NoHomoclinicOrbitError(NumericalError):
    """No backward orbit through the tangency converges to the repeller."""


class ResolutionLimitError(NumericalError):
    """Requested resolution exceeds the memory cap.

    The last result that fit is kept on ``partial``.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class NotStabilizedError(NumericalError):
    """Forward limit-set iteration did not stabilize within the iterate cap."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class EscapeError(NumericalError):
    """An orbit left the family's domain."""


class RasterFormatError(ChainrecError):
    """Corrupt or incompatible raster file."""
