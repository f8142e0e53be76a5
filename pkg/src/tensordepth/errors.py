"""Exception types shared across the library."""


class DepthError(Exception):
    """Base class for every error this library raises on purpose."""


class DimensionError(DepthError, ValueError):
    """Shapes, modes or vector lengths do not line up."""


class DataFormatError(DepthError, ValueError):
    """An input file (CSV, manifest, image) is malformed."""


class DegenerateSampleError(DepthError, ValueError):
    """The sample carries no variation at all (zero scatter)."""


class RankDeficiencyError(DepthError, ValueError):
    """A covariance that must be positive definite is singular.

    ``deficient`` is the number of dimensions without variance, when known.
    """

    def __init__(self, message, deficient=None):
        super().__init__(message)
        self.deficient = deficient


class ProtocolError(DepthError, ValueError):
    """An experiment protocol is invalid or infeasible for the given data."""
