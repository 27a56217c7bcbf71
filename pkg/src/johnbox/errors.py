"""Exception hierarchy shared by all johnbox modules."""


class JohnboxError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(JohnboxError, ValueError):
    """Operands have incompatible dimensions or lift kinds."""


class AsymmetricMatrixError(JohnboxError, ValueError):
    """A matrix required to be symmetric is asymmetric beyond tolerance."""


class SingularMatrixError(JohnboxError):
    """A matrix required to be nonsingular is (numerically) singular."""


class UnboundedBodyError(JohnboxError):
    """A halfspace intersection is unbounded in some direction."""


class InfeasibleBodyError(JohnboxError):
    """A body is empty, lacks an interior, or fails a solver precondition."""


class AsymmetricBodyError(JohnboxError):
    """A body required to be symmetric in the origin is not."""


class DegenerateBodyError(JohnboxError):
    """An inner body is not full-dimensional."""


class NotOnBoundaryError(JohnboxError):
    """A point expected on the boundary of a body is not there."""


class BallNotInscribedError(JohnboxError):
    """A body expected to contain the unit ball tangentially does not."""


class ContainmentError(JohnboxError):
    """An inner body or image is not contained in its container."""


class ConvergenceError(JohnboxError):
    """An iterative solver exhausted its budget before converging."""


class ReductionPreconditionError(JohnboxError):
    """Weights fed to the conic reducer do not reproduce the target."""


class SchemaError(JohnboxError, ValueError):
    """A JSON document does not match the expected body/certificate schema."""
