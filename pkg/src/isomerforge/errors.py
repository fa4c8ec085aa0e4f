"""Exception hierarchy.

Two families matter for the CLI exit codes: ``ValidationError`` (bad or
inadmissible input data, exit code 2) and ``NumericalError`` (a solve or
normalization that failed at run time, exit code 3).
"""


class IsomerForgeError(Exception):
    """Base class for all library errors."""


class ValidationError(IsomerForgeError):
    """Input data violates a documented precondition."""


class NumericalError(IsomerForgeError):
    """A numerical procedure failed to converge or became singular."""


class SpectralResolutionError(NumericalError):
    """A function could not be resolved to tolerance on the largest grid."""


class NonRegularCurve(ValidationError):
    """The curve's speed drops below the regularity threshold."""


class VanishingCurvature(ValidationError):
    """Curvature too small: the Frenet frame is undefined."""


class NonPositiveCurvature(ValidationError):
    """The curvature function is not positive everywhere."""


class EmbeddednessViolation(ValidationError):
    """Minimum self-distance of the curve is below the threshold."""


class DegenerateProjection(ValidationError):
    """A point maps too close to the projection pole."""


class VanishingHalfCurvature(ValidationError):
    """The cusp profile vanishes on the edge (m(t, 0) ~ 0 somewhere)."""


class KossowskiViolation(ValidationError):
    """A stored metric fails one of the degeneracy conditions.

    ``details`` lists which condition failed and where.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or []


class OrientationError(ValidationError):
    """The area density coefficient vanishes or changes sign."""


class AdmissibilityViolation(ValidationError):
    """max |kappa_s| >= min kappa: the edge is outside the admissible class."""


class PointwiseAdmissibilityViolation(ValidationError):
    """|kappa_s(t)| >= kappa(t) at some parameter: reconstruction impossible."""


class AngleRecoveryFailure(NumericalError):
    """Edge jets are inconsistent with any cuspidal angle."""


class JetSolveFailure(NumericalError):
    """A per-order jet solve was singular beyond tolerance."""

    def __init__(self, message, order=None, t=None):
        super().__init__(message)
        self.order = order
        self.t = t


class ReparametrizationFailure(NumericalError):
    """Half-arc-length normalization diverged on the domain."""


class NormalFormFailure(NumericalError):
    """Normal-form conversion could not be completed."""
