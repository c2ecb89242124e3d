"""Exception hierarchy shared by every module."""


class QuadrisecantError(Exception):
    """Base class for all package errors."""


class DegenerateConfiguration(QuadrisecantError):
    pass


class IllConditioned(QuadrisecantError):
    pass


class NotOnSurface(QuadrisecantError):
    pass


class DegenerateTangency(QuadrisecantError):
    pass


class ValidationError(QuadrisecantError, ValueError):
    """A knot or input file violates its invariants."""


class NotGeneric(QuadrisecantError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FiveSecantDetected(QuadrisecantError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CannotPerturb(QuadrisecantError):
    pass


class UnknownFamily(QuadrisecantError, KeyError):
    pass


class TooFewVertices(QuadrisecantError, ValueError):
    pass


class MissingMetadata(QuadrisecantError):
    pass


class NotDisjoint(QuadrisecantError):
    pass


class ProjectionDegenerate(QuadrisecantError):
    pass


class CannotEmbed(QuadrisecantError):
    pass


class OffsetCollision(QuadrisecantError):
    pass


class CertificateConflict(QuadrisecantError):
    """Both an essential and an inessential certificate fired for one input."""


class NoneCertified(QuadrisecantError):
    pass


class NoQuadrisecants(QuadrisecantError):
    pass


class DomainError(QuadrisecantError, ValueError):
    pass


class ZeroThickness(QuadrisecantError):
    pass


class DegenerateDirection(QuadrisecantError):
    pass


class PointOnKnot(QuadrisecantError):
    """Query point lies on the knot."""
