"""Error types raised by the numerical modules.

Each error has a machine-readable ``code`` (its class name) and the process
exit code the management commands use for it.
"""

EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class BetaLabError(ValueError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    @property
    def code(self):
        return type(self).__name__

    def as_dict(self):
        return {'error': self.code, 'message': str(self), 'details': self.details}


class DegenerateImmersion(BetaLabError):
    """First partials are (numerically) dependent."""


class LagrangianPoint(BetaLabError):
    """cos(alpha) vanishes where a division by it is required."""


class ComplexPoint(BetaLabError):
    """sin(alpha) vanishes where the adapted frame is required."""


class GridTooCoarse(BetaLabError):
    pass


class NoSolution(BetaLabError):
    """The first-integral equation has no root (inside the catenoid neck)."""


class InvalidBeta(BetaLabError):
    pass


class NotCritical(BetaLabError):
    """The surface fails the criticality gate of the second variation formulas."""


class EllipticityViolation(BetaLabError):
    exit_code = EXIT_CHECK_FAILURE


class AsymptoticMismatch(BetaLabError):
    exit_code = EXIT_CHECK_FAILURE


class BoundViolation(BetaLabError):
    exit_code = EXIT_CHECK_FAILURE


class SlopeOverflow(BetaLabError):
    """The slope magnitude solving the first integrals is beyond double precision.

    Happens for small beta > 0 close to the origin, where rho grows like
    (|c|/r)^(1/beta).
    """


class InvalidDomain(BetaLabError):
    """Radii or grid bounds outside (0, inf), or a missing radial range."""

    exit_code = EXIT_USAGE
