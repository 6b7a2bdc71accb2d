"""Exception hierarchy shared across the package."""


class CurveClassError(Exception):
    """Base class for all errors raised by curveclass."""


class GridMismatch(CurveClassError):
    """Two grid-discretized objects do not share the same grid."""


class ConvergenceFailure(CurveClassError):
    """An iterative numerical routine failed to converge."""


class DegenerateFit(CurveClassError):
    """Local linear system singular at an evaluation point."""

    def __init__(self, x, message=None):
        self.x = x
        super().__init__(message or f"degenerate local linear fit at x={x!r}")


class InsufficientData(CurveClassError):
    """Too few observations for the requested operation."""


class DegeneratePilot(CurveClassError):
    """Singular pilot regression in the plug-in bandwidth rule."""


class TooFewCurves(CurveClassError):
    """Too few curves in a population for estimation or cross-validation."""


class ZeroScale(CurveClassError):
    """A population scale estimate is numerically zero."""


class RankDeficient(CurveClassError):
    """A requested eigenvalue is below the usable floor."""

    def __init__(self, k, ell, message=None):
        self.k = k
        self.ell = ell
        super().__init__(
            message or f"eigenvalue {ell} of population {k} is below the usable floor"
        )


class NonFiniteScore(CurveClassError):
    """A classification score is NaN or infinite."""


class NonOrthonormalBasis(CurveClassError):
    """Supplied eigenfunctions are not orthonormal under quadrature."""


class ZeroTau(CurveClassError):
    """The tau^2 variance constant is numerically zero."""


class ParseError(CurveClassError):
    """Malformed record in an input file."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class InconsistentLabel(CurveClassError):
    """A curve id appears with more than one label."""

    def __init__(self, curve_id):
        self.curve_id = curve_id
        super().__init__(f"curve {curve_id!r} has inconsistent labels")


class EmptyFile(CurveClassError):
    """An input file contains no data rows."""
