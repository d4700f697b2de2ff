"""Exception hierarchy shared across the package."""


class GIndexError(Exception):
    """Base class for all errors raised by gindexlab."""


# -- circle-level -------------------------------------------------------------

class NearZeroValue(GIndexError):
    """A function required to be bounded away from zero is not."""


class UnresolvedWinding(GIndexError):
    """Accumulated argument increments do not round cleanly to an integer."""


class DivisionNearZero(GIndexError):
    """Pointwise reciprocal requested of a function with near-zero values."""


class GridMismatch(GIndexError):
    """Operands live on different circle grids."""


# -- groups / transforms ------------------------------------------------------

class InvalidParameter(GIndexError):
    """A group or realization descriptor has an invalid parameter."""


class NotADiffeo(GIndexError):
    """A circle map whose derivative changes sign was supplied."""


class WindowTooSmall(GIndexError):
    """Frequency window below the minimum size for the requested operation."""


# -- symbols ------------------------------------------------------------------

class GroupMismatch(GIndexError):
    """Crossed symbols or labeled operators over different group actions."""


class UnsupportedGroup(GIndexError):
    """Operation not available for this group kind."""


class NotElliptic(GIndexError):
    """Symbol inversion requested for a non-elliptic symbol."""


class NeumannDivergence(GIndexError):
    """Neumann series for the symbol inverse does not contract."""


# -- quantization -------------------------------------------------------------

class WindowMismatch(GIndexError):
    """Operands quantized on different frequency windows."""


class WindowTooSmallForH(GIndexError):
    """h * N_F does not cover the xi-support of the symbol."""


# -- index engine -------------------------------------------------------------

class NoSpectralGap(GIndexError):
    """Singular values show no usable gap between zero and nonzero groups."""


class NonStabilized(GIndexError):
    """A window sweep did not stabilize to a single value."""


class NoHomomorphism(GIndexError):
    """The group carries no integer homomorphism that is nonzero at g."""


# -- semiclassical ------------------------------------------------------------

class NonIsometricAction(GIndexError):
    """Semiclassical star calculus requested on a non-isometric realization."""


class OrderOverflow(GIndexError):
    """Requested truncation order exceeds what the series can represent."""


class IllConditionedFit(GIndexError):
    """Laurent fit matrix condition number above the admissible bound."""


class TraceDivergence(GIndexError):
    """Trace values fail to saturate as the mode window grows."""


class ResidualNotTraceClass(GIndexError):
    """Parametrix residual contains terms too large near infinity to trace."""


# -- lab runner ---------------------------------------------------------------

class ParseError(GIndexError):
    """Configuration file failed to parse."""


class SchemaError(GIndexError):
    """Configuration parsed but violates the experiment schema."""


class IoError(GIndexError):
    """Report files could not be written."""
