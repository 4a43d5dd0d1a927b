"""Exception hierarchy for the synthesis library.

Every error carries the name of the module that raised it so the CLI can
report provenance in its machine-parsable error line.
"""


class ShtError(Exception):
    """Base class for all synthesis errors"""
    module = "sht"


# grid

class GridError(ShtError, ValueError):
    """Raised when a ring layout violates the iso-latitude constraints"""
    module = "grid"


class NonMonotoneThetaError(GridError):
    """Raised when ring colatitudes are not strictly increasing"""
    pass


class AsymmetricGridError(GridError):
    """Raised when a ring has no mirror partner across the equator"""
    pass


class PolarRingError(GridError):
    """Raised when a ring sits on a pole (sin theta <= 0)"""
    pass


class InconsistentRingError(GridError):
    """Raised when a ring's cos_theta and sin_theta do not describe its theta"""
    pass


# legendre

class DegenerateIndexError(ShtError, ValueError):
    """Raised when beta is requested for l <= m"""
    module = "legendre"


class ScaleOverflowError(ShtError, ArithmeticError):
    """Raised when a scaled Legendre value leaves the rescale table range"""
    module = "legendre"


# synthesis / ringfft

class DimensionMismatchError(ShtError, ValueError):
    """Raised when coefficient, delta and grid sizes do not agree"""
    module = "synthesis"


class NonRealOutputError(ShtError, ArithmeticError):
    """Raised when a ring synthesis leaves a non-negligible imaginary residue"""
    module = "ringfft"


# layout

class TooManyProcsError(ShtError, ValueError):
    """Raised when there are more virtual processes than m values or ring pairs"""
    module = "layout"


class PhaseError(ShtError, RuntimeError):
    """Raised when a distributed delta is in the wrong phase for an operation"""
    module = "layout"


# oracle

class UnsupportedDegreeError(ShtError, ValueError):
    """Raised when a closed form is requested beyond the tabulated degrees"""
    module = "oracle"


class TooLargeError(ShtError, ValueError):
    """Raised when brute-force synthesis is requested beyond its cost guard"""
    module = "oracle"


# cli

class FileFormatError(ShtError, ValueError):
    """Raised when an alm, grid or map file cannot be parsed"""
    module = "cli"


class BandLimitError(ShtError, ValueError):
    """Raised when lmax/mmax are inconsistent"""
    module = "cli"
