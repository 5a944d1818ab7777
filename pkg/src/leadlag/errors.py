"""Exception types raised across the package."""


class LeadLagError(Exception):
    """Base class for every error this package raises on purpose."""


# -- dtw ---------------------------------------------------------------------

class EmptySequence(LeadLagError):
    """A sequence of length zero was passed where length >= 1 is required."""


class BandInfeasible(LeadLagError):
    """The warping band is too narrow to connect (1, 1) with (n, m)."""


class LengthMismatch(LeadLagError):
    """Two inputs that must have equal length do not."""


class ZeroVector(LeadLagError):
    """Cosine distance is undefined for an all-zero vector."""


# -- clustering --------------------------------------------------------------

class KTooLarge(LeadLagError):
    """More clusters requested than there are points."""


# -- lead-lag matrices -------------------------------------------------------

class DegenerateOverlap(LeadLagError):
    """Shifted overlap is too short or has zero variance."""


class ShapeMismatch(LeadLagError):
    """Matrix shapes do not agree."""


class NotSingleMembership(LeadLagError):
    """A loading matrix row has zero or several nonzero entries."""


# -- synthetic generation ----------------------------------------------------

class InvalidSpec(LeadLagError):
    """A factor-model spec violates its own invariants."""


class NotDivisible(LeadLagError):
    """Requested row count is not a multiple of the template size."""


# -- strategy ----------------------------------------------------------------

class DegenerateSplit(LeadLagError):
    """A leader/lagger split left one side empty."""


class InsufficientHistory(LeadLagError):
    """Not enough observations behind the signal date."""


class ZeroVolatility(LeadLagError):
    """Cannot rescale a PnL series whose standard deviation is zero."""


class InsufficientData(LeadLagError):
    """Too few observations to compute the requested statistics."""


# -- panel io / preprocessing ------------------------------------------------

class ParseError(LeadLagError):
    """A CSV cell could not be parsed; the message names the cell."""


class DuplicateDate(LeadLagError):
    """The same date stamp appears twice."""


class NonMonotoneDates(LeadLagError):
    """Date stamps are not strictly increasing."""


class MarketColumnMissing(LeadLagError):
    """The configured market/benchmark column is absent from the panel."""


class EmptyAfterFilter(LeadLagError):
    """Preprocessing dropped everything (or left fewer than two assets)."""


class AllZeroAsset(LeadLagError):
    """A price series is entirely zero and cannot be filled."""
