"""Exception hierarchy shared across the package.

Every error that a caller is expected to catch and act on has its own
class; plain misuse (wrong types, impossible shapes the caller could have
checked) raises ValueError.
"""


class SlrcError(Exception):
    """Base class for all package errors."""


class NotPrime(SlrcError):
    """Base field order is not a prime."""


class Reducible(SlrcError):
    """Supplied modulus polynomial is reducible over F_q."""


class DivideByZero(SlrcError):
    """Inversion of the zero field element."""


class LengthMismatch(SlrcError):
    """Message or codeword length does not match the code."""


class RankDeficient(SlrcError):
    """Too few independent evaluation points survive to decode.

    Carries the rank that was found.
    """

    def __init__(self, rank_found, rank_needed):
        super().__init__(
            f"only {rank_found} independent evaluation points, need {rank_needed}"
        )
        self.rank_found = rank_found
        self.rank_needed = rank_needed


class EvaluationMismatch(SlrcError):
    """Redundant evaluations disagree with the decoded polynomial."""


class NonBaseCoefficient(SlrcError):
    """A point combination used coefficients outside the base field."""


class FieldTooSmall(SlrcError):
    """The base field cannot host the requested code."""


class ShapeMismatch(SlrcError):
    """Input block shapes do not match the code specification."""


class NotMds(SlrcError):
    """An array-code instance failed its erasure-pattern certificate.

    Carries the field size and one witness erasure pattern.
    """

    def __init__(self, q, witness):
        super().__init__(f"code is not MDS over F_{q}; witness erasure {witness}")
        self.q = q
        self.witness = tuple(witness)


class MissingSurvivor(SlrcError):
    """A repair needed a node that is not alive."""


class UnsupportedShape(SlrcError):
    """Parameters fall outside both supported group layouts."""


class InsufficientSurvivors(SlrcError):
    """Not enough live nodes in the local group to repair."""


class ModeUnsupported(SlrcError):
    """Requested repair mode is not available for this code."""


class DegenerateSecrecy(SlrcError):
    """The requested eavesdropper class leaves no room for secret data."""


class ScheduleMismatch(SlrcError):
    """A download-eavesdropped node never appears in the repair schedule."""


class TooLarge(SlrcError):
    """An exhaustive enumeration would exceed the configured guard."""


class InvalidVariantParams(SlrcError):
    """Parameter tuple is invalid for the requested bound variant."""


class RepairImpossible(SlrcError):
    """Simulator repair event cannot be satisfied."""


class CollectFailed(SlrcError):
    """Simulator data collector could not reconstruct the file."""


class ValidationError(SlrcError):
    """Config file or CLI input failed validation."""
