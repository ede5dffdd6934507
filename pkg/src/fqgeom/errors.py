"""Exception types shared across the package."""


class NonPrime(ValueError):
    """Field characteristic is not an odd prime."""


class UnsupportedDegree(ValueError):
    """Extension degree outside the supported range."""


class TooLarge(ValueError):
    """An exhaustive enumeration would exceed the configured guardrails."""


class WrongResidue(ValueError):
    """An operation requires q = 3 (mod 4) and the field does not satisfy it."""


class DimensionMismatch(ValueError):
    """Points, motions or sets over incompatible fields or dimensions."""


class NotInDomain(ValueError):
    """Rotation-parameter lookup applied to a matrix outside its domain."""


class DegenerateSegment(ValueError):
    """Segment of norm zero where a nonzero base length is required."""


class NotOriented(ValueError):
    """A motion set required to consist of orientation-preserving non-translations does not."""


class BadParameters(ValueError):
    """Construction recipe parameters violate a divisibility or residue constraint."""


class FormMismatch(RuntimeError):
    """Definitional and closed-form line computations disagree.

    This is a regression tripwire; it is never expected to fire.
    """
