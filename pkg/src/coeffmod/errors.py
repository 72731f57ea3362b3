"""Exception hierarchy shared by all coeffmod components."""


class CoeffmodError(Exception):
    """Base class for every error raised by this package."""


class FieldMismatchError(CoeffmodError):
    """Operands live over different coefficient fields."""


class DimensionMismatchError(CoeffmodError):
    """Vectors or subspaces with incompatible ambient dimensions."""


class RingMismatchError(CoeffmodError):
    """Polynomials built over different ring descriptors."""


class ParseError(CoeffmodError):
    """Bad polynomial or spec-file text; carries a position when known."""

    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif position is not None:
            where = f" (at offset {position})"
        super().__init__(message + where)


class RegimeError(CoeffmodError):
    """Operation requires the monomial regime (or finite colength) and the
    input does not satisfy it."""


class NotASubpairError(CoeffmodError):
    """A quotient length was requested for modules that are not nested."""


class InfiniteLengthError(CoeffmodError):
    """The requested quotient has infinite length."""


class UndecidedColengthError(CoeffmodError):
    """Colength search hit its ceiling without an answer; enlarge the ceiling
    or switch to a monomial presentation."""


class UnstableUnionError(CoeffmodError):
    """An ascending union (saturation, Ratliff-Rush) did not stabilize within
    the allotted number of steps.  Carries the partial chain."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class UnstableFitError(CoeffmodError):
    """A length table could not be matched by a polynomial tail with the
    required number of confirming points."""

    def __init__(self, message, values=None):
        self.values = values
        super().__init__(message)


class StructuralError(CoeffmodError):
    """A verified precondition failed, e.g. floor * elem not inside the colon
    target: usually signals a wrong n0 or a non-reduction."""


class UndecidedSpreadError(CoeffmodError):
    """The fiber dimension table did not stabilize; carries the partial
    table."""

    def __init__(self, message, table=None):
        self.table = table
        super().__init__(message)


class GenericityFailureError(CoeffmodError):
    """Random draws exhausted the attempt budget without producing a
    verified reduction; suggests a larger field or a larger power."""


class RankDeficientError(CoeffmodError):
    """Fitting ideal requested for a presentation with fewer generators than
    the rank of the ambient free module."""


class BasisSizeError(CoeffmodError):
    """A fitted polynomial does not fit in the declared binomial basis."""
