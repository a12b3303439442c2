"""Exception types shared across the package."""


class ImapkError(Exception):
    """Base class for all errors raised by this package."""


class MixedFieldContexts(ImapkError):
    """Operands belong to different algebraic number field contexts."""


class DivisionByZero(ImapkError, ZeroDivisionError):
    pass


class ReducibleMinimalPolynomial(ImapkError):
    """The defining polynomial factors in a way that makes a sign query ambiguous.

    Raised when an element is nonzero as a coefficient vector but its real
    image at the isolated root is zero; the user-supplied polynomial was not
    irreducible.
    """


class InvalidNumberField(ImapkError):
    pass


class OutOfDomain(ImapkError):
    pass


class PartitionNotIncreasing(ImapkError):
    pass


class EndpointsNotZeroOne(ImapkError):
    pass


class ZeroSlope(ImapkError):
    pass


class BranchImageOutsideUnitInterval(ImapkError):
    pass


class NotAnExchangeMap(ImapkError):
    pass


class NotSquare(ImapkError):
    pass


class NotZeroOne(ImapkError):
    pass


class NotSurjective(ImapkError):
    pass


class NonIntegerDependence(ImapkError):
    """A rational linear dependence was found whose coefficients are not integers."""

    def __init__(self, coefficients):
        self.coefficients = list(coefficients)
        super().__init__(
            "dependence coefficients are rational but not integral: %s"
            % (self.coefficients,)
        )


class CyclicityNotEstablished(ImapkError):
    pass


class InconsistentCaseData(ImapkError):
    pass


class WrongFamily(ImapkError):
    pass


class ParameterOutOfRange(ImapkError):
    pass


class UnrealizableMatrix(ImapkError):
    pass


class HypothesisViolatedWithinCap(ImapkError):
    pass


class LengthExceedsCap(ImapkError):
    pass


class InvalidMarkovPartition(ImapkError):
    pass


class SpecSyntaxError(ImapkError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__("line %d, column %d: %s" % (line, column, message))


class SpecSemanticError(ImapkError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line %d, column %d: %s" % (line, column or 0, message)
        super().__init__(message)
