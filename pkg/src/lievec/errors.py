"""Exception types shared across the package."""


class LievecError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LievecError):
    """Syntax or lookup failure while parsing an expression or DSL file."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UndeclaredVariableError(ParseError):
    """Identifier not declared in the chart the text is parsed against."""


class NonLinearExpArgumentError(ParseError):
    """The argument of exp(...) is not a linear form in base variables."""


class ExprDivisionError(LievecError, ZeroDivisionError):
    """Division by an expression whose canonical form is zero."""


class UnsupportedExprError(LievecError):
    """Value falls outside the representable class.

    Raised e.g. when a denominator mixes terms with distinct exponential
    factors, which cannot be normalized to an exponential-free denominator.
    """


class FractionalExpExponentError(LievecError):
    """An exp atom with a non-integer exponent was substituted or expanded."""


class UnboundSymbolError(LievecError):
    """Evaluation or substitution met a symbol with no binding."""


class SingularPointError(LievecError):
    """A denominator evaluated to zero at the sample point; resample."""


class ChartMismatchError(LievecError):
    """Operands live on different charts."""


class MapVerificationError(LievecError):
    """A point map failed the forward/inverse identity check."""


class UnsupportedMapError(LievecError):
    """The point map lacks the data needed for the requested operation."""


class NotClosedError(LievecError):
    """Bracket closure exceeded the dimension budget."""


class NotInSpanError(LievecError):
    """A field is not a rational combination of the given basis."""

    def __init__(self, message: str, residual=None):
        self.residual = residual
        super().__init__(message)


class NotEigenvectorError(LievecError):
    """[H, X] is not proportional to X."""


class RootDecompositionError(LievecError):
    """The adjoint action does not split as required (non-diagonal action,
    non-integral root coordinates, or a repeated root)."""


class RankSamplingError(LievecError):
    """All sample points hit singularities within the retry budget."""


class NotSolvableError(LievecError):
    """An exact linear system has no (unique) solution."""


class UnsupportedFieldError(LievecError):
    """A field is outside the exp(linear) * constant class required here."""
