"""Exception types shared across the package.

Everything user-facing derives from NlieError so the CLI can map library
failures onto its exit-code contract in one place.
"""


class NlieError(Exception):
    pass


class DimensionMismatch(NlieError):
    """Operands have incompatible shapes (matrix products, basis sizes, ...)."""


class SingularMatrix(NlieError):
    """A matrix that must be invertible is not."""


class InvalidAlgebra(NlieError):
    """Structure constants do not define a valid algebra for the operation."""


class InvalidParameter(NlieError):
    """A catalog family received a parameter outside its allowed range."""


class UnsupportedArity(NlieError):
    """Arity out of the supported range (n >= 3; tables only for n in 3..5)."""


class ArityBoundViolated(NlieError):
    """A Jacobi-valid algebra on dim n+2 reported a derived algebra larger
    than n+1. That contradicts the dimension bound for such algebras, so
    seeing this exception means structure constants were corrupted after
    validation or there is a bug upstream. It is deliberately loud.
    """


class ParseError(NlieError):
    """Malformed input document (not even JSON). Carries line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(NlieError):
    """Well-formed JSON that violates the document schema. Names the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
