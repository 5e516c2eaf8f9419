"""Exception hierarchy shared across the package.

Each class carries an ``exit_code`` used by the command-line front end:
2 for data problems, 3 for numerical failures.
"""


class PufferError(Exception):
    exit_code = 3
    code = "PUFFER"


class DataError(PufferError, ValueError):
    exit_code = 2
    code = "DATA"


class NumericalError(PufferError, ArithmeticError):
    exit_code = 3
    code = "NUMERICAL"


class DimensionMismatch(DataError):
    code = "DIMENSION_MISMATCH"


class NonFiniteInput(DataError):
    code = "NON_FINITE"


class InvalidSpec(DataError):
    code = "INVALID_SPEC"


class EmptySupport(DataError):
    code = "EMPTY_SUPPORT"


class ParseError(DataError):
    code = "PARSE_ERROR"


class MissingColumn(DataError):
    code = "MISSING_COLUMN"


class NonFiniteValue(NonFiniteInput):
    code = "NON_FINITE_VALUE"


class ZeroVarianceColumn(NumericalError):
    code = "ZERO_VARIANCE"


class AllZeroMatrix(NumericalError):
    code = "ALL_ZERO"


class SingularGram(NumericalError):
    code = "SINGULAR_GRAM"


class NoSuchModel(NumericalError):
    code = "NO_SUCH_MODEL"


class MaxIterationsExceeded(NumericalError):
    code = "MAX_ITER"
