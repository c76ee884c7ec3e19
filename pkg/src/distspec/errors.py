"""Exception types shared across the package.

Each error carries the process exit code the command line maps it to.
"""


class DistspecError(Exception):
    exit_code = 1


class InvalidInputError(DistspecError, ValueError):
    exit_code = 2


class NumericDegeneracyError(DistspecError, ArithmeticError):
    # degenerate data is reported as bad input at the CLI level
    exit_code = 2


class UnsupportedTripleError(DistspecError):
    exit_code = 3


class InsufficientDataError(DistspecError):
    exit_code = 4
