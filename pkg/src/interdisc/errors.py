"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: usage errors exit 1, data errors exit 2,
numerical errors exit 3.
"""


class InterdiscError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class UsageError(InterdiscError):
    """Bad command-line arguments or option combinations."""

    exit_code = 1


class DataError(InterdiscError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class ParseError(DataError):
    """A row of an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCorpusError(DataError):
    """An input file contained no usable citation data."""


class DimensionError(DataError):
    """A matrix input had incompatible or non-square dimensions."""


class MetadataConflictError(DataError):
    """Two metadata rows describe the same journal."""


class UnknownJournalError(DataError):
    """A journal id or name is not present in the registry."""


class NumericalError(InterdiscError):
    """A computation is undefined or numerically infeasible for the input."""

    exit_code = 3


class UndefinedIndicatorError(NumericalError):
    """The indicator is undefined for this vector (e.g. empty support)."""


class UndefinedCorrelationError(NumericalError):
    """Correlation is undefined (constant column or too few observations)."""


class ContractError(NumericalError):
    """An input violated a numerical precondition (e.g. unnormalized p)."""


class RankError(NumericalError):
    """Requested factor count exceeds the rank of the correlation matrix."""


class CountOverflowError(NumericalError):
    """Integer products would exceed the exact range of the count type."""
