"""Exception hierarchy shared by every walkmax module."""

from __future__ import annotations


class WalkmaxError(Exception):
    """Base class for all errors raised by walkmax."""


class ParameterError(WalkmaxError, ValueError):
    """A parameter or precondition is invalid."""


class OracleTooLargeError(WalkmaxError):
    """The brute-force path oracle was asked for more paths than the configured cap."""


class CoverageError(WalkmaxError):
    """A grid or table is too small for the requested check."""


class DomainError(WalkmaxError, IndexError):
    """An index lies outside the grid or domain of a table."""


class RegimeError(WalkmaxError):
    """Walk or Kennedy parameters fall outside the regime an operation requires."""


class PoleError(WalkmaxError, ZeroDivisionError):
    """A closed form is evaluated at a pole."""


class ConsistencyError(WalkmaxError):
    """An internal identity failed beyond tolerance."""


class AssumptionError(WalkmaxError):
    """A measure violates the embedding assumptions (A1) or (A2)."""


class MeasureError(WalkmaxError):
    """A measure description is invalid."""


class NormalizationError(MeasureError):
    """Atom masses do not sum to one."""


class CenteringError(MeasureError):
    """The measure does not have mean zero."""


class MeasureFormatError(MeasureError):
    """The atoms of a measure are malformed (duplicates, non-positive masses)."""


class InputFileError(WalkmaxError):
    """An input file could not be read or parsed."""

    def __init__(self, path: str, message: str, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        location = path if line is None else f"{path}:{line}:{column or 0}"
        super().__init__(f"{location}: {message}")
