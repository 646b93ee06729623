from typing import Any, Optional


class LabError(Exception):
    """
    Base error for the laboratory.

    Carries the process exit code the CLI reports and a human readable
    detail, the same way an HTTP error carries a status code and detail.
    """

    exit_code: int = 70

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class UsageError(LabError):
    exit_code = 64


class ArgumentError(LabError):
    exit_code = 64


class InputFileError(LabError):
    """Malformed input file; the detail names the file and line."""

    exit_code = 65


class MissingInputError(LabError):
    exit_code = 66


class DomainError(LabError):
    exit_code = 65

    def __init__(self, detail: str, n: Optional[int] = None):
        super().__init__(detail)
        self.n = n


class BoundError(LabError):
    """A declared bound was violated or an unbounded sequence was detected."""

    exit_code = 65

    def __init__(self, detail: str, index: Optional[int] = None, value: Optional[float] = None):
        super().__init__(detail)
        self.index = index
        self.value = value


class RangeError(LabError):
    exit_code = 65


class ConstructionError(LabError):
    exit_code = 65


class NonnegativityError(LabError):
    exit_code = 65

    def __init__(self, detail: str, row: int, column: int):
        super().__init__(detail)
        self.row = row
        self.column = column


class PreconditionError(LabError):
    exit_code = 65


class SuiteError(LabError):
    exit_code = 65

    def __init__(self, detail: str, sample: Any = None):
        super().__init__(detail)
        self.sample = sample


class ConsistencyError(LabError):
    """Two evaluation paths that must agree produced different verdicts."""

    exit_code = 70


class OutputError(LabError):
    exit_code = 74
