"""Exception hierarchy shared across the package.

DataError covers ingestion, validation, and file/network I/O problems
(CLI exit code 2). NumericalError covers failures inside the numeric
pipeline (CLI exit code 3). UsageError covers bad flags or config
values (CLI exit code 1).
"""


class SupertrendBoError(Exception):
    pass


class UsageError(SupertrendBoError):
    pass


class DataError(SupertrendBoError):
    pass


class NumericalError(SupertrendBoError):
    pass


# -- market data ------------------------------------------------------------

class MissingColumn(DataError):
    def __init__(self, column: str):
        super().__init__(f"required CSV column missing: {column!r}")
        self.column = column


class MalformedRow(DataError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"malformed row at line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class NonMonotonicDates(DataError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"dates not strictly ascending at line {line_number}: {reason}")
        self.line_number = line_number


class EmptySeries(DataError):
    pass


class AllRowsDropped(DataError):
    pass


class DegenerateRange(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class EndpointUnconfigured(DataError):
    pass


class HttpFailure(DataError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"HTTP request failed with status {status}" + (f": {detail}" if detail else ""))
        self.status = status


class EmptyResponse(DataError):
    pass


class IoFailure(DataError):
    def __init__(self, path, detail: str = ""):
        super().__init__(f"I/O failure for {path}" + (f": {detail}" if detail else ""))
        self.path = path


# -- strategy / backtest ----------------------------------------------------

class EmptyAfterWarmup(DataError):
    pass


class NonPositiveBalance(NumericalError):
    pass


# -- optimizer --------------------------------------------------------------

class SingularKernel(NumericalError):
    pass


class SpaceExhausted(NumericalError):
    pass
