# core/errors.py
"""Exception hierarchy shared by the library and the command line.

Every class carries a ``category`` (printed by the CLI) and the process
``exit_code`` used when it escapes to ``run.py``.
"""


class BipartiteError(Exception):
    category = "computation"
    exit_code = 3


class UsageError(BipartiteError):
    category = "usage"
    exit_code = 1


class InputError(BipartiteError):
    category = "input"
    exit_code = 2


class ParseError(InputError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class EmptyGraphError(InputError):
    pass


class NodeNotFoundError(InputError):
    pass


class ComputationError(BipartiteError):
    category = "computation"
    exit_code = 3


class UndefinedStatisticError(ComputationError):
    pass


class InvalidArgumentError(ComputationError):
    pass


class InvalidPartitionError(ComputationError):
    pass


class DegenerateFitError(ComputationError):
    pass


class ConvergenceError(ComputationError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            detail = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class InvalidComparisonError(ComputationError):
    pass
