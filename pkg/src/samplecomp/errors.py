"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries one.
"""


class SampleCompressionError(Exception):
    exit_code = 1


class PreconditionError(SampleCompressionError, ValueError):
    """Inputs fall outside an operation's stated domain."""

    exit_code = 2


class EmptySampleError(PreconditionError):
    pass


class UnsupportedLossError(PreconditionError):
    pass


class SchemeContractError(SampleCompressionError):
    """A selection scheme produced output its contract forbids."""

    exit_code = 3


class WeakLearnerViolation(SchemeContractError):
    """The pool's zero-sum game has value at most 1/2, so no majority cover exists."""

    exit_code = 3

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class BudgetExhausted(SampleCompressionError):
    exit_code = 4

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
