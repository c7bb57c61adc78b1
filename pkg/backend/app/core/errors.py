"""Exception hierarchy shared by the engine, the experiment harness, the CLI and the API."""


class Nsga3Error(Exception):
    """Base class for all errors raised by this package."""

    exit_code: int = 1


class UsageError(Nsga3Error, ValueError):
    """A caller broke an operation's precondition (bad length, index, parameter range)."""

    exit_code = 1


class RegimeError(UsageError):
    """The requested quantity is only defined inside a parameter regime that does not hold."""


class InvariantViolation(Nsga3Error, RuntimeError):
    """An internal invariant failed; the run cannot be trusted."""

    exit_code = 2


class ExperimentIOError(Nsga3Error, OSError):
    """Reading or writing an experiment file failed."""

    exit_code = 3

    def __init__(self, path, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")
