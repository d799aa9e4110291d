"""Shared exception types."""


class ExamforgeError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(ExamforgeError):
    """A document violates the interchange schema; `path` names the offender."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class FormatError(ExamforgeError):
    """An input value has the wrong shape or variant for the operation."""


class ConflictError(ExamforgeError):
    """An append would violate uniqueness or capacity constraints."""


class UnknownParentError(ExamforgeError):
    """A log entry references a parent id that was never recorded."""


class BankLoadError(ExamforgeError):
    """A persisted bank or log is unreadable; `line` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ContractViolationError(ExamforgeError):
    """A pluggable component broke its contract (e.g. unnormalized proposer)."""


class ConfigError(ExamforgeError):
    """Invalid configuration value."""


class CheckpointError(ExamforgeError):
    """An estimator checkpoint is unreadable or has the wrong version."""


class BackendError(ExamforgeError):
    """The chat backend failed or returned unusable output."""


class GenerationError(ExamforgeError):
    """Exam generation exhausted its retry budget; raw outputs kept for audit."""

    def __init__(self, message: str, raw_outputs: tuple[str, ...] = ()):
        self.raw_outputs = raw_outputs
        super().__init__(message)


class UnsupportedInputError(ExamforgeError):
    """The ingestion interface was handed a format it explicitly rejects."""


class SimulationError(ExamforgeError):
    """The simulated student cannot process an item (e.g. unmapped skill)."""


class DispatchError(ExamforgeError):
    """The planner received an unknown request kind."""


class EpisodeError(ExamforgeError):
    """An environment step failed mid-episode."""
