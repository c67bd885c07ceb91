"""Exception hierarchy for the bandit conformal package."""

from typing import Optional


class BanditCPError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BanditCPError, ValueError):
    """Raised when an operation receives arguments outside its domain."""


class DataFormatError(InvalidInputError):
    """Raised when a dataset file cannot be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ConfigError(BanditCPError, ValueError):
    """Raised when a run configuration is invalid."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class RunError(BanditCPError, RuntimeError):
    """Raised when an online run aborts."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"run aborted at step {step}: {message}")


class LabelLeakError(BanditCPError):
    """Raised by the label audit when a label is read outside an allowed site."""
