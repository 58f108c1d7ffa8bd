"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class MentionLinkError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MentionLinkError, ValueError):
    """Input data violates a declared invariant."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    pass


class ContractError(MentionLinkError):
    """A precondition of an operation was not met by the caller."""


class DegenerateVectorError(ContractError):
    pass


class StageError(MentionLinkError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
