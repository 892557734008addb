"""Exception types shared across the toolkit."""

from __future__ import annotations


class SheetDocError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SheetDocError):
    """Positioned syntax error in script, range, or macro source text."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


class CatalogError(SheetDocError):
    """Bad catalog definition or a collision with a seed entry."""


class ExecError(SheetDocError):
    """Action could not be applied to the workbook."""

    def __init__(self, step_index: int, message: str):
        self.step_index = step_index
        self.message = message
        super().__init__(f"step {step_index}: {message}")


class SchemaError(SheetDocError):
    """One or more records violate a file schema; carries all messages."""

    def __init__(self, messages: list[str]):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class WorkbookFormatError(SheetDocError):
    """Workbook file unreadable or carries an unsupported schema version."""


class PromptSizeError(SheetDocError):
    """Prompt exceeds the backend's context budget."""

    def __init__(self, estimated_tokens: int, budget_tokens: int):
        self.estimated_tokens = estimated_tokens
        self.budget_tokens = budget_tokens
        super().__init__(
            f"estimated {estimated_tokens} tokens exceeds budget of {budget_tokens}"
        )


class BackendError(SheetDocError):
    """Transport-level failure talking to a summarization backend."""


class BackendTimeout(BackendError):
    """Backend did not answer within the configured timeout."""


class CompletionParseError(SheetDocError):
    """Completion contained no step lines; carries the raw text."""

    def __init__(self, raw: str):
        self.raw = raw
        super().__init__("no step lines found in completion")


class EmptyInputError(ValueError):
    """Metric input was empty."""


class InsufficientDataError(ValueError):
    """Statistic needs more values than the sample provides."""


class DegenerateVarianceError(ValueError):
    """Both samples have zero variance; the t statistic is undefined."""


class ShapeError(ValueError):
    """Samples disagree on size where a shared N is required."""


class EmbedderError(SheetDocError):
    """Embedding backend failed."""


class FitError(SheetDocError):
    """Embedder could not be fitted (for example an empty vocabulary)."""


class EmptyIndexError(SheetDocError):
    """Retrieval was attempted against an index with no chunks."""
