"""Exception types shared across the toolkit.

Everything user- or data-triggered derives from FlowlabError so the CLI can
map it to exit code 1; anything else escaping to the top level is a bug and
maps to exit code 2.
"""

from __future__ import annotations


class FlowlabError(Exception):
    """Base class for all expected (user/data) errors."""


# flowdata

class MissingHeader(FlowlabError):
    pass


class MissingColumn(FlowlabError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} not found in header")
        self.column = column


class ParseError(FlowlabError):
    def __init__(self, row: int, column: str, raw: str):
        super().__init__(f"row {row}: cannot parse {raw!r} for column {column!r}")
        self.row = row
        self.column = column
        self.raw = raw


class UnknownColumn(FlowlabError):
    def __init__(self, column: str):
        super().__init__(f"unknown column {column!r}")
        self.column = column


class UnseenValue(FlowlabError):
    def __init__(self, raw):
        super().__init__(f"value {raw!r} was not seen when the encoder was fitted")
        self.raw = raw


class EncoderMissing(FlowlabError):
    def __init__(self, column: str):
        super().__init__(f"no encoder supplied for column {column!r}")
        self.column = column


# eda

class EmptyInput(FlowlabError):
    pass


class TooFewRows(FlowlabError):
    pass


# sampling

class EmptyLabels(FlowlabError):
    pass


class SingleClass(FlowlabError):
    pass


# learners

class EmptyTraining(FlowlabError):
    pass


class DimensionMismatch(FlowlabError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"model expects {expected} features, got {got}")
        self.expected = expected
        self.got = got


class NoRounds(FlowlabError):
    pass


class VersionMismatch(FlowlabError):
    def __init__(self, found, supported):
        super().__init__(f"model file version {found!r} is not supported (supported: {supported})")
        self.found = found
        self.supported = supported


class CorruptModel(FlowlabError):
    pass


# metrics

class LengthMismatch(FlowlabError):
    pass


class UnknownLabel(FlowlabError):
    pass


class EmptyMatrix(FlowlabError):
    pass


# pipeline

class WorkspaceError(FlowlabError):
    pass


class ConfigError(FlowlabError):
    pass


class MissingResults(FlowlabError):
    pass


class QuerySyntaxError(FlowlabError):
    """Raised by the filter-expression parser.

    position is a 0-based character offset into the source text; expected is
    a tuple of human-readable descriptions of what would have been accepted.
    """

    def __init__(self, position: int, expected: tuple):
        expl = " or ".join(expected)
        super().__init__(f"expected {expl} at position {position}")
        self.position = position
        self.expected = tuple(expected)


class TypeMismatch(FlowlabError):
    def __init__(self, column: str, literal):
        super().__init__(f"literal {literal!r} is not comparable with column {column!r}")
        self.column = column
        self.literal = literal


class PipelineStepError(FlowlabError):
    def __init__(self, step: str, cause: BaseException):
        super().__init__(f"step {step!r} failed: {cause}")
        self.step = step
        self.cause = cause
