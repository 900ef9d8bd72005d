"""Flow-record CSV ingestion, validation, and numeric encoding.

Input files are RFC-4180-style CSV with a header line, UTF-8, comma
delimited. A FlowSchema names the columns of interest and their kinds;
columns present in the file but absent from the schema are ignored.
Source/destination address columns are excluded structurally: a schema
simply never lists them as features.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    EncoderMissing,
    FlowlabError,
    MissingColumn,
    MissingHeader,
    ParseError,
    UnknownColumn,
    UnknownLabel,
    UnseenValue,
)

KINDS = ("integer", "real", "text")
TARGETS = ("binary_label", "attack_category")

Value = Union[int, float, str]


@dataclass(frozen=True)
class FlowSchema:
    """Typed column layout plus the roles (features, label, attack) of columns.

    label_column may be None for derived tables (query projections) that
    carry no target.
    """

    columns: tuple  # of (name, kind) pairs
    feature_columns: tuple
    label_column: Optional[str]
    attack_column: Optional[str] = None

    def __post_init__(self):
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            raise FlowlabError("duplicate column names in schema")
        for _, kind in self.columns:
            if kind not in KINDS:
                raise FlowlabError(f"unknown column kind {kind!r}")
        for name in self.feature_columns:
            if name not in names:
                raise FlowlabError(f"feature column {name!r} not declared in columns")
        for name in (self.label_column, self.attack_column):
            if name is not None and name not in names:
                raise FlowlabError(f"column {name!r} not declared in columns")

    def names(self) -> tuple:
        return tuple(n for n, _ in self.columns)

    def kind_of(self, name: str) -> str:
        for n, k in self.columns:
            if n == name:
                return k
        raise UnknownColumn(name)

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.columns):
            if n == name:
                return i
        raise UnknownColumn(name)


# The NetFlow-variant header used throughout: destination port, application
# protocol, cumulative TCP flags, binary label, attack category name.
DEFAULT_SCHEMA = FlowSchema(
    columns=(
        ("L4_DST_PORT", "integer"),
        ("L7_PROTO", "real"),
        ("TCP_FLAGS", "integer"),
        ("Label", "integer"),
        ("Attack", "text"),
    ),
    feature_columns=("L4_DST_PORT", "L7_PROTO", "TCP_FLAGS"),
    label_column="Label",
    attack_column="Attack",
)


@dataclass(frozen=True)
class RecordTable:
    schema: FlowSchema
    rows: tuple  # of value tuples, one per schema column
    row_count: int
    skipped: int = 0  # malformed rows dropped in lenient mode

    def __post_init__(self):
        if self.row_count != len(self.rows):
            raise FlowlabError("row_count does not match rows")

    def column(self, name: str) -> list:
        i = self.schema.index_of(name)
        return [row[i] for row in self.rows]


def _parse_value(text: str, kind: str) -> Value:
    if kind == "integer":
        return int(text)
    if kind == "real":
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("non-finite real")
        return v
    return text


def load_flow_csv(path, schema: FlowSchema = DEFAULT_SCHEMA, lenient: bool = False) -> RecordTable:
    """Load a CSV file against a schema.

    Strict mode (default) raises ParseError on the first malformed row;
    lenient mode skips malformed rows and counts them in RecordTable.skipped.
    Row order of the file is preserved; blank lines are ignored.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingHeader(f"{path}: file has no header line") from None
        positions = {}
        for name, _ in schema.columns:
            if name not in header:
                raise MissingColumn(name)
            positions[name] = header.index(name)
        rows = []
        skipped = 0
        rownum = 0
        for raw in reader:
            if not raw:
                continue
            rownum += 1
            parsed = []
            try:
                for name, kind in schema.columns:
                    pos = positions[name]
                    if pos >= len(raw):
                        raise ParseError(rownum, name, "<missing field>")
                    try:
                        parsed.append(_parse_value(raw[pos], kind))
                    except ValueError:
                        raise ParseError(rownum, name, raw[pos]) from None
            except ParseError:
                if lenient:
                    skipped += 1
                    continue
                raise
            rows.append(tuple(parsed))
    return RecordTable(schema=schema, rows=tuple(rows), row_count=len(rows), skipped=skipped)


def _format_value(value: Value, kind: str) -> str:
    if kind == "real":
        return repr(float(value))
    return str(value)


def write_flow_csv(table: RecordTable, path) -> None:
    """Write a RecordTable back to CSV. load(write(t)) == t exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.schema.names())
        kinds = [k for _, k in table.schema.columns]
        for row in table.rows:
            writer.writerow([_format_value(v, k) for v, k in zip(row, kinds)])


@dataclass(frozen=True)
class EncoderMap:
    """Injective raw-value -> dense code mapping for one column.

    Codes are 0..n-1 assigned in ascending raw-value order, so the mapping
    is independent of row order. policy governs unseen values at encode
    time: strict raises, lenient routes them to a shared bucket whose code
    equals the mapping size.
    """

    column: str
    mapping: dict
    policy: str = "strict"

    def __post_init__(self):
        if self.policy not in ("strict", "lenient"):
            raise FlowlabError(f"unknown encoder policy {self.policy!r}")
        codes = sorted(self.mapping.values())
        if codes != list(range(len(codes))):
            raise FlowlabError("encoder codes must be dense from 0")


def fit_encoder(table: RecordTable, column: str, policy: str = "strict") -> EncoderMap:
    values = table.column(column)  # raises UnknownColumn
    distinct = sorted(set(values))
    return EncoderMap(column=column, mapping={v: i for i, v in enumerate(distinct)}, policy=policy)


def encode(emap: EncoderMap, values: Sequence[Value]) -> list:
    out = []
    unknown = len(emap.mapping)
    for v in values:
        code = emap.mapping.get(v)
        if code is None:
            if emap.policy == "strict":
                raise UnseenValue(v)
            code = unknown
        out.append(code)
    return out


def decode(emap: EncoderMap, codes: Sequence[int]) -> list:
    inverse = {c: v for v, c in emap.mapping.items()}
    out = []
    for c in codes:
        if c not in inverse:
            raise UnseenValue(c)
        out.append(inverse[c])
    return out


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense row-major design matrix with one name per column."""

    names: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 2:
            raise FlowlabError("feature matrix must be 2-D")
        if v.shape[1] != len(self.names):
            raise FlowlabError("names length must equal the number of columns")
        if v.size and not np.all(np.isfinite(v)):
            raise FlowlabError("feature matrix contains non-finite values")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelVector:
    values: np.ndarray
    semantics: str = "binary_label"
    classes: tuple = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", v)
        if self.semantics not in TARGETS:
            raise FlowlabError(f"unknown label semantics {self.semantics!r}")
        classes = self.classes
        if classes is None:
            classes = tuple(sorted(set(int(x) for x in v)))
        object.__setattr__(self, "classes", tuple(classes))
        if self.semantics == "binary_label" and not set(self.classes) <= {0, 1}:
            raise UnknownLabel(f"binary labels must be 0/1, got classes {self.classes}")

    def __len__(self) -> int:
        return len(self.values)


def assemble(
    table: RecordTable,
    schema: FlowSchema,
    encoders: Sequence[EncoderMap],
    target: str = "binary_label",
) -> "tuple[FeatureMatrix, LabelVector]":
    """Build the design matrix and aligned label vector.

    Feature columns follow schema.feature_columns order. A column with a
    fitted encoder is emitted as codes; a numeric column without one is
    emitted raw; a text column without one raises EncoderMissing. Output
    row i always corresponds to table row i.
    """
    if target not in TARGETS:
        raise FlowlabError(f"unknown target {target!r}")
    by_column = {e.column: e for e in encoders}
    n = table.row_count
    cols = []
    for name in schema.feature_columns:
        raw = table.column(name)
        if name in by_column:
            cols.append(np.asarray(encode(by_column[name], raw), dtype=np.float64))
        elif schema.kind_of(name) == "text":
            raise EncoderMissing(name)
        else:
            cols.append(np.asarray(raw, dtype=np.float64))
    values = np.column_stack(cols) if cols and n else np.zeros((n, len(cols)))
    matrix = FeatureMatrix(names=tuple(schema.feature_columns), values=values)

    if target == "binary_label":
        if schema.label_column is None:
            raise FlowlabError("schema declares no label column")
        raw = table.column(schema.label_column)
        if schema.label_column in by_column:
            labels = encode(by_column[schema.label_column], raw)
        else:
            labels = [int(v) for v in raw]
    else:
        if schema.attack_column is None:
            raise FlowlabError("schema declares no attack column")
        raw = table.column(schema.attack_column)
        if schema.attack_column in by_column:
            labels = encode(by_column[schema.attack_column], raw)
        elif schema.kind_of(schema.attack_column) == "text":
            raise EncoderMissing(schema.attack_column)
        else:
            labels = [int(v) for v in raw]
    return matrix, LabelVector(values=np.asarray(labels, dtype=np.int64), semantics=target)


def load_schema(path) -> FlowSchema:
    """Read a schema file: JSON with columns/features/label/attack keys."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        columns = tuple((str(n), str(k)) for n, k in doc["columns"])
        features = tuple(str(n) for n in doc["features"])
        label = doc.get("label")
        attack = doc.get("attack")
    except (KeyError, TypeError, ValueError) as exc:
        raise FlowlabError(f"malformed schema file {path}: {exc}") from None
    return FlowSchema(
        columns=columns,
        feature_columns=features,
        label_column=None if label is None else str(label),
        attack_column=None if attack is None else str(attack),
    )


def save_schema(schema: FlowSchema, path) -> None:
    doc = {
        "columns": [[n, k] for n, k in schema.columns],
        "features": list(schema.feature_columns),
        "label": schema.label_column,
        "attack": schema.attack_column,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
