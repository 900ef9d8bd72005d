"""Filter-expression mini-language over stage tables.

Grammar (case-insensitive keywords, NOT binds tighter than AND, AND tighter
than OR):

    expr        := or_expr
    or_expr     := and_expr (OR and_expr)*
    and_expr    := not_expr (AND not_expr)*
    not_expr    := NOT not_expr | primary
    primary     := '(' expr ')' | comparison
    comparison  := IDENT op literal
    op          := '==' | '!=' | '<' | '<=' | '>' | '>='
    literal     := number | single-quoted string (no escape sequences)

render_query produces a canonical text form; parse_query(render_query(e))
reconstructs e exactly.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import Optional, Union

from ..errors import QuerySyntaxError, TypeMismatch, UnknownColumn, WorkspaceError
from ..flowdata import FlowSchema, RecordTable
from .workspace import Workspace, find_entry

OPS = ("==", "!=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str
    value: Union[int, float, str]


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    operand: object


QueryExpr = Union[Comparison, And, Or, Not]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<quote>')
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    value: object
    pos: int


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(pos, ("a comparison", "a parenthesized expression"))
        kind = m.lastgroup
        if kind == "ws":
            pos = m.end()
            continue
        if kind == "quote":
            end = text.find("'", m.end())
            if end < 0:
                raise QuerySyntaxError(pos, ("a closing quote",))
            tokens.append(_Token("string", text[m.end() : end], pos))
            pos = end + 1
            continue
        if kind == "number":
            raw = m.group()
            value = int(raw) if re.fullmatch(r"-?\d+", raw) else float(raw)
            tokens.append(_Token("number", value, pos))
        elif kind == "ident":
            word = m.group()
            upper = word.upper()
            if upper in ("AND", "OR", "NOT"):
                tokens.append(_Token(upper, word, pos))
            else:
                tokens.append(_Token("ident", word, pos))
        else:
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def expect(self, kind: str, expected: tuple) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise QuerySyntaxError(token.pos, expected)
        return self.take()

    def parse(self) -> QueryExpr:
        expr = self.or_expr()
        token = self.peek()
        if token.kind != "end":
            raise QuerySyntaxError(token.pos, ("AND", "OR", "end of input"))
        return expr

    def or_expr(self) -> QueryExpr:
        node = self.and_expr()
        while self.peek().kind == "OR":
            self.take()
            node = Or(node, self.and_expr())
        return node

    def and_expr(self) -> QueryExpr:
        node = self.not_expr()
        while self.peek().kind == "AND":
            self.take()
            node = And(node, self.not_expr())
        return node

    def not_expr(self) -> QueryExpr:
        if self.peek().kind == "NOT":
            self.take()
            return Not(self.not_expr())
        return self.primary()

    def primary(self) -> QueryExpr:
        token = self.peek()
        if token.kind == "lparen":
            self.take()
            node = self.or_expr()
            self.expect("rparen", ("a closing parenthesis",))
            return node
        if token.kind == "ident":
            self.take()
            op = self.expect("op", ("a comparison operator",))
            lit = self.peek()
            if lit.kind not in ("number", "string"):
                raise QuerySyntaxError(lit.pos, ("a number", "a quoted string"))
            self.take()
            return Comparison(column=token.value, op=op.value, value=lit.value)
        raise QuerySyntaxError(token.pos, ("a column name", "NOT", "a parenthesized expression"))


def parse_query(text: str) -> QueryExpr:
    return _Parser(text).parse()


def _render_literal(value) -> str:
    if isinstance(value, str):
        if "'" in value:
            raise WorkspaceError("string literals cannot contain single quotes")
        return f"'{value}'"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_query(expr: QueryExpr) -> str:
    """Canonical text form; parse_query inverts it exactly."""
    if isinstance(expr, Comparison):
        return f"{expr.column} {expr.op} {_render_literal(expr.value)}"
    if isinstance(expr, Not):
        inner = render_query(expr.operand)
        if isinstance(expr.operand, (Comparison, Not)):
            return f"NOT {inner}"
        return f"NOT ({inner})"
    if isinstance(expr, And):
        left = render_query(expr.left)
        if isinstance(expr.left, Or):
            left = f"({left})"
        right = render_query(expr.right)
        if isinstance(expr.right, (And, Or)):
            right = f"({right})"
        return f"{left} AND {right}"
    if isinstance(expr, Or):
        left = render_query(expr.left)
        right = render_query(expr.right)
        if isinstance(expr.right, Or):
            right = f"({right})"
        return f"{left} OR {right}"
    raise WorkspaceError(f"not a query expression: {type(expr).__name__}")


def _numeric(kind: str) -> bool:
    return kind in ("integer", "real")


def bind_query(expr: QueryExpr, schema: FlowSchema) -> None:
    """Check columns exist and literals are type-compatible."""
    if isinstance(expr, Comparison):
        kind = schema.kind_of(expr.column)  # raises UnknownColumn
        literal_numeric = isinstance(expr.value, (int, float)) and not isinstance(expr.value, bool)
        if literal_numeric != _numeric(kind):
            raise TypeMismatch(expr.column, expr.value)
    elif isinstance(expr, (And, Or)):
        bind_query(expr.left, schema)
        bind_query(expr.right, schema)
    elif isinstance(expr, Not):
        bind_query(expr.operand, schema)
    else:
        raise WorkspaceError(f"not a query expression: {type(expr).__name__}")


def _matches(expr: QueryExpr, row: tuple, index: dict) -> bool:
    if isinstance(expr, Comparison):
        cell = row[index[expr.column]]
        value = expr.value
        if isinstance(cell, (int, float)) and not isinstance(cell, bool):
            cell = float(cell)
            value = float(value)
        if expr.op == "==":
            return cell == value
        if expr.op == "!=":
            return cell != value
        if expr.op == "<":
            return cell < value
        if expr.op == "<=":
            return cell <= value
        if expr.op == ">":
            return cell > value
        return cell >= value
    if isinstance(expr, And):
        return _matches(expr.left, row, index) and _matches(expr.right, row, index)
    if isinstance(expr, Or):
        return _matches(expr.left, row, index) or _matches(expr.right, row, index)
    return not _matches(expr.operand, row, index)


def _infer_kind(cells: list) -> str:
    kind = "integer"
    for cell in cells:
        if kind == "integer":
            try:
                int(cell)
                continue
            except ValueError:
                kind = "real"
        if kind == "real":
            try:
                float(cell)
            except ValueError:
                return "text"
    return kind


def load_stage_table(ws: Workspace, stage: str, name: str) -> RecordTable:
    """Read a manifest-listed CSV with column kinds inferred from content."""
    if find_entry(ws, stage, name) is None:
        raise WorkspaceError(f"{name} is not in the {stage} stage manifest")
    path = ws.stage_path(stage, name)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise WorkspaceError(f"{path} is empty") from None
        raw_rows = [row for row in reader if row]
    columns = []
    for j, name_j in enumerate(header):
        cells = [row[j] for row in raw_rows]
        columns.append((name_j, _infer_kind(cells)))
    schema = FlowSchema(columns=tuple(columns), feature_columns=(), label_column=None)
    rows = []
    for row in raw_rows:
        parsed = []
        for (col, kind), cell in zip(columns, row):
            if kind == "integer":
                parsed.append(int(cell))
            elif kind == "real":
                parsed.append(float(cell))
            else:
                parsed.append(cell)
        rows.append(tuple(parsed))
    return RecordTable(schema=schema, rows=tuple(rows), row_count=len(rows))


def eval_query(
    ws: Workspace,
    stage: str,
    name: str,
    expr: QueryExpr,
    projection: Optional[list] = None,
) -> "tuple[RecordTable, int]":
    """Rows satisfying expr, projected, in input order, plus the match count."""
    table = load_stage_table(ws, stage, name)
    schema = table.schema
    bind_query(expr, schema)
    if projection:
        for col in projection:
            schema.kind_of(col)  # raises UnknownColumn
        keep = list(projection)
    else:
        keep = list(schema.names())
    index = {n: i for i, n in enumerate(schema.names())}
    matched = [row for row in table.rows if _matches(expr, row, index)]
    out_schema = FlowSchema(
        columns=tuple((n, schema.kind_of(n)) for n in keep),
        feature_columns=(),
        label_column=None,
    )
    positions = [index[n] for n in keep]
    out_rows = tuple(tuple(row[p] for p in positions) for row in matched)
    return RecordTable(schema=out_schema, rows=out_rows, row_count=len(out_rows)), len(matched)
