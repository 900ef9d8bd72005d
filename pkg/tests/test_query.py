import random
import shutil

import pytest

import oracles
from flowlab.errors import QuerySyntaxError, TypeMismatch, UnknownColumn, WorkspaceError
from flowlab.flowdata import DEFAULT_SCHEMA
from flowlab.pipeline.query import (
    And,
    Comparison,
    Not,
    Or,
    bind_query,
    eval_query,
    load_stage_table,
    parse_query,
    render_query,
)
from flowlab.pipeline.workspace import init_workspace, record_file


# -- parsing -----------------------------------------------------------------


def test_single_comparison():
    assert parse_query("Label == 1") == Comparison("Label", "==", 1)
    assert parse_query("L7_PROTO <= 7.5") == Comparison("L7_PROTO", "<=", 7.5)
    assert parse_query("Attack != 'Benign'") == Comparison("Attack", "!=", "Benign")


def test_and_binds_tighter_than_or():
    got = parse_query("a == 1 OR b == 2 AND c == 3")
    want = Or(Comparison("a", "==", 1), And(Comparison("b", "==", 2), Comparison("c", "==", 3)))
    assert got == want


def test_not_binds_tightest():
    got = parse_query("NOT a == 1 AND b == 2")
    assert got == And(Not(Comparison("a", "==", 1)), Comparison("b", "==", 2))


def test_left_associativity():
    got = parse_query("a == 1 AND b == 2 AND c == 3")
    assert got == And(And(Comparison("a", "==", 1), Comparison("b", "==", 2)), Comparison("c", "==", 3))
    got = parse_query("a == 1 OR b == 2 OR c == 3")
    assert got == Or(Or(Comparison("a", "==", 1), Comparison("b", "==", 2)), Comparison("c", "==", 3))


def test_parentheses_override_precedence():
    got = parse_query("(a == 1 OR b == 2) AND c == 3")
    assert got == And(Or(Comparison("a", "==", 1), Comparison("b", "==", 2)), Comparison("c", "==", 3))


def test_keywords_are_case_insensitive():
    assert parse_query("a == 1 and not b == 2") == parse_query("a == 1 AND NOT b == 2")
    assert parse_query("a == 1 or b == 2") == parse_query("a == 1 OR b == 2")


def test_number_literals():
    assert parse_query("x == -3").value == -3
    assert isinstance(parse_query("x == -3").value, int)
    assert parse_query("x == 2.5e2").value == 250.0
    assert isinstance(parse_query("x == 1.0").value, float)


def test_flow_filter_example():
    got = parse_query("Label == 1 AND L7_PROTO == 6")
    assert got == And(Comparison("Label", "==", 1), Comparison("L7_PROTO", "==", 6))


def test_empty_query_error_at_position_zero():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("")
    assert err.value.position == 0
    assert err.value.expected  # names what would have been legal


def test_error_positions_point_into_the_text():
    cases = {
        "Label ==": len("Label =="),
        "Label == 1 AND": len("Label == 1 AND"),
        "(Label == 1": len("(Label == 1"),
        "Label = 1": len("Label "),
    }
    for text, pos in cases.items():
        with pytest.raises(QuerySyntaxError) as err:
            parse_query(text)
        assert err.value.position == pos, text


def test_trailing_garbage_rejected():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("a == 1 b == 2")
    assert err.value.position == len("a == 1 ")


def test_unterminated_string():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("Attack == 'Benign")
    assert "quote" in " ".join(err.value.expected).lower()


def test_strings_have_no_escapes():
    # a quote always closes the literal; escaping is not part of the grammar
    got = parse_query("Attack == 'a b c'")
    assert got.value == "a b c"


# -- rendering ---------------------------------------------------------------


def test_render_canonical_forms():
    assert render_query(parse_query("a == 1 AND b == 2")) == "a == 1 AND b == 2"
    assert render_query(parse_query("a == 1 OR b == 2 AND c == 3")) == "a == 1 OR b == 2 AND c == 3"
    assert render_query(parse_query("(a == 1 OR b == 2) AND c == 3")) == "(a == 1 OR b == 2) AND c == 3"
    assert render_query(parse_query("NOT (a == 1 AND b == 2)")) == "NOT (a == 1 AND b == 2)"
    assert render_query(parse_query("NOT NOT a == 1")) == "NOT NOT a == 1"
    assert render_query(parse_query("Attack == 'Benign'")) == "Attack == 'Benign'"
    assert render_query(Comparison("x", "<", 2.5)) == "x < 2.5"


def test_render_parse_round_trip_generated():
    rnd = random.Random(23)
    columns = (
        ("L4_DST_PORT", "integer", (22, 53, 80, 443)),
        ("L7_PROTO", "real", (0.0, 5.0, 7.0)),
        ("Attack", "text", ("Benign", "DoS")),
    )
    for _ in range(200):
        expr = oracles.random_query(rnd, columns)
        assert parse_query(render_query(expr)) == expr


# -- binding -----------------------------------------------------------------


def test_bind_unknown_column():
    with pytest.raises(UnknownColumn):
        bind_query(parse_query("SRC_IP == 1"), DEFAULT_SCHEMA)


def test_bind_type_mismatches():
    with pytest.raises(TypeMismatch):
        bind_query(parse_query("Attack == 1"), DEFAULT_SCHEMA)
    with pytest.raises(TypeMismatch):
        bind_query(parse_query("Label == 'x'"), DEFAULT_SCHEMA)
    bind_query(parse_query("L4_DST_PORT == 80.5"), DEFAULT_SCHEMA)  # numeric vs numeric is fine


# -- evaluation --------------------------------------------------------------


@pytest.fixture
def raw_ws(tmp_path, fixture_csv):
    ws = init_workspace(tmp_path / "ws")
    shutil.copyfile(fixture_csv, ws.stage_path("raw", "dataset.csv"))
    record_file(ws, "raw", "dataset.csv", step="ingest", config_hash="test")
    return ws


def test_eval_two_row_fixture(tmp_path, two_row_csv):
    ws = init_workspace(tmp_path / "ws")
    shutil.copyfile(two_row_csv, ws.stage_path("raw", "dataset.csv"))
    record_file(ws, "raw", "dataset.csv", step="ingest", config_hash="test")
    table, count = eval_query(ws, "raw", "dataset.csv", parse_query("Label == 1"))
    assert count == 1
    assert table.rows[0][table.schema.index_of("Attack")] == "Exploits"


def test_eval_projection_and_order(raw_ws):
    expr = parse_query("Label == 0")
    table, count = eval_query(raw_ws, "raw", "dataset.csv", expr, projection=["Attack", "Label"])
    assert count == 900
    assert table.schema.names() == ("Attack", "Label")
    assert set(table.column("Attack")) == {"Benign"}


def test_eval_tautology_returns_everything(raw_ws):
    expr = parse_query("Label == 0 OR Label != 0")
    _, count = eval_query(raw_ws, "raw", "dataset.csv", expr)
    assert count == 1000


def test_eval_not_partitions(raw_ws):
    _, n_pos = eval_query(raw_ws, "raw", "dataset.csv", parse_query("TCP_FLAGS >= 16"))
    _, n_neg = eval_query(raw_ws, "raw", "dataset.csv", parse_query("NOT TCP_FLAGS >= 16"))
    assert n_pos + n_neg == 1000


def test_eval_numeric_comparisons_coerce_kinds(raw_ws):
    # integer column against a real literal
    _, a = eval_query(raw_ws, "raw", "dataset.csv", parse_query("L4_DST_PORT < 100.5"))
    _, b = eval_query(raw_ws, "raw", "dataset.csv", parse_query("L4_DST_PORT <= 100"))
    assert a == b


def test_eval_text_ordering_is_lexicographic(raw_ws):
    table, _ = eval_query(raw_ws, "raw", "dataset.csv", parse_query("Attack > 'C'"))
    assert set(table.column("Attack")) <= {"DoS", "Exploits", "Fuzzers", "Generic", "Reconnaissance"}


def test_eval_unknown_projection_column(raw_ws):
    with pytest.raises(UnknownColumn):
        eval_query(raw_ws, "raw", "dataset.csv", parse_query("Label == 0"), projection=["nope"])


def test_eval_matches_bruteforce_filter(raw_ws):
    table = load_stage_table(raw_ws, "raw", "dataset.csv")
    names = list(table.schema.names())
    kinds = {n: table.schema.kind_of(n) for n in names}
    ports = tuple(sorted(set(table.column("L4_DST_PORT"))))[:6]
    protos = tuple(sorted(set(table.column("L7_PROTO"))))[:4]
    flags = tuple(sorted(set(table.column("TCP_FLAGS"))))[:4]
    attacks = tuple(sorted(set(table.column("Attack"))))[:3]
    columns = (
        ("L4_DST_PORT", "integer", ports),
        ("L7_PROTO", "real", protos),
        ("TCP_FLAGS", "integer", flags),
        ("Label", "integer", (0, 1)),
        ("Attack", "text", attacks),
    )
    rnd = random.Random(5)
    for _ in range(60):
        expr = oracles.random_query(rnd, columns)
        got, count = eval_query(raw_ws, "raw", "dataset.csv", expr)
        want = [row for row in table.rows if oracles.row_matches(expr, row, names, kinds)]
        assert count == len(want)
        assert list(got.rows) == want  # same rows, same input order


def test_stage_table_requires_manifest_entry(raw_ws):
    (raw_ws.stage_dir("raw") / "stray.csv").write_text("a\n1\n", encoding="utf-8")
    with pytest.raises(WorkspaceError):
        load_stage_table(raw_ws, "raw", "stray.csv")


def test_stage_table_infers_kinds(raw_ws):
    table = load_stage_table(raw_ws, "raw", "dataset.csv")
    assert table.schema.kind_of("L4_DST_PORT") == "integer"
    assert table.schema.kind_of("L7_PROTO") == "real"
    assert table.schema.kind_of("Attack") == "text"
