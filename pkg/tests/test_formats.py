import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcarepo import (
    ContextFormat,
    FormalContext,
    ParseError,
    convert,
    parse_burmeister,
    parse_csv,
    parse_json,
    serialize_burmeister,
    serialize_csv,
    serialize_json,
)
from fcarepo.formats import format_for_path, parse, read_context, serialize, write_context
from conftest import read_fixture, tools_context

ONE = FormalContext(["g1"], ["m1"], [[True]])

name_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Cf", "Zl", "Zp")),
    min_size=1,
    max_size=8,
).map(str.rstrip).filter(bool)
name_pool = st.sampled_from(
    ["Äpfel", "naïve", "日本語", "a,b", 'quo"te', "ß", "Ω-lattice", "🐍", "x", "Ünïcödé name"]
)


@st.composite
def unicode_contexts(draw, max_size=12):
    g = draw(st.integers(0, max_size))
    m = draw(st.integers(0, max_size))
    names = st.one_of(name_pool, name_text)
    objects = draw(st.lists(names, min_size=g, max_size=g, unique=True))
    attributes = draw(st.lists(names, min_size=m, max_size=m, unique=True))
    cells = draw(st.lists(st.booleans(), min_size=g * m, max_size=g * m))
    title = draw(st.one_of(st.just(""), name_text))
    return FormalContext(objects, attributes, np.array(cells, bool).reshape(g, m), name=title)


# -- Burmeister -------------------------------------------------------------


def test_minimal_strict_file():
    ctx = parse_burmeister("B\n\n1\n1\n\ng1\nm1\nX\n")
    assert ctx == ONE


def test_tools_fixture_matches_row_strings():
    assert parse_burmeister(read_fixture("tools_en.cxt")) == tools_context()


def test_row_length_mismatch_line_number():
    with pytest.raises(ParseError) as info:
        parse_burmeister("B\n1\n1\n\ng1\nm1\nX.\n")
    diag = info.value.diagnostics[0]
    assert diag.line == 7
    assert "incidence row length mismatch" in diag.message
    assert "line 7" in str(info.value)


def test_row_length_mismatch_strict_layout():
    with pytest.raises(ParseError) as info:
        parse_burmeister("B\n\n1\n1\n\ng1\nm1\nX.\n")
    assert info.value.diagnostics[0].line == 8


def test_serialize_empty():
    assert serialize_burmeister(FormalContext([], [], [])) == "B\n\n0\n0\n\n"


def test_serialize_one_cross():
    assert serialize_burmeister(ONE) == "B\n\n1\n1\n\ng1\nm1\nX\n"


def test_serialize_keeps_name_line():
    ctx = FormalContext(["g"], ["m"], [[False]], name="tiny example")
    text = serialize_burmeister(ctx)
    assert text.splitlines()[1] == "tiny example"
    assert parse_burmeister(text) == ctx


@pytest.mark.parametrize("fixture", ["tools_en.cxt", "livingbeings_en.cxt"])
def test_fixture_is_strict_fixpoint(fixture):
    text = read_fixture(fixture)
    assert serialize_burmeister(parse_burmeister(text)) == text


def test_crlf_parses_same_with_warning():
    text = read_fixture("tools_en.cxt")
    diags = []
    assert parse_burmeister(text.replace("\n", "\r\n"), diags) == parse_burmeister(text)
    assert any("CRLF" in d.message for d in diags)
    assert all(d.severity == "warning" for d in diags)


def test_lowercase_x_warning():
    diags = []
    assert parse_burmeister("B\n\n1\n1\n\ng1\nm1\nx\n", diags) == ONE
    assert [d.severity for d in diags] == ["warning"]


def test_missing_name_line():
    diags = []
    assert parse_burmeister("B\n1\n1\n\ng1\nm1\nX\n", diags) == ONE
    assert "missing name line" in diags[0].message


def test_missing_separator_line():
    diags = []
    assert parse_burmeister("B\n\n1\n1\ng1\nm1\nX\n", diags) == ONE
    assert "missing blank line" in diags[0].message


def test_name_line_made_of_digits_is_still_a_name():
    ctx = FormalContext(["g1"], ["m1"], [[True]], name="2024")
    assert parse_burmeister(serialize_burmeister(ctx)) == ctx


def test_bom_tolerated():
    assert parse_burmeister("\ufeffB\n\n1\n1\n\ng1\nm1\nX\n") == ONE
    assert parse_burmeister("\ufeffB\n\n1\n1\n\ng1\nm1\nX\n".encode("utf-8")) == ONE


def test_no_bom_emitted():
    assert not convert(b"B\n\n1\n1\n\ng1\nm1\nX\n", "cxt", "cxt").startswith(b"\xef\xbb\xbf")


def test_missing_trailing_newline_ok():
    assert parse_burmeister("B\n\n1\n1\n\ng1\nm1\nX") == ONE


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("A\n\n1\n1\n\ng1\nm1\nX\n", 1, "first line"),
        ("B\n\n-1\n1\n\ng1\nm1\nX\n", 3, "object count"),
        ("B\n\none\n1\n\ng1\nm1\nX\n", 3, "object count"),
        ("B\n\n1\nn\n\ng1\nm1\nX\n", 4, "attribute count"),
        ("B\n\n2\n1\n\ng1\nm1\nX\n", 8, "unexpected end of file"),
        ("B\n\n1\n1\n\ng1\nm1\nX\nX\n", 9, "after the last incidence row"),
        ("B\n\n1\n2\n\ng1\nm1\nm2\nX-\n", 9, "illegal incidence character"),
        ("B\n\n2\n1\n\ng\ng\nm\nX\n.\n", 7, "duplicate object name"),
        ("B\n\n1\n1\n\n \nm1\nX\n", 6, "empty object name"),
    ],
)
def test_burmeister_errors_carry_line(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_burmeister(text)
    diag = info.value.diagnostics[0]
    assert diag.severity == "error"
    assert diag.line == line
    assert fragment in diag.message


def test_invalid_utf8_is_callers_problem():
    with pytest.raises(UnicodeDecodeError):
        parse_burmeister(b"B\n\n1\n1\n\n\xff\nm1\nX\n")


# -- CSV --------------------------------------------------------------------


def test_csv_minimal():
    assert parse_csv(",m1\ng1,1\n") == ONE


def test_csv_accepts_x_and_empty():
    ctx = parse_csv(",a,b,c\ng,X,,0\nh,x,1,\n")
    assert ctx.incidence.tolist() == [[True, False, False], [True, True, False]]


def test_csv_serialize():
    assert serialize_csv(ONE) == ",m1\ng1,1\n"


def test_csv_quotes_only_when_needed():
    ctx = FormalContext(["a,b", "plain"], ['say "hi"'], [[1], [0]])
    assert serialize_csv(ctx) == ',"say ""hi"""\n"a,b",1\nplain,0\n'
    assert parse_csv(serialize_csv(ctx)) == ctx


def test_csv_illegal_cell_names_row_and_column():
    with pytest.raises(ParseError) as info:
        parse_csv(",m1,m2\ng1,1,2\n")
    diag = info.value.diagnostics[0]
    assert (diag.line, diag.column) == (2, 3)
    assert "row 2, column 3" in str(diag)


def test_csv_ragged_row():
    with pytest.raises(ParseError) as info:
        parse_csv(",m1,m2\ng1,1\n")
    assert "ragged" in info.value.diagnostics[0].message
    assert info.value.diagnostics[0].line == 2


def test_csv_duplicate_names():
    with pytest.raises(ParseError):
        parse_csv(",m1,m1\ng1,1,0\n")


def test_csv_crlf():
    assert parse_csv(",m1\r\ng1,1\r\n") == ONE


def test_csv_tools_round_trip():
    ctx = tools_context()
    assert parse_csv(serialize_csv(ctx)) == ctx


# -- JSON -------------------------------------------------------------------


def test_json_example():
    assert serialize_json(ONE) == '{"name":"","objects":["g1"],"attributes":["m1"],"incidence":[[0,0]]}'
    assert parse_json(serialize_json(ONE)) == ONE


def test_json_pairs_sorted():
    ctx = FormalContext(["a", "b"], ["x", "y"], [[0, 1], [1, 1]])
    assert json.loads(serialize_json(ctx))["incidence"] == [[0, 1], [1, 0], [1, 1]]


def test_json_object_index_out_of_range():
    text = '{"name":"","objects":["g1"],"attributes":["m1"],"incidence":[[5,0]]}'
    with pytest.raises(ParseError, match="object index out of range"):
        parse_json(text)


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"name": "", "objects": [], "attributes": []}, "missing key 'incidence'"),
        ({"name": "", "objects": ["g"], "attributes": ["m"], "incidence": [[0, 0], [0, 0]]}, "duplicate"),
        ({"name": "", "objects": ["g"], "attributes": ["m"], "incidence": [[0, 3]]}, "attribute index out of range"),
        ({"name": "", "objects": ["g"], "attributes": ["m"], "incidence": [[0]]}, "bad incidence entry"),
        ({"name": "", "objects": ["g", "g"], "attributes": [], "incidence": []}, "duplicate object name"),
    ],
)
def test_json_errors(doc, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_json(json.dumps(doc))


def test_json_malformed():
    with pytest.raises(ParseError, match="malformed JSON"):
        parse_json("{")


def test_json_tools_round_trip():
    ctx = tools_context()
    assert parse_json(serialize_json(ctx)) == ctx


# -- conversion -------------------------------------------------------------


def test_convert_strict_fixpoint():
    data = read_fixture("tools_en.cxt", "rb")
    assert convert(data, ContextFormat.BURMEISTER, ContextFormat.BURMEISTER) == data


def test_convert_via_csv_and_json():
    data = read_fixture("tools_en.cxt", "rb")
    for fmt in ("csv", "json"):
        assert convert(convert(data, "cxt", fmt), fmt, "cxt") == data


def test_convert_normalizes_lenient_input():
    data = read_fixture("livingbeings_en.cxt", "rb")
    lenient = data.replace(b"X", b"x").replace(b"\n", b"\r\n")
    assert convert(lenient, "burmeister", "burmeister") == data


def test_convert_malformed_reports_first_diagnostic():
    with pytest.raises(ParseError) as info:
        convert(b"B\n\n1\n1\n\ng1\nm1\n?\n", "cxt", "csv")
    assert info.value.diagnostics[0].line == 8


def test_format_inference(tmp_path):
    assert format_for_path("a/b.CXT") is ContextFormat.BURMEISTER
    assert format_for_path("x.json") is ContextFormat.JSON
    with pytest.raises(ValueError):
        format_for_path("noext")
    path = tmp_path / "t.csv"
    write_context(ONE, path)
    assert path.read_text() == ",m1\ng1,1\n"
    assert read_context(path) == ONE


# -- properties -------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(unicode_contexts(), st.sampled_from(list(ContextFormat)))
def test_round_trip(ctx, fmt):
    assert parse(serialize(ctx, fmt), fmt) == ctx


@settings(max_examples=100, deadline=None)
@given(unicode_contexts())
def test_strict_idempotence_and_crlf(ctx):
    text = serialize_burmeister(ctx)
    assert serialize_burmeister(parse_burmeister(text)) == text
    assert parse_burmeister(text.replace("\n", "\r\n")) == ctx
