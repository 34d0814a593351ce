import json

import pytest

from qprob.render import (
    FORMATS,
    RenderedTable,
    Report,
    TextLines,
    format_number,
    render,
    render_report,
)


def test_format_number_frozen():
    assert format_number(0.25) == "0.25"
    assert format_number(1 / 6) == "0.166667"
    assert format_number(1e-12) == "1e-12"
    assert format_number(-0.0) == "0"
    assert format_number(123456789) == "1.23457e+08"
    assert format_number(1 / 3, precision=3) == "0.333"
    assert format_number(2) == "2"


def test_table_shape_validation():
    with pytest.raises(ValueError):
        RenderedTable("c", ("a",), ("x",), ())
    with pytest.raises(ValueError):
        RenderedTable("c", ("a",), ("x", "y"), ((1.0,),))
    with pytest.raises(ValueError):
        RenderedTable("c", ("a",), ("x",), ((1.0,),), arrow_pair=True)


def test_text_table_frozen():
    table = RenderedTable(
        "gross probabilities",
        ("up", "down"),
        ("probability",),
        ((0.5,), (0.5,)),
    )
    got = render(table, "text")
    want = "gross probabilities\n      probability\nup            0.5\ndown          0.5"
    assert got == want


def test_text_arrow_pair_frozen():
    table = RenderedTable(
        "net",
        ("cat:awake",),
        ("gross", "net"),
        (((0.5), (1 / 6)),),
        arrow_pair=True,
    )
    got = render(table, "text")
    assert got.splitlines()[-1] == "cat:awake  0.5 -> 0.166667"
    assert "gross -> net" in got


def test_text_complex_cells():
    table = RenderedTable(
        "op",
        ("0", "1"),
        ("0", "1"),
        ((complex(0.5, 0), complex(0, -0.5)), (complex(0, 0.5), complex(0.5, 0))),
    )
    got = render(table, "text")
    assert "0+0.5j" in got
    assert "0-0.5j" in got
    assert "0.5+0j" not in got  # real-only cells drop the imaginary part


def test_text_lines():
    section = TextLines("summary", ("first", "second"))
    assert render(section, "text") == "summary\n  first\n  second"
    assert render(section, "csv") == "# summary\n# first\n# second"


def test_csv_full_precision():
    table = RenderedTable("t", ("r",), ("v",), (((1 / 6),),))
    got = render(table, "csv")
    assert repr(1 / 6) in got  # shortest round-trip repr, not %.6g
    value = got.splitlines()[-1].split(",")[1]
    assert float(value) == 1 / 6


def test_csv_complex_split_columns():
    table = RenderedTable("t", ("r",), ("v",), ((complex(0.25, -0.5),),))
    got = render(table, "csv")
    assert got.splitlines()[1] == ",v.re,v.im"
    assert got.splitlines()[2] == "r,0.25,-0.5"


def test_csv_field_quoting():
    table = RenderedTable("t", ('weird,"label"',), ("v",), ((1.0,),))
    got = render(table, "csv")
    assert '"weird,""label"""' in got


def test_json_section_and_complex_pairs():
    table = RenderedTable("t", ("r",), ("a", "b"), ((complex(0, 1), 0.5),))
    doc = json.loads(render(table, "json"))
    assert doc["kind"] == "table"
    assert doc["cells"][0][0] == [0.0, 1.0]
    assert doc["cells"][0][1] == 0.5


def test_render_report_text_layout():
    report = Report(
        "demo: scenario 'x'",
        (TextLines("a", ("one",)), TextLines("b", ("two",))),
    )
    got = render_report(report, "text")
    assert got == "demo: scenario 'x'\n\na\n  one\n\nb\n  two\n"
    assert got.endswith("\n") and not got.endswith("\n\n")


def test_render_report_json_parses():
    report = Report("demo", (RenderedTable("t", ("r",), ("v",), ((0.5,),)),))
    doc = json.loads(render_report(report, "json"))
    assert doc["title"] == "demo"
    assert doc["sections"][0]["cells"] == [[0.5]]


def test_render_report_csv_title_comment():
    report = Report("demo", (TextLines("a", ("x",)),))
    got = render_report(report, "csv")
    assert got.startswith("# demo\n")


def test_output_is_ascii():
    report = Report(
        "demo",
        (
            RenderedTable("t", ("r",), ("v", "w"), (((1 / 3), complex(0, -2 / 3)),)),
            TextLines("lines", ("plain",)),
        ),
    )
    for fmt in FORMATS:
        render_report(report, fmt).encode("ascii")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        render(TextLines("a", ()), "yaml")
    with pytest.raises(ValueError):
        render_report(Report("t", ()), "xml")
