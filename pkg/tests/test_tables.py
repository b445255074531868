import xml.etree.ElementTree as ET

import pytest

from phonolex.errors import UnknownDisplayAttribute
from phonolex.query import COUNT, HitTable, QueryForm, assemble, execute, \
    filter_minimal_sets
from phonolex.tables import (
    Block,
    Fragment,
    TableModel,
    build_table,
    flip,
    latex_escape,
    render_html,
    render_latex,
    render_text,
    table_to_dict,
    table_to_json,
    wrap_latex_document,
)


def ou_count_table(lexicon, axes="normal"):
    form = QueryForm(patterns={"root": r".*([$V])([$C])#"})
    table = execute(assemble(form, lexicon.schema), lexicon).table
    return table, build_table(table, COUNT, lexicon, axes=axes)


def minimal_set_model(lexicon, display=("word", "gloss")):
    form = QueryForm(display=display,
                     patterns={"root": r".*([$C]+){[ou]}([$C])#"})
    query = assemble(form, lexicon.schema)
    table = filter_minimal_sets(execute(query, lexicon).table, query.focus_dim)
    return build_table(table, display, lexicon, focus_dim=query.focus_dim)


class TestBuildTable:
    def test_count_table_shape(self, fixture_lexicon):
        table, model = ou_count_table(fixture_lexicon)
        assert model.mode == "count"
        assert model.row_labels == ["o", "u"]
        assert model.col_labels == ["p", "'"]
        assert model.inner_dims == ()
        counts = [
            [cell[0].count if cell else None for cell in row]
            for row in model.cells
        ]
        assert counts == [[None, 2], [1, 3]]

    def test_grand_total_matches(self, fixture_lexicon):
        table, model = ou_count_table(fixture_lexicon)
        total = sum(
            block.count for row in model.cells for cell in row for block in cell
        )
        assert total == table.matched_count == 6

    def test_axes_flip_swaps(self, fixture_lexicon):
        _, normal = ou_count_table(fixture_lexicon)
        _, flipped = ou_count_table(fixture_lexicon, axes="flip")
        assert flipped.row_labels == normal.col_labels
        assert flipped.col_labels == normal.row_labels
        for r in range(len(normal.row_labels)):
            for c in range(len(normal.col_labels)):
                assert normal.cells[r][c] == flipped.cells[c][r]

    def test_flip_is_involution(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        assert flip(flip(model)) == model

    def test_focus_renders_innermost(self, fixture_lexicon):
        model = minimal_set_model(fixture_lexicon)
        # rows: consonant clusters; columns: the coda dimension; the o/u
        # focus stacks inside each cell
        assert model.row_labels == ["pf", "v"]
        assert model.col_labels == ["'"]
        assert model.inner_dims == (2,)
        pf_cell = model.cells[0][0]
        assert [b.key for b in pf_cell] == [("o",), ("u",)]
        v_cell = model.cells[1][0]
        assert [b.key for b in v_cell] == [("o",), ("u",)]
        assert v_cell[1].count == 2

    def test_display_fragment_kinds(self, fixture_lexicon):
        model = minimal_set_model(
            fixture_lexicon, display=("speech", "word", "gloss")
        )
        item = model.cells[0][0][0].items[0]
        assert [f.kind for f in item] == ["media", "image", "text"]
        assert item[0].value == "audio/0203.wav"
        assert item[1].value == "img/lepfo.gif"
        assert item[2].value == "mortar"

    def test_item_order_is_lexicon_order(self, fixture_lexicon):
        model = minimal_set_model(fixture_lexicon)
        v_u_block = model.cells[1][0][1]
        glosses = [item[1].value for item in v_u_block.items]
        assert glosses == ["remainder", "kitchen woodpile"]

    def test_unknown_display_attribute(self, fixture_lexicon):
        table, _ = ou_count_table(fixture_lexicon)
        with pytest.raises(UnknownDisplayAttribute):
            build_table(table, ("nope",), fixture_lexicon)

    def test_empty_hit_table(self, fixture_lexicon):
        table = HitTable(labels=([], [], [""], [""]), hits={},
                         truncated=False, matched_count=0)
        model = build_table(table, COUNT, fixture_lexicon)
        assert model.row_labels == [] and model.cells == []
        assert render_text(model)
        assert render_html(model)
        assert render_latex(model)


def simple_count_model():
    return TableModel(
        mode="count",
        row_labels=["a"],
        col_labels=["b"],
        inner_dims=(),
        inner_labels=(),
        cells=[[[Block((), 3, None)]]],
    )


class TestRenderText:
    def test_blank_for_zero(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        text = render_text(model)
        lines = text.splitlines()
        assert lines[0].split("|")[1].split() == ["p", "'"]
        o_row = lines[1]
        assert o_row.startswith("o")
        assert "0" not in o_row  # blank, never zero
        assert "2" in o_row

    def test_empty_label_renders_null_sign(self, fixture_lexicon):
        form = QueryForm(patterns={"root": r"#C+V(C?)#"},
                         projections={"root": "$CV-proj"})
        table = execute(assemble(form, fixture_lexicon.schema),
                        fixture_lexicon).table
        model = build_table(table, COUNT, fixture_lexicon)
        text = render_text(model)
        assert "∅" in text

    def test_transpose_of_flip(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        normal = parse_text_counts(render_text(model))
        flipped = parse_text_counts(render_text(flip(model)))
        assert flipped == transpose(normal)


def parse_text_counts(rendered: str):
    """Read a rendered count table back into a label-indexed dict."""
    lines = rendered.splitlines()
    header, body = lines[0], lines[1:]
    col_labels = header.split("|", 1)[1].split()
    grid = {}
    for line in body:
        row_label, _, rest = line.partition("|")
        row_label = row_label.strip()
        starts = [header.index(f" {label}", header.index("|")) + 1
                  for label in col_labels]
        for i, col_label in enumerate(col_labels):
            lo = starts[i]
            hi = starts[i + 1] if i + 1 < len(starts) else len(line)
            cell = line[lo:hi].strip() if lo < len(line) else ""
            grid[(row_label, col_label)] = cell
    return grid


def transpose(grid):
    return {(c, r): v for (r, c), v in grid.items()}


class TestRenderHtml:
    def test_well_formed_markup(self, fixture_lexicon):
        model = minimal_set_model(
            fixture_lexicon, display=("speech", "word", "gloss")
        )
        html = render_html(model)
        root = ET.fromstring(html)
        assert root.tag == "table"
        assert html.count("<audio") == 5
        assert html.count("<img") == 5

    def test_escaping(self):
        model = TableModel(
            mode="items", row_labels=["<r>"], col_labels=["&c"],
            inner_dims=(), inner_labels=(),
            cells=[[[Block((), 1, [[Fragment("text", 'a<b>&"quote"', "gloss")]])]]],
        )
        html = render_html(model)
        assert "<b>" not in html
        assert "&lt;b&gt;" in html
        ET.fromstring(html)

    def test_count_html(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        html = render_html(model)
        root = ET.fromstring(html)
        rows = root.findall("tr")
        assert len(rows) == 3  # header + o + u


class TestRenderLatex:
    def test_one_by_one_table(self):
        latex = render_latex(simple_count_model())
        assert "\\begin{tabular}{c|c}" in latex
        assert " & b \\\\" in latex
        assert "a & 3 \\\\" in latex
        assert "\\hline" in latex

    def test_blank_for_zero(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        latex = render_latex(model)
        o_row = [l for l in latex.splitlines() if l.startswith("o &")][0]
        assert o_row == "o &  & 2 \\\\"

    def test_escapes_specials(self):
        assert latex_escape("#a$b%c&d_e{f}g~h^i\\j") == (
            "\\#a\\$b\\%c\\&d\\_e\\{f\\}g\\textasciitilde{}h"
            "\\textasciicircum{}i\\textbackslash{}j"
        )

    def test_nested_blocks_boxed(self, fixture_lexicon):
        model = minimal_set_model(fixture_lexicon)
        latex = render_latex(model)
        assert latex.count("\\fbox{") == 2
        assert "mortar" in latex and "blood pact" in latex
        # block boundary between the o and u variants
        assert "\\hline" in latex.split("\\fbox{")[1]

    def test_environments_balanced(self, fixture_lexicon):
        model = minimal_set_model(fixture_lexicon)
        latex = wrap_latex_document(render_latex(model))
        assert latex.count("\\begin{tabular}") == latex.count("\\end{tabular}")
        assert latex.count("\\begin{document}") == 1
        assert latex.count("{") == latex.count("}")


class TestFourDimensions:
    def build(self):
        from phonolex.store import CompiledLexicon, DEFAULT_SCHEMA, LexRecord

        rows = [("1", "pa", "H"), ("2", "pat", "L"), ("3", "ta", "H")]
        records = []
        for rid, root, tone in rows:
            values = [""] * 14
            values[0], values[4], values[5] = rid, root, tone
            records.append(LexRecord(id=rid, values=tuple(values)))
        lexicon = CompiledLexicon(DEFAULT_SCHEMA, records)
        form = QueryForm(
            patterns={"root": r"([pt])([a])(t?)", "tone": r"([HL])"}
        )
        table = execute(assemble(form, lexicon.schema), lexicon).table
        return build_table(table, COUNT, lexicon)

    def test_sub_rows_and_sub_columns(self):
        model = self.build()
        assert model.row_labels == ["p", "t"]
        assert model.col_labels == ["a"]
        assert model.inner_dims == (3, 4)
        assert model.inner_labels == (["", "t"], ["H", "L"])
        p_cell = model.cells[0][0]
        assert {b.key: b.count for b in p_cell} == {
            ("", "H"): 1, ("t", "L"): 1,
        }

    def test_grid_renderings_are_well_formed(self):
        model = self.build()
        html = render_html(model)
        ET.fromstring(html)
        assert html.count('<table class="blocks">') == 2
        latex = wrap_latex_document(render_latex(model))
        assert latex.count("\\begin{tabular}") == latex.count("\\end{tabular}")
        assert latex.count("{") == latex.count("}")


class TestJson:
    def test_payload_shape(self, fixture_lexicon):
        _, model = ou_count_table(fixture_lexicon)
        data = table_to_dict(model)
        assert data["mode"] == "count"
        assert data["row_labels"] == ["o", "u"]
        assert data["cells"][1][0] == [{"key": [], "count": 1}]
        assert data["cells"][0][0] == []

    def test_json_round_trips(self, fixture_lexicon):
        import json

        model = minimal_set_model(fixture_lexicon)
        data = json.loads(table_to_json(model))
        assert data == table_to_dict(model)
        item = data["cells"][0][0][0]["items"][0]
        assert item[0]["kind"] == "image"
