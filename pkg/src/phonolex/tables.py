"""Building and serializing result tables.

Dimension 1 labels the rows and dimension 2 the columns; dimensions 3 and
4 become blocks nested inside each cell, except that the focus dimension
(when the query had one) always nests innermost, so minimal-set variants
stack together inside one box. Cells hold either counts or per-record
field fragments resolved from the display attributes.
"""

from __future__ import annotations

import html as html_mod
import json
from dataclasses import dataclass
from typing import Optional

from .errors import UnknownDisplayAttribute
from .query import COUNT, HitTable
from .store import CompiledLexicon, KIND_IMAGE, KIND_MEDIA

FRAGMENT_TEXT = "text"
FRAGMENT_MEDIA = "media"
FRAGMENT_IMAGE = "image"


@dataclass(frozen=True)
class Fragment:
    kind: str        # text | media | image
    value: str
    attribute: str


# one CellItem is the fragment list for one record
CellItem = list


@dataclass
class Block:
    key: tuple              # inner-dimension labels, () when none
    count: int
    items: Optional[list]   # list of CellItem, None in count mode


@dataclass
class TableModel:
    mode: str               # "count" | "items"
    row_labels: list
    col_labels: list
    inner_dims: tuple       # dimensions rendered inside cells, outer first
    inner_labels: tuple     # label list per inner dimension
    cells: list             # cells[r][c] -> list of Block, empty = blank


def build_table(
    table: HitTable,
    display,
    lexicon: CompiledLexicon,
    axes: str = "normal",
    focus_dim: Optional[int] = None,
) -> TableModel:
    """Shape a HitTable for rendering.

    ``display`` is either ``"count"`` or an ordered attribute list; item
    fragments take their kind from the schema (media, image-ref, text).
    """
    schema = lexicon.schema
    mode = "count" if display == COUNT else "items"
    attributes = []
    if mode == "items":
        for attribute in display:
            spec = schema.by_attribute.get(attribute)
            if spec is None:
                raise UnknownDisplayAttribute(attribute)
            attributes.append(spec)

    ordered_dims = [d for d in (1, 2, 3, 4) if d != focus_dim]
    if focus_dim is not None:
        ordered_dims.append(focus_dim)
    rows_dim, cols_dim = ordered_dims[0], ordered_dims[1]
    # dimensions the query never populated contribute no block level
    inner_dims = tuple(
        d for d in ordered_dims[2:] if list(table.labels[d - 1]) != [""]
    )

    row_labels = list(table.labels[rows_dim - 1])
    col_labels = list(table.labels[cols_dim - 1])

    def inner_keys():
        combos = [()]
        for d in inner_dims:
            combos = [c + (label,) for c in combos for label in table.labels[d - 1]]
        return combos

    def make_item(record_id):
        record = lexicon.by_id[record_id]
        fragments = []
        for spec in attributes:
            value = record.values[spec.position - 1]
            if spec.kind == KIND_MEDIA:
                kind = FRAGMENT_MEDIA
            elif spec.kind == KIND_IMAGE:
                kind = FRAGMENT_IMAGE
            else:
                kind = FRAGMENT_TEXT
            fragments.append(Fragment(kind, value, spec.attribute))
        return fragments

    combos = inner_keys()
    cells = []
    for row_label in row_labels:
        row = []
        for col_label in col_labels:
            blocks = []
            for combo in combos:
                key = ["", "", "", ""]
                key[rows_dim - 1] = row_label
                key[cols_dim - 1] = col_label
                for d, label in zip(inner_dims, combo):
                    key[d - 1] = label
                ids = table.hits.get(tuple(key))
                if not ids:
                    continue
                if mode == "count":
                    blocks.append(Block(combo, len(ids), None))
                else:
                    blocks.append(
                        Block(combo, len(ids), [make_item(i) for i in ids])
                    )
            row.append(blocks)
        cells.append(row)

    model = TableModel(
        mode=mode,
        row_labels=row_labels,
        col_labels=col_labels,
        inner_dims=inner_dims,
        inner_labels=tuple(list(table.labels[d - 1]) for d in inner_dims),
        cells=cells,
    )
    if axes == "flip":
        model = flip(model)
    return model


def flip(model: TableModel) -> TableModel:
    """Swap rows and columns; an involution."""
    cells = [
        [model.cells[r][c] for r in range(len(model.row_labels))]
        for c in range(len(model.col_labels))
    ]
    return TableModel(
        mode=model.mode,
        row_labels=list(model.col_labels),
        col_labels=list(model.row_labels),
        inner_dims=model.inner_dims,
        inner_labels=model.inner_labels,
        cells=cells,
    )


# -- plain text -------------------------------------------------------------

def _text_label(label: str) -> str:
    return label if label else "∅"


def _text_fragment(fragment: Fragment) -> str:
    if fragment.kind == FRAGMENT_MEDIA:
        return f"[{fragment.value}]"
    return fragment.value


def _text_block(block: Block, show_key: bool) -> str:
    prefix = ""
    if show_key:
        prefix = "[" + "/".join(_text_label(k) for k in block.key) + "] "
    if block.items is None:
        return f"{prefix}{block.count}"
    items = "; ".join(
        " ".join(_text_fragment(f) for f in item) for item in block.items
    )
    return prefix + items


def _text_cell(blocks, mode, show_key) -> str:
    if not blocks:
        return ""
    if mode == "count" and not show_key:
        return str(blocks[0].count)
    return "  ".join(_text_block(b, show_key) for b in blocks)


def render_text(model: TableModel) -> str:
    """Aligned columns with a ``|`` after the row-label column; zero cells
    blank; the empty label prints as a visible null sign."""
    show_key = bool(model.inner_dims)
    header = [""] + [_text_label(c) for c in model.col_labels]
    body = []
    for r, row_label in enumerate(model.row_labels):
        cells = [
            _text_cell(model.cells[r][c], model.mode, show_key)
            for c in range(len(model.col_labels))
        ]
        body.append([_text_label(row_label)] + cells)
    widths = [
        max([len(line[i]) for line in [header] + body] or [0])
        for i in range(len(header))
    ]
    out = []
    for line in [header] + body:
        label = line[0].ljust(widths[0])
        rest = "  ".join(
            cell.ljust(widths[i + 1]) for i, cell in enumerate(line[1:])
        ).rstrip()
        out.append(f"{label} |" + (f" {rest}" if rest else ""))
    return "\n".join(out) + "\n"


# -- HTML ---------------------------------------------------------------------

def _html_escape(text: str) -> str:
    return html_mod.escape(text, quote=True)

def _html_fragment(fragment: Fragment) -> str:
    value = _html_escape(fragment.value)
    if fragment.kind == FRAGMENT_MEDIA:
        return (
            f'<a class="speech" href="{value}">'
            f'<audio controls="controls" src="{value}"></audio></a>'
        )
    if fragment.kind == FRAGMENT_IMAGE:
        return f'<img src="{value}" alt="{value}"/>'
    return f'<span class="{_html_escape(fragment.attribute)}">{value}</span>'


def _html_block_content(block: Block, mode: str) -> str:
    if mode == "count":
        return str(block.count)
    return "".join(
        f'<div class="entry">{"".join(_html_fragment(f) for f in item)}</div>'
        for item in block.items
    )


def _html_cell(blocks, model: TableModel) -> str:
    if not blocks:
        return ""
    mode = model.mode
    levels = len(model.inner_dims)
    if levels == 0:
        return _html_block_content(blocks[0], mode)
    by_key = {block.key: block for block in blocks}
    if levels == 1:
        rows = []
        for label in model.inner_labels[0]:
            block = by_key.get((label,))
            if block is None:
                continue
            rows.append(
                f"<tr><th>{_html_escape(label)}</th>"
                f"<td>{_html_block_content(block, mode)}</td></tr>"
            )
        return f'<table class="blocks">{"".join(rows)}</table>'
    # two inner levels: the outer one labels sub-rows, the inner sub-columns
    sub_rows = [
        label for label in model.inner_labels[0]
        if any(key[0] == label for key in by_key)
    ]
    sub_cols = [
        label for label in model.inner_labels[1]
        if any(key[1] == label for key in by_key)
    ]
    header = "".join(f"<th>{_html_escape(c)}</th>" for c in sub_cols)
    rows = [f"<tr><th></th>{header}</tr>"]
    for row_label in sub_rows:
        cells = []
        for col_label in sub_cols:
            block = by_key.get((row_label, col_label))
            cells.append(
                f"<td>{_html_block_content(block, mode) if block else ''}</td>"
            )
        rows.append(
            f"<tr><th>{_html_escape(row_label)}</th>{''.join(cells)}</tr>"
        )
    return f'<table class="blocks">{"".join(rows)}</table>'


def render_html(model: TableModel) -> str:
    """One table element; media become audio anchors, image refs img tags,
    inner blocks nested tables. Well-formed (XML-parseable) markup."""
    parts = ['<table class="results">']
    header = "".join(
        f"<th>{_html_escape(c)}</th>" for c in model.col_labels
    )
    parts.append(f"<tr><th></th>{header}</tr>")
    for r, row_label in enumerate(model.row_labels):
        cells = "".join(
            f"<td>{_html_cell(model.cells[r][c], model)}</td>"
            for c in range(len(model.col_labels))
        )
        parts.append(f"<tr><th>{_html_escape(row_label)}</th>{cells}</tr>")
    parts.append("</table>")
    return "\n".join(parts) + "\n"


# -- LaTeX --------------------------------------------------------------------

_LATEX_SPECIALS = {
    "#": r"\#",
    "$": r"\$",
    "%": r"\%",
    "&": r"\&",
    "_": r"\_",
    "{": r"\{",
    "}": r"\}",
    "~": r"\textasciitilde{}",
    "^": r"\textasciicircum{}",
    "\\": r"\textbackslash{}",
}


def latex_escape(text: str) -> str:
    return "".join(_LATEX_SPECIALS.get(ch, ch) for ch in text)


def _latex_item(item) -> str:
    return " ".join(latex_escape(f.value) for f in item)


def _latex_block_content(block: Block, mode: str) -> str:
    if mode == "count":
        return str(block.count)
    return " \\\\ ".join(_latex_item(item) for item in block.items)


def _latex_cell(blocks, model: TableModel) -> str:
    if not blocks:
        return ""
    mode = model.mode
    levels = len(model.inner_dims)
    if levels == 0:
        block = blocks[0]
        if mode == "count":
            return str(block.count)
        if len(block.items) == 1:
            return _latex_item(block.items[0])
        return (
            f"\\begin{{tabular}}[t]{{l}}"
            f"{_latex_block_content(block, mode)}\\end{{tabular}}"
        )
    by_key = {block.key: block for block in blocks}
    if levels == 1:
        body = " \\\\ \\hline ".join(
            _latex_block_content(by_key[(label,)], mode)
            for label in model.inner_labels[0]
            if (label,) in by_key
        )
        return f"\\fbox{{\\begin{{tabular}}[t]{{l}}{body}\\end{{tabular}}}}"
    # two inner levels: sub-rows by the outer one, sub-columns by the inner
    sub_rows = [l for l in model.inner_labels[0]
                if any(k[0] == l for k in by_key)]
    sub_cols = [l for l in model.inner_labels[1]
                if any(k[1] == l for k in by_key)]
    lines = [" & " + " & ".join(latex_escape(c) for c in sub_cols) + " \\\\",
             "\\hline"]
    for row_label in sub_rows:
        row_cells = []
        for col_label in sub_cols:
            block = by_key.get((row_label, col_label))
            row_cells.append(_latex_block_content(block, mode) if block else "")
        lines.append(
            latex_escape(row_label) + " & " + " & ".join(row_cells) + " \\\\"
        )
    spec = "c|" + "c" * max(len(sub_cols), 1)
    body = " ".join(lines)
    return f"\\fbox{{\\begin{{tabular}}[t]{{{spec}}}{body}\\end{{tabular}}}}"


def render_latex(model: TableModel) -> str:
    """A tabular with a ``c|ccc`` column spec, ``\\hline`` under the header,
    nested tabulars for inner blocks, specials escaped in all cell text."""
    ncols = len(model.col_labels)
    spec = "c|" + "c" * max(ncols, 1)
    lines = [f"\\begin{{tabular}}{{{spec}}}"]
    header = " & ".join(latex_escape(c) for c in model.col_labels)
    lines.append(f" & {header} \\\\")
    lines.append("\\hline")
    for r, row_label in enumerate(model.row_labels):
        cells = [
            _latex_cell(model.cells[r][c], model)
            for c in range(ncols)
        ]
        lines.append(
            f"{latex_escape(row_label)} & " + " & ".join(cells) + " \\\\"
        )
    lines.append("\\end{tabular}")
    return "\n".join(lines) + "\n"


LATEX_DOCUMENT_WRAPPER = """\
\\documentclass{article}
\\begin{document}
%s
\\end{document}
"""


def wrap_latex_document(fragment: str) -> str:
    return LATEX_DOCUMENT_WRAPPER % fragment


# -- JSON ---------------------------------------------------------------------

def table_to_dict(model: TableModel) -> dict:
    """Machine-readable TableModel for the service and console."""
    def block_dict(block: Block) -> dict:
        data = {"key": list(block.key), "count": block.count}
        if block.items is not None:
            data["items"] = [
                [
                    {"kind": f.kind, "value": f.value, "attribute": f.attribute}
                    for f in item
                ]
                for item in block.items
            ]
        return data

    return {
        "mode": model.mode,
        "row_labels": list(model.row_labels),
        "col_labels": list(model.col_labels),
        "inner_dims": list(model.inner_dims),
        "inner_labels": [list(labels) for labels in model.inner_labels],
        "cells": [
            [[block_dict(b) for b in cell] for cell in row]
            for row in model.cells
        ],
    }


def table_to_json(model: TableModel) -> str:
    return json.dumps(table_to_dict(model), ensure_ascii=False, indent=2)
