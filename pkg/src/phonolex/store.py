"""Lexical database store.

Parses Shoebox-format source lexicons (one ``\\marker value`` field per
line, ``\\id`` opening each record), compiles them into canonical
single-line records under a schema, and persists the compiled store as a
line-oriented versioned text file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    BadHeader,
    CorruptLine,
    DuplicateId,
    MissingId,
    SchemaError,
    SeparatorInField,
)

FILE_MAGIC = "phonolex-compiled"
FILE_VERSION = "v1"

KIND_TEXT = "text"
KIND_MEDIA = "media"
KIND_FLAGS = "flags"
KIND_IMAGE = "image-ref"
FIELD_KINDS = (KIND_TEXT, KIND_MEDIA, KIND_FLAGS, KIND_IMAGE)


@dataclass(frozen=True)
class FieldSpec:
    marker: str          # short name in the Shoebox source, e.g. "rt"
    attribute: str       # query-form name, e.g. "root"
    position: int        # 1-based canonical index
    label: str           # human display string
    kind: str = KIND_TEXT


class FieldSchema:
    """Ordered field layout of a compiled lexicon.

    Positions must form a contiguous 1..N sequence; markers and attributes
    must be unique.
    """

    def __init__(self, fields: Iterable[FieldSpec], separator: str = ";"):
        self.fields = tuple(sorted(fields, key=lambda f: f.position))
        self.separator = separator
        self._validate()
        self.by_marker = {f.marker: f for f in self.fields}
        self.by_attribute = {f.attribute: f for f in self.fields}

    def _validate(self):
        if len(self.separator) != 1:
            raise SchemaError("separator must be a single character")
        positions = [f.position for f in self.fields]
        if positions != list(range(1, len(self.fields) + 1)):
            raise SchemaError("field positions must be a contiguous 1..N sequence")
        markers = [f.marker for f in self.fields]
        attributes = [f.attribute for f in self.fields]
        if len(set(markers)) != len(markers):
            raise SchemaError("duplicate marker in schema")
        if len(set(attributes)) != len(attributes):
            raise SchemaError("duplicate attribute in schema")
        for f in self.fields:
            if f.kind not in FIELD_KINDS:
                raise SchemaError(f"unknown field kind {f.kind!r}")

    def __len__(self):
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def __eq__(self, other):
        return (
            isinstance(other, FieldSchema)
            and self.fields == other.fields
            and self.separator == other.separator
        )

    def attribute_of(self, marker: str) -> Optional[str]:
        spec = self.by_marker.get(marker)
        return spec.attribute if spec else None

    @property
    def id_position(self) -> int:
        return self.by_marker["id"].position

    def flags_position(self) -> Optional[int]:
        for f in self.fields:
            if f.kind == KIND_FLAGS:
                return f.position
        return None

    @classmethod
    def from_file(cls, path) -> "FieldSchema":
        """Load a schema from a JSON config file.

        Expected shape::

            {"separator": ";",
             "fields": [{"marker": "rt", "attribute": "root",
                         "position": 5, "label": "word root",
                         "kind": "text"}, ...]}
        """
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        fields = [
            FieldSpec(
                marker=entry["marker"],
                attribute=entry["attribute"],
                position=int(entry["position"]),
                label=entry.get("label", entry["attribute"]),
                kind=entry.get("kind", KIND_TEXT),
            )
            for entry in data["fields"]
        ]
        return cls(fields, separator=data.get("separator", ";"))


def default_schema() -> FieldSchema:
    """The stock 14-field Dschang-style schema.

    Loanword/suffixed/phrase status lives as whitespace-separated tags in
    the ``validation`` field; ``word`` holds a URL or path to an image of
    the orthographic form; ``speech`` holds a path to the recording.
    """
    specs = [
        FieldSpec("id", "id", 1, "identifier"),
        FieldSpec("v", "validation", 2, "validation status", KIND_FLAGS),
        FieldSpec("w", "word", 3, "orthographic form", KIND_IMAGE),
        FieldSpec("as", "ascii", 4, "ascii transcription"),
        FieldSpec("rt", "root", 5, "word root"),
        FieldSpec("t", "tone", 6, "tone melody"),
        FieldSpec("sd", "s_dialect", 7, "southern dialect form"),
        FieldSpec("pg", "proto", 8, "proto form"),
        FieldSpec("p", "part", 9, "part of speech"),
        FieldSpec("pl", "plural", 10, "plural prefix"),
        FieldSpec("cl", "class", 11, "noun class"),
        FieldSpec("en", "gloss", 12, "english gloss"),
        FieldSpec("fr", "french", 13, "french gloss"),
        FieldSpec("sf", "speech", 14, "speech file", KIND_MEDIA),
    ]
    return FieldSchema(specs)


DEFAULT_SCHEMA = default_schema()


@dataclass(frozen=True)
class LexRecord:
    """One lexical entry: an id plus one text value per schema position."""

    id: str
    values: tuple[str, ...]

    def value(self, schema: FieldSchema, attribute: str) -> str:
        return self.values[schema.by_attribute[attribute].position - 1]


@dataclass
class Diagnostic:
    record_id: str
    message: str

    def __str__(self):
        return f"{self.record_id}: {self.message}"


class CompiledLexicon:
    """Immutable compiled store: a schema plus ordered records.

    Safe to share across concurrent query executions once built.
    """

    def __init__(self, schema: FieldSchema, records: Iterable[LexRecord]):
        self.schema = schema
        self.records = tuple(records)
        self.by_id = {r.id: r for r in self.records}

    def __len__(self):
        return len(self.records)

    def __eq__(self, other):
        return (
            isinstance(other, CompiledLexicon)
            and self.schema == other.schema
            and self.records == other.records
        )


# -- Shoebox parsing --------------------------------------------------------

def parse_shoebox_report(
    source_text: str, schema: FieldSchema
) -> tuple[list[LexRecord], list[Diagnostic]]:
    """Parse Shoebox text, collecting per-record diagnostics.

    Records with errors (duplicate id, separator in a value, missing id)
    are reported and excluded from the result rather than aborting the
    whole parse; the CLI surfaces the diagnostics. Unknown markers are
    ignored, as are Shoebox structural markers (``\\_sh`` and friends)
    before the first record. Continuation lines (no leading backslash)
    append to the previous field with a single space. A repeated marker
    within one record also appends with a single space.
    """
    records: list[LexRecord] = []
    diagnostics: list[Diagnostic] = []
    seen_ids: set[str] = set()
    sep = schema.separator

    block: Optional[dict[str, str]] = None
    last_marker: Optional[str] = None
    stray_before_id = False

    def flush():
        nonlocal block, last_marker
        if block is None:
            return
        rec_id = block.get("id", "")
        if not rec_id:
            diagnostics.append(Diagnostic("?", "record block with empty id"))
        elif rec_id in seen_ids:
            diagnostics.append(Diagnostic(rec_id, "duplicate record id"))
        else:
            bad = None
            for marker, value in block.items():
                if sep in value:
                    bad = Diagnostic(
                        rec_id,
                        f"field {marker!r} contains the separator {sep!r}",
                    )
                    break
            if bad is not None:
                diagnostics.append(bad)
            else:
                seen_ids.add(rec_id)
                values = tuple(
                    block.get(f.marker, "") for f in schema.fields
                )
                records.append(LexRecord(id=rec_id, values=values))
        block = None
        last_marker = None

    for raw in source_text.splitlines():
        line = raw.rstrip()
        if not line:
            last_marker = None
            continue
        if line.startswith("\\"):
            body = line[1:]
            marker, _, value = body.partition(" ")
            value = value.strip()
            if marker == "id":
                flush()
                block = {"id": value}
                last_marker = "id"
                continue
            if block is None:
                if marker.startswith("_"):
                    continue  # Shoebox file header, e.g. \_sh
                stray_before_id = True
                last_marker = None
                continue
            if marker in schema.by_marker:
                if marker in block:
                    block[marker] = f"{block[marker]} {value}" if value else block[marker]
                else:
                    block[marker] = value
                last_marker = marker
            else:
                last_marker = None  # unknown marker: drop its continuations too
        else:
            # continuation of the previous field
            if block is not None and last_marker is not None:
                block[last_marker] = f"{block[last_marker]} {line.strip()}"

    flush()
    if stray_before_id:
        diagnostics.insert(0, Diagnostic("?", "field lines before the first \\id marker"))
    return records, diagnostics


def parse_shoebox(source_text: str, schema: FieldSchema) -> list[LexRecord]:
    """Strict variant of :func:`parse_shoebox_report`: raise on the first error."""
    records, diagnostics = parse_shoebox_report(source_text, schema)
    if diagnostics:
        d = diagnostics[0]
        if "duplicate record id" in d.message:
            raise DuplicateId(d.record_id)
        if "separator" in d.message:
            marker = d.message.split("'")[1] if "'" in d.message else "?"
            raise SeparatorInField(d.record_id, marker, schema.separator)
        raise MissingId(d.message)
    return records


# -- encoding ---------------------------------------------------------------

def encode_record(record: LexRecord, schema: FieldSchema) -> str:
    """Compile a record to one line: each value followed by the separator.

    The line contains exactly N separators for an N-field schema (the
    trailing one included); the persisted form, not the match form.
    """
    sep = schema.separator
    for f, value in zip(schema.fields, record.values):
        if sep in value:
            raise SeparatorInField(record.id, f.marker, sep)
        if "\n" in value or "\r" in value:
            raise SeparatorInField(record.id, f.marker, "newline")
    return "".join(v + sep for v in record.values)


def decode_record(line: str, schema: FieldSchema) -> LexRecord:
    sep = schema.separator
    n = len(schema)
    if line.count(sep) != n or not line.endswith(sep):
        raise CorruptLine(0, f"expected {n} separators, found {line.count(sep)}")
    values = tuple(line.split(sep)[:n])
    return LexRecord(id=values[schema.id_position - 1], values=values)


def match_line(record: LexRecord, schema: FieldSchema) -> str:
    """The line form queries are matched against: values joined by the
    separator, no trailing separator."""
    return schema.separator.join(record.values)


# -- persistence ------------------------------------------------------------

def save_compiled(lexicon: CompiledLexicon, path) -> None:
    schema = lexicon.schema
    lines = [f"{FILE_MAGIC} {FILE_VERSION}\t{schema.separator}\t{len(schema)}"]
    for record in lexicon.records:
        lines.append(encode_record(record, schema))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_compiled(path, schema: Optional[FieldSchema] = None) -> CompiledLexicon:
    """Load a compiled store. The file carries the separator and field
    count; the full field layout comes from ``schema`` (default schema
    when omitted) and is checked against the header."""
    schema = schema or DEFAULT_SCHEMA
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise BadHeader("empty file")
    header = lines[0]
    parts = header.split("\t")
    if len(parts) != 3 or parts[0] != f"{FILE_MAGIC} {FILE_VERSION}":
        raise BadHeader(f"unrecognized header {header!r}")
    separator, count = parts[1], parts[2]
    if separator != schema.separator:
        raise BadHeader(
            f"file separator {separator!r} does not match schema separator "
            f"{schema.separator!r}"
        )
    if count != str(len(schema)):
        raise BadHeader(
            f"file has {count} fields per record, schema has {len(schema)}"
        )
    records = []
    seen: set[str] = set()
    for number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            record = decode_record(line, schema)
        except CorruptLine as exc:
            raise CorruptLine(number, exc.args[0].split(": ", 1)[-1]) from None
        if record.id in seen:
            raise DuplicateId(record.id)
        seen.add(record.id)
        records.append(record)
    return CompiledLexicon(schema, records)
