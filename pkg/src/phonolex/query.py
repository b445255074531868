"""Query assembly, the search loop, and minimal-set filtering.

A query form constrains any subset of attributes with patterns; assembly
concatenates the per-field patterns in canonical schema order, padding
unconstrained fields with a wildcard, into one whole-line pattern. The
search is a linear pass over the lexicon (field indexes would preclude
cross-field backreferences); parenthesized parameters bucket each hit
into an up-to-4-dimensional table keyed by their captured text.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

from .engine import (
    DEFAULT_STEP_BUDGET,
    ExecPattern,
    compile_pattern,
    match_anchored,
)
from .errors import (
    BadQueryFile,
    NoFocus,
    PatternError,
    PatternSyntaxError,
    QueryError,
    StepBudgetExceeded,
    TimeLimitReached,
    UnknownAttribute,
    WrongVariableKind,
)
from .patterns import (
    Alt,
    CharClass,
    Concat,
    FieldBoundary,
    Group,
    Literal,
    NegLookahead,
    Node,
    Projection,
    Repeat,
    VarEnv,
    WILDCARD,
    parse_pattern,
    parse_projection,
    parse_var_block,
)
from .store import CompiledLexicon, FieldSchema, LexRecord

COUNT = "count"
INCLUDE = "include"
EXCLUDE = "exclude"

# query-form filter name -> tag looked up in the flags field
FLAG_TAGS = {"loanwords": "loan", "suffixed": "suffix", "phrases": "phrase"}

DEFAULT_TIME_LIMIT = 120.0

# the stock variable block every query form starts from
DEFAULT_VARS = """\
$B = "\\.#-";          # boundary symbols
$S = "pbtdkgcj'";      # stops
$F = "zsvfZS";         # fricatives
$O = $S.$F;            # obstruents
$N = "mnN";            # nasals
$G = "wy";             # glides
$C = $O.$N.$G."hl";    # consonants
$V = "ieaouEOU@";      # vowels
$T = D?[HL]F?          # a single tone
$CV-proj = {tr/$C/C/; tr/$V/V/;}
"""

DisplaySpec = Union[str, tuple]


@dataclass
class QueryForm:
    """Everything a user submits: display choice, per-attribute patterns
    and projections, flag filters, a time limit, variables, axes."""

    display: DisplaySpec = COUNT
    patterns: dict = dc_field(default_factory=dict)
    projections: dict = dc_field(default_factory=dict)
    flag_filters: dict = dc_field(
        default_factory=lambda: {"loanwords": EXCLUDE, "suffixed": INCLUDE,
                                 "phrases": EXCLUDE}
    )
    time_limit: float = DEFAULT_TIME_LIMIT
    vars_source: str = DEFAULT_VARS
    axes: str = "normal"


def default_form() -> QueryForm:
    return QueryForm()


@dataclass
class AssembledQuery:
    exec: ExecPattern
    dim_of_group: dict            # group index -> dimension (1..4)
    focus_dim: Optional[int]
    projections: dict             # field position -> Projection
    display: DisplaySpec
    flag_filters: dict
    time_limit: float
    axes: str
    dim_label_order: dict         # dimension -> variable definition string
    schema: FieldSchema


@dataclass
class HitTable:
    """Axis labels for dims 1-4 plus label-tuple -> record ids.

    Unused dimensions carry the single empty label so every cell key is a
    4-tuple; each matching record lands in exactly one cell.
    """

    labels: tuple                 # four ordered label lists
    hits: dict                    # (l1, l2, l3, l4) -> [record ids]
    truncated: bool
    matched_count: int


@dataclass
class ExecutionOutcome:
    table: HitTable
    diagnostics: list


def _contains_separator_literal(node: Node, separator: str) -> bool:
    if isinstance(node, Literal):
        return node.char == separator
    if isinstance(node, FieldBoundary):
        return True
    if isinstance(node, Concat):
        return any(_contains_separator_literal(p, separator) for p in node.parts)
    if isinstance(node, Alt):
        return any(_contains_separator_literal(b, separator) for b in node.branches)
    if isinstance(node, (Repeat, NegLookahead)):
        return _contains_separator_literal(node.child, separator)
    if isinstance(node, Group):
        return _contains_separator_literal(node.child, separator)
    return False


def _resolve_projection(source: str, env: VarEnv) -> Projection:
    src = source.strip()
    if src.startswith("$") and "/" not in src and "{" not in src:
        name = src[1:]
        value = env.lookup(name)
        if getattr(value, "kind", None) != "projection":
            raise WrongVariableKind(f"${name} is not a projection")
        return value
    return parse_projection(src, env)


def assemble(
    form: QueryForm, schema: FieldSchema, env: Optional[VarEnv] = None
) -> AssembledQuery:
    """Build the whole-record pattern for a form.

    Fields appear in canonical order, each constrained field's pattern (or
    the wildcard) separated by the field separator and anchored at both
    ends; dimensions are assigned to parameters by text order across the
    concatenation, so digit labels exist only for backreferencing.
    """
    if env is None:
        env = parse_var_block(form.vars_source)

    for name, value in form.flag_filters.items():
        if name not in FLAG_TAGS:
            raise QueryError(f"unknown filter {name!r}")
        if value not in (INCLUDE, EXCLUDE):
            raise QueryError(
                f"filter {name}: {value!r} is not supported (use include or "
                f"exclude)"
            )
    if form.time_limit <= 0:
        raise QueryError("time limit must be positive")

    field_asts: dict[int, Node] = {}
    for attribute, source in form.patterns.items():
        spec = schema.by_attribute.get(attribute)
        if spec is None:
            raise UnknownAttribute(attribute)
        try:
            ast = parse_pattern(source, env)
        except PatternError as exc:
            exc.attribute = attribute
            raise
        if _contains_separator_literal(ast, schema.separator):
            raise PatternSyntaxError(
                f"pattern may not contain the field separator "
                f"{schema.separator!r}",
                attribute=attribute,
            )
        field_asts[spec.position] = ast

    projections: dict[int, Projection] = {}
    for attribute, source in form.projections.items():
        spec = schema.by_attribute.get(attribute)
        if spec is None:
            raise UnknownAttribute(attribute)
        try:
            projections[spec.position] = _resolve_projection(source, env)
        except PatternError as exc:
            exc.attribute = attribute
            raise

    parts: list[Node] = []
    for spec in schema.fields:
        if parts:
            parts.append(FieldBoundary())
        parts.append(field_asts.get(spec.position, WILDCARD))
    assembled = Concat(tuple(parts))

    exec_pattern = compile_pattern(assembled, schema.separator)
    dim_of_group = {g.index: g.index for g in exec_pattern.groups}
    focus_dim = (
        dim_of_group[exec_pattern.focus_group]
        if exec_pattern.focus_group is not None
        else None
    )
    dim_label_order: dict[int, str] = {}
    for info in exec_pattern.groups:
        body = info.node.child
        if (
            isinstance(body, CharClass)
            and not body.negated
            and body.source_var is not None
        ):
            value = env.lookup(body.source_var)
            if getattr(value, "kind", None) == "chars":
                dim_label_order[dim_of_group[info.index]] = value.chars

    return AssembledQuery(
        exec=exec_pattern,
        dim_of_group=dim_of_group,
        focus_dim=focus_dim,
        projections=projections,
        display=form.display,
        flag_filters=dict(form.flag_filters),
        time_limit=form.time_limit,
        axes=form.axes,
        dim_label_order=dim_label_order,
        schema=schema,
    )


def record_passes_filters(
    record: LexRecord, form, schema: FieldSchema
) -> bool:
    """Exclude-filters reject records whose flags field carries the tag;
    include imposes nothing."""
    flag_filters = form.flag_filters if hasattr(form, "flag_filters") else form
    position = schema.flags_position()
    if position is None:
        return True
    tags = record.values[position - 1].split()
    if not tags:
        return True
    for name, value in flag_filters.items():
        if value == EXCLUDE and FLAG_TAGS.get(name) in tags:
            return False
    return True


def _ordered_labels(seen: dict, definition: Optional[str]) -> list:
    labels = list(seen)
    if definition is None:
        return sorted(labels)
    first_at = {}
    for i, ch in enumerate(definition):
        first_at.setdefault(ch, i)
    return sorted(labels, key=lambda l: (first_at.get(l, len(definition)), l))


def execute(
    query: AssembledQuery,
    lexicon: CompiledLexicon,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> ExecutionOutcome:
    """Linear pass over the lexicon, bucketing hits by parameter captures.

    Cooperative timeout: the deadline is checked between records and every
    2**14 matcher steps; on expiry the partial table is returned with
    ``truncated`` set. A record that blows the per-record step budget is
    skipped and noted in the diagnostics, never fatal.
    """
    schema = lexicon.schema
    if schema != query.schema:
        raise QueryError("query was assembled against a different schema")
    sep = schema.separator
    deadline = time.perf_counter() + query.time_limit

    projections = sorted(query.projections.items())
    group_dims = [(g.index, query.dim_of_group[g.index]) for g in query.exec.groups]
    used_dims = {dim for _, dim in group_dims}

    seen: list[dict] = [{}, {}, {}, {}]
    hits: dict = {}
    diagnostics: list = []
    matched = 0
    truncated = False

    for record in lexicon.records:
        if time.perf_counter() > deadline:
            truncated = True
            break
        if not record_passes_filters(record, query.flag_filters, schema):
            continue
        if projections:
            values = list(record.values)
            for position, projection in projections:
                values[position - 1] = projection.apply(values[position - 1])
            line = sep.join(values)
        else:
            line = sep.join(record.values)
        try:
            caps = match_anchored(
                query.exec, line, step_budget=step_budget, deadline=deadline
            )
        except StepBudgetExceeded:
            diagnostics.append(
                f"record {record.id}: skipped, step budget of {step_budget} "
                f"exceeded"
            )
            continue
        except TimeLimitReached:
            truncated = True
            break
        if caps is None:
            continue
        matched += 1
        key = ["", "", "", ""]
        for group_index, dim in group_dims:
            text = caps.texts.get(group_index)
            label = "" if text is None else text
            key[dim - 1] = label
            seen[dim - 1][label] = None
        key = tuple(key)
        bucket = hits.get(key)
        if bucket is None:
            hits[key] = [record.id]
        else:
            bucket.append(record.id)

    labels = tuple(
        _ordered_labels(seen[d - 1], query.dim_label_order.get(d))
        if d in used_dims
        else [""]
        for d in (1, 2, 3, 4)
    )
    table = HitTable(
        labels=labels, hits=hits, truncated=truncated, matched_count=matched
    )
    return ExecutionOutcome(table=table, diagnostics=diagnostics)


def filter_minimal_sets(table: HitTable, focus_dim: Optional[int]) -> HitTable:
    """Keep only cells whose context (all non-focus labels) admits two or
    more distinct focus labels; the empty label counts as one."""
    if focus_dim is None:
        raise NoFocus("minimal-set filtering needs a {...} focus parameter")
    f = focus_dim - 1
    contexts: dict = {}
    for key in table.hits:
        context = key[:f] + key[f + 1:]
        contexts.setdefault(context, set()).add(key[f])
    surviving = {
        key: ids
        for key, ids in table.hits.items()
        if len(contexts[key[:f] + key[f + 1:]]) >= 2
    }
    labels = []
    for d in range(4):
        present = {key[d] for key in surviving}
        kept = [label for label in table.labels[d] if label in present]
        if not kept and table.labels[d] == [""]:
            kept = [""]  # dimension not in use keeps its single empty label
        labels.append(kept)
    matched = sum(len(ids) for ids in surviving.values())
    return HitTable(
        labels=tuple(labels),
        hits=surviving,
        truncated=table.truncated,
        matched_count=matched,
    )


# -- query file format ------------------------------------------------------

_RESERVED_KEYS = {"display", "loanwords", "suffixed", "phrases",
                  "time-limit", "axes", "vars"}


def parse_query_file(text: str) -> QueryForm:
    """Parse the key:value query file; a trailing ``vars:`` block runs to
    end of input. Lines starting with ``#`` are comments."""
    form = QueryForm(vars_source="")
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        key, colon, value = raw.partition(":")
        if not colon:
            raise BadQueryFile(i, f"expected 'key: value', got {line!r}")
        key = key.strip()
        value = value.strip()
        if key == "vars":
            rest = [value] if value else []
            rest.extend(lines[i:])
            form.vars_source = "\n".join(rest)
            break
        if key == "display":
            form.display = COUNT if value == COUNT else tuple(value.split())
            if form.display != COUNT and not form.display:
                raise BadQueryFile(i, "display needs 'count' or attribute names")
        elif key in ("loanwords", "suffixed", "phrases"):
            if value not in (INCLUDE, EXCLUDE):
                detail = (
                    "'only' is reserved and not implemented"
                    if value == "only"
                    else f"{value!r} is not include/exclude"
                )
                raise BadQueryFile(i, f"{key}: {detail}")
            form.flag_filters[key] = value
        elif key == "time-limit":
            form.time_limit = _parse_time_limit(value, i)
        elif key == "axes":
            if value not in ("normal", "flip"):
                raise BadQueryFile(i, f"axes: {value!r} is not normal/flip")
            form.axes = value
        elif key.endswith(".proj"):
            form.projections[key[:-len(".proj")].strip()] = value
        else:
            if not value:
                raise BadQueryFile(i, f"empty pattern for {key!r}")
            form.patterns[key] = value
    if not form.vars_source:
        form.vars_source = DEFAULT_VARS
    return form


def _parse_time_limit(value: str, line_number: int) -> float:
    parts = value.split()
    try:
        amount = int(parts[0])
    except (ValueError, IndexError):
        raise BadQueryFile(line_number, f"bad time limit {value!r}") from None
    if amount <= 0:
        raise BadQueryFile(line_number, "time limit must be positive")
    unit = parts[1] if len(parts) > 1 else "seconds"
    if unit in ("second", "seconds"):
        return float(amount)
    if unit in ("minute", "minutes"):
        return float(amount * 60)
    raise BadQueryFile(line_number, f"bad time-limit unit {unit!r}")
