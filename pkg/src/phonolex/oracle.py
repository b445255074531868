"""Brute-force reference matcher.

``oracle_match`` interprets a pattern AST directly, enumerating every
derivation in preference order with immutable capture maps, and returns
the first full-input derivation. It shares nothing with the staged
closure compiler in ``engine`` beyond the AST types, and exists so the
two can be diffed against each other on randomized inputs.

Preference order (identical to the engine by specification):
concatenation is left to right; alternation tries branches in written
order; ``*``/``+``/``?`` prefer more repetitions except over ``.``, which
prefers fewer; a repeat iteration must consume at least one character;
backreferences to unset groups fail; negative lookahead succeeds with
zero width iff the inner pattern has no derivation at that point.

Intended for test-scale inputs (length <= 12, small patterns) only.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .patterns import (
    Alt,
    AnyChar,
    Backref,
    CharClass,
    Concat,
    FieldBoundary,
    FOCUS,
    Group,
    Literal,
    NegLookahead,
    Node,
    PARAMETER,
    Repeat,
)

Caps = tuple  # Caps[i] is (start, end) or None; index 0 unused


class OracleCaptures:
    def __init__(self, texts: dict):
        self.texts = texts

    def group(self, index: int) -> Optional[str]:
        return self.texts.get(index)

    def __eq__(self, other):
        return getattr(other, "texts", None) == self.texts

    def __repr__(self):
        return f"OracleCaptures({self.texts!r})"


def _number_groups(node: Node, counter: list) -> dict:
    """Map id(node) -> group index for parameter/focus groups, pre-order."""
    numbering: dict = {}

    def visit(n):
        if isinstance(n, Group):
            if n.role in (PARAMETER, FOCUS):
                counter[0] += 1
                numbering[id(n)] = counter[0]
            visit(n.child)
        elif isinstance(n, Concat):
            for part in n.parts:
                visit(part)
        elif isinstance(n, Alt):
            for branch in n.branches:
                visit(branch)
        elif isinstance(n, (Repeat, NegLookahead)):
            visit(n.child)

    visit(node)
    return numbering


def _label_map(node: Node, numbering: dict) -> dict:
    labels: dict = {}

    def visit(n):
        if isinstance(n, Group):
            if n.label is not None and id(n) in numbering:
                labels[n.label] = numbering[id(n)]
            visit(n.child)
        elif isinstance(n, Concat):
            for part in n.parts:
                visit(part)
        elif isinstance(n, Alt):
            for branch in n.branches:
                visit(branch)
        elif isinstance(n, (Repeat, NegLookahead)):
            visit(n.child)

    visit(node)
    return labels


def oracle_match(
    ast: Node, text: str, separator: str = ";"
) -> Optional[OracleCaptures]:
    counter = [0]
    numbering = _number_groups(ast, counter)
    group_count = counter[0]
    labels = _label_map(ast, numbering)

    def derive(node: Node, pos: int, caps: Caps) -> Iterator[tuple]:
        if isinstance(node, Literal):
            if pos < len(text) and text[pos] == node.char:
                yield pos + 1, caps
        elif isinstance(node, FieldBoundary):
            if pos < len(text) and text[pos] == separator:
                yield pos + 1, caps
        elif isinstance(node, AnyChar):
            if pos < len(text) and text[pos] != separator:
                yield pos + 1, caps
        elif isinstance(node, CharClass):
            if pos < len(text):
                c = text[pos]
                inside = c in node.members
                if c != separator and (not inside if node.negated else inside):
                    yield pos + 1, caps
        elif isinstance(node, Concat):
            yield from derive_seq(node.parts, 0, pos, caps)
        elif isinstance(node, Alt):
            for branch in node.branches:
                yield from derive(branch, pos, caps)
        elif isinstance(node, Repeat):
            lazy = isinstance(node.child, AnyChar)
            yield from derive_repeat(node, pos, caps, 0, lazy)
        elif isinstance(node, Group):
            if node.role in (PARAMETER, FOCUS):
                g = numbering[id(node)]
                for end, caps2 in derive(node.child, pos, caps):
                    updated = caps2[:g] + ((pos, end),) + caps2[g + 1:]
                    yield end, updated
            else:
                yield from derive(node.child, pos, caps)
        elif isinstance(node, Backref):
            g = labels.get(node.label)
            span = caps[g] if g is not None else None
            if span is not None:
                captured = text[span[0]:span[1]]
                if text.startswith(captured, pos):
                    yield pos + len(captured), caps
        elif isinstance(node, NegLookahead):
            for _ in derive(node.child, pos, caps):
                return  # any inner derivation refutes the lookahead
            yield pos, caps
        else:
            raise TypeError(f"not a pattern node: {node!r}")

    def derive_seq(parts, index, pos, caps) -> Iterator[tuple]:
        if index == len(parts):
            yield pos, caps
            return
        for mid, caps2 in derive(parts[index], pos, caps):
            yield from derive_seq(parts, index + 1, mid, caps2)

    def derive_repeat(node, pos, caps, taken, lazy) -> Iterator[tuple]:
        at_least_min = taken >= node.min_count
        can_take_more = node.max_count is None or taken < node.max_count
        if lazy and at_least_min:
            yield pos, caps
        if can_take_more:
            for mid, caps2 in derive(node.child, pos, caps):
                if mid == pos:
                    continue  # iterations must consume input
                yield from derive_repeat(node, mid, caps2, taken + 1, lazy)
        if not lazy and at_least_min:
            yield pos, caps

    for end, caps in derive(ast, 0, (None,) * (group_count + 1)):
        if end == len(text):
            texts = {}
            for index in range(1, group_count + 1):
                span = caps[index]
                texts[index] = None if span is None else text[span[0]:span[1]]
            return OracleCaptures(texts)
    return None
