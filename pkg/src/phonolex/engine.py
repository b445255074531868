"""Backtracking execution of pattern ASTs.

The compiler stages an AST into nested closures, one matcher per node,
called as ``matcher(text, pos, continuation, state) -> bool``. Matching is
leftmost-first with greedy quantifiers, with one deliberate exception:
repeats of ``.`` are shortest-first, so that a parameter adjacent to a
``.*`` filler captures the longest material (an onset cluster parameter
captures ``pf``, not just ``f``). Backreferences and negative lookahead
take the language beyond regular, hence backtracking rather than automata;
runaway searches are cut off by a per-match step budget and a cooperative
deadline checked every 2**14 steps.

Classes and ``.`` never match the field separator, so no capture can ever
span two fields of an assembled record line.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (
    BackrefBeforeLabel,
    DuplicateLabel,
    MultipleFocus,
    StepBudgetExceeded,
    TimeLimitReached,
    TooManyParameters,
)
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
    SILENT,
)

DEFAULT_STEP_BUDGET = 10_000_000
_DEADLINE_CHECK_INTERVAL = 1 << 14
MAX_DIMENSIONS = 4


class MatchState:
    __slots__ = ("caps", "steps", "budget", "deadline", "_next_check")

    def __init__(self, group_count: int, budget: int, deadline: Optional[float]):
        self.caps: list = [None] * (group_count + 1)
        self.steps = 0
        self.budget = budget
        self.deadline = deadline
        self._next_check = _DEADLINE_CHECK_INTERVAL

    def step(self, n: int = 1):
        self.steps += n
        if self.steps > self.budget:
            raise StepBudgetExceeded(
                f"matcher exceeded its step budget of {self.budget}"
            )
        if self.deadline is not None and self.steps >= self._next_check:
            self._next_check = self.steps + _DEADLINE_CHECK_INTERVAL
            if time.perf_counter() > self.deadline:
                raise TimeLimitReached("query time limit reached mid-match")


class Captures:
    """Per-group matched text of one successful match.

    Groups that did not take part in the winning derivation are unset
    (``None``). Spans are kept for internal invariant checks only.
    """

    def __init__(self, texts: dict, spans: dict):
        self.texts = texts
        self._spans = spans

    def group(self, index: int) -> Optional[str]:
        return self.texts.get(index)

    def __eq__(self, other):
        return isinstance(other, Captures) and self.texts == other.texts

    def __repr__(self):
        return f"Captures({self.texts!r})"


@dataclass(frozen=True)
class GroupInfo:
    index: int
    role: str
    label: Optional[int]
    node: Node


class ExecPattern:
    """Compiled form of a pattern AST."""

    def __init__(self, ast, separator, matcher, groups, label_to_group):
        self.ast = ast
        self.separator = separator
        self.matcher = matcher
        self.groups = groups
        self.group_count = len(groups)
        self.label_to_group = label_to_group
        focus = [g.index for g in groups if g.role == FOCUS]
        self.focus_group = focus[0] if focus else None


def _collect_groups(ast: Node):
    groups: list[GroupInfo] = []
    label_to_group: dict[int, int] = {}
    defined: set[int] = set()

    def walk(node):
        if isinstance(node, Group):
            if node.role in (PARAMETER, FOCUS):
                index = len(groups) + 1
                if node.label is not None:
                    if node.label in label_to_group:
                        raise DuplicateLabel(
                            f"label {node.label} used on two parameters"
                        )
                    label_to_group[node.label] = index
                    defined.add(node.label)
                groups.append(GroupInfo(index, node.role, node.label, node))
            walk(node.child)
        elif isinstance(node, Backref):
            if node.label not in defined:
                raise BackrefBeforeLabel(
                    f"${node.label} has no earlier (${node.label}...) parameter"
                )
        elif isinstance(node, Concat):
            for part in node.parts:
                walk(part)
        elif isinstance(node, Alt):
            for branch in node.branches:
                walk(branch)
        elif isinstance(node, Repeat):
            walk(node.child)
        elif isinstance(node, NegLookahead):
            walk(node.child)

    walk(ast)
    return groups, label_to_group


def _accept(_pos: int) -> bool:
    return True


_SINGLE_CHAR = (Literal, AnyChar, CharClass, FieldBoundary)


def _char_test(node, separator: str) -> Callable[[str], bool]:
    if isinstance(node, Literal):
        ch = node.char
        return lambda c: c == ch
    if isinstance(node, FieldBoundary):
        return lambda c: c == separator
    if isinstance(node, AnyChar):
        return lambda c: c != separator
    if node.negated:
        excluded = node.members | {separator}
        return lambda c: c not in excluded
    allowed = node.members - {separator}
    return lambda c: c in allowed


class _CompileCtx:
    """Carries the group counter so the compiler's pre-order index
    assignment matches :func:`_collect_groups` exactly."""

    __slots__ = ("separator", "label_to_group", "next_group")

    def __init__(self, separator, label_to_group):
        self.separator = separator
        self.label_to_group = label_to_group
        self.next_group = 1


def _compile_node(node: Node, ctx: _CompileCtx):
    if isinstance(node, _SINGLE_CHAR):
        test = _char_test(node, ctx.separator)

        def match_char(t, pos, k, st):
            st.step()
            if pos < len(t) and test(t[pos]):
                return k(pos + 1)
            return False

        return match_char

    if isinstance(node, Concat):
        if not node.parts:
            return lambda t, pos, k, st: k(pos)
        compiled = [_compile_node(p, ctx) for p in node.parts]

        def fold(parts):
            if len(parts) == 1:
                return parts[0]
            head, tail = parts[0], fold(parts[1:])

            def match_seq(t, pos, k, st):
                return head(t, pos, lambda p: tail(t, p, k, st), st)

            return match_seq

        return fold(compiled)

    if isinstance(node, Alt):
        compiled = [_compile_node(b, ctx) for b in node.branches]

        def match_alt(t, pos, k, st):
            st.step()
            for branch in compiled:
                if branch(t, pos, k, st):
                    return True
            return False

        return match_alt

    if isinstance(node, Repeat):
        return _compile_repeat(node, ctx)

    if isinstance(node, Group):
        if node.role == SILENT:
            return _compile_node(node.child, ctx)
        index = ctx.next_group
        ctx.next_group += 1
        child = _compile_node(node.child, ctx)

        def match_group(t, pos, k, st):
            caps = st.caps

            def close(end):
                old = caps[index]
                caps[index] = (pos, end)
                if k(end):
                    return True
                caps[index] = old
                return False

            return child(t, pos, close, st)

        return match_group

    if isinstance(node, Backref):
        index = ctx.label_to_group[node.label]

        def match_backref(t, pos, k, st):
            st.step()
            span = st.caps[index]
            if span is None:
                return False
            start, end = span
            length = end - start
            if t[pos:pos + length] == t[start:end]:
                return k(pos + length)
            return False

        return match_backref

    if isinstance(node, NegLookahead):
        child = _compile_node(node.child, ctx)

        def match_neg(t, pos, k, st):
            saved = st.caps[:]
            found = child(t, pos, _accept, st)
            st.caps[:] = saved
            if found:
                return False
            return k(pos)

        return match_neg

    raise TypeError(f"not a pattern node: {node!r}")


def _compile_repeat(node: Repeat, ctx: _CompileCtx):
    min_count, max_count = node.min_count, node.max_count
    child_node = node.child
    separator = ctx.separator

    if isinstance(child_node, _SINGLE_CHAR):
        test = _char_test(child_node, separator)
        lazy = isinstance(child_node, AnyChar)
        # a negated class that excludes nothing but the separator scans in C
        fast_to_separator = (
            isinstance(child_node, CharClass)
            and child_node.negated
            and child_node.members <= {separator}
        )

        def match_run(t, pos, k, st):
            n = len(t)
            limit = n if max_count is None else min(n, pos + max_count)
            if fast_to_separator:
                found = t.find(separator, pos, limit)
                hi = limit if found < 0 else found
            else:
                hi = pos
                while hi < limit and test(t[hi]):
                    hi += 1
            st.step(hi - pos + 1)
            lo = pos + min_count
            if hi < lo:
                return False
            if lazy:
                for p in range(lo, hi + 1):
                    if k(p):
                        return True
            else:
                for p in range(hi, lo - 1, -1):
                    if k(p):
                        return True
            return False

        return match_run

    child = _compile_node(child_node, ctx)

    def match_repeat(t, pos, k, st):
        def attempt(p, n):
            st.step()
            if max_count is None or n < max_count:
                if child(t, p, lambda p2: p2 != p and attempt(p2, n + 1), st):
                    return True
            if n >= min_count:
                return k(p)
            return False

        return attempt(pos, 0)

    return match_repeat


def compile_pattern(ast: Node, separator: str = ";") -> ExecPattern:
    """Compile an AST, indexing parameter/focus groups 1..G in text order.

    Raises TooManyParameters beyond four groups (tables have at most four
    dimensions), MultipleFocus for a second ``{...}``, DuplicateLabel, and
    BackrefBeforeLabel when ``$d`` precedes its ``(d...)``.
    """
    groups, label_to_group = _collect_groups(ast)
    if len(groups) > MAX_DIMENSIONS:
        raise TooManyParameters(
            f"{len(groups)} parameters; results tables support at most "
            f"{MAX_DIMENSIONS} dimensions"
        )
    if sum(1 for g in groups if g.role == FOCUS) > 1:
        raise MultipleFocus("only one {...} focus parameter is allowed")
    ctx = _CompileCtx(separator, label_to_group)
    matcher = _compile_node(ast, ctx)
    return ExecPattern(ast, separator, matcher, groups, label_to_group)


def match_anchored(
    exec_pattern: ExecPattern,
    text: str,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
    deadline: Optional[float] = None,
) -> Optional[Captures]:
    """Match the whole of ``text`` against a compiled pattern.

    Returns the captures fixed by the first successful derivation, or None.
    May raise StepBudgetExceeded or TimeLimitReached.
    """
    state = MatchState(exec_pattern.group_count, step_budget, deadline)
    end = len(text)
    if not exec_pattern.matcher(text, 0, lambda p: p == end, state):
        return None
    texts = {}
    spans = {}
    for info in exec_pattern.groups:
        span = state.caps[info.index]
        spans[info.index] = span
        texts[info.index] = None if span is None else text[span[0]:span[1]]
    return Captures(texts, spans)
