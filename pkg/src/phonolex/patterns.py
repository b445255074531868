"""The query pattern mini-language.

Three layers live here: the extended-pattern AST and its parser, the
``vars:`` block (character-string variables, reusable pattern fragments,
transliteration projections), and projection application.

Pattern grammar summary::

    literal chars         anything not listed below; ``\\x`` escapes
    .                     any character (never the field separator)
    [abc] [^abc] [$V]     character classes; ``$V`` splices a string variable
    * + ?                 greedy repetition (shortest-first for ``.``)
    a|b                   alternation, leftmost branch first
    (...)  (3...)         parameter group, optionally labelled with a digit
    {...}                 the focus parameter (minimal-set search)
    $3                    backreference to the group labelled 3
    (?!...)               zero-width negative lookahead
    (?:...)               silent (non-capturing) group
    $NAME                 splice a fragment variable as a silent group
    $e                    any run of characters within one field
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import (
    ArityMismatch,
    DanglingQuantifier,
    EmptyProjection,
    PatternSyntaxError,
    ReservedName,
    UnbalancedDelimiter,
    UnknownVariable,
    WrongVariableKind,
)

# group roles
PARAMETER = "parameter"
FOCUS = "focus"
SILENT = "silent"

_METACHARS = set(".[](){}*+?|$\\")
_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_NAME_CHARS = _NAME_START | set("0123456789_-")


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    char: str


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class CharClass:
    members: frozenset
    negated: bool = False
    # name of the string variable this class was spliced from, when the
    # class is exactly one splice; drives axis-label ordering
    source_var: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    branches: tuple


@dataclass(frozen=True)
class Repeat:
    child: "Node"
    min_count: int          # 0 or 1
    max_count: Optional[int]  # None = unbounded, 1 for ``?``


@dataclass(frozen=True)
class Group:
    child: "Node"
    role: str = PARAMETER
    label: Optional[int] = None


@dataclass(frozen=True)
class Backref:
    label: int


@dataclass(frozen=True)
class NegLookahead:
    child: "Node"


@dataclass(frozen=True)
class FieldBoundary:
    """Matches exactly the field separator; only query assembly emits it."""


Node = Union[
    Literal, AnyChar, CharClass, Concat, Alt, Repeat, Group, Backref,
    NegLookahead, FieldBoundary,
]

# ``$e``: any run of characters not containing the field separator
WILDCARD = Repeat(CharClass(frozenset(), negated=True), 0, None)


# -- variable environment ---------------------------------------------------

@dataclass(frozen=True)
class CharString:
    chars: str
    kind = "chars"


@dataclass(frozen=True)
class PatternFragment:
    ast: Node
    kind = "fragment"


class Projection:
    """An ordered chain of transliteration steps applied to field text.

    Each step maps characters positionally (``from_chars[i] ->
    to_chars[i]``); the first step that maps a character wins, characters
    outside all steps pass through. Application never changes text length.
    """

    kind = "projection"

    def __init__(self, steps):
        steps = [(f, t) for f, t in steps]
        if not steps:
            raise EmptyProjection("projection has no tr steps")
        table = {}
        for from_chars, to_chars in steps:
            if not from_chars:
                raise ArityMismatch("tr step has an empty source set")
            if len(to_chars) == 1 and len(from_chars) > 1:
                to_chars = to_chars * len(from_chars)
            if len(from_chars) != len(to_chars):
                raise ArityMismatch(
                    f"tr step maps {len(from_chars)} characters onto "
                    f"{len(to_chars)}"
                )
            for f, t in zip(from_chars, to_chars):
                table.setdefault(ord(f), t)
        self.steps = tuple(steps)
        self._table = table

    def apply(self, text: str) -> str:
        return text.translate(self._table)

    def __eq__(self, other):
        return isinstance(other, Projection) and self._table == other._table

    def __repr__(self):
        return f"Projection({len(self.steps)} steps)"


def apply_projection(projection: Projection, field_text: str) -> str:
    return projection.apply(field_text)


class _PendingProjection:
    """Projection source held until the whole vars block is parsed, so a
    projection may reference variables defined after it."""

    kind = "projection-pending"

    def __init__(self, source):
        self.source = source


_RESERVED = {"e"}


class VarEnv:
    """Bindings from variable names to strings, fragments or projections."""

    def __init__(self):
        self._bindings: dict = {}

    def bind(self, name, value):
        if name in _RESERVED or (len(name) == 1 and name.isdigit()):
            raise ReservedName(f"variable name ${name} is reserved")
        self._bindings[name] = value

    def lookup(self, name):
        try:
            return self._bindings[name]
        except KeyError:
            raise UnknownVariable(f"undefined variable ${name}") from None

    def __contains__(self, name):
        return name in self._bindings

    def names(self):
        return list(self._bindings)


# -- pattern parser ---------------------------------------------------------

class _PatternParser:
    def __init__(self, source: str, env: Optional[VarEnv]):
        self.src = source
        self.env = env
        self.i = 0

    def error(self, cls, message):
        raise cls(message, position=self.i + 1)

    def peek(self):
        return self.src[self.i] if self.i < len(self.src) else ""

    def take(self):
        ch = self.src[self.i]
        self.i += 1
        return ch

    def parse(self) -> Node:
        node = self.parse_alt()
        if self.i < len(self.src):
            self.error(
                UnbalancedDelimiter,
                f"unmatched {self.src[self.i]!r}",
            )
        return node

    def parse_alt(self) -> Node:
        branches = [self.parse_concat()]
        while self.peek() == "|":
            self.take()
            branches.append(self.parse_concat())
        if len(branches) == 1:
            return branches[0]
        return Alt(tuple(branches))

    def parse_concat(self) -> Node:
        parts = []
        while self.peek() and self.peek() not in ")}|":
            parts.append(self.parse_quantified())
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def parse_quantified(self) -> Node:
        ch = self.peek()
        if ch and ch in "*+?":
            self.error(DanglingQuantifier, f"quantifier {ch!r} has nothing to repeat")
        node = self.parse_atom()
        ch = self.peek()
        if ch and ch in "*+?":
            self.take()
            if ch == "*":
                node = Repeat(node, 0, None)
            elif ch == "+":
                node = Repeat(node, 1, None)
            else:
                node = Repeat(node, 0, 1)
            ch = self.peek()
            if ch and ch in "*+?":
                self.error(DanglingQuantifier, "nested quantifier")
        return node

    def parse_atom(self) -> Node:
        ch = self.peek()
        if ch == "(":
            return self.parse_parens()
        if ch == "{":
            return self.parse_focus()
        if ch == "[":
            return self.parse_class()
        if ch == ".":
            self.take()
            return AnyChar()
        if ch == "\\":
            self.take()
            if not self.peek():
                self.error(PatternSyntaxError, "dangling escape at end of pattern")
            return Literal(self.take())
        if ch == "$":
            return self.parse_dollar()
        return Literal(self.take())

    def parse_parens(self) -> Node:
        open_at = self.i
        self.take()
        if self.peek() == "?":
            self.take()
            mod = self.peek()
            if mod == "!":
                self.take()
                body = self.parse_alt()
                self.expect_close(")", open_at)
                return NegLookahead(body)
            if mod == ":":
                self.take()
                body = self.parse_alt()
                self.expect_close(")", open_at)
                return Group(body, SILENT)
            self.error(PatternSyntaxError, f"unsupported group modifier (?{mod}")
        label = None
        if self.peek().isdigit():
            label = int(self.take())
            if label == 0:
                self.error(PatternSyntaxError, "group labels run 1-9")
        body = self.parse_alt()
        self.expect_close(")", open_at)
        return Group(body, PARAMETER, label)

    def parse_focus(self) -> Node:
        open_at = self.i
        self.take()
        label = None
        if self.peek().isdigit():
            label = int(self.take())
            if label == 0:
                self.error(PatternSyntaxError, "group labels run 1-9")
        body = self.parse_alt()
        self.expect_close("}", open_at)
        return Group(body, FOCUS, label)

    def expect_close(self, closer, open_at):
        if self.peek() != closer:
            raise UnbalancedDelimiter(
                f"missing {closer!r} for the delimiter at column {open_at + 1}",
                position=open_at + 1,
            )
        self.take()

    def parse_dollar(self) -> Node:
        self.take()
        ch = self.peek()
        if ch.isdigit():
            d = int(self.take())
            if d == 0:
                self.error(PatternSyntaxError, "backreference labels run 1-9")
            return Backref(d)
        if ch not in _NAME_START:
            self.error(PatternSyntaxError, "expected a variable name or digit after $")
        name = self.take_name()
        if name == "e":
            return Group(WILDCARD, SILENT)
        if self.env is None:
            self.error(UnknownVariable, f"undefined variable ${name}")
        value = self.env.lookup(name)
        if value.kind == "fragment":
            return Group(value.ast, SILENT)
        if value.kind == "chars":
            raise WrongVariableKind(
                f"${name} is a character string; use [${name}] to match one of "
                f"its characters",
                position=self.i,
            )
        raise WrongVariableKind(
            f"${name} is a projection and cannot appear in a pattern",
            position=self.i,
        )

    def take_name(self) -> str:
        start = self.i
        while self.peek() in _NAME_CHARS:
            self.i += 1
        return self.src[start:self.i]

    def parse_class(self) -> Node:
        open_at = self.i
        self.take()
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        members = set()
        splices = []
        literal_member_count = 0
        while True:
            ch = self.peek()
            if not ch:
                raise UnbalancedDelimiter(
                    "unterminated character class", position=open_at + 1
                )
            if ch == "]":
                self.take()
                break
            if ch == "\\":
                self.take()
                if not self.peek():
                    raise UnbalancedDelimiter(
                        "unterminated character class", position=open_at + 1
                    )
                members.add(self.take())
                literal_member_count += 1
            elif ch == "$":
                self.take()
                if self.peek() not in _NAME_START:
                    self.error(
                        PatternSyntaxError,
                        "expected a variable name after $ in a character class",
                    )
                name = self.take_name()
                if self.env is None:
                    self.error(UnknownVariable, f"undefined variable ${name}")
                value = self.env.lookup(name)
                if value.kind == "fragment":
                    # [$T] with T a fragment: the brackets are notation for a
                    # plain splice, provided the fragment stands alone
                    if (
                        not negated
                        and not members
                        and not splices
                        and self.peek() == "]"
                    ):
                        self.take()
                        return Group(value.ast, SILENT)
                    raise WrongVariableKind(
                        f"${name} is a pattern fragment and cannot be mixed "
                        f"into a character class",
                        position=self.i,
                    )
                if value.kind != "chars":
                    raise WrongVariableKind(
                        f"${name} is not a character string and cannot be "
                        f"spliced into a class",
                        position=self.i,
                    )
                members.update(value.chars)
                splices.append(name)
            else:
                members.add(self.take())
                literal_member_count += 1
        if not members:
            self.error(PatternSyntaxError, "empty character class")
        source_var = None
        if not negated and len(splices) == 1 and literal_member_count == 0:
            source_var = splices[0]
        return CharClass(frozenset(members), negated, source_var)


def parse_pattern(source: str, env: Optional[VarEnv] = None) -> Node:
    """Parse extended pattern notation into an AST.

    ``env`` supplies ``$NAME`` splices: ``[$V]`` demands a character
    string, bare ``$T`` demands a fragment (inlined as a silent group).
    """
    return _PatternParser(source, env).parse()


# -- pattern printer --------------------------------------------------------

def _escape_literal(ch: str) -> str:
    return "\\" + ch if ch in _METACHARS else ch


def _escape_class_member(ch: str) -> str:
    return "\\" + ch if ch in "]\\$^" else ch


def print_pattern(node: Node, separator: str = ";") -> str:
    """Render an AST back to pattern source (diagnostics; inverse of
    :func:`parse_pattern` on parser-produced trees)."""
    if isinstance(node, Literal):
        return _escape_literal(node.char)
    if isinstance(node, AnyChar):
        return "."
    if isinstance(node, CharClass):
        inner = "".join(_escape_class_member(c) for c in sorted(node.members))
        return f"[{'^' if node.negated else ''}{inner}]"
    if isinstance(node, Concat):
        out = []
        for part in node.parts:
            text = print_pattern(part, separator)
            if isinstance(part, Alt):
                text = f"(?:{text})"
            out.append(text)
        return "".join(out)
    if isinstance(node, Alt):
        return "|".join(print_pattern(b, separator) for b in node.branches)
    if isinstance(node, Repeat):
        suffix = {(0, None): "*", (1, None): "+", (0, 1): "?"}[
            (node.min_count, node.max_count)
        ]
        child = print_pattern(node.child, separator)
        if isinstance(node.child, (Concat, Alt)):
            child = f"(?:{child})"
        return child + suffix
    if isinstance(node, Group):
        body = print_pattern(node.child, separator)
        label = str(node.label) if node.label is not None else ""
        if node.role == FOCUS:
            return "{" + label + body + "}"
        if node.role == SILENT:
            return f"(?:{body})"
        return f"({label}{body})"
    if isinstance(node, Backref):
        return f"${node.label}"
    if isinstance(node, NegLookahead):
        return f"(?!{print_pattern(node.child, separator)})"
    if isinstance(node, FieldBoundary):
        return separator
    raise TypeError(f"not a pattern node: {node!r}")


# -- vars block -------------------------------------------------------------

class _BlockScanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def line_col(self, pos=None):
        pos = self.i if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - self.text.rfind("\n", 0, pos)
        return line, col

    def error(self, cls, message, pos=None):
        line, col = self.line_col(pos)
        raise cls(message, position=col, line=line)

    def peek(self):
        return self.text[self.i] if self.i < len(self.text) else ""

    def skip_filler(self):
        """Whitespace, newlines, comments and stray terminators between
        statements."""
        while self.i < len(self.text):
            ch = self.text[self.i]
            if ch in " \t\r\n;":
                self.i += 1
            elif ch == "#":
                nl = self.text.find("\n", self.i)
                self.i = len(self.text) if nl < 0 else nl + 1
            else:
                return

    def skip_ws_inline(self):
        while self.peek() in " \t":
            self.i += 1

    def scan_statement_expr(self) -> str:
        """Consume expression text up to an unnested ``;`` / newline / EOF,
        honoring quotes, escapes, bracket nesting and comments."""
        start = self.i
        out = []
        depth = 0
        in_quote = False
        while self.i < len(self.text):
            ch = self.text[self.i]
            if ch == "\\":
                out.append(self.text[self.i:self.i + 2])
                self.i += 2
                continue
            if in_quote:
                if ch == '"':
                    in_quote = False
                out.append(ch)
                self.i += 1
                continue
            if ch == '"':
                in_quote = True
                out.append(ch)
                self.i += 1
                continue
            if ch == "#":
                nl = self.text.find("\n", self.i)
                self.i = len(self.text) if nl < 0 else nl
                continue
            if ch in "{[(":
                depth += 1
            elif ch in "}])":
                depth -= 1
                if depth < 0:
                    self.error(UnbalancedDelimiter, f"unmatched {ch!r}")
            elif depth == 0 and ch in ";\n":
                self.i += 1
                break
            out.append(ch)
            self.i += 1
        if in_quote:
            self.error(PatternSyntaxError, "unterminated string", pos=start)
        if depth > 0:
            self.error(UnbalancedDelimiter, "unterminated delimiter", pos=start)
        return "".join(out).strip()


def _unquote(raw: str) -> str:
    """Contents of a double-quoted literal; ``\\x`` yields x for any x."""
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _try_concat_terms(expr: str):
    """Tokenize ``expr`` as term ('.' term)* with quoted-string and $NAME
    terms. Returns the term list or None when the shape does not match."""
    terms = []
    i = 0
    n = len(expr)
    expecting_term = True
    while i < n:
        ch = expr[i]
        if ch in " \t":
            i += 1
            continue
        if expecting_term:
            if ch == '"':
                j = i + 1
                while j < n:
                    if expr[j] == "\\":
                        j += 2
                        continue
                    if expr[j] == '"':
                        break
                    j += 1
                if j >= n:
                    return None
                terms.append(("quoted", expr[i + 1:j]))
                i = j + 1
            elif ch == "$":
                j = i + 1
                if j >= n or expr[j] not in _NAME_START:
                    return None
                while j < n and expr[j] in _NAME_CHARS:
                    j += 1
                terms.append(("name", expr[i + 1:j]))
                i = j
            else:
                return None
            expecting_term = False
        else:
            if ch == ".":
                expecting_term = True
                i += 1
            else:
                return None
    if expecting_term or not terms:
        return None
    return terms


def parse_var_block(source: str) -> VarEnv:
    """Parse a ``vars:`` block into an environment.

    Statements are ``$NAME = expr`` terminated by ``;``, newline or end of
    input; ``#`` comments to end of line. Expression kinds are inferred
    syntactically: quoted strings and ``.``-concatenations of strings
    become character strings (resolved eagerly), ``tr/../../`` chains and
    ``{...}`` bodies become projections (expanded once the whole block is
    read, so they may reference later definitions), anything else is a
    pattern fragment parsed against the bindings seen so far.
    """
    env = VarEnv()
    scanner = _BlockScanner(source)
    pending: list[str] = []
    while True:
        scanner.skip_filler()
        if not scanner.peek():
            break
        stmt_pos = scanner.i
        if scanner.peek() != "$":
            scanner.error(PatternSyntaxError, "expected a $NAME = ... statement")
        scanner.i += 1
        ch = scanner.peek()
        if ch.isdigit():
            scanner.error(ReservedName, f"variable name ${ch} is reserved")
        if ch not in _NAME_START:
            scanner.error(PatternSyntaxError, "expected a variable name after $")
        name_start = scanner.i
        while scanner.peek() in _NAME_CHARS:
            scanner.i += 1
        name = scanner.text[name_start:scanner.i]
        scanner.skip_ws_inline()
        if scanner.peek() != "=":
            scanner.error(PatternSyntaxError, f"expected '=' after ${name}")
        scanner.i += 1
        expr = scanner.scan_statement_expr()
        if not expr:
            scanner.error(PatternSyntaxError, f"empty definition for ${name}", pos=stmt_pos)
        try:
            value = _evaluate_expr(expr, env)
        except (PatternSyntaxError, UnknownVariable, WrongVariableKind,
                ArityMismatch, EmptyProjection, UnbalancedDelimiter,
                DanglingQuantifier) as exc:
            if exc.line is None:
                exc.line, _ = scanner.line_col(stmt_pos)
            raise
        env.bind(name, value)
        if isinstance(value, _PendingProjection):
            pending.append(name)
    for name in pending:
        raw = env.lookup(name)
        if isinstance(raw, _PendingProjection):
            env.bind(name, parse_projection(raw.source, env))
    return env


def _evaluate_expr(expr: str, env: VarEnv):
    stripped = expr.strip()
    if stripped.startswith("{") or stripped.startswith("tr/"):
        return _PendingProjection(stripped)
    terms = _try_concat_terms(stripped)
    if terms is not None:
        has_quoted = any(kind == "quoted" for kind, _ in terms)
        name_kinds = [
            env.lookup(text).kind if text in env else None
            for kind, text in terms
            if kind == "name"
        ]
        if has_quoted or all(k == "chars" for k in name_kinds):
            parts = []
            for kind, text in terms:
                if kind == "quoted":
                    parts.append(_unquote(text))
                else:
                    value = env.lookup(text)
                    if value.kind != "chars":
                        raise WrongVariableKind(
                            f"${text} is not a character string and cannot be "
                            f"concatenated into one"
                        )
                    parts.append(value.chars)
            return CharString("".join(parts))
    ast = parse_pattern(stripped, env)
    _reject_parameters(ast)
    return PatternFragment(ast)


def _reject_parameters(node: Node):
    """Fragments are reusable snippets; a parameter inside one would create
    hidden table dimensions at every splice site, so they are refused."""
    if isinstance(node, Group):
        if node.role in (PARAMETER, FOCUS):
            raise PatternSyntaxError(
                "parameter and focus groups are not allowed inside variable "
                "definitions"
            )
        _reject_parameters(node.child)
    elif isinstance(node, Concat):
        for part in node.parts:
            _reject_parameters(part)
    elif isinstance(node, Alt):
        for branch in node.branches:
            _reject_parameters(branch)
    elif isinstance(node, (Repeat, NegLookahead)):
        _reject_parameters(node.child)


# -- projections ------------------------------------------------------------

def _scan_tr_section(src: str, i: int, env: VarEnv) -> tuple[str, int]:
    """Read one ``/``-terminated tr section starting at ``i``, expanding
    escapes and $NAME splices."""
    out = []
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "/":
            return "".join(out), i + 1
        if ch == "\\" and i + 1 < n:
            out.append(src[i + 1])
            i += 2
            continue
        if ch == "$":
            j = i + 1
            if j < n and src[j] in _NAME_START:
                while j < n and src[j] in _NAME_CHARS:
                    j += 1
                name = src[i + 1:j]
                value = env.lookup(name) if env is not None else None
                if value is None:
                    raise UnknownVariable(f"undefined variable ${name}")
                if value.kind != "chars":
                    raise WrongVariableKind(
                        f"${name} is not a character string and cannot appear "
                        f"in a tr step"
                    )
                out.append(value.chars)
                i = j
                continue
        out.append(ch)
        i += 1
    raise PatternSyntaxError("unterminated tr step", position=i + 1)


def parse_projection(source: str, env: Optional[VarEnv] = None) -> Projection:
    """Parse ``{ tr/FROM/TO/; ... }`` or a bare tr-chain into a Projection.

    A single-character TO with a longer FROM maps every FROM character to
    that one character.
    """
    src = source.strip()
    if src.startswith("{"):
        if not src.endswith("}"):
            raise UnbalancedDelimiter("unterminated projection body", position=1)
        src = src[1:-1].strip()
    steps = []
    i = 0
    n = len(src)
    while i < n:
        while i < n and src[i] in " \t\r\n;":
            i += 1
        if i >= n:
            break
        if src[i] == "#":
            nl = src.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if not src.startswith("tr/", i):
            raise PatternSyntaxError(
                f"expected tr/.../.../ in projection, found {src[i:i + 8]!r}",
                position=i + 1,
            )
        i += 3
        from_chars, i = _scan_tr_section(src, i, env)
        to_chars, i = _scan_tr_section(src, i, env)
        steps.append((from_chars, to_chars))
    if not steps:
        raise EmptyProjection("projection has no tr steps")
    return Projection(steps)
