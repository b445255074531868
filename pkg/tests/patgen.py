"""Random pattern/input generation for differential testing.

Builds ASTs directly (grammar-directed), so every generated pattern is
valid by construction: labels are defined before any backreference, at
most four parameter groups, lookahead bodies kept small.
"""

import random

from phonolex.patterns import (
    Alt,
    AnyChar,
    Backref,
    CharClass,
    Concat,
    FOCUS,
    Group,
    Literal,
    NegLookahead,
    PARAMETER,
    Repeat,
)

ALPHABET = "abcd"
SEPARATOR = ";"


class _GenState:
    def __init__(self):
        self.groups = 0
        self.labels = []


def gen_pattern(rng: random.Random, max_depth: int = 3):
    state = _GenState()
    node = _gen_concat(rng, state, max_depth)
    return node


def _gen_concat(rng, state, depth):
    parts = tuple(_gen_node(rng, state, depth - 1)
                  for _ in range(rng.randint(1, 3)))
    return parts[0] if len(parts) == 1 else Concat(parts)


def _gen_node(rng, state, depth):
    leaf_kinds = ["lit", "lit", "any", "class"]
    if state.labels:
        leaf_kinds.append("backref")
    if depth <= 0:
        kind = rng.choice(leaf_kinds)
    else:
        kind = rng.choice(
            leaf_kinds + ["repeat", "alt", "concat", "group", "lookahead"]
        )
    if kind == "lit":
        return Literal(rng.choice(ALPHABET))
    if kind == "any":
        return AnyChar()
    if kind == "class":
        size = rng.randint(1, 3)
        members = frozenset(rng.sample(ALPHABET, size))
        return CharClass(members, negated=rng.random() < 0.3)
    if kind == "backref":
        return Backref(rng.choice(state.labels))
    if kind == "repeat":
        child = _gen_node(rng, state, 0 if rng.random() < 0.6 else depth - 1)
        min_count, max_count = rng.choice([(0, None), (1, None), (0, 1)])
        return Repeat(child, min_count, max_count)
    if kind == "alt":
        branches = tuple(_gen_concat(rng, state, depth - 1)
                         for _ in range(rng.randint(2, 3)))
        return Alt(branches)
    if kind == "concat":
        return _gen_concat(rng, state, depth)
    if kind == "group":
        if state.groups >= 4:
            return _gen_node(rng, state, 0)
        state.groups += 1
        label = None
        if rng.random() < 0.5:
            unused = [d for d in range(1, 10) if d not in state.labels]
            if unused:
                label = rng.choice(unused)
                state.labels.append(label)
        role = FOCUS if (rng.random() < 0.1 and state.groups == 1) else PARAMETER
        return Group(_gen_concat(rng, state, depth - 1), role, label)
    if kind == "lookahead":
        return NegLookahead(_gen_node(rng, state, min(depth - 1, 1)))
    raise AssertionError(kind)


def gen_input(rng: random.Random, max_length: int = 10) -> str:
    chars = ALPHABET + (SEPARATOR if rng.random() < 0.2 else "")
    return "".join(rng.choice(chars) for _ in range(rng.randint(0, max_length)))


ROOT_POOL = [
    r".*([$V])([$C])#",
    r".*([$C]+)([$V]).*",
    r"#([$C]+)[$V]+.*",
    r".*([$V])[$C]*#",
    r".*(1[$V])$1.*",
    r".*{[ou]}.*",
    r"#C+V(C?)#",
]
TONE_POOL = [r"(.*)", r"([HL]).*", r".*(DH?|L).*"]
PART_POOL = [r"(.*)", r"n|v"]


def gen_query_form(rng: random.Random):
    """A random well-formed query form over the stock schema."""
    from phonolex.query import QueryForm

    patterns = {"root": rng.choice(ROOT_POOL)}
    projections = {}
    if patterns["root"].startswith("#C"):
        projections["root"] = "$CV-proj"
    if rng.random() < 0.5:
        patterns["tone"] = rng.choice(TONE_POOL)
    if rng.random() < 0.3:
        patterns["part"] = rng.choice(PART_POOL)
    flag_filters = {
        name: rng.choice(["include", "exclude"])
        for name in ("loanwords", "suffixed", "phrases")
    }
    return QueryForm(patterns=patterns, projections=projections,
                     flag_filters=flag_filters)
