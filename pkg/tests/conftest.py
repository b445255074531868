import random
from pathlib import Path

import pytest

from phonolex.patterns import parse_var_block
from phonolex.query import DEFAULT_VARS
from phonolex.store import CompiledLexicon, DEFAULT_SCHEMA, LexRecord, parse_shoebox

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "goldens"

FIXTURE_IDS = ["1612", "0107", "0203", "0204", "0301", "0302", "0303"]


@pytest.fixture(scope="session")
def fixture_source() -> str:
    return (DATA_DIR / "dschang_fixture.sbx").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_lexicon(fixture_source) -> CompiledLexicon:
    records = parse_shoebox(fixture_source, DEFAULT_SCHEMA)
    assert [r.id for r in records] == FIXTURE_IDS
    return CompiledLexicon(DEFAULT_SCHEMA, records)


@pytest.fixture(scope="session")
def paper_env():
    return parse_var_block(DEFAULT_VARS)


_ONSETS = ["p", "b", "t", "d", "k", "g", "c", "j", "f", "v", "s", "z", "m",
           "n", "N", "w", "y", "l", "h", "pf", "ts", "bh", "kw", "mb", "nd"]
_VOWELS = list("ieaouEOU@")
_CODAS = ["", "", "", "p", "t", "k", "'", "m", "n", "N"]
_TONES = ["H", "L", "DH", "DL", "HF", "LF"]


def synthetic_lexicon(count: int = 2200, seed: int = 42) -> CompiledLexicon:
    """A deterministic lexicon at the scale of the real one."""
    rng = random.Random(seed)
    records = []
    for i in range(count):
        rid = f"{i:04d}"
        syllables = rng.choice([1, 1, 1, 2])
        parts = []
        for s in range(syllables):
            coda = rng.choice(_CODAS) if s == syllables - 1 else ""
            parts.append(rng.choice(_ONSETS) + rng.choice(_VOWELS) + coda)
        root = "#" + ".".join(parts) + "#"
        tone = "".join(rng.choice(_TONES) for _ in range(rng.choice([1, 1, 2, 3])))
        flags = rng.choice(["", "", "", "", "loan", "suffix", "phrase",
                            "loan suffix"])
        values = (
            rid, flags, f"img/{rid}.gif", root.replace("#", "#a."), root,
            tone, root.replace("#", ""), "", rng.choice(["n", "v", "adj"]),
            "", "9/6", f"gloss-{i}", f"glose-{i}", f"audio/{rid}.wav",
        )
        records.append(LexRecord(id=rid, values=values))
    return CompiledLexicon(DEFAULT_SCHEMA, records)


@pytest.fixture(scope="session")
def synthetic_2200() -> CompiledLexicon:
    return synthetic_lexicon(2200)
