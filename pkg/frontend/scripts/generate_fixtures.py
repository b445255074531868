"""Capture service responses and HTML renderings as console test fixtures.

Run from the repository root after changing the core package:

    python frontend/scripts/generate_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from phonolex.api import run_query                        # noqa: E402
from phonolex.service import ServiceConfig, create_app, form_from_model  # noqa: E402
from phonolex.service.schemas import QueryFormModel       # noqa: E402
from phonolex.store import (                              # noqa: E402
    CompiledLexicon,
    DEFAULT_SCHEMA,
    parse_shoebox,
    save_compiled,
)
from phonolex.tables import render_html                   # noqa: E402

FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

COUNT_QUERY = {
    "display": "count",
    "patterns": {"root": ".*([$V])([$C])#"},
}
ITEMS_QUERY = {
    "display": ["speech", "word", "gloss"],
    "patterns": {"root": ".*(pf|v)[ou]'#"},
}
MINSET_QUERY = {
    "display": ["speech", "word", "gloss"],
    "patterns": {"root": ".*([$C]+){[ou]}([$C])#"},
}
BAD_QUERY = {"patterns": {"root": ".*([$V]"}}


def main() -> None:
    source = (ROOT / "tests" / "data" / "dschang_fixture.sbx").read_text(
        encoding="utf-8"
    )
    lexicon = CompiledLexicon(DEFAULT_SCHEMA, parse_shoebox(source, DEFAULT_SCHEMA))
    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        save_compiled(lexicon, tmp_path / "lexicon.plx")
        (tmp_path / "media").mkdir()
        config = ServiceConfig(
            lexicon_path=tmp_path / "lexicon.plx", media_root=tmp_path / "media"
        )
        client = TestClient(create_app(config, lexicon=lexicon))

        FIXTURES.mkdir(parents=True, exist_ok=True)
        write("schema.json", client.get("/api/schema").json())
        for name, query in (
            ("count_query", COUNT_QUERY),
            ("items_query", ITEMS_QUERY),
            ("minset_query", MINSET_QUERY),
        ):
            response = client.post("/api/query", json=query)
            assert response.status_code == 200, response.text
            write(f"{name}.json", {"request": query, "response": response.json()})
            form = form_from_model(QueryFormModel(**query))
            html = render_html(run_query(form, lexicon).model)
            (FIXTURES / f"{name}.html").write_text(html, encoding="utf-8")
        bad = client.post("/api/query", json=BAD_QUERY)
        assert bad.status_code == 422
        write("error_422.json", {"request": BAD_QUERY, "response": bad.json()})
    print(f"fixtures written to {FIXTURES}")


def write(name: str, payload) -> None:
    (FIXTURES / name).write_text(
        json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


if __name__ == "__main__":
    main()
