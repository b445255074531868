"""Command line: compile a lexicon, run a query file, serve the API."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .api import run_query
from .engine import DEFAULT_STEP_BUDGET
from .errors import BadQueryFile, PatternError, PhonolexError, QueryError
from .query import parse_query_file
from .store import (
    CompiledLexicon,
    DEFAULT_SCHEMA,
    FieldSchema,
    load_compiled,
    parse_shoebox_report,
    save_compiled,
)
from .tables import render_html, render_latex, render_text


def _load_schema(schema_path) -> FieldSchema:
    if schema_path is None:
        return DEFAULT_SCHEMA
    return FieldSchema.from_file(schema_path)


@click.group()
def main():
    """Lexicon query engine for phonological research."""


@main.command("compile")
@click.argument("source", type=click.Path(path_type=Path))
@click.option("--schema", "schema_path", type=click.Path(path_type=Path),
              default=None, help="Schema config (JSON); default built-in.")
@click.option("-o", "--out", "out_path", type=click.Path(path_type=Path),
              required=True, help="Compiled store to write.")
def cmd_compile(source, schema_path, out_path):
    """Compile a Shoebox SOURCE file into a record store."""
    if not source.exists():
        click.echo(f"error: {source}: no such file", err=True)
        sys.exit(1)
    schema = _load_schema(schema_path)
    records, diagnostics = parse_shoebox_report(
        source.read_text(encoding="utf-8"), schema
    )
    lexicon = CompiledLexicon(schema, records)
    save_compiled(lexicon, out_path)
    click.echo(f"{len(records)} records compiled to {out_path}")
    for diagnostic in diagnostics:
        click.echo(f"rejected {diagnostic}", err=True)
    sys.exit(1 if diagnostics else 0)


@main.command("query")
@click.argument("lexicon_path", type=click.Path(path_type=Path))
@click.argument("query_file", type=click.Path(path_type=Path))
@click.option("--format", "fmt",
              type=click.Choice(["text", "html", "latex", "json"]),
              default="text", show_default=True)
@click.option("--schema", "schema_path", type=click.Path(path_type=Path),
              default=None)
@click.option("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)
def cmd_query(lexicon_path, query_file, fmt, schema_path, step_budget):
    """Run QUERY_FILE against a compiled lexicon and print the table."""
    for path in (lexicon_path, query_file):
        if not path.exists():
            click.echo(f"error: {path}: no such file", err=True)
            sys.exit(1)
    try:
        lexicon = load_compiled(lexicon_path, _load_schema(schema_path))
    except PhonolexError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    try:
        form = parse_query_file(query_file.read_text(encoding="utf-8"))
        result = run_query(form, lexicon, step_budget=step_budget)
    except BadQueryFile as exc:
        click.echo(f"query error: {exc}", err=True)
        sys.exit(2)
    except PatternError as exc:
        where = f"attribute {exc.attribute!r}: " if exc.attribute else ""
        click.echo(f"query error: {where}{type(exc).__name__}: {exc.located()}",
                   err=True)
        sys.exit(2)
    except QueryError as exc:
        click.echo(f"query error: {exc}", err=True)
        sys.exit(2)
    if fmt == "text":
        click.echo(render_text(result.model), nl=False)
    elif fmt == "html":
        click.echo(render_html(result.model), nl=False)
    elif fmt == "latex":
        click.echo(render_latex(result.model), nl=False)
    else:
        click.echo(json.dumps(result.payload(), ensure_ascii=False, indent=2))
    if result.truncated:
        click.echo("warning: time limit reached, results truncated", err=True)
    for diagnostic in result.diagnostics:
        click.echo(f"note: {diagnostic}", err=True)
    sys.exit(0)


@main.command("serve")
@click.argument("lexicon_path", type=click.Path(path_type=Path))
@click.option("--media-root", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help="Listen port; PHONOLEX_PORT overrides the default 8765.")
@click.option("--static-dir", type=click.Path(path_type=Path), default=None,
              help="Query console bundle directory.")
@click.option("--time-limit", type=float, default=120.0, show_default=True)
@click.option("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)
def cmd_serve(lexicon_path, media_root, host, port, static_dir, time_limit,
              step_budget):
    """Serve the query API and console for a compiled lexicon."""
    import uvicorn

    from .service import ServiceConfig, create_app

    if port is None:
        port = int(os.environ.get("PHONOLEX_PORT", "8765"))
    try:
        config = ServiceConfig(
            lexicon_path=lexicon_path,
            media_root=media_root,
            host=host,
            port=port,
            time_limit=time_limit,
            step_budget=step_budget,
            static_dir=static_dir,
        )
    except (FileNotFoundError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main()
