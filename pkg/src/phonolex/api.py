"""High-level pipeline: one call from query form to renderable table."""

from __future__ import annotations

from dataclasses import dataclass

from .engine import DEFAULT_STEP_BUDGET
from .query import QueryForm, assemble, execute, filter_minimal_sets
from .store import CompiledLexicon
from .tables import TableModel, build_table, table_to_dict


@dataclass
class QueryResult:
    model: TableModel
    truncated: bool
    matched_count: int
    diagnostics: list

    def payload(self) -> dict:
        """The JSON body shared verbatim by the CLI and the HTTP API."""
        return {
            "table": table_to_dict(self.model),
            "truncated": self.truncated,
            "matched_count": self.matched_count,
            "diagnostics": list(self.diagnostics),
        }


def run_query(
    form: QueryForm,
    lexicon: CompiledLexicon,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> QueryResult:
    """Assemble, execute, minimal-set filter (when a focus parameter is
    present) and shape the table for a query form."""
    query = assemble(form, lexicon.schema)
    outcome = execute(query, lexicon, step_budget=step_budget)
    table = outcome.table
    if query.focus_dim is not None:
        table = filter_minimal_sets(table, query.focus_dim)
    model = build_table(
        table,
        form.display,
        lexicon,
        axes=form.axes,
        focus_dim=query.focus_dim,
    )
    return QueryResult(
        model=model,
        truncated=table.truncated,
        matched_count=table.matched_count,
        diagnostics=outcome.diagnostics,
    )
