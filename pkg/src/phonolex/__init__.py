"""phonolex: a lexicon query engine for quantitative phonological research.

Compiles Shoebox-style lexicons into a canonical record store and answers
extended-pattern queries whose parenthesized parameters structure hits
into up-to-4-dimensional tables, with minimal-set search, cross-field
backreferences and pre-match projections, rendered as text, HTML, LaTeX
or JSON and served over HTTP.
"""

from .api import QueryResult, run_query
from .engine import compile_pattern, match_anchored
from .oracle import oracle_match
from .patterns import (
    Projection,
    VarEnv,
    apply_projection,
    parse_pattern,
    parse_projection,
    parse_var_block,
    print_pattern,
)
from .query import (
    COUNT,
    AssembledQuery,
    HitTable,
    QueryForm,
    assemble,
    default_form,
    execute,
    filter_minimal_sets,
    parse_query_file,
    record_passes_filters,
)
from .store import (
    CompiledLexicon,
    DEFAULT_SCHEMA,
    FieldSchema,
    FieldSpec,
    LexRecord,
    encode_record,
    decode_record,
    load_compiled,
    match_line,
    parse_shoebox,
    save_compiled,
)
from .tables import (
    TableModel,
    build_table,
    flip,
    render_html,
    render_latex,
    render_text,
    table_to_dict,
    table_to_json,
)

__version__ = "0.1.0"
