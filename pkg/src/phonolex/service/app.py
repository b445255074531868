"""FastAPI service: query API, schema/defaults, media files, console."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse

from ..api import run_query
from ..engine import DEFAULT_STEP_BUDGET
from ..errors import PatternError, QueryError
from ..query import COUNT, QueryForm
from ..store import CompiledLexicon, load_compiled
from .schemas import (
    FieldModel,
    QueryErrorModel,
    QueryErrorsResponse,
    QueryFormModel,
    QueryResponse,
    SchemaResponse,
)

_FALLBACK_PAGE = """\
<!DOCTYPE html>
<html>
<head><meta charset="utf-8"/><title>phonolex</title></head>
<body>
<h1>phonolex</h1>
<p>The query console bundle is not installed. The JSON API is live:
POST /api/query, GET /api/schema, GET /media/&lt;path&gt;.</p>
</body>
</html>
"""


@dataclass
class ServiceConfig:
    lexicon_path: Path
    media_root: Path
    host: str = "127.0.0.1"
    port: int = 8765
    time_limit: float = 120.0
    step_budget: int = DEFAULT_STEP_BUDGET
    static_dir: Optional[Path] = None

    def __post_init__(self):
        self.lexicon_path = Path(self.lexicon_path)
        self.media_root = Path(self.media_root)
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)
        if not self.lexicon_path.exists():
            raise FileNotFoundError(f"lexicon not found: {self.lexicon_path}")
        if not self.media_root.is_dir():
            raise FileNotFoundError(f"media root not found: {self.media_root}")
        if not (0 < self.port < 65536):
            raise ValueError(f"port out of range: {self.port}")


def form_from_model(model: QueryFormModel) -> QueryForm:
    display = COUNT if model.display == COUNT else tuple(model.display)
    return QueryForm(
        display=display,
        patterns=dict(model.patterns),
        projections=dict(model.projections),
        flag_filters={
            "loanwords": model.loanwords,
            "suffixed": model.suffixed,
            "phrases": model.phrases,
        },
        time_limit=model.time_limit,
        vars_source=model.vars,
        axes=model.axes,
    )


def create_app(
    config: ServiceConfig, lexicon: Optional[CompiledLexicon] = None
) -> FastAPI:
    """Build the service around one immutable lexicon, loaded at startup
    and shared read-only by all requests."""
    if lexicon is None:
        lexicon = load_compiled(config.lexicon_path)
    app = FastAPI(title="phonolex", version="0.1.0")
    app.state.lexicon = lexicon
    app.state.config = config
    media_root = config.media_root.resolve()

    @app.exception_handler(RequestValidationError)
    def validation_error(_request, exc: RequestValidationError):
        # same error envelope as query errors, so clients parse one shape
        errors = []
        for issue in exc.errors():
            loc = [str(part) for part in issue.get("loc", []) if part != "body"]
            errors.append(
                QueryErrorModel(
                    attribute=".".join(loc) or None,
                    message=issue.get("msg", "invalid request"),
                ).model_dump()
            )
        return JSONResponse(status_code=422, content={"errors": errors})

    @app.get("/api/schema", response_model=SchemaResponse)
    def get_schema():
        schema = lexicon.schema
        return SchemaResponse(
            separator=schema.separator,
            record_count=len(lexicon),
            fields=[
                FieldModel(
                    marker=f.marker,
                    attribute=f.attribute,
                    position=f.position,
                    label=f.label,
                    kind=f.kind,
                )
                for f in schema.fields
            ],
            default_form=QueryFormModel(time_limit=config.time_limit),
        )

    @app.post(
        "/api/query",
        response_model=QueryResponse,
        responses={422: {"model": QueryErrorsResponse}},
    )
    def post_query(model: QueryFormModel):
        form = form_from_model(model)
        try:
            result = run_query(form, lexicon, step_budget=config.step_budget)
        except PatternError as exc:
            error = QueryErrorModel(
                attribute=exc.attribute,
                message=str(exc),
                position=exc.position,
            )
            return JSONResponse(
                status_code=422,
                content=QueryErrorsResponse(errors=[error]).model_dump(),
            )
        except QueryError as exc:
            attribute = getattr(exc, "attribute", None)
            error = QueryErrorModel(attribute=attribute, message=str(exc))
            return JSONResponse(
                status_code=422,
                content=QueryErrorsResponse(errors=[error]).model_dump(),
            )
        return result.payload()

    @app.get("/media/{media_path:path}")
    def get_media(media_path: str):
        candidate = (media_root / media_path).resolve()
        try:
            candidate.relative_to(media_root)
        except ValueError:
            return JSONResponse(status_code=403, content={"detail": "forbidden"})
        if not candidate.is_file():
            return JSONResponse(status_code=404, content={"detail": "not found"})
        return FileResponse(candidate)

    @app.get("/", response_class=HTMLResponse)
    def index():
        static_dir = config.static_dir
        if static_dir is not None:
            page = static_dir / "index.html"
            if page.is_file():
                return HTMLResponse(page.read_text(encoding="utf-8"))
        return HTMLResponse(_FALLBACK_PAGE)

    @app.get("/static/{asset_path:path}")
    def get_static(asset_path: str):
        static_dir = config.static_dir
        if static_dir is None:
            return JSONResponse(status_code=404, content={"detail": "not found"})
        root = static_dir.resolve()
        candidate = (root / asset_path).resolve()
        try:
            candidate.relative_to(root)
        except ValueError:
            return JSONResponse(status_code=403, content={"detail": "forbidden"})
        if not candidate.is_file():
            return JSONResponse(status_code=404, content={"detail": "not found"})
        return FileResponse(candidate)

    return app
