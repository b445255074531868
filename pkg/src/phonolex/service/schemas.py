"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

from ..query import DEFAULT_TIME_LIMIT, DEFAULT_VARS


class QueryFormModel(BaseModel):
    display: Union[Literal["count"], list[str]] = "count"
    patterns: dict[str, str] = Field(default_factory=dict)
    projections: dict[str, str] = Field(default_factory=dict)
    loanwords: Literal["include", "exclude"] = "exclude"
    suffixed: Literal["include", "exclude"] = "include"
    phrases: Literal["include", "exclude"] = "exclude"
    time_limit: float = Field(default=DEFAULT_TIME_LIMIT, gt=0)
    axes: Literal["normal", "flip"] = "normal"
    vars: str = DEFAULT_VARS


class QueryErrorModel(BaseModel):
    attribute: Optional[str] = None
    message: str
    position: Optional[int] = None


class QueryErrorsResponse(BaseModel):
    errors: list[QueryErrorModel]


class QueryResponse(BaseModel):
    table: dict
    truncated: bool
    matched_count: int
    diagnostics: list[str]


class FieldModel(BaseModel):
    marker: str
    attribute: str
    position: int
    label: str
    kind: str


class SchemaResponse(BaseModel):
    separator: str
    record_count: int
    fields: list[FieldModel]
    default_form: QueryFormModel
