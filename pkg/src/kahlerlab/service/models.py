"""Pydantic request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator

from ..checks.base import TOLERANCE_TIERS


class RunConfig(BaseModel):
    """Verification run configuration; also the JSON config-file schema."""

    checks: list[str] | Literal["all"] = "all"
    seed: int = Field(default=42, ge=0)
    samples: int | None = Field(default=None, ge=10)
    tolerances: dict[str, float] = Field(default_factory=dict)
    format: Literal["json", "csv", "text"] = "text"
    output: str | None = None
    n: int = Field(default=2, ge=2, le=4)
    include_timings: bool = False

    @field_validator("tolerances")
    @classmethod
    def _known_positive_tiers(cls, v: dict[str, float]) -> dict[str, float]:
        for tier, value in v.items():
            if tier not in TOLERANCE_TIERS:
                raise ValueError(
                    f"unknown tolerance tier {tier!r}; tiers: {sorted(TOLERANCE_TIERS)}"
                )
            if value <= 0:
                raise ValueError(f"tolerance for tier {tier!r} must be positive")
        return v


class ReportRecord(BaseModel):
    id: str
    passed: bool = Field(alias="pass")
    max_residual: float
    mean_residual: float
    tolerance: float
    samples: int
    seed: int
    wall_ms: float
    claim_ref: str

    model_config = {"populate_by_name": True}


class VerifyResponse(BaseModel):
    reports: list[ReportRecord]
    all_pass: bool


class CheckInfo(BaseModel):
    id: str
    description: str
    claim_ref: str
    default_samples: int


class EvalRequest(BaseModel):
    metric: Literal["flat", "fs", "s", "eh"]
    kind: Literal["metric", "ricci", "scalar", "hsc", "diastasis"]
    point: list[str]
    center: list[str] | None = None
    direction: list[str] | None = None


class EvalResponse(BaseModel):
    metric: str
    kind: str
    n: int
    value: str | None = None
    matrix: list[list[str]] | None = None
