"""Service-layer handlers: pure functions from request models to response
models.  The FastAPI app wires these to routes; the CLI calls them in
process (or over HTTP against a remote instance)."""

from __future__ import annotations

import numpy as np

from .. import diastasis, metrics, potentials
from ..checks import CheckContext, REGISTRY, UnknownCheckError, resolve_ids, run_checks
from ..expr import DomainEvalError
from ..reporting import fmt_complex, fmt_matrix, parse_complex, report_record
from .models import CheckInfo, EvalRequest, EvalResponse, ReportRecord, RunConfig, VerifyResponse


class ConfigError(ValueError):
    """Bad request: unknown check, malformed point, inadmissible input."""


def list_checks() -> list[CheckInfo]:
    return [
        CheckInfo(
            id=spec.id,
            description=spec.description,
            claim_ref=spec.claim_ref,
            default_samples=spec.default_samples,
        )
        for spec in REGISTRY.values()
    ]


def run_verify_full(config: RunConfig) -> tuple[VerifyResponse, list]:
    """Run the suite; returns the wire response plus the rich in-process
    reports (which carry detail strings and worst points for text output)."""
    try:
        selected = resolve_ids(config.checks)
    except UnknownCheckError as e:
        raise ConfigError(str(e)) from None
    ctx = CheckContext(
        seed=config.seed,
        samples=config.samples,
        n=config.n,
        tolerances=config.tolerances,
    )
    reports = run_checks(selected, ctx)
    records = [
        ReportRecord.model_validate(report_record(r, config.include_timings))
        for r in reports
    ]
    response = VerifyResponse(reports=records, all_pass=all(r.passed for r in reports))
    return response, reports


def run_verify(config: RunConfig) -> VerifyResponse:
    return run_verify_full(config)[0]


def _parse_vector(values: list[str], what: str) -> np.ndarray:
    try:
        return np.array([parse_complex(v) for v in values], dtype=complex)
    except ValueError as e:
        raise ConfigError(f"bad {what}: {e}") from None


def eval_point(req: EvalRequest) -> EvalResponse:
    z = _parse_vector(req.point, "point")
    n = len(z)
    if req.metric == "eh" and n != 2:
        raise ConfigError("the Eguchi-Hanson metric needs a 2-component point")
    if req.metric == "s" and not 2 <= n <= 4:
        raise ConfigError("the generalized Burns-Simanca metric supports n in 2..4")
    try:
        pot = potentials.builtin_potential(req.metric, n)
    except ValueError as e:
        raise ConfigError(str(e)) from None

    try:
        if req.kind == "metric":
            return _matrix_response(req, n, metrics.metric_at(pot, z))
        if req.kind == "ricci":
            return _matrix_response(req, n, metrics.ricci_at(pot, z))
        if req.kind == "scalar":
            return _value_response(req, n, metrics.scalar_trace(pot, z))
        if req.kind == "hsc":
            if not req.direction:
                raise ConfigError("kind=hsc needs --direction")
            v = _parse_vector(req.direction, "direction")
            if len(v) != n:
                raise ConfigError("direction and point dimensions differ")
            return _value_response(req, n, metrics.hsc_at(pot, z, v))
        # diastasis
        if not req.center:
            raise ConfigError("kind=diastasis needs --center")
        q = _parse_vector(req.center, "center")
        if len(q) != n:
            raise ConfigError("center and point dimensions differ")
        d = diastasis.diastasis_from_potential(pot, q)
        return _value_response(req, n, d.value(z))
    except (
        metrics.InadmissiblePointError,
        metrics.NotPositiveDefiniteError,
        diastasis.SingularPointError,
        DomainEvalError,
        ValueError,
    ) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"inadmissible evaluation: {e}") from None


def _value_response(req: EvalRequest, n: int, value: float) -> EvalResponse:
    return EvalResponse(
        metric=req.metric, kind=req.kind, n=n, value=fmt_complex(complex(value))
    )


def _matrix_response(req: EvalRequest, n: int, m: np.ndarray) -> EvalResponse:
    return EvalResponse(metric=req.metric, kind=req.kind, n=n, matrix=fmt_matrix(m))
