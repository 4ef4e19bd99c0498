"""HTTP service wrapping the verification lab."""

from .models import (
    CheckInfo,
    EvalRequest,
    EvalResponse,
    ReportRecord,
    RunConfig,
    VerifyResponse,
)
from .handlers import ConfigError, eval_point, list_checks, run_verify

__all__ = [
    "CheckInfo",
    "ConfigError",
    "EvalRequest",
    "EvalResponse",
    "ReportRecord",
    "RunConfig",
    "VerifyResponse",
    "eval_point",
    "list_checks",
    "run_verify",
]
