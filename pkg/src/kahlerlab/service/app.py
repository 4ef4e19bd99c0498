"""FastAPI application exposing the verification lab over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from . import handlers
from .models import CheckInfo, EvalRequest, EvalResponse, RunConfig, VerifyResponse

app = FastAPI(
    title="kahlerlab",
    version=__version__,
    description=(
        "Curvature, diastasis and verification queries for the blow-up "
        "metrics; POST a run configuration to execute the check suite."
    ),
)


@app.exception_handler(handlers.ConfigError)
async def _config_error(request: Request, exc: handlers.ConfigError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/checks", response_model=list[CheckInfo])
def checks() -> list[CheckInfo]:
    return handlers.list_checks()


@app.post("/verify", response_model=VerifyResponse)
def verify(config: RunConfig) -> VerifyResponse:
    return handlers.run_verify(config)


@app.post("/eval", response_model=EvalResponse)
def eval_point(req: EvalRequest) -> EvalResponse:
    return handlers.eval_point(req)
