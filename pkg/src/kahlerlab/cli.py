"""Command-line client for the verification lab.

The CLI is a thin layer over the service handlers: it builds the same
request models the HTTP API accepts, runs them in process by default, or
sends them to a remote instance with --server.  Exit codes: 0 all selected
checks passed, 1 some check failed, 2 configuration error, 3 internal
evaluation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from pydantic import ValidationError

from . import __version__, reporting
from .service import handlers
from .service.models import EvalRequest, RunConfig

ENV_SEED = "KAHLERLAB_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlerlab",
        description="curvature and diastasis verification for blow-up metrics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification checks and write a report")
    v.add_argument("--all", action="store_true", help="run every registered check")
    v.add_argument(
        "--check",
        action="append",
        metavar="ID",
        help="check id to run (repeatable); see list-checks",
    )
    v.add_argument("--seed", type=int, help=f"run seed (default ${ENV_SEED} or 42)")
    v.add_argument("--samples", type=int, help="override per-check sample counts (>= 10)")
    v.add_argument("--format", choices=["json", "csv", "text"], help="report format")
    v.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    v.add_argument("--n", type=int, help="dimension for the generalized-metric checks (2-4)")
    v.add_argument(
        "--tol",
        action="append",
        metavar="TIER=VALUE",
        help="tolerance tier override (repeatable), e.g. --tol curvature=1e-7",
    )
    v.add_argument("--config", metavar="FILE", help="JSON config file (RunConfig fields)")
    v.add_argument(
        "--include-timings",
        action="store_true",
        help="write measured wall_ms into report artifacts (breaks byte-reproducibility)",
    )
    v.add_argument("--server", metavar="URL", help="send the run to a remote service")

    e = sub.add_parser("eval", help="evaluate a metric/curvature/diastasis quantity")
    e.add_argument("--metric", required=True, choices=["flat", "fs", "s", "eh"])
    e.add_argument(
        "--kind", required=True, choices=["metric", "ricci", "scalar", "hsc", "diastasis"]
    )
    e.add_argument(
        "--point",
        required=True,
        help="comma-separated complex literals, e.g. 0.7,0.3i or 1+2i,-0.5",
    )
    e.add_argument("--center", help="diastasis center (same format as --point)")
    e.add_argument("--direction", help="direction for kind=hsc")
    e.add_argument("--server", metavar="URL")

    ls = sub.add_parser("list-checks", help="list registered checks")
    ls.add_argument("--server", metavar="URL")

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _parse_tols(pairs: list[str] | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs or []:
        tier, sep, value = pair.partition("=")
        if not sep:
            raise handlers.ConfigError(f"--tol expects TIER=VALUE, got {pair!r}")
        try:
            out[tier.strip()] = float(value)
        except ValueError:
            raise handlers.ConfigError(f"--tol value {value!r} is not a number") from None
    return out


def _load_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                merged = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise handlers.ConfigError(f"cannot read config file: {e}") from None
        if not isinstance(merged, dict):
            raise handlers.ConfigError("config file must hold a JSON object")
    if args.check:
        merged["checks"] = args.check
    elif args.all:
        merged["checks"] = "all"
    if args.seed is not None:
        merged["seed"] = args.seed
    elif "seed" not in merged and os.environ.get(ENV_SEED):
        try:
            merged["seed"] = int(os.environ[ENV_SEED])
        except ValueError:
            raise handlers.ConfigError(f"${ENV_SEED} is not an integer") from None
    if args.samples is not None:
        merged["samples"] = args.samples
    if args.format is not None:
        merged["format"] = args.format
    if args.output is not None:
        merged["output"] = args.output
    if args.n is not None:
        merged["n"] = args.n
    tols = _parse_tols(args.tol)
    if tols:
        merged["tolerances"] = {**merged.get("tolerances", {}), **tols}
    if args.include_timings:
        merged["include_timings"] = True
    return RunConfig(**merged)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise handlers.ConfigError(f"cannot write report to {output!r}: {e}") from None


def _cmd_verify(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if args.server:
        import httpx

        resp = httpx.post(
            args.server.rstrip("/") + "/verify",
            json=config.model_dump(mode="json"),
            timeout=600.0,
        )
        if resp.status_code == 400 or resp.status_code == 422:
            sys.stderr.write(f"configuration rejected: {resp.text}\n")
            return 2
        resp.raise_for_status()
        payload = resp.json()
        records = payload["reports"]
        all_pass = bool(payload["all_pass"])
        reports = [
            handlers.ReportRecord.model_validate(rec) for rec in records
        ]
        full = [_record_as_report(r) for r in reports]
    else:
        response, full = handlers.run_verify_full(config)
        all_pass = response.all_pass

    if config.format == "json":
        text = reporting.render_json(full, config.include_timings)
    elif config.format == "csv":
        text = reporting.render_csv(full, config.include_timings)
    else:
        text = reporting.render_text(full)
    _emit(text, config.output)
    return 0 if all_pass else 1


def _record_as_report(rec) -> "handlers.CheckReport":
    from .checks.base import CheckReport

    return CheckReport(
        id=rec.id,
        passed=rec.passed,
        max_residual=rec.max_residual,
        mean_residual=rec.mean_residual,
        tolerance=rec.tolerance,
        samples=rec.samples,
        seed=rec.seed,
        wall_ms=rec.wall_ms,
        claim_ref=rec.claim_ref,
    )


def _cmd_eval(args: argparse.Namespace) -> int:
    def split(text: str | None) -> list[str] | None:
        if text is None:
            return None
        return [p for p in text.split(",") if p.strip()]

    req = EvalRequest(
        metric=args.metric,
        kind=args.kind,
        point=split(args.point) or [],
        center=split(args.center),
        direction=split(args.direction),
    )
    if args.server:
        import httpx

        resp = httpx.post(
            args.server.rstrip("/") + "/eval", json=req.model_dump(mode="json"), timeout=120.0
        )
        if resp.status_code in (400, 422):
            sys.stderr.write(f"evaluation rejected: {resp.text}\n")
            return 2
        resp.raise_for_status()
        payload = resp.json()
    else:
        payload = handlers.eval_point(req).model_dump()
    payload = {k: v for k, v in payload.items() if v is not None}
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_list(args: argparse.Namespace) -> int:
    if args.server:
        import httpx

        resp = httpx.get(args.server.rstrip("/") + "/checks", timeout=60.0)
        resp.raise_for_status()
        infos = resp.json()
    else:
        infos = [c.model_dump() for c in handlers.list_checks()]
    width = max(len(c["id"]) for c in infos)
    for c in infos:
        sys.stdout.write(f"{c['id']:<{width}}  [{c['default_samples']:>3}]  {c['description']}\n")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("kahlerlab.service.app:app", host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "list-checks":
            return _cmd_list(args)
        return _cmd_serve(args)
    except (handlers.ConfigError, ValidationError) as e:
        sys.stderr.write(f"configuration error: {e}\n")
        return 2
    except Exception as e:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
