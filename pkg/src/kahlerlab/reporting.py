"""Canonical serialization of check reports and complex values.

JSON and CSV artifacts carry exactly the fields
{id, pass, max_residual, mean_residual, tolerance, samples, seed, wall_ms,
claim_ref} in that order.  Complex scalars serialize as "a+bi" strings and
matrices as row-major arrays of them.  Unless timings are explicitly
requested, wall_ms is written as 0 so reruns with the same seed and config
produce byte-identical artifacts; the text renderer always shows measured
times.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .checks.base import CheckReport


def parse_complex(token: str) -> complex:
    """Parse a complex literal with an optional trailing-i convention:
    "1", "2i", "1+2i", "-1.5-0.3i"."""
    text = token.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ValueError(f"cannot parse {token!r} as a complex number") from None


def parse_point(text: str) -> np.ndarray:
    """Comma-separated complex literals -> complex vector."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty point")
    return np.array([parse_complex(p) for p in parts], dtype=complex)


def fmt_complex(c: complex) -> str:
    c = complex(c)
    sign = "+" if c.imag >= 0 else "-"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def fmt_matrix(m: np.ndarray) -> list[list[str]]:
    a = np.asarray(m, dtype=complex)
    return [[fmt_complex(v) for v in row] for row in a]


def report_record(r: CheckReport, include_timings: bool = False) -> dict:
    return {
        "id": r.id,
        "pass": bool(r.passed),
        "max_residual": float(r.max_residual),
        "mean_residual": float(r.mean_residual),
        "tolerance": float(r.tolerance),
        "samples": int(r.samples),
        "seed": int(r.seed),
        "wall_ms": round(float(r.wall_ms), 3) if include_timings else 0,
        "claim_ref": r.claim_ref,
    }


def render_json(reports: list[CheckReport], include_timings: bool = False) -> str:
    records = [report_record(r, include_timings) for r in reports]
    return json.dumps(records, indent=2) + "\n"


def render_csv(reports: list[CheckReport], include_timings: bool = False) -> str:
    buf = io.StringIO()
    fields = [
        "id",
        "pass",
        "max_residual",
        "mean_residual",
        "tolerance",
        "samples",
        "seed",
        "wall_ms",
        "claim_ref",
    ]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        rec = report_record(r, include_timings)
        rec["pass"] = "true" if rec["pass"] else "false"
        writer.writerow(rec)
    return buf.getvalue()


def render_text(reports: list[CheckReport]) -> str:
    lines = []
    width = max((len(r.id) for r in reports), default=10)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status}  {r.id:<{width}}  max={r.max_residual:<12.6g} "
            f"mean={r.mean_residual:<12.6g} tol={r.tolerance:<8.3g} "
            f"samples={r.samples:<4d} {r.wall_ms:8.1f} ms"
        )
        if r.detail:
            lines.append(f"      {r.detail}")
        if not r.passed and r.worst_point is not None:
            pt = ", ".join(fmt_complex(c) for c in r.worst_point)
            lines.append(f"      worst point: ({pt})")
    n_pass = sum(r.passed for r in reports)
    lines.append(f"{n_pass}/{len(reports)} rows passed")
    return "\n".join(lines) + "\n"
