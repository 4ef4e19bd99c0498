"""Check registry, run context and report construction.

Each registered check family runs a seeded, tolerance-controlled computation
and emits one or more report rows.  A row is either a residual check
(pass iff max residual <= tolerance) or a witness/control check, where the
reported residual is the shortfall max(0, threshold - observed): zero when
the required effect is present, so the same pass rule applies.

Tolerances come in tiers (overridable per run):

    symbolic      1e-10   transcription-level identities
    diastasis     1e-9    polarization vs closed forms, hereditary residuals
    curvature     1e-8    Ricci / scalar / hsc chains (4th derivatives)
    levi          1e-6    strict-plurisubharmonicity margins
    fd            1e-6    finite-difference cross-checks, 1st/2nd order
    fd_curvature  1e-5    finite-difference cross-checks at curvature level
    probe_positive 1e-9   defect the positive-control probe must reach
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import sampling

TOLERANCE_TIERS: dict[str, float] = {
    "symbolic": 1e-10,
    "diastasis": 1e-9,
    "curvature": 1e-8,
    "levi": 1e-6,
    "fd": 1e-6,
    "fd_curvature": 1e-5,
    "probe_positive": 1e-9,
}

#: Required non-flatness witness: some sample with |hsc| at least this large.
HSC_WITNESS = 1e-2
#: Required non-Ricci-flatness witness for the Burns-Simanca metric.
RICCI_WITNESS = 1e-3
#: Minimum deviation a perturbed negative control must exhibit.
CONTROL_DEVIATION = 1e-3
#: Einstein-constant sensitivity: residual after perturbing lambda by 0.1.
LAMBDA_SENSITIVITY = 1e-3
#: Defect below which a nonexistence probe would stop counting as evidence.
PROBE_DEFECT = 1e-2


class UnknownCheckError(ValueError):
    pass


@dataclass
class CheckReport:
    """Outcome of one check row; deterministic given seed and config."""

    id: str
    passed: bool
    max_residual: float
    mean_residual: float
    tolerance: float
    samples: int
    seed: int
    wall_ms: float
    claim_ref: str
    worst_point: list[complex] | None = None
    detail: str = ""


@dataclass
class CheckContext:
    """Per-run knobs handed to check runners."""

    seed: int = 42
    samples: int | None = None
    n: int = 2
    tolerances: dict[str, float] = field(default_factory=dict)

    def tol(self, tier: str) -> float:
        if tier in self.tolerances:
            return float(self.tolerances[tier])
        return TOLERANCE_TIERS[tier]

    def count(self, default: int) -> int:
        return self.samples if self.samples is not None else default

    def rng(self, *labels: str) -> np.random.Generator:
        return sampling.rng_for(self.seed, *labels)


@dataclass
class CheckSpec:
    id: str
    description: str
    claim_ref: str
    default_samples: int
    runner: Callable[[CheckContext], list[CheckReport]]


REGISTRY: dict[str, CheckSpec] = {}


def register(spec: CheckSpec) -> CheckSpec:
    if spec.id in REGISTRY:
        raise ValueError(f"duplicate check id {spec.id}")
    REGISTRY[spec.id] = spec
    return spec


def check_ids() -> list[str]:
    return list(REGISTRY)


def resolve_ids(selected: Sequence[str] | str) -> list[str]:
    """Validate requested ids against the registry before any work runs."""
    if selected == "all" or selected == ["all"]:
        return check_ids()
    unknown = [s for s in selected if s not in REGISTRY]
    if unknown:
        raise UnknownCheckError(
            f"unknown check id(s) {unknown}; see list-checks for the registry"
        )
    return list(selected)


def run_checks(selected: Sequence[str] | str, ctx: CheckContext) -> list[CheckReport]:
    """Run the selected families in registry order; rows carry the family's
    wall time."""
    reports: list[CheckReport] = []
    for cid in resolve_ids(selected):
        spec = REGISTRY[cid]
        t0 = time.perf_counter()
        rows = spec.runner(ctx)
        wall = (time.perf_counter() - t0) * 1e3
        for row in rows:
            row.wall_ms = wall
            row.seed = ctx.seed
        reports.extend(rows)
    return reports


# ---------------------------------------------------------------------------
# Row builders


def residual_row(
    row_id: str,
    residuals: np.ndarray,
    tolerance: float,
    claim_ref: str,
    points: np.ndarray | None = None,
    detail: str = "",
) -> CheckReport:
    r = np.asarray(residuals, dtype=float).ravel()
    worst = int(np.argmax(r)) if r.size else 0
    wp = None
    if points is not None:
        P = np.asarray(points, dtype=complex)
        if P.ndim == 1:
            P = P[:, None]
        if P.shape[0] == r.size:
            wp = [complex(c) for c in P[worst]]
    mx = float(np.max(r)) if r.size else 0.0
    return CheckReport(
        id=row_id,
        passed=bool(mx <= tolerance),
        max_residual=mx,
        mean_residual=float(np.mean(r)) if r.size else 0.0,
        tolerance=tolerance,
        samples=int(r.size),
        seed=0,
        wall_ms=0.0,
        claim_ref=claim_ref,
        worst_point=wp,
        detail=detail,
    )


def witness_row(
    row_id: str,
    observed: float,
    threshold: float,
    tolerance: float,
    claim_ref: str,
    samples: int,
    detail: str = "",
) -> CheckReport:
    """Lower-bound check: residual is the shortfall below the threshold."""
    shortfall = max(0.0, threshold - observed)
    text = f"observed {observed:.6g} against required {threshold:g}"
    return CheckReport(
        id=row_id,
        passed=bool(shortfall <= tolerance),
        max_residual=shortfall,
        mean_residual=shortfall,
        tolerance=tolerance,
        samples=samples,
        seed=0,
        wall_ms=0.0,
        claim_ref=claim_ref,
        worst_point=None,
        detail=f"{text}; {detail}" if detail else text,
    )
