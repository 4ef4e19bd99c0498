"""Checks for the line isometry w -> ((w + lambda) e, [e]) into the
generalized Burns-Simanca manifold."""

from __future__ import annotations

import numpy as np

from .. import diastasis, expr as ex, metrics, potentials, sampling
from .base import (
    CheckContext,
    CheckReport,
    CheckSpec,
    CONTROL_DEVIATION,
    register,
    residual_row,
    witness_row,
)


def _line_map(lam: complex, e: np.ndarray, eps: float = 0.0) -> list[ex.SymExpr]:
    """Components of w -> ((w + lam) + eps w^2) e in blow-down coordinates."""
    w = ex.zvar(0)
    scalar = w + ex.const(lam)
    if eps:
        scalar = scalar + ex.const(eps) * w * w
    return [scalar * ex.const(c) for c in e]


def _sample_line(rng, count: int, lam: complex) -> np.ndarray:
    def draw(k):
        return sampling.annulus_points(rng, k, 1)

    # keep (w + lam) away from the blown-up origin
    return sampling.rejection_sample(
        draw, lambda W: np.abs(W[:, 0] + lam) > 5e-2, count
    )


def _phi_isometry(ctx: CheckContext) -> list[CheckReport]:
    count = ctx.count(50)
    n = ctx.n
    s_pot = potentials.s_potential(n)
    flat1 = potentials.flat_potential(1)
    rng = ctx.rng("phi_isometry")

    metric_dev = []
    factor_dev = []
    hereditary = []
    perturbed_dev = []
    pts_all = []
    for trial in range(5):
        lam = 0.0
        while abs(lam) < 0.3:
            lam = complex(*rng.normal(size=2))
        e = sampling.unit_directions(rng, 1, n)[0]
        pts = _sample_line(rng, count, lam)
        pts_all.append(pts)

        fmap = _line_map(lam, e)
        pb = metrics.pullback(s_pot, fmap, 1, label="phi_pullback")
        g = metrics.metric_batch(pb, pts)[:, 0, 0]
        metric_dev.append(np.abs(g - 1.0))

        F = np.stack(ex.eval_batch(fmap, pts), axis=1)
        f0 = np.array([ex.evaluate(f, ex.Assignment.diagonal([0.0])) for f in fmap])
        num = np.sum(np.abs(F) ** 2, axis=1) * np.sum(np.abs(f0) ** 2)
        den = np.abs(F @ np.conj(f0)) ** 2
        factor_dev.append(np.abs(num / den - 1.0))

        hereditary.append(
            diastasis.hereditary_check(s_pot, fmap, flat1, np.array([0.0]), pts)
        )

        pb_bad = metrics.pullback(s_pot, _line_map(lam, e, eps=1e-2), 1)
        g_bad = metrics.metric_batch(pb_bad, pts)[:, 0, 0]
        perturbed_dev.append(float(np.max(np.abs(g_bad - 1.0))))

    pts_flat = np.concatenate(pts_all, axis=0)
    rows = [
        residual_row(
            "check_phi_isometry.metric",
            np.concatenate(metric_dev),
            ctx.tol("symbolic"),
            "pullback of the generalized potential along the line map is the flat metric",
            points=pts_flat,
            detail="5 random (lambda, e) with |e| = 1",
        ),
        residual_row(
            "check_phi_isometry.proportionality",
            np.concatenate(factor_dev),
            ctx.tol("symbolic"),
            "|f(w)|^2 |f(0)|^2 / |f(w).conj f(0)|^2 is identically 1 along the line",
            points=pts_flat,
        ),
        residual_row(
            "check_phi_isometry.hereditary",
            np.array(hereditary),
            ctx.tol("diastasis"),
            "flat diastasis |w|^2 equals the ambient diastasis composed with the line map",
            detail="sup over sampled w per (lambda, e) trial",
        ),
        witness_row(
            "check_phi_isometry.perturbed_control",
            float(np.min(perturbed_dev)),
            CONTROL_DEVIATION,
            ctx.tol("symbolic"),
            "control: adding 1e-2 w^2 to the map breaks flatness of the pullback",
            samples=5 * count,
            detail="min over trials of max metric deviation",
        ),
    ]
    return rows


register(
    CheckSpec(
        "check_phi_isometry",
        "line map ((w+lambda) e, [e]) pulls the generalized metric back to the flat line",
        "holomorphic isometry of the complex line into the blow-up, off the divisor",
        50,
        _phi_isometry,
    )
)
