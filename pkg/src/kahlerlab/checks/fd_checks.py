"""Finite-difference cross-validation of the symbolic derivative chain.

First derivatives are checked against central differences of the potential
itself (step 1e-5).  Second derivatives (metric entries) are checked against
central differences of the already-validated symbolic first derivatives at
the same step, keeping the stencil roundoff an order of magnitude below the
tolerance.  Curvature-level quantities (Ricci) are checked against nested
central differences of the numeric log-determinant at step 1e-4, where the
eps/h^2 roundoff floor sits near 1e-8.  Relative errors are measured against
the larger of 1 and the finite-difference tensor's sup norm at the point.
"""

from __future__ import annotations

import numpy as np

from .. import expr as ex, fd, metrics, potentials, sampling
from .base import (
    CheckContext,
    CheckReport,
    CheckSpec,
    register,
    residual_row,
    witness_row,
)


def _potential_suite(ctx: CheckContext):
    return [
        potentials.flat_potential(2),
        potentials.fs_potential(1),
        potentials.fs_potential(2),
        potentials.s_potential(2),
        potentials.s_potential(3),
        potentials.eh_potential(),
    ]


def _rel(dev: float, scale: float) -> float:
    return dev / max(1.0, scale)


def _fd_cross_validation(ctx: CheckContext) -> list[CheckReport]:
    count = ctx.count(20)
    first = []
    second = []
    curvature = []
    labels = []
    for pot in _potential_suite(ctx):
        n = pot.n
        pts = sampling.annulus_points(ctx.rng("fd", pot.label, str(n)), count, n)
        ws = metrics.workspace(pot)

        def f(z, _pot=pot):
            return ex.evaluate(_pot.expr, ex.Assignment.diagonal(z))

        d1 = [ex.wirtinger(pot.expr, i, "hol") for i in range(n)]
        d1a = [ex.wirtinger(pot.expr, i, "antihol") for i in range(n)]
        for z in pts:
            sym = np.array(
                [ex.evaluate(d, ex.Assignment.diagonal(z)) for d in d1 + d1a]
            )
            ref = np.concatenate(
                [fd.gradient_fd(f, z, anti=False), fd.gradient_fd(f, z, anti=True)]
            )
            first.append(_rel(np.max(np.abs(sym - ref)), np.max(np.abs(ref))))

            g_sym = metrics.metric_at(pot, z, validate=False)
            g_ref = np.empty((n, n), dtype=complex)
            for i in range(n):
                for j in range(n):
                    g_ref[i, j] = fd.wirtinger_fd(
                        lambda w, _j=j, _p=d1a: ex.evaluate(
                            _p[_j], ex.Assignment.diagonal(w)
                        ),
                        z,
                        i,
                        anti=False,
                        step=fd.STEP,
                    )
            second.append(_rel(np.max(np.abs(g_sym - g_ref)), np.max(np.abs(g_ref))))
            labels.append(pot.label)

        def logdet(z, _pot=pot):
            g = metrics.metric_batch(_pot, z[None, :])[0]
            return complex(np.log(np.linalg.det(g)))

        for z in pts:
            ric_sym = metrics.ricci_at(pot, z, validate=False)
            ric_ref = -fd.hessian_fd(logdet, z, step=fd.STEP2)
            curvature.append(
                _rel(np.max(np.abs(ric_sym - ric_ref)), np.max(np.abs(ric_ref)))
            )

    detail = f"potentials: flat, fs(1), fs(2), s(2), s(3), eh; {count} points each"
    rows = [
        residual_row(
            "check_fd_cross_validation.first_order",
            np.array(first),
            ctx.tol("fd"),
            "symbolic first Wirtinger derivatives match central differences (step 1e-5)",
            detail=detail,
        ),
        residual_row(
            "check_fd_cross_validation.second_order",
            np.array(second),
            ctx.tol("fd"),
            "metric entries match central differences of validated first derivatives (step 1e-5)",
            detail=detail,
        ),
        residual_row(
            "check_fd_cross_validation.curvature",
            np.array(curvature),
            ctx.tol("fd_curvature"),
            "Ricci entries match nested central differences of the numeric log-determinant",
            detail=detail,
        ),
    ]
    # control: a 1% miscalibration of the symbolic side is flagged
    s2 = potentials.s_potential(2)
    scaled = ex.wirtinger(ex.const(1.01) * s2.expr, 0, "hol")
    z0 = sampling.annulus_points(ctx.rng("fd", "control"), 1, 2)[0]
    ref = fd.wirtinger_fd(
        lambda w: ex.evaluate(s2.expr, ex.Assignment.diagonal(w)), z0, 0
    )
    dev = _rel(abs(ex.evaluate(scaled, ex.Assignment.diagonal(z0)) - ref), abs(ref))
    rows.append(
        witness_row(
            "check_fd_cross_validation.miscalibration_control",
            dev,
            1e-3,
            ctx.tol("symbolic"),
            "control: finite differences detect a deliberately rescaled derivative",
            samples=1,
        )
    )
    return rows


register(
    CheckSpec(
        "check_fd_cross_validation",
        "every symbolic derivative order feeding the suite agrees with finite differences",
        "derivative cross-validation; the oracle for the calculus itself",
        20,
        _fd_cross_validation,
    )
)
