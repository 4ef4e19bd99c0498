"""Diastasis checks: closed forms against polarization, the Einstein
determinant identity, and strict plurisubharmonicity of the Eguchi-Hanson
comparison function."""

from __future__ import annotations

import numpy as np

from .. import diastasis, expr as ex, metrics, potentials, sampling
from .base import (
    CheckContext,
    CheckReport,
    CheckSpec,
    CONTROL_DEVIATION,
    LAMBDA_SENSITIVITY,
    register,
    residual_row,
    witness_row,
)


def _closed_forms(ctx: CheckContext) -> list[CheckReport]:
    count = ctx.count(50)
    rng = ctx.rng("diastasis_closed")
    rows: list[CheckReport] = []

    # generalized Burns-Simanca closed form, dimension from the run config
    n = ctx.n
    s_pot = potentials.s_potential(n)
    Q, Z = sampling.near_diagonal_pairs(rng, count, n)
    s_dev = []
    s_center = []
    for q, z in zip(Q, Z):
        d = diastasis.diastasis_from_potential(s_pot, q)
        s_dev.append(abs(d.value(z) - diastasis.closed_diastasis_s(q, z)))
        s_center.append(abs(d.value(q)))
    rows.append(
        residual_row(
            "check_diastasis_closed_forms.s_match",
            np.array(s_dev),
            ctx.tol("diastasis"),
            "closed diastasis |z-q|^2 + log(|z|^2|q|^2/|z.qbar|^2) matches polarization",
            points=Z,
            detail=f"n={n}, near-diagonal center/point pairs",
        )
    )

    # Eguchi-Hanson: polarization decides between the two readings of the
    # final product term; the logarithmic reading is the one that matches.
    eh = potentials.eh_potential()
    Qe, Ze = sampling.near_diagonal_pairs(ctx.rng("diastasis_closed", "eh"), count, 2)
    eh_dev_log = []
    eh_dev_bare = []
    eh_center = []
    for q, z in zip(Qe, Ze):
        d = diastasis.diastasis_from_potential(eh, q)
        v = d.value(z)
        eh_dev_log.append(abs(v - diastasis.closed_diastasis_eh(q, z, "log")))
        eh_dev_bare.append(abs(v - diastasis.closed_diastasis_eh(q, z, "bare")))
        eh_center.append(abs(d.value(q)))
    rows.append(
        residual_row(
            "check_diastasis_closed_forms.eh_match",
            np.array(eh_dev_log),
            ctx.tol("diastasis"),
            "closed Eguchi-Hanson diastasis (final term inside a log) matches polarization",
            points=Ze,
        )
    )
    rows.append(
        witness_row(
            "check_diastasis_closed_forms.eh_bare_reading_control",
            float(np.max(eh_dev_bare)),
            CONTROL_DEVIATION,
            ctx.tol("symbolic"),
            "control: the reading without the log deviates from polarization (and has D(q)=1)",
            samples=count,
            detail="resolved reading: final product term belongs inside the logarithm",
        )
    )
    rows.append(
        residual_row(
            "check_diastasis_closed_forms.center_zero",
            np.array(s_center + eh_center),
            ctx.tol("symbolic"),
            "the diastasis vanishes at its own center",
            detail="both metrics, all sampled centers",
        )
    )

    # pure Taylor terms vanish at the center (diastasis-type), order <= 4
    taylor_max = []
    for pot, qs in ((s_pot, Q[:3]), (eh, Qe[:3])):
        for q in qs:
            d = diastasis.diastasis_from_potential(pot, q)
            hol, anti = ex.taylor_pure_coeffs(d.expr, ex.Assignment.diagonal(q), 4)
            taylor_max.append(max(abs(v) for v in (list(hol.values()) + list(anti.values()))))
    rows.append(
        residual_row(
            "check_diastasis_closed_forms.diastasis_type",
            np.array(taylor_max),
            ctx.tol("symbolic"),
            "no nonconstant purely holomorphic or antiholomorphic Taylor terms at the center",
            detail="orders 1..4, three centers per metric",
        )
    )

    # symmetry D_q(z) = D_z(q) on a subsample
    sym_dev = []
    for q, z in zip(Q[:10], Z[:10]):
        dq = diastasis.diastasis_from_potential(s_pot, q)
        dz = diastasis.diastasis_from_potential(s_pot, z)
        sym_dev.append(abs(dq.value(z) - dz.value(q)))
    for q, z in zip(Qe[:10], Ze[:10]):
        dq = diastasis.diastasis_from_potential(eh, q)
        dz = diastasis.diastasis_from_potential(eh, z)
        sym_dev.append(abs(dq.value(z) - dz.value(q)))
    rows.append(
        residual_row(
            "check_diastasis_closed_forms.symmetry",
            np.array(sym_dev),
            ctx.tol("diastasis"),
            "the diastasis is symmetric in center and argument",
        )
    )
    return rows


def _einstein_ma(ctx: CheckContext) -> list[CheckReport]:
    """det(dd-bar D) = exp(-lam/2 D) for the Fubini-Study diastasis at the
    chart origin, with lam = 2(m+1) derived from Ric = (m+1) g."""
    count = ctx.count(50)
    rows: list[CheckReport] = []
    for m, lam in ((1, 4.0), (2, 6.0)):
        fs = potentials.fs_potential(m)
        pts = sampling.annulus_points(ctx.rng("einstein_ma", f"m{m}"), count, m)
        res = metrics.monge_ampere_residual_batch(fs.expr, m, lam, pts)
        rows.append(
            residual_row(
                f"check_einstein_ma_identity.fs_cp{m}",
                res,
                ctx.tol("symbolic"),
                f"Einstein determinant equation for CP^{m} with constant {lam:g}",
                points=pts,
            )
        )
    flat = potentials.flat_potential(2)
    pts = sampling.annulus_points(ctx.rng("einstein_ma", "flat"), count, 2)
    rows.append(
        residual_row(
            "check_einstein_ma_identity.flat",
            metrics.monge_ampere_residual_batch(flat.expr, 2, 0.0, pts),
            ctx.tol("symbolic"),
            "flat diastasis satisfies the identity with constant 0",
            points=pts,
        )
    )
    fs1 = potentials.fs_potential(1)
    pts = sampling.annulus_points(ctx.rng("einstein_ma", "sens"), count, 1)
    res_bad = metrics.monge_ampere_residual_batch(fs1.expr, 1, 4.1, pts)
    rows.append(
        witness_row(
            "check_einstein_ma_identity.lambda_sensitivity",
            float(np.max(res_bad)),
            LAMBDA_SENSITIVITY,
            ctx.tol("symbolic"),
            "control: perturbing the Einstein constant by 0.1 breaks the identity",
            samples=count,
        )
    )
    return rows


def _strict_psh_exprs() -> list[list[ex.SymExpr]]:
    """Hessian in z of the Eguchi-Hanson comparison function

        sqrt(|z|^4+1) + sqrt(|q|^4+1) - sqrt((z.qbar)^2+1)
        - sqrt((zbar.q)^2+1) - log(1 + sqrt(|z|^4+1))

    with the center q carried symbolically as variables 2..3."""
    nz = ex.mul(ex.zvar(0), ex.zbarvar(0)) + ex.mul(ex.zvar(1), ex.zbarvar(1))
    nq = ex.mul(ex.zvar(2), ex.zbarvar(2)) + ex.mul(ex.zvar(3), ex.zbarvar(3))
    zq = ex.mul(ex.zvar(0), ex.zbarvar(2)) + ex.mul(ex.zvar(1), ex.zbarvar(3))
    qz = ex.mul(ex.zbarvar(0), ex.zvar(2)) + ex.mul(ex.zbarvar(1), ex.zvar(3))
    root = ex.sqrt(nz * nz + 1)
    psi = (
        root
        + ex.sqrt(nq * nq + 1)
        - ex.sqrt(zq * zq + 1)
        - ex.sqrt(qz * qz + 1)
        - ex.log(1 + root)
    )
    dh = [ex.wirtinger(psi, i, "hol") for i in range(2)]
    return [[ex.wirtinger(dh[i], j, "antihol") for j in range(2)] for i in range(2)]


def _strict_psh(ctx: CheckContext) -> list[CheckReport]:
    count = ctx.count(50)
    margin = ctx.tol("levi")
    rows: list[CheckReport] = []

    hess = _strict_psh_exprs()
    Q = sampling.annulus_points(ctx.rng("strict_psh", "centers"), count, 2)
    pts4 = np.concatenate([Q, Q], axis=1)  # evaluate at z = q
    flat_entries = ex.eval_batch([e for row in hess for e in row], pts4)
    H = np.empty((count, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            H[:, i, j] = flat_entries[2 * i + j]
    eigs = np.linalg.eigvalsh((H + np.conj(np.transpose(H, (0, 2, 1)))) / 2)[:, 0]
    rows.append(
        residual_row(
            "check_strict_psh.eh_min_eig",
            np.maximum(0.0, margin - eigs),
            ctx.tol("symbolic"),
            "the Eguchi-Hanson comparison function is strictly plurisubharmonic at its center",
            points=Q,
            detail=f"min Levi eigenvalue over centers: {np.min(eigs):.6g} (margin {margin:g})",
        )
    )

    # Burns-Simanca case: |z - q|^2 has identity Levi form, eigenvalue 1
    s_devs = []
    for q in Q[:5]:
        f = ex.add(
            *[
                (ex.zvar(i) - complex(q[i])) * (ex.zbarvar(i) - complex(q[i]).conjugate())
                for i in range(2)
            ]
        )
        s_devs.append(abs(metrics.levi_min_eig(f, 2, q) - 1.0))
    rows.append(
        residual_row(
            "check_strict_psh.s_identity",
            np.array(s_devs),
            ctx.tol("symbolic"),
            "|z - q|^2 is strictly plurisubharmonic with unit Levi eigenvalue",
            points=Q[:5],
        )
    )

    # pluriharmonic control: Re z_0 has vanishing Levi form
    f0 = ex.const(0.5) * (ex.zvar(0) + ex.zbarvar(0))
    ph = [abs(metrics.levi_min_eig(f0, 2, q)) for q in Q[:5]]
    rows.append(
        residual_row(
            "check_strict_psh.pluriharmonic_control",
            np.array(ph),
            ctx.tol("symbolic"),
            "control: a pluriharmonic function has zero Levi form, so the margin can fail",
            points=Q[:5],
        )
    )
    return rows


register(
    CheckSpec(
        "check_diastasis_closed_forms",
        "closed diastasis formulas match the polarization-built diastases; diastasis-type and symmetry hold",
        "closed diastases of both blow-up metrics, built by duplicating variables",
        50,
        _closed_forms,
    )
)
register(
    CheckSpec(
        "check_einstein_ma_identity",
        "Fubini-Study diastasis satisfies det(dd-bar D) = exp(-lam/2 D) with lam = 2(m+1)",
        "Einstein condition as a determinant equation for the diastasis potential",
        50,
        _einstein_ma,
    )
)
register(
    CheckSpec(
        "check_strict_psh",
        "strict plurisubharmonicity at the center of the comparison functions",
        "comparison function is strictly plurisubharmonic at q",
        50,
        _strict_psh,
    )
)
