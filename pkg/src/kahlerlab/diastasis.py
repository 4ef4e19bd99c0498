"""Calabi diastasis functions built by polarization, plus the closed forms
for the blow-up metrics.

The diastasis of a potential phi centered at p combines four evaluations of
the analytic extension psi(z, wbar) obtained by duplicating variables:

    D_p(z) = psi(z, zbar) + psi(p, pbar) - psi(z, pbar) - psi(p, zbar)

It vanishes at p, is real on the diagonal, carries the same metric as phi,
and has no purely holomorphic or antiholomorphic Taylor terms at its center.
The polarization-built diastasis is the source of truth here; the closed
forms are independent transcriptions validated against it.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .potentials import KahlerPotential

#: Relative guard for the z.qbar = 0 singular locus of the closed forms.
SINGULAR_TOL = 1e-8

REALITY_TOL = 1e-9


class SingularPointError(ValueError):
    """Evaluation at the closed form's genuine singular locus (z.qbar ~ 0)."""


@dataclass
class DiastasisFn:
    """Assembled diastasis D_p of a potential, with its polarized extension."""

    center: np.ndarray
    potential: KahlerPotential
    polarized: ex.SymExpr
    expr: ex.SymExpr

    @property
    def n(self) -> int:
        return self.potential.n

    def value(self, z) -> float:
        v = ex.evaluate(self.expr, ex.Assignment.diagonal(np.asarray(z, dtype=complex)))
        if abs(v.imag) > REALITY_TOL * (1 + abs(v.real)):
            raise ArithmeticError(f"diastasis came out non-real: {v!r}")
        return v.real

    def values(self, Z) -> np.ndarray:
        (v,) = ex.eval_batch([self.expr], np.asarray(Z, dtype=complex))
        return v.real

    def as_potential(self) -> KahlerPotential:
        return KahlerPotential(
            self.expr, self.n, self.potential.domain, f"{self.potential.label}_diastasis"
        )


def diastasis_from_potential(pot: KahlerPotential, p) -> DiastasisFn:
    """Polarize the potential and assemble its diastasis centered at p."""
    p = np.asarray(p, dtype=complex)
    n = pot.n
    pol = ex.polarize(pot.expr, n)
    pbar = {n + i: ex.const(p[i].conjugate()) for i in range(n)}
    mixed_hol = ex.substitute(pol, anti_map=pbar)  # psi(z, pbar)
    mixed_anti = ex.substitute(pot.expr, hol_map={i: ex.const(p[i]) for i in range(n)})
    at_center = ex.evaluate(pot.expr, ex.Assignment.diagonal(p))
    d = pot.expr + ex.const(at_center) - mixed_hol - mixed_anti
    return DiastasisFn(p, pot, pol, d)


def _pair(z, q) -> tuple[np.ndarray, np.ndarray, complex]:
    z = np.asarray(z, dtype=complex)
    q = np.asarray(q, dtype=complex)
    zq = complex(np.sum(z * np.conj(q)))
    nz, nq = np.linalg.norm(z), np.linalg.norm(q)
    if nz == 0 or nq == 0:
        raise SingularPointError("closed diastasis forms need z, q != 0")
    if abs(zq) <= SINGULAR_TOL * nz * nq:
        raise SingularPointError(
            f"z.qbar = {zq!r} is on the singular locus (|z||q| = {nz * nq:.3g})"
        )
    return z, q, zq


def closed_diastasis_s(q, z) -> float:
    """|z - q|^2 + log(|z|^2 |q|^2 / |z.qbar|^2), the closed Burns-Simanca
    diastasis in blow-down coordinates."""
    z, q, zq = _pair(z, q)
    d2 = float(np.sum(np.abs(z - q) ** 2))
    return d2 + float(np.log(np.sum(np.abs(z) ** 2) * np.sum(np.abs(q) ** 2) / abs(zq) ** 2))


def closed_diastasis_eh(q, z, final_term: str = "log") -> float:
    """Closed Eguchi-Hanson diastasis in blow-down coordinates (n = 2).

    final_term selects how the last product term enters: "log" wraps it in a
    logarithm (the reading produced by polarizing the potential, and the one
    that vanishes at z = q), "bare" adds it as displayed without one.  The
    suite validates both readings against the polarization-built diastasis.
    """
    if final_term not in ("log", "bare"):
        raise ValueError("final_term must be 'log' or 'bare'")
    z, q, zq = _pair(z, q)
    if len(z) != 2 or len(q) != 2:
        raise ValueError("the Eguchi-Hanson diastasis lives on the blow-up of C^2")
    nz4 = float(np.sum(np.abs(z) ** 2)) ** 2
    nq4 = float(np.sum(np.abs(q) ** 2)) ** 2
    c = zq * zq + 1
    if abs(c.imag) <= 1e-12 and c.real <= 1e-12:
        raise SingularPointError(f"(z.qbar)^2 + 1 = {c!r} is on the branch cut")
    sc = cmath.sqrt(c)
    sz = float(np.sqrt(nz4 + 1))
    sq = float(np.sqrt(nq4 + 1))
    base = sz + sq - 2 * sc.real
    last = (
        float(np.sqrt(nz4 * nq4))
        * abs(1 + sc) ** 2
        / (abs(zq) ** 2 * (1 + sz) * (1 + sq))
    )
    if final_term == "log":
        return base + float(np.log(last))
    return base + last


def hereditary_check(
    pot_ambient: KahlerPotential,
    fmap: list[ex.SymExpr],
    pot_sub: KahlerPotential,
    p,
    points: np.ndarray,
) -> float:
    """sup over the sample of |D^sub_p(w) - D^ambient_{f(p)}(f(w))|.

    Vanishes when f is a holomorphic isometry (the diastasis is hereditary
    under such maps)."""
    p = np.asarray(p, dtype=complex)
    W = np.asarray(points, dtype=complex)
    fp = np.array([ex.evaluate(f, ex.Assignment.diagonal(p)) for f in fmap])
    d_sub = diastasis_from_potential(pot_sub, p)
    d_amb = diastasis_from_potential(pot_ambient, fp)
    F = np.stack(ex.eval_batch(list(fmap), W), axis=1)
    return float(np.max(np.abs(d_sub.values(W) - d_amb.values(F))))
