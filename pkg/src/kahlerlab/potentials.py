"""Built-in Kahler potentials and their evaluation domains.

All potentials are expression DAGs over the diagonal (zbar = conj z).  The
global blow-up potentials live on C^n minus the origin, where the blow-down
projection identifies the complement of the exceptional divisor with
punctured affine space; the chart potentials (see `atlas`) are entire.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex

#: Admissible points must clear excluded loci by this margin in norm.
ORIGIN_CLEARANCE = 1e-3


@dataclass(frozen=True)
class Domain:
    """Region on which a potential may be evaluated.

    kind is one of "cn" (entire), "cn_minus_origin", "chart" (entire chart
    coordinates), "exceptional_slice" (chart of the divisor, entire) or
    "unit_ball" (radius-bounded).
    """

    kind: str
    chart_index: int | None = None
    radius: float | None = None

    def admissible(self, z: np.ndarray) -> bool:
        r = float(np.linalg.norm(z))
        if self.kind == "cn_minus_origin":
            return r >= ORIGIN_CLEARANCE
        if self.kind == "unit_ball":
            return r <= (self.radius or 1.0) - ORIGIN_CLEARANCE
        return True

    def describe(self) -> str:
        if self.kind == "cn":
            return "C^n"
        if self.kind == "cn_minus_origin":
            return "C^n minus the origin"
        if self.kind == "chart":
            return f"blow-up chart {self.chart_index}"
        if self.kind == "exceptional_slice":
            return f"exceptional-divisor slice in chart {self.chart_index}"
        return f"open ball of radius {self.radius}"


@dataclass(frozen=True)
class KahlerPotential:
    """A real-on-diagonal expression plus the domain it is a potential on."""

    expr: ex.SymExpr
    n: int
    domain: Domain
    label: str

    def value(self, z) -> complex:
        return ex.evaluate(self.expr, ex.Assignment.diagonal(z))


def flat_potential(n: int) -> KahlerPotential:
    """|z|^2; complex Hessian is the identity."""
    return KahlerPotential(ex.norm_sq(n), n, Domain("cn"), "flat")


def fs_potential(m: int) -> KahlerPotential:
    """log(1 + |w|^2) on an affine chart of CP^m; holomorphic sectional
    curvature 4 in this normalization."""
    return KahlerPotential(ex.log(1 + ex.norm_sq(m)), m, Domain("cn"), "fs")


def s_potential(n: int) -> KahlerPotential:
    """|z|^2 + log |z|^2 on C^n minus 0: the generalized Burns-Simanca
    potential pulled through the blow-down projection (n >= 2)."""
    if n < 2:
        raise ValueError("the blow-up construction needs n >= 2")
    nsq = ex.norm_sq(n)
    return KahlerPotential(nsq + ex.log(nsq), n, Domain("cn_minus_origin"), "s")


def eh_potential() -> KahlerPotential:
    """sqrt(|z|^4+1) + log |z|^2 - log(1 + sqrt(|z|^4+1)) on C^2 minus 0:
    the Eguchi-Hanson potential in blow-down coordinates."""
    nsq = ex.norm_sq(2)
    root = ex.sqrt(nsq * nsq + 1)
    e = root + ex.log(nsq) - ex.log(1 + root)
    return KahlerPotential(e, 2, Domain("cn_minus_origin"), "eh")


def ball_potential(m: int) -> KahlerPotential:
    """-log(1 - |w|^2): the hyperbolic metric of the unit ball."""
    e = -ex.log(1 - ex.norm_sq(m))
    return KahlerPotential(e, m, Domain("unit_ball", radius=1.0), "hyperbolic")


def builtin_potential(label: str, n: int) -> KahlerPotential:
    """Look up a built-in potential by its CLI-facing label."""
    if label == "flat":
        return flat_potential(n)
    if label == "fs":
        return fs_potential(n)
    if label == "s":
        return s_potential(n)
    if label == "eh":
        if n != 2:
            raise ValueError("the Eguchi-Hanson metric lives on the blow-up of C^2")
        return eh_potential()
    if label == "hyperbolic":
        return ball_potential(n)
    raise ValueError(f"unknown potential label {label!r}")
