"""The blow-up of C^n at the origin as total-space points, charts and
transitions.

A point is a pair (z, [t]) in C^n x CP^{n-1} subject to the incidence
relations t_a z_b = t_b z_a.  Chart j (0-based here) sends (z, [t]) with
t_j != 0 to w = (t_0/t_j, ..., t_{j-1}/t_j, z_j, t_{j+1}/t_j, ..., t_{n-1}/t_j);
its inverse multiplies the off-slot coordinates by w_j.  The exceptional
divisor H is the locus z = 0, a copy of CP^{n-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .potentials import Domain, KahlerPotential

INCIDENCE_TOL = 1e-10
#: Relative chart-domain guard: require |t_j| > CHART_TOL * |t|.
CHART_TOL = 1e-9


class AtlasError(ValueError):
    pass


class IncidenceError(AtlasError):
    """(z, t) violates the blow-up incidence relations."""


class ChartDomainError(AtlasError):
    """Point outside the requested chart (t_j ~ 0)."""


class ExceptionalDivisorError(AtlasError):
    """Operation undefined on the exceptional divisor."""


class ZeroVectorError(AtlasError):
    pass


def _canonical_t(t: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(t)
    if nrm == 0:
        raise ZeroVectorError("homogeneous coordinates cannot all vanish")
    t = t / nrm
    for c in t:
        if abs(c) > 1e-12:
            t = t * (c.conjugate() / abs(c))
            break
    return t


class BlowupPoint:
    """(z, [t]) with [t] stored canonically: unit norm, first nonzero
    component real and positive."""

    __slots__ = ("n", "z", "t")

    def __init__(self, z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=complex)
        if z.shape != t.shape or z.ndim != 1:
            raise AtlasError("z and t must be complex vectors of equal length")
        n = z.shape[0]
        if n < 2:
            raise AtlasError("the blow-up construction needs n >= 2")
        t = _canonical_t(t)
        zn = np.linalg.norm(z)
        bound = INCIDENCE_TOL * (zn * 1.0 + 1.0)
        for a in range(n):
            for b in range(a + 1, n):
                if abs(t[a] * z[b] - t[b] * z[a]) > bound:
                    raise IncidenceError(
                        f"incidence t_{a} z_{b} - t_{b} z_{a} = "
                        f"{t[a] * z[b] - t[b] * z[a]!r} exceeds {bound:g}"
                    )
        self.n = n
        self.z = z
        self.t = t

    @property
    def on_exceptional(self) -> bool:
        return bool(np.all(self.z == 0))

    def isclose(self, other: "BlowupPoint", tol: float = 1e-10) -> bool:
        return (
            self.n == other.n
            and np.max(np.abs(self.z - other.z)) <= tol
            and np.max(np.abs(self.t - other.t)) <= tol
        )

    def __repr__(self):
        return f"BlowupPoint(z={self.z!r}, t={self.t!r})"


@dataclass
class ChartPoint:
    """Coordinates in chart j (0-based)."""

    j: int
    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex)
        if not 0 <= self.j < self.w.shape[0]:
            raise AtlasError(f"chart index {self.j} outside 0..{self.w.shape[0] - 1}")


def chart_to_total(p: ChartPoint) -> BlowupPoint:
    """Inverse chart map: w -> ((w_j w_0, ..., w_j, ..., w_j w_{n-1}), [w:1@j])."""
    w, j = p.w, p.j
    z = w * w[j]
    z[j] = w[j]
    t = np.array(w, dtype=complex)
    t[j] = 1.0
    return BlowupPoint(z, t)


def total_to_chart(p: BlowupPoint, j: int) -> ChartPoint:
    if abs(p.t[j]) <= CHART_TOL * np.linalg.norm(p.t):
        raise ChartDomainError(f"point has t_{j} ~ 0, not in chart {j}")
    w = p.t / p.t[j]
    w[j] = p.z[j]
    return ChartPoint(j, w)


def proj(p: BlowupPoint) -> np.ndarray:
    """Blow-down projection (z, [t]) -> z; undefined on the divisor."""
    if p.on_exceptional:
        raise ExceptionalDivisorError("projection undefined on the exceptional divisor")
    return np.array(p.z)


def unproj(z) -> BlowupPoint:
    """Section of the projection: z -> (z, [z]) for z != 0."""
    z = np.asarray(z, dtype=complex)
    if np.linalg.norm(z) == 0:
        raise ZeroVectorError("cannot lift the origin to the blow-up")
    return BlowupPoint(z, z)


def transition(p: ChartPoint, k: int) -> ChartPoint:
    """Chart change j -> k through the total space."""
    if k == p.j:
        return ChartPoint(p.j, np.array(p.w))
    return total_to_chart(chart_to_total(p), k)


def transition_exprs(n: int, j: int, k: int) -> list[ex.SymExpr]:
    """The transition j -> k as holomorphic expressions, for pullbacks.

    Component i is w_i / w_k off the special slots, 1 / w_k at slot j, and
    w_j w_k at slot k.
    """
    if j == k:
        return [ex.zvar(i) for i in range(n)]
    out = []
    for i in range(n):
        if i == k:
            out.append(ex.mul(ex.zvar(j), ex.zvar(k)))
        elif i == j:
            out.append(ex.quot(ex.const(1), ex.zvar(k)))
        else:
            out.append(ex.quot(ex.zvar(i), ex.zvar(k)))
    return out


def chart_potential(metric: str, j: int, n: int) -> KahlerPotential:
    """Kahler potential of the chosen metric in chart-j coordinates.

    metric "s": |w_j|^2 (1 + |w|^2 - |w_j|^2) + log(1 + |w|^2 - |w_j|^2).
    metric "eh" (n = 2 only):
        sqrt(|w_j|^4 (1+|w_o|^2)^2 + 1)
        + log((1+|w_o|^2) / (1 + sqrt(|w_j|^4 (1+|w_o|^2)^2 + 1)))
    with o the other slot.
    """
    if not 0 <= j < n:
        raise AtlasError(f"chart index {j} outside 0..{n - 1}")
    if metric == "s":
        wj2 = ex.mul(ex.zvar(j), ex.zbarvar(j))
        u = 1 + ex.norm_sq(n) - wj2
        e = wj2 * u + ex.log(u)
        return KahlerPotential(e, n, Domain("chart", chart_index=j), f"s_chart{j}")
    if metric == "eh":
        if n != 2:
            raise ValueError("the Eguchi-Hanson metric lives on the blow-up of C^2")
        o = 1 - j
        wj2 = ex.mul(ex.zvar(j), ex.zbarvar(j))
        wo2 = ex.mul(ex.zvar(o), ex.zbarvar(o))
        a = wj2 * wj2 * (1 + wo2) * (1 + wo2) + 1
        e = ex.sqrt(a) + ex.log(ex.quot(1 + wo2, 1 + ex.sqrt(a)))
        return KahlerPotential(e, n, Domain("chart", chart_index=j), f"eh_chart{j}")
    raise ValueError(f"no chart potential for metric {metric!r}")


def exceptional_restriction(metric: str, j: int, n: int) -> KahlerPotential:
    """Chart potential restricted to the divisor slice w_j = 0, as an
    (n-1)-variable potential in the remaining coordinates."""
    pot = chart_potential(metric, j, n)
    hol = {j: ex.const(0)}
    anti = {j: ex.const(0)}
    for i in range(n):
        if i == j:
            continue
        new = i if i < j else i - 1
        hol[i] = ex.zvar(new)
        anti[i] = ex.zbarvar(new)
    e = ex.substitute(pot.expr, hol, anti)
    return KahlerPotential(
        e, n - 1, Domain("exceptional_slice", chart_index=j), f"{metric}_H_chart{j}"
    )
