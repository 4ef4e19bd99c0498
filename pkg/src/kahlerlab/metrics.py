"""Curvature quantities of Kahler potentials via symbolic Wirtinger calculus.

Conventions (calibrated so that |z|^2 gives the identity metric and
log(1+|w|^2) gives holomorphic sectional curvature 4):

    g_{i jbar}    = d_i dbar_j phi
    Ric_{i jbar}  = - d_i dbar_j log det g
    rho_c         = g^{i jbar} Ric_{i jbar}        (complex scalar trace)
    R_{i jbar k lbar} = - d_k dbar_l g_{i jbar}
                        + g^{qbar p} (d_k g_{i qbar}) (dbar_l g_{p jbar})
    hsc(v)        = 2 R(v, vbar, v, vbar) / g(v, vbar)^2

The determinant of the symbolic Hessian is expanded by cofactors for n <= 3
and Ricci obtained by differentiating its log; for n >= 4 Ricci is assembled
numerically from symbolic entries through
d_i dbar_j log det g = tr(g^{-1} d_i dbar_j g) - tr(g^{-1} (d_i g) g^{-1} (dbar_j g)),
which bounds expression growth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .potentials import Domain, KahlerPotential

HERMITICITY_TOL = 1e-10
PD_MIN_EIG = 1e-10


class InadmissiblePointError(ValueError):
    """Evaluation point violates the potential's domain guard."""


class NotPositiveDefiniteError(ArithmeticError):
    """Complex Hessian fails positive definiteness: potential/domain mismatch."""


class PullbackError(ValueError):
    """Composition map is not purely holomorphic."""


# ---------------------------------------------------------------------------
# Symbolic derivative workspaces


_HESS_CACHE: dict = {}


def hessian_exprs(e: ex.SymExpr, n: int) -> list[list[ex.SymExpr]]:
    """Matrix of d_i dbar_j e, cached per (expression, dimension)."""
    key = (id(e), n)
    hit = _HESS_CACHE.get(key)
    if hit is None:
        dh = [ex.wirtinger(e, i, "hol") for i in range(n)]
        hit = [[ex.wirtinger(dh[i], j, "antihol") for j in range(n)] for i in range(n)]
        _HESS_CACHE[key] = hit
    return hit


def _sym_det(M: list[list[ex.SymExpr]]) -> ex.SymExpr:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if n == 3:
        return ex.add(
            M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]),
            -M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]),
            M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]),
        )
    raise ValueError("symbolic determinant only expanded for n <= 3")


class CurvatureWorkspace:
    """Lazily built symbolic derivative data for one potential."""

    def __init__(self, pot: KahlerPotential):
        self.pot = pot
        self.n = pot.n
        self.hessian = hessian_exprs(pot.expr, pot.n)
        self._d3h: dict[int, list[list[ex.SymExpr]]] = {}
        self._d3a: dict[int, list[list[ex.SymExpr]]] = {}
        self._d4: dict[tuple, list[list[ex.SymExpr]]] = {}
        self._logdet = None
        self._ricci = None

    def d3h(self, k: int) -> list[list[ex.SymExpr]]:
        """d_k applied entrywise to the Hessian."""
        if k not in self._d3h:
            self._d3h[k] = [
                [ex.wirtinger(self.hessian[i][j], k, "hol") for j in range(self.n)]
                for i in range(self.n)
            ]
        return self._d3h[k]

    def d3a(self, l: int) -> list[list[ex.SymExpr]]:
        if l not in self._d3a:
            self._d3a[l] = [
                [ex.wirtinger(self.hessian[i][j], l, "antihol") for j in range(self.n)]
                for i in range(self.n)
            ]
        return self._d3a[l]

    def d4(self, k: int, l: int) -> list[list[ex.SymExpr]]:
        if (k, l) not in self._d4:
            d3 = self.d3h(k)
            self._d4[(k, l)] = [
                [ex.wirtinger(d3[i][j], l, "antihol") for j in range(self.n)]
                for i in range(self.n)
            ]
        return self._d4[(k, l)]

    def logdet(self) -> ex.SymExpr:
        if self._logdet is None:
            self._logdet = ex.log(_sym_det(self.hessian))
        return self._logdet

    def ricci(self) -> list[list[ex.SymExpr]]:
        """Symbolic Ricci matrix (n <= 3 only)."""
        if self._ricci is None:
            self._ricci = [
                [-e for e in row] for row in hessian_exprs(self.logdet(), self.n)
            ]
        return self._ricci


_WORKSPACES: dict = {}


def workspace(pot: KahlerPotential) -> CurvatureWorkspace:
    key = (id(pot.expr), pot.n)
    ws = _WORKSPACES.get(key)
    if ws is None:
        ws = _WORKSPACES.setdefault(key, CurvatureWorkspace(pot))
    return ws


# ---------------------------------------------------------------------------
# Point and batch evaluation helpers


def _as_points(z) -> np.ndarray:
    Z = np.asarray(z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[None, :]
    return Z


def _eval_matrix(entries: list[list[ex.SymExpr]], Z: np.ndarray) -> np.ndarray:
    n = len(entries)
    flat = [e for row in entries for e in row]
    vals = ex.eval_batch(flat, Z)
    k = Z.shape[0]
    out = np.empty((k, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[:, i, j] = vals[i * n + j]
    return out


def _check_admissible(pot: KahlerPotential, z: np.ndarray) -> None:
    if not pot.domain.admissible(z):
        raise InadmissiblePointError(
            f"point with |z| = {np.linalg.norm(z):.3g} is outside {pot.domain.describe()} "
            f"(clearance 1e-3)"
        )


def metric_batch(pot: KahlerPotential, Z) -> np.ndarray:
    return _eval_matrix(workspace(pot).hessian, _as_points(Z))


def metric_at(pot: KahlerPotential, z, validate: bool = True) -> np.ndarray:
    """Complex Hessian of the potential at a diagonal point."""
    z = np.asarray(z, dtype=complex)
    if validate:
        _check_admissible(pot, z)
    g = metric_batch(pot, z)[0]
    if validate:
        if np.max(np.abs(g - g.conj().T)) > HERMITICITY_TOL * max(1.0, np.max(np.abs(g))):
            raise ArithmeticError("metric failed the Hermiticity invariant")
        if np.min(np.linalg.eigvalsh((g + g.conj().T) / 2)) <= PD_MIN_EIG:
            raise NotPositiveDefiniteError(
                "complex Hessian is not positive definite here; "
                "point likely outside the potential's domain"
            )
    return g


def ricci_batch(pot: KahlerPotential, Z) -> np.ndarray:
    Z = _as_points(Z)
    ws = workspace(pot)
    n = ws.n
    if n <= 3:
        return _eval_matrix(ws.ricci(), Z)
    # numeric assembly from symbolic entries
    G = _eval_matrix(ws.hessian, Z)
    Ginv = np.linalg.inv(G)
    H3h = np.stack([_eval_matrix(ws.d3h(k), Z) for k in range(n)], axis=1)
    H3a = np.stack([_eval_matrix(ws.d3a(l), Z) for l in range(n)], axis=1)
    out = np.empty_like(G)
    for i in range(n):
        for j in range(n):
            H4 = _eval_matrix(ws.d4(i, j), Z)
            t1 = np.einsum("spq,sqp->s", Ginv, H4)
            t2 = np.einsum("spq,sqr,srt,stp->s", Ginv, H3h[:, i], Ginv, H3a[:, j])
            out[:, i, j] = t2 - t1
    return out


def ricci_at(pot: KahlerPotential, z, validate: bool = True) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if validate:
        _check_admissible(pot, z)
    return ricci_batch(pot, z)[0]


def scalar_batch(pot: KahlerPotential, Z) -> np.ndarray:
    Z = _as_points(Z)
    G = metric_batch(pot, Z)
    R = ricci_batch(pot, Z)
    rho = np.einsum("sij,sji->s", np.linalg.inv(G), R)
    return rho


def scalar_trace(pot: KahlerPotential, z, validate: bool = True) -> float:
    """Complex scalar trace g^{i jbar} Ric_{i jbar}; the Riemannian scalar
    curvature is twice this."""
    z = np.asarray(z, dtype=complex)
    if validate:
        _check_admissible(pot, z)
    rho = scalar_batch(pot, z)[0]
    if abs(rho.imag) > HERMITICITY_TOL * (1 + abs(rho.real)):
        raise ArithmeticError(f"scalar trace came out non-real: {rho!r}")
    return float(rho.real)


def hsc_batch(pot: KahlerPotential, Z, V) -> np.ndarray:
    """Holomorphic sectional curvature along unit-line directions V."""
    Z = _as_points(Z)
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = np.broadcast_to(V[None, :], Z.shape)
    ws = workspace(pot)
    n = ws.n
    G = metric_batch(pot, Z)
    Ginv = np.linalg.inv(G)
    Vb = np.conj(V)
    # A_q = v_i v_k d_k g_{i qbar};  B_p = vbar_j vbar_l dbar_l g_{p jbar}
    A = np.zeros((Z.shape[0], n), dtype=complex)
    B = np.zeros((Z.shape[0], n), dtype=complex)
    for k in range(n):
        T3h = _eval_matrix(ws.d3h(k), Z)
        A += V[:, k, None] * np.einsum("si,siq->sq", V, T3h)
    for l in range(n):
        T3a = _eval_matrix(ws.d3a(l), Z)
        B += Vb[:, l, None] * np.einsum("sj,spj->sp", Vb, T3a)
    term2 = np.einsum("sq,sqp,sp->s", A, Ginv, B)
    term1 = np.zeros(Z.shape[0], dtype=complex)
    for k in range(n):
        for l in range(n):
            T4 = _eval_matrix(ws.d4(k, l), Z)
            term1 += V[:, k] * Vb[:, l] * np.einsum("si,sij,sj->s", V, T4, Vb)
    gvv = np.einsum("si,sij,sj->s", V, G, Vb)
    return np.real((-term1 + term2) * 2.0 / gvv**2)


def hsc_at(pot: KahlerPotential, z, v, validate: bool = True) -> float:
    """hsc(v) = 2 R(v, vbar, v, vbar) / g(v, vbar)^2; degree-0 homogeneous in v."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if np.linalg.norm(v) == 0:
        raise ValueError("direction must be nonzero")
    if validate:
        _check_admissible(pot, z)
    return float(hsc_batch(pot, z, v)[0])


def levi_min_eig(f: ex.SymExpr, n: int, z) -> float:
    """Minimum eigenvalue of the complex Hessian of f at a diagonal point."""
    H = _eval_matrix(hessian_exprs(f, n), _as_points(z))[0]
    return float(np.min(np.linalg.eigvalsh((H + H.conj().T) / 2)))


def monge_ampere_residual(D: ex.SymExpr, n: int, lam: float, z) -> float:
    """|det(dd-bar D) - exp(-lam/2 D)| at z, the pointwise defect of the
    Einstein determinant equation for a diastasis-type potential."""
    Z = _as_points(z)
    H = _eval_matrix(hessian_exprs(D, n), Z)[0]
    det = np.linalg.det(H)
    val = ex.evaluate(D, ex.Assignment.diagonal(np.asarray(z, dtype=complex)))
    return float(abs(det - np.exp(-0.5 * lam * val)))


def monge_ampere_residual_batch(D: ex.SymExpr, n: int, lam: float, Z) -> np.ndarray:
    Z = _as_points(Z)
    H = _eval_matrix(hessian_exprs(D, n), Z)
    det = np.linalg.det(H)
    (vals,) = ex.eval_batch([D], Z)
    return np.abs(det - np.exp(-0.5 * lam * vals))


def pullback(
    pot: KahlerPotential,
    fmap: list[ex.SymExpr],
    m: int,
    domain: Domain | None = None,
    label: str | None = None,
) -> KahlerPotential:
    """Potential of the pulled-back metric under a holomorphic map.

    fmap lists the components f_i as purely holomorphic expressions in the
    m source variables; zbar_i is substituted by the conjugate-mirrored
    component.  Landing in pot's domain is the caller's responsibility and
    is reported by evaluation-time errors otherwise.
    """
    if len(fmap) != pot.n:
        raise PullbackError(f"map has {len(fmap)} components, potential needs {pot.n}")
    for f in fmap:
        if not ex.is_purely_holomorphic(f):
            raise PullbackError(f"component {f!r} is not purely holomorphic")
    hol = {i: fmap[i] for i in range(pot.n)}
    anti = {i: ex.conjugate_mirror(fmap[i]) for i in range(pot.n)}
    e = ex.substitute(pot.expr, hol, anti)
    return KahlerPotential(e, m, domain or Domain("cn"), label or f"{pot.label}_pullback")


# ---------------------------------------------------------------------------
# Per-point curvature package


@dataclass
class CurvatureSample:
    """Metric, inverse, determinant, Ricci and scalar trace at one point."""

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    det_g: float
    ricci: np.ndarray
    rho_c: float

    def einstein_residual(self, lam: float) -> float:
        """max-entry deviation of Ric - (lam/2) g."""
        return float(np.max(np.abs(self.ricci - 0.5 * lam * self.g)))


def curvature_sample(pot: KahlerPotential, z, validate: bool = True) -> CurvatureSample:
    z = np.asarray(z, dtype=complex)
    g = metric_at(pot, z, validate=validate)
    ric = ricci_at(pot, z, validate=False)
    g_inv = np.linalg.inv(g)
    det = float(np.real(np.linalg.det(g)))
    rho = complex(np.einsum("ij,ji->", g_inv, ric))
    return CurvatureSample(z, g, g_inv, det, ric, float(rho.real))
