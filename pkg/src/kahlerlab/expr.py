"""Hash-consed expression DAGs with exact Wirtinger differentiation.

Expressions live over 2n independent holomorphic variables: z_0..z_{n-1}
and their formal conjugates zbar_0..zbar_{n-1}.  Differentiation treats the
two families as independent (d zbar_j / d z_i = 0), which is the natural
calculus for computing complex Hessians of real-analytic potentials.

Nodes are immutable and interned: structurally equal subtrees are the same
Python object, so repeated differentiation shares subgraphs and stays
polynomial-sized in practice.  Canonicalization is deliberately light
(flatten sums/products, sort commutative children by structural hash, fold
constants); correctness downstream rests on evaluation, not on symbolic
normal forms.

sqrt is represented as the rational power 1/2; log, sqrt and non-integer
powers evaluate on principal branches and reject arguments within 1e-12 of
the closed negative real half-line.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

CONST = 0
ZVAR = 1
ZBAR = 2
SUM = 3
PROD = 4
QUOT = 5
POW = 6
LOG = 7
EXP = 8

KIND_NAMES = {
    CONST: "const",
    ZVAR: "z",
    ZBAR: "zbar",
    SUM: "sum",
    PROD: "prod",
    QUOT: "quot",
    POW: "pow",
    LOG: "log",
    EXP: "exp",
}

#: Half-width of the rejection box around the closed negative real half-line.
BRANCH_CUT_TOL = 1e-12


class ExprBuildError(ValueError):
    """Malformed node construction (arity mismatch, bad payload)."""


class DomainEvalError(ArithmeticError):
    """Evaluation hit a zero denominator or a branch-cut argument."""

    def __init__(self, message: str, node: "SymExpr | None" = None):
        super().__init__(message)
        self.node = node


class SymExpr:
    """One interned DAG node.  Build through the module-level constructors;
    direct instantiation bypasses hash-consing and canonicalization."""

    __slots__ = ("kind", "payload", "children", "shash")

    kind: int
    payload: object
    children: tuple
    shash: int

    def __init__(self, kind: int, payload, children: tuple, shash: int):
        self.kind = kind
        self.payload = payload
        self.children = children
        self.shash = shash

    # Arithmetic sugar; scalars are lifted to CONST nodes.
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, mul(_MINUS_ONE, _lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), mul(_MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return quot(self, _lift(other))

    def __rtruediv__(self, other):
        return quot(_lift(other), self)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer exponents via **; use powr for rationals")
        return powr(self, k)

    def __neg__(self):
        return mul(_MINUS_ONE, self)

    def __repr__(self):
        return _render(self, depth=3)


def _render(e: SymExpr, depth: int) -> str:
    k = e.kind
    if k == CONST:
        c = e.payload
        return repr(c.real) if c.imag == 0 else repr(c)
    if k == ZVAR:
        return f"z{e.payload}"
    if k == ZBAR:
        return f"zbar{e.payload}"
    if depth <= 0:
        return "..."
    inner = ", ".join(_render(c, depth - 1) for c in e.children)
    if k == POW:
        p, q = e.payload
        return f"pow({inner}, {p}/{q})" if q != 1 else f"pow({inner}, {p})"
    return f"{KIND_NAMES[k]}({inner})"


def _lift(v) -> SymExpr:
    if isinstance(v, SymExpr):
        return v
    if isinstance(v, (int, float, complex)):
        return const(v)
    raise TypeError(f"cannot use {type(v).__name__} as an expression")


# Interning table: canonical key -> node.  Grow-only; dict.setdefault is the
# single mutation point, which is atomic under CPython, so concurrent reads
# during the evaluation phase are safe.
_TABLE: dict = {}


def _payload_key(kind: int, payload) -> tuple:
    # numbers only: hash(None) and hash(str) vary across processes (ASLR /
    # PYTHONHASHSEED), and the structural hash orders commutative children,
    # so it must be bit-stable run to run
    if kind == CONST:
        return (payload.real, payload.imag)
    if kind in (ZVAR, ZBAR):
        return (payload,)
    if kind == POW:
        return payload
    return ()


def _intern(kind: int, payload, children: tuple) -> SymExpr:
    pk = _payload_key(kind, payload)
    key = (kind, pk, tuple(id(c) for c in children))
    node = _TABLE.get(key)
    if node is None:
        shash = hash((kind, pk, tuple(c.shash for c in children)))
        node = _TABLE.setdefault(key, SymExpr(kind, payload, children, shash))
    return node


def intern_table_size() -> int:
    return len(_TABLE)


def const(c) -> SymExpr:
    return _intern(CONST, complex(c), ())


def zvar(i: int) -> SymExpr:
    if i < 0:
        raise ExprBuildError("variable index must be >= 0")
    return _intern(ZVAR, int(i), ())


def zbarvar(i: int) -> SymExpr:
    if i < 0:
        raise ExprBuildError("variable index must be >= 0")
    return _intern(ZBAR, int(i), ())


_ZERO = const(0)
_ONE = const(1)
_MINUS_ONE = const(-1)


def _on_cut(w: complex, tol: float = BRANCH_CUT_TOL) -> bool:
    return abs(w.imag) <= tol and w.real <= tol


def add(*terms: SymExpr) -> SymExpr:
    flat: list[SymExpr] = []
    acc = 0j
    for t in terms:
        if t.kind == SUM:
            for c in t.children:
                if c.kind == CONST:
                    acc += c.payload
                else:
                    flat.append(c)
        elif t.kind == CONST:
            acc += t.payload
        else:
            flat.append(t)
    if acc != 0:
        flat.append(const(acc))
    if not flat:
        return _ZERO
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda e: e.shash)
    return _intern(SUM, None, tuple(flat))


def mul(*factors: SymExpr) -> SymExpr:
    flat: list[SymExpr] = []
    acc = 1 + 0j
    for f in factors:
        if f.kind == PROD:
            for c in f.children:
                if c.kind == CONST:
                    acc *= c.payload
                else:
                    flat.append(c)
        elif f.kind == CONST:
            acc *= f.payload
        else:
            flat.append(f)
    if acc == 0:
        return _ZERO
    if acc != 1:
        flat.append(const(acc))
    if not flat:
        return _ONE
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda e: e.shash)
    return _intern(PROD, None, tuple(flat))


def quot(num: SymExpr, den: SymExpr) -> SymExpr:
    if den.kind == CONST:
        if den.payload == 0:
            # leave the node in place so evaluation reports the division
            return _intern(QUOT, None, (num, den))
        if den.payload == 1:
            return num
        if num.kind == CONST:
            return const(num.payload / den.payload)
    if num.kind == CONST and num.payload == 0:
        return _ZERO
    return _intern(QUOT, None, (num, den))


def powr(base: SymExpr, num: int, den: int = 1) -> SymExpr:
    """base**(num/den), principal branch when den > 1."""
    if den == 0:
        raise ExprBuildError("rational power with zero denominator")
    if den < 0:
        num, den = -num, -den
    g = math.gcd(abs(num), den)
    if g > 1:
        num, den = num // g, den // g
    if num == 0:
        return _ONE
    if (num, den) == (1, 1):
        return base
    if base.kind == CONST:
        c = base.payload
        if den == 1:
            if num >= 0 or c != 0:
                return const(c**num)
        elif not _on_cut(c):
            return const(cmath.exp((num / den) * cmath.log(c)))
    return _intern(POW, (num, den), (base,))


def sqrt(e: SymExpr) -> SymExpr:
    return powr(e, 1, 2)


def log(e: SymExpr) -> SymExpr:
    if e.kind == CONST and not _on_cut(e.payload):
        return const(cmath.log(e.payload))
    return _intern(LOG, None, (e,))


def exp(e: SymExpr) -> SymExpr:
    if e.kind == CONST:
        return const(cmath.exp(e.payload))
    return _intern(EXP, None, (e,))


_ARITY = {QUOT: 2, LOG: 1, EXP: 1, POW: 1, SUM: None, PROD: None}


def build(kind: int, children: Sequence[SymExpr] = (), payload=None) -> SymExpr:
    """Generic constructor mirroring the specialized builders; validates arity."""
    children = tuple(children)
    want = _ARITY.get(kind, 0)
    if want is not None and kind in _ARITY and len(children) != want:
        raise ExprBuildError(
            f"{KIND_NAMES.get(kind, kind)} expects {want} children, got {len(children)}"
        )
    if kind == CONST:
        return const(payload)
    if kind == ZVAR:
        return zvar(payload)
    if kind == ZBAR:
        return zbarvar(payload)
    if kind == SUM:
        return add(*children)
    if kind == PROD:
        return mul(*children)
    if kind == QUOT:
        return quot(*children)
    if kind == POW:
        num, den = payload if isinstance(payload, tuple) else (payload, 1)
        return powr(children[0], num, den)
    if kind == LOG:
        return log(children[0])
    if kind == EXP:
        return exp(children[0])
    raise ExprBuildError(f"unknown node kind {kind}")


def norm_sq(n: int) -> SymExpr:
    """sum_i z_i zbar_i, the squared Euclidean norm on the diagonal."""
    return add(*[mul(zvar(i), zbarvar(i)) for i in range(n)])


# ---------------------------------------------------------------------------
# Differentiation


_DCACHE: dict = {}


def wirtinger(e: SymExpr, i: int, kind: str = "hol") -> SymExpr:
    """Exact partial derivative d/dz_i (kind='hol') or d/dzbar_i ('antihol')."""
    if kind not in ("hol", "antihol"):
        raise ValueError("kind must be 'hol' or 'antihol'")
    return _diff(e, i, kind == "antihol")


def _diff(e: SymExpr, i: int, anti: bool) -> SymExpr:
    key = (id(e), i, anti)
    hit = _DCACHE.get(key)
    if hit is not None:
        return hit
    k = e.kind
    if k == CONST:
        d = _ZERO
    elif k == ZVAR:
        d = _ONE if (not anti and e.payload == i) else _ZERO
    elif k == ZBAR:
        d = _ONE if (anti and e.payload == i) else _ZERO
    elif k == SUM:
        d = add(*[_diff(c, i, anti) for c in e.children])
    elif k == PROD:
        terms = []
        cs = e.children
        for j, c in enumerate(cs):
            dc = _diff(c, i, anti)
            if dc is _ZERO:
                continue
            terms.append(mul(*cs[:j], dc, *cs[j + 1 :]))
        d = add(*terms)
    elif k == QUOT:
        u, v = e.children
        du, dv = _diff(u, i, anti), _diff(v, i, anti)
        if dv is _ZERO:
            d = quot(du, v)
        else:
            d = quot(add(mul(du, v), mul(_MINUS_ONE, u, dv)), mul(v, v))
    elif k == POW:
        p, q = e.payload
        u = e.children[0]
        du = _diff(u, i, anti)
        d = mul(const(p / q), powr(u, p - q, q), du)
    elif k == LOG:
        d = quot(_diff(e.children[0], i, anti), e.children[0])
    else:  # EXP
        d = mul(_diff(e.children[0], i, anti), e)
    _DCACHE[key] = d
    return d


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class Assignment:
    """Point of the doubled variable space: values for z and zbar separately.

    The `diagonal` constructor enforces zbar = conj(z), which is where
    real-analytic potentials take their real values.
    """

    n: int
    zvals: tuple
    zbarvals: tuple

    def __post_init__(self):
        if len(self.zvals) != self.n or len(self.zbarvals) != self.n:
            raise ValueError("assignment length does not match dimension")

    @classmethod
    def diagonal(cls, z: Iterable[complex]) -> "Assignment":
        zt = tuple(complex(v) for v in z)
        return cls(len(zt), zt, tuple(v.conjugate() for v in zt))

    @classmethod
    def of(cls, z: Iterable[complex], zbar: Iterable[complex]) -> "Assignment":
        zt = tuple(complex(v) for v in z)
        bt = tuple(complex(v) for v in zbar)
        return cls(len(zt), zt, bt)


def polarized_assignment(z: Iterable[complex], q: Iterable[complex]) -> Assignment:
    """Assignment evaluating a polarized expression at (z, wbar = conj q)."""
    zt = tuple(complex(v) for v in z)
    qt = tuple(complex(v) for v in q)
    return Assignment.of(zt + qt, tuple(v.conjugate() for v in zt + qt))


def _postorder(roots: Sequence[SymExpr]) -> list[SymExpr]:
    seen: set[int] = set()
    order: list[SymExpr] = []
    stack: list[tuple[SymExpr, bool]] = [(r, False) for r in reversed(roots)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            order.append(node)
        else:
            stack.append((node, True))
            for c in node.children:
                if id(c) not in seen:
                    stack.append((c, False))
    return order


def evaluate(e: SymExpr, a: Assignment) -> complex:
    """Strict scalar evaluation on principal branches.

    Raises DomainEvalError on division by zero and on log/sqrt/rational-power
    arguments within BRANCH_CUT_TOL of the closed negative real half-line,
    naming the offending node.
    """
    vals: dict[int, complex] = {}
    for node in _postorder((e,)):
        k = node.kind
        if k == CONST:
            v = node.payload
        elif k == ZVAR:
            if node.payload >= a.n:
                raise DomainEvalError(f"variable z{node.payload} outside dimension {a.n}", node)
            v = a.zvals[node.payload]
        elif k == ZBAR:
            if node.payload >= a.n:
                raise DomainEvalError(f"variable zbar{node.payload} outside dimension {a.n}", node)
            v = a.zbarvals[node.payload]
        elif k == SUM:
            v = 0j
            for c in node.children:
                v += vals[id(c)]
        elif k == PROD:
            v = 1 + 0j
            for c in node.children:
                v *= vals[id(c)]
        elif k == QUOT:
            den = vals[id(node.children[1])]
            if den == 0:
                raise DomainEvalError(f"division by zero in {node!r}", node)
            v = vals[id(node.children[0])] / den
        elif k == POW:
            p, q = node.payload
            u = vals[id(node.children[0])]
            if q == 1:
                if p < 0 and u == 0:
                    raise DomainEvalError(f"zero base with negative power in {node!r}", node)
                v = u**p
            else:
                if _on_cut(u):
                    raise DomainEvalError(
                        f"power argument {u!r} on branch cut in {node!r}", node
                    )
                v = cmath.exp((p / q) * cmath.log(u))
        elif k == LOG:
            u = vals[id(node.children[0])]
            if _on_cut(u):
                raise DomainEvalError(f"log argument {u!r} on branch cut in {node!r}", node)
            v = cmath.log(u)
        else:  # EXP
            v = cmath.exp(vals[id(node.children[0])])
        vals[id(node)] = v
    return vals[id(e)]


def eval_batch(
    exprs: Sequence[SymExpr],
    zvals: np.ndarray,
    zbarvals: np.ndarray | None = None,
    strict: bool = True,
) -> list[np.ndarray]:
    """Vectorized evaluation of several expressions over a batch of points.

    zvals has shape (k, n); zbarvals defaults to its conjugate (diagonal
    points).  Shared subgraphs across `exprs` are evaluated once.  With
    strict=False no domain guards run and numpy branch conventions apply
    (callers sanitize non-finite output themselves).
    """
    Z = np.asarray(zvals, dtype=complex)
    Zb = np.conj(Z) if zbarvals is None else np.asarray(zbarvals, dtype=complex)
    k, n = Z.shape
    vals: dict[int, np.ndarray] = {}
    with np.errstate(all="ignore"):
        for node in _postorder(tuple(exprs)):
            kd = node.kind
            if kd == CONST:
                v = np.full(k, node.payload, dtype=complex)
            elif kd == ZVAR:
                if node.payload >= n:
                    raise DomainEvalError(f"variable z{node.payload} outside dimension {n}", node)
                v = Z[:, node.payload]
            elif kd == ZBAR:
                if node.payload >= n:
                    raise DomainEvalError(
                        f"variable zbar{node.payload} outside dimension {n}", node
                    )
                v = Zb[:, node.payload]
            elif kd == SUM:
                v = vals[id(node.children[0])].copy()
                for c in node.children[1:]:
                    v += vals[id(c)]
            elif kd == PROD:
                v = vals[id(node.children[0])].copy()
                for c in node.children[1:]:
                    v *= vals[id(c)]
            elif kd == QUOT:
                den = vals[id(node.children[1])]
                if strict and np.any(den == 0):
                    raise DomainEvalError(f"division by zero in {node!r}", node)
                v = vals[id(node.children[0])] / den
            elif kd == POW:
                p, q = node.payload
                u = vals[id(node.children[0])]
                if q == 1:
                    if strict and p < 0 and np.any(u == 0):
                        raise DomainEvalError(f"zero base with negative power in {node!r}", node)
                    v = u ** p
                else:
                    if strict:
                        _guard_cut(u, node)
                    v = np.exp((p / q) * np.log(u))
            elif kd == LOG:
                u = vals[id(node.children[0])]
                if strict:
                    _guard_cut(u, node)
                v = np.log(u)
            else:  # EXP
                v = np.exp(vals[id(node.children[0])])
            vals[id(node)] = v
    return [vals[id(e)] for e in exprs]


def _guard_cut(u: np.ndarray, node: SymExpr) -> None:
    bad = (np.abs(u.imag) <= BRANCH_CUT_TOL) & (u.real <= BRANCH_CUT_TOL)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise DomainEvalError(
            f"argument {u[idx]!r} (sample {idx}) on branch cut in {node!r}", node
        )


# ---------------------------------------------------------------------------
# Structural transforms


def _transform(e: SymExpr, leaf: Callable[[SymExpr], SymExpr]) -> SymExpr:
    """Rebuild the DAG bottom-up, mapping leaves through `leaf`."""
    memo: dict[int, SymExpr] = {}
    for node in _postorder((e,)):
        k = node.kind
        if k in (CONST, ZVAR, ZBAR):
            out = leaf(node)
        else:
            kids = tuple(memo[id(c)] for c in node.children)
            if k == SUM:
                out = add(*kids)
            elif k == PROD:
                out = mul(*kids)
            elif k == QUOT:
                out = quot(*kids)
            elif k == POW:
                out = powr(kids[0], *node.payload)
            elif k == LOG:
                out = log(kids[0])
            else:
                out = exp(kids[0])
        memo[id(node)] = out
    return memo[id(e)]


def substitute(
    e: SymExpr,
    hol_map: Mapping[int, SymExpr] | None = None,
    anti_map: Mapping[int, SymExpr] | None = None,
) -> SymExpr:
    """Replace z_i / zbar_i leaves by expressions; absent indices pass through."""
    hol_map = hol_map or {}
    anti_map = anti_map or {}

    def leaf(node: SymExpr) -> SymExpr:
        if node.kind == ZVAR:
            return hol_map.get(node.payload, node)
        if node.kind == ZBAR:
            return anti_map.get(node.payload, node)
        return node

    return _transform(e, leaf)


def conjugate_mirror(e: SymExpr) -> SymExpr:
    """Formal conjugate: swaps z_i with zbar_i and conjugates constants.

    On principal branches this commutes with pointwise conjugation at
    diagonal assignments, so mirror(f) evaluates to conj(f) there.
    """

    def leaf(node: SymExpr) -> SymExpr:
        if node.kind == ZVAR:
            return zbarvar(node.payload)
        if node.kind == ZBAR:
            return zvar(node.payload)
        return const(node.payload.conjugate())

    return _transform(e, leaf)


def polarize(e: SymExpr, n: int) -> SymExpr:
    """Analytic extension by variable duplication.

    The antiholomorphic block is re-indexed to the second half of a doubled
    variable space: zbar_i -> zbar_{n+i}.  Evaluating the result at
    `polarized_assignment(z, q)` computes the extension at (z, conj q);
    feeding (z, z) recovers the original diagonal values.
    """
    return substitute(e, anti_map={i: zbarvar(n + i) for i in range(n)})


def var_indices(e: SymExpr) -> tuple[set, set]:
    """Sets of holomorphic / antiholomorphic variable indices present."""
    hol: set[int] = set()
    anti: set[int] = set()
    for node in _postorder((e,)):
        if node.kind == ZVAR:
            hol.add(node.payload)
        elif node.kind == ZBAR:
            anti.add(node.payload)
    return hol, anti


def is_purely_holomorphic(e: SymExpr) -> bool:
    return not var_indices(e)[1]


# ---------------------------------------------------------------------------
# Taylor data and diagonal-reality


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def taylor_pure_coeffs(
    e: SymExpr, center: Assignment, max_order: int
) -> tuple[dict, dict]:
    """Coefficients of the purely holomorphic and purely antiholomorphic
    Taylor terms at `center`, up to total order `max_order` (<= 6).

    Returns ({alpha: coeff of (z-c)^alpha}, {beta: coeff of (zbar-cbar)^beta});
    a function of diastasis type has all of these vanish.
    """
    if max_order > 6:
        raise ValueError("max_order capped at 6 (cost guard)")
    n = center.n
    out_hol: dict[tuple, complex] = {}
    out_anti: dict[tuple, complex] = {}
    for anti, out in ((False, out_hol), (True, out_anti)):
        for order in range(1, max_order + 1):
            for alpha in _compositions(order, n):
                d = e
                fact = 1
                for idx, m in enumerate(alpha):
                    for _ in range(m):
                        d = _diff(d, idx, anti)
                    fact *= math.factorial(m)
                out[alpha] = evaluate(d, center) / fact
    return out_hol, out_anti


def diagonal_reality_residual(e: SymExpr, points: np.ndarray) -> float:
    """max |Im f| / (1 + |Re f|) over diagonal points; the real-on-diagonal
    predicate asks this to stay below 1e-12."""
    (v,) = eval_batch([e], np.asarray(points, dtype=complex))
    return float(np.max(np.abs(v.imag) / (1.0 + np.abs(v.real))))
