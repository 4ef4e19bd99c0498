"""Wirtinger calculus engine: construction, differentiation, evaluation,
polarization and Taylor data."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kahlerlab import expr as ex
from kahlerlab import fd


def diag(*z):
    return ex.Assignment.diagonal(list(z))


class TestBuild:
    def test_constant_folding_sum(self):
        assert ex.add(ex.const(1), ex.const(2)) is ex.const(3)

    def test_product_annihilator(self):
        assert ex.mul(ex.zvar(0), ex.const(0)) is ex.const(0)

    def test_norm_sq_value(self):
        # |1|^2 + |i|^2 = 2
        assert ex.evaluate(ex.norm_sq(2), diag(1, 1j)) == pytest.approx(2)

    def test_sum_commutative_canonical(self):
        a = ex.add(ex.zvar(0), ex.zvar(1))
        b = ex.add(ex.zvar(1), ex.zvar(0))
        assert a is b

    def test_identity_elements(self):
        z = ex.zvar(0)
        assert ex.add(z, ex.const(0)) is z
        assert ex.mul(z, ex.const(1)) is z
        assert ex.quot(z, ex.const(1)) is z
        assert ex.powr(z, 1) is z
        assert ex.powr(z, 0) is ex.const(1)

    def test_rational_power_normalization(self):
        assert ex.powr(ex.zvar(0), 2, 4) is ex.powr(ex.zvar(0), 1, 2)
        with pytest.raises(ex.ExprBuildError):
            ex.powr(ex.zvar(0), 1, 0)

    def test_generic_build_arity(self):
        with pytest.raises(ex.ExprBuildError):
            ex.build(ex.LOG, [ex.zvar(0), ex.zvar(1)])
        assert ex.build(ex.SUM, [ex.const(1), ex.const(2)]) is ex.const(3)

    def test_operator_sugar(self):
        z = ex.zvar(0)
        e = (z + 1) * (z - 1)
        v = ex.evaluate(e, diag(3))
        assert v == pytest.approx(8)

    def test_hash_consing_identity(self):
        a = ex.log(1 + ex.norm_sq(2))
        b = ex.log(1 + ex.norm_sq(2))
        assert a is b


class TestWirtinger:
    def test_product_rule(self):
        e = ex.mul(ex.zvar(0), ex.zbarvar(0))
        assert ex.wirtinger(e, 0, "hol") is ex.zbarvar(0)
        assert ex.wirtinger(e, 0, "antihol") is ex.zvar(0)

    def test_chain_rule_log(self):
        nsq = ex.norm_sq(2)
        d = ex.wirtinger(ex.log(nsq), 0, "antihol")
        assert d is ex.quot(ex.zvar(0), nsq)

    def test_independence(self):
        assert ex.wirtinger(ex.zbarvar(0), 0, "hol") is ex.const(0)
        assert ex.wirtinger(ex.zvar(1), 0, "hol") is ex.const(0)

    def test_s_potential_hessian_at_axis_point(self):
        # the simplest nontrivial curvature datum: complex Hessian of
        # |z|^2 + log |z|^2 at (1, 0) is diag(1, 2)
        nsq = ex.norm_sq(2)
        phi = nsq + ex.log(nsq)
        a = diag(1, 0)
        H = np.array(
            [
                [
                    ex.evaluate(ex.wirtinger(ex.wirtinger(phi, i, "hol"), j, "antihol"), a)
                    for j in range(2)
                ]
                for i in range(2)
            ]
        )
        assert np.allclose(H, np.diag([1.0, 2.0]), atol=1e-12)
        # cross-check by nested central differences of the potential, step 1e-5
        f = lambda z: ex.evaluate(phi, ex.Assignment.diagonal(z))
        H_fd = fd.hessian_fd(f, np.array([1.0, 0.0], dtype=complex), step=1e-5)
        assert np.max(np.abs(H - H_fd)) <= 1e-6

    def test_invalid_kind(self):
        with pytest.raises(ValueError):
            ex.wirtinger(ex.zvar(0), 0, "mixed")


class TestEvaluate:
    def test_s_potential_value(self):
        nsq = ex.norm_sq(2)
        phi = nsq + ex.log(nsq)
        assert ex.evaluate(phi, diag(1, 0)) == pytest.approx(1.0)

    def test_eh_potential_value(self):
        nsq = ex.norm_sq(2)
        root = ex.sqrt(nsq * nsq + 1)
        phi = root + ex.log(nsq) - ex.log(1 + root)
        want = math.sqrt(2) - math.log(1 + math.sqrt(2))
        assert ex.evaluate(phi, diag(1, 0)) == pytest.approx(want, abs=1e-15)

    def test_branch_cut_rejected(self):
        with pytest.raises(ex.DomainEvalError):
            ex.evaluate(ex.log(ex.zvar(0)), diag(-1))
        with pytest.raises(ex.DomainEvalError):
            ex.evaluate(ex.sqrt(ex.zvar(0)), diag(-4))

    def test_division_by_zero(self):
        with pytest.raises(ex.DomainEvalError):
            ex.evaluate(ex.quot(ex.const(1), ex.zvar(0)), diag(0))

    def test_dimension_guard(self):
        with pytest.raises(ex.DomainEvalError):
            ex.evaluate(ex.zvar(3), diag(1, 2))

    def test_batch_matches_scalar(self):
        nsq = ex.norm_sq(2)
        phi = nsq + ex.log(nsq)
        Z = np.array([[1.0, 0.5j], [0.3, 2.0], [1j, -1j]])
        (vals,) = ex.eval_batch([phi], Z)
        for k in range(3):
            assert vals[k] == pytest.approx(ex.evaluate(phi, ex.Assignment.diagonal(Z[k])))

    def test_batch_strict_guard(self):
        Z = np.array([[1.0 + 0j], [-1.0 + 0j]])
        with pytest.raises(ex.DomainEvalError):
            ex.eval_batch([ex.log(ex.zvar(0))], Z)
        (v,) = ex.eval_batch([ex.log(ex.zvar(0))], Z, strict=False)
        assert np.isfinite(v[0])

    def test_assignment_validation(self):
        with pytest.raises(ValueError):
            ex.Assignment(2, (1 + 0j,), (1 + 0j, 2 + 0j))


class TestPolarize:
    def test_bilinear_extension(self):
        nsq = ex.norm_sq(2)
        pol = ex.polarize(nsq, 2)
        z = np.array([1 + 2j, 3 - 1j])
        q = np.array([0.5j, 2.0])
        got = ex.evaluate(pol, ex.polarized_assignment(z, q))
        assert got == pytest.approx(complex(np.sum(z * np.conj(q))))

    def test_norm_fourth_polarizes_to_square(self):
        nsq = ex.norm_sq(2)
        pol = ex.polarize(nsq * nsq, 2)
        z = np.array([0.7, 0.3j])
        q = np.array([1.1, -0.2])
        zq = complex(np.sum(z * np.conj(q)))
        got = ex.evaluate(pol, ex.polarized_assignment(z, q))
        assert got == pytest.approx(zq**2)

    def test_log_polarization_reconstructs_closed_log_term(self):
        # four polarized evaluations of log |z|^2 assemble the closed-form
        # term log(|z|^2 |q|^2 / |z.qbar|^2)
        pol = ex.polarize(ex.log(ex.norm_sq(2)), 2)
        z = np.array([1.2, 0.4 - 0.1j])
        q = np.array([1.0, 0.3j])
        at = lambda a, b: ex.evaluate(pol, ex.polarized_assignment(a, b))
        combo = at(z, z) + at(q, q) - at(z, q) - at(q, z)
        nz = float(np.sum(np.abs(z) ** 2))
        nq = float(np.sum(np.abs(q) ** 2))
        zq = abs(complex(np.sum(z * np.conj(q))))
        assert combo.real == pytest.approx(math.log(nz * nq / zq**2), abs=1e-12)
        assert abs(combo.imag) < 1e-12

    def test_diagonal_consistency(self):
        e = ex.norm_sq(2) + ex.log(1 + ex.norm_sq(2))
        pol = ex.polarize(e, 2)
        z = np.array([0.4, -0.7j])
        assert ex.evaluate(pol, ex.polarized_assignment(z, z)) == pytest.approx(
            ex.evaluate(e, ex.Assignment.diagonal(z))
        )


class TestTaylorPure:
    def test_norm_sq_has_no_pure_terms(self):
        hol, anti = ex.taylor_pure_coeffs(ex.norm_sq(2), diag(0, 0), 3)
        assert all(abs(v) == 0 for v in hol.values())
        assert all(abs(v) == 0 for v in anti.values())

    def test_linear_pure_terms_detected(self):
        e = ex.zvar(0) + ex.zbarvar(0) + ex.norm_sq(2)
        hol, anti = ex.taylor_pure_coeffs(e, diag(0, 0), 2)
        assert hol[(1, 0)] == pytest.approx(1)
        assert anti[(1, 0)] == pytest.approx(1)
        assert hol[(0, 1)] == pytest.approx(0)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            ex.taylor_pure_coeffs(ex.norm_sq(1), diag(0), 7)


class TestMirror:
    def test_mirror_evaluates_to_conjugate(self):
        e = ex.sqrt(1 + ex.mul(ex.zvar(0), ex.zvar(0))) + ex.log(2 + ex.zbarvar(0))
        m = ex.conjugate_mirror(e)
        a = diag(0.3 + 0.4j)
        assert ex.evaluate(m, a) == pytest.approx(ex.evaluate(e, a).conjugate())


# --- property tests over a safe random grammar -----------------------------
#
# atoms are variables and small constants; composite layers stay evaluable on
# diagonal points by keeping log/sqrt/quotient arguments of the form
# 1 + (positive-on-diagonal) expression.


def _safe_exprs(n_vars: int, depth: int = 3):
    atoms = st.one_of(
        st.integers(0, n_vars - 1).map(ex.zvar),
        st.integers(0, n_vars - 1).map(ex.zbarvar),
        st.complex_numbers(
            max_magnitude=1.5, allow_nan=False, allow_infinity=False
        ).map(ex.const),
    )

    def positive(e):
        return 1 + e * ex.conjugate_mirror(e)

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda t: ex.add(*t)),
            st.tuples(children, children).map(lambda t: ex.mul(*t)),
            children.map(lambda e: ex.log(positive(e))),
            children.map(lambda e: ex.sqrt(positive(e))),
            st.tuples(children, children).map(lambda t: ex.quot(t[0], positive(t[1]))),
        )

    return st.recursive(atoms, extend, max_leaves=8)


def _diag_points(n_vars: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(size=(count, n_vars)) + 1j * rng.normal(size=(count, n_vars))


@given(e=_safe_exprs(2), i=st.integers(0, 1), j=st.integers(0, 1), seed=st.integers(0, 10))
@settings(max_examples=60, deadline=None)
def test_mixed_derivatives_commute(e, i, j, seed):
    d1 = ex.wirtinger(ex.wirtinger(e, i, "hol"), j, "antihol")
    d2 = ex.wirtinger(ex.wirtinger(e, j, "antihol"), i, "hol")
    Z = _diag_points(2, 20, seed)
    (v1,), (v2,) = ex.eval_batch([d1], Z), ex.eval_batch([d2], Z)
    assert np.max(np.abs(v1 - v2)) <= 1e-10 * (1 + np.max(np.abs(v1)))


@given(e=_safe_exprs(2), i=st.integers(0, 1), seed=st.integers(0, 10))
@settings(max_examples=60, deadline=None)
def test_conjugation_symmetry_for_real_expressions(e, i, seed):
    real_e = e * ex.conjugate_mirror(e)
    dh = ex.wirtinger(real_e, i, "hol")
    da = ex.wirtinger(real_e, i, "antihol")
    Z = _diag_points(2, 10, seed)
    (vh,), (va,) = ex.eval_batch([dh], Z), ex.eval_batch([da], Z)
    assert np.max(np.abs(vh - np.conj(va))) <= 1e-10 * (1 + np.max(np.abs(vh)))


@given(e=_safe_exprs(2), seed=st.integers(0, 10))
@settings(max_examples=40, deadline=None)
def test_real_on_diagonal_of_hermitian_square(e, seed):
    real_e = e * ex.conjugate_mirror(e)
    Z = _diag_points(2, 10, seed)
    assert ex.diagonal_reality_residual(real_e, Z) <= 1e-12


@given(e=_safe_exprs(2), seed=st.integers(0, 5))
@settings(max_examples=30, deadline=None)
def test_polarize_restores_diagonal(e, seed):
    pol = ex.polarize(e, 2)
    Z = _diag_points(2, 5, seed)
    for k in range(Z.shape[0]):
        want = ex.evaluate(e, ex.Assignment.diagonal(Z[k]))
        got = ex.evaluate(pol, ex.polarized_assignment(Z[k], Z[k]))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
