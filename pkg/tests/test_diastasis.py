"""Diastasis construction, closed forms, hereditary behavior."""

import cmath
import math

import numpy as np
import pytest

from kahlerlab import diastasis as dia, expr as ex, metrics, potentials, sampling


def near_pairs(label, count, n):
    return sampling.near_diagonal_pairs(sampling.rng_for(42, "dia", label), count, n)


class TestFlat:
    def test_flat_diastasis_is_squared_distance(self):
        flat = potentials.flat_potential(2)
        a = np.array([0.5 + 0.1j, -0.3j])
        d = dia.diastasis_from_potential(flat, a)
        for z in sampling.annulus_points(sampling.rng_for(42, "dia", "flat"), 10, 2):
            assert d.value(z) == pytest.approx(float(np.sum(np.abs(z - a) ** 2)), abs=1e-12)


class TestClosedFormS:
    def test_center_zero(self):
        q = np.array([1.0, 0.0])
        assert dia.closed_diastasis_s(q, q) == pytest.approx(0.0, abs=1e-15)

    def test_axis_value(self):
        # |z-q|^2 + log(4/4) = 1
        assert dia.closed_diastasis_s([1.0, 0.0], [2.0, 0.0]) == pytest.approx(1.0)

    def test_orthogonal_pair_singular(self):
        with pytest.raises(dia.SingularPointError):
            dia.closed_diastasis_s([1.0, 0.0], [0.0, 1.0])
        with pytest.raises(dia.SingularPointError):
            dia.closed_diastasis_s([0.0, 0.0], [1.0, 0.0])

    def test_matches_polarization(self):
        s2 = potentials.s_potential(2)
        Q, Z = near_pairs("s_match", 50, 2)
        for q, z in zip(Q, Z):
            d = dia.diastasis_from_potential(s2, q)
            assert abs(d.value(z) - dia.closed_diastasis_s(q, z)) <= 1e-9


class TestClosedFormEH:
    def test_center_zero_selects_log_reading(self):
        q = np.array([1.0, 0.0])
        assert dia.closed_diastasis_eh(q, q, "log") == pytest.approx(0.0, abs=1e-12)
        # the displayed form without the log does not vanish at the center
        assert dia.closed_diastasis_eh(q, q, "bare") == pytest.approx(1.0)

    def test_matches_polarization_log_reading(self):
        eh = potentials.eh_potential()
        Q, Z = near_pairs("eh_match", 50, 2)
        for q, z in zip(Q, Z):
            d = dia.diastasis_from_potential(eh, q)
            v = d.value(z)
            assert abs(v - dia.closed_diastasis_eh(q, z, "log")) <= 1e-9
            assert abs(v - dia.closed_diastasis_eh(q, z, "bare")) > 1e-3

    def test_spot_value_against_inline_arithmetic(self):
        # independent transcription of the closed form, plain floats
        q = np.array([1.0, 0.0])
        z = np.array([1.2, 0.0])
        sz = math.sqrt(1.2**4 + 1)
        sq = math.sqrt(2.0)
        sc = cmath.sqrt(complex(1.2 * 1.0) ** 2 + 1)  # (z.qbar)^2 + 1
        last = (1.2**2 * 1.0 * abs(1 + sc) ** 2) / (1.2**2 * (1 + sz) * (1 + sq))
        want = sz + sq - 2 * sc.real + math.log(last)
        eh = potentials.eh_potential()
        d = dia.diastasis_from_potential(eh, q)
        assert d.value(z) == pytest.approx(want, abs=1e-12)
        assert dia.closed_diastasis_eh(q, z) == pytest.approx(want, abs=1e-12)

    def test_swap_symmetry(self):
        Q, Z = near_pairs("eh_swap", 20, 2)
        for q, z in zip(Q, Z):
            assert dia.closed_diastasis_eh(q, z) == pytest.approx(
                dia.closed_diastasis_eh(z, q), abs=1e-9
            )

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            dia.closed_diastasis_eh([1.0, 0.0, 0.0], [1.0, 0.1, 0.0])
        with pytest.raises(ValueError):
            dia.closed_diastasis_eh([1.0, 0.0], [1.1, 0.0], final_term="typo")


class TestDiastasisProperties:
    @pytest.mark.parametrize(
        "builder", [lambda: potentials.s_potential(2), potentials.eh_potential]
    )
    def test_metric_recovery(self, builder):
        # dd-bar D_p = dd-bar phi: the diastasis is a potential for the metric
        pot = builder()
        Q, Z = near_pairs("recov" + pot.label, 5, 2)
        for q in Q:
            d = dia.diastasis_from_potential(pot, q)
            H1 = metrics.metric_batch(d.as_potential(), Z)
            H2 = metrics.metric_batch(pot, Z)
            assert np.max(np.abs(H1 - H2)) <= 1e-10

    def test_diastasis_type_to_order_four(self):
        s2 = potentials.s_potential(2)
        q = np.array([1.0, 0.0])
        d = dia.diastasis_from_potential(s2, q)
        hol, anti = ex.taylor_pure_coeffs(d.expr, ex.Assignment.diagonal(q), 4)
        worst = max(abs(v) for v in list(hol.values()) + list(anti.values()))
        assert worst <= 1e-10

    def test_positivity_near_center(self):
        rng = sampling.rng_for(42, "dia", "positivity")
        for pot in (potentials.s_potential(2), potentials.eh_potential()):
            q = np.array([0.9, 0.2j])
            d = dia.diastasis_from_potential(pot, q)
            dirs = sampling.unit_directions(rng, 50, 2)
            radii = rng.uniform(0.01, 0.3, size=(50, 1))
            for z in q + dirs * radii:
                assert d.value(z) > 0

    def test_symmetry(self):
        s2 = potentials.s_potential(2)
        Q, Z = near_pairs("sym", 10, 2)
        for q, z in zip(Q, Z):
            dq = dia.diastasis_from_potential(s2, q)
            dz = dia.diastasis_from_potential(s2, z)
            assert dq.value(z) == pytest.approx(dz.value(q), abs=1e-9)


class TestHereditary:
    def test_identity_map(self):
        flat = potentials.flat_potential(2)
        W = sampling.annulus_points(sampling.rng_for(42, "dia", "hid"), 20, 2)
        res = dia.hereditary_check(
            flat, [ex.zvar(0), ex.zvar(1)], flat, np.array([0.3, 0.1j]), W
        )
        assert res <= 1e-12

    def test_line_isometry(self):
        # ((w+1) e_2, [e_2]): ambient diastasis restricts to |w|^2
        s2 = potentials.s_potential(2)
        flat1 = potentials.flat_potential(1)
        fmap = [ex.const(0) * ex.zvar(0), ex.zvar(0) + ex.const(1.0)]
        rng = sampling.rng_for(42, "dia", "hline")
        W = sampling.rejection_sample(
            lambda k: sampling.annulus_points(rng, k, 1),
            lambda P: np.abs(P[:, 0] + 1.0) > 0.05,
            30,
        )
        res = dia.hereditary_check(s2, fmap, flat1, np.array([0.0]), W)
        assert res <= 1e-9

    def test_linear_slice_into_flat(self):
        flat2 = potentials.flat_potential(2)
        flat1 = potentials.flat_potential(1)
        fmap = [ex.zvar(0), ex.const(0)]
        W = sampling.annulus_points(sampling.rng_for(42, "dia", "hslice"), 20, 1)
        res = dia.hereditary_check(flat2, fmap, flat1, np.array([0.2 + 0.1j]), W)
        assert res <= 1e-12
