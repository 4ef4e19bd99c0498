"""Blow-up model: charts, transitions, projections and chart potentials.

Chart indices here are 0-based; displayed formulas number them from 1, so
"chart 2 of C^3" is j=1 below.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kahlerlab import atlas, expr as ex, metrics, potentials, sampling


class TestChartMaps:
    def test_inverse_chart_axis_point(self):
        p = atlas.chart_to_total(atlas.ChartPoint(0, [1.0, 0.0]))
        assert np.allclose(p.z, [1, 0])
        assert np.allclose(p.t, [1, 0])
        assert not p.on_exceptional

    def test_inverse_chart_exceptional(self):
        # vanishing slot coordinate lands on the divisor
        p = atlas.chart_to_total(atlas.ChartPoint(0, [0.0, 5.0]))
        assert p.on_exceptional
        assert np.allclose(p.z, 0)
        assert np.allclose(p.t, np.array([1.0, 5.0]) / np.linalg.norm([1.0, 5.0]))

    def test_inverse_chart_dim3(self):
        p = atlas.chart_to_total(atlas.ChartPoint(1, [2.0, 3.0, 4.0]))
        assert np.allclose(p.z, [6, 3, 12])
        assert np.allclose(p.t, np.array([2.0, 1.0, 4.0]) / np.linalg.norm([2.0, 1.0, 4.0]))
        back = atlas.total_to_chart(p, 1)
        assert np.allclose(back.w, [2, 3, 4], atol=1e-12)

    def test_chart_domain_error(self):
        p = atlas.BlowupPoint([0.0, 0.0], [0.0, 1.0])
        with pytest.raises(atlas.ChartDomainError):
            atlas.total_to_chart(p, 0)

    def test_round_trip_axis(self):
        p = atlas.BlowupPoint([1.0, 0.0], [1.0, 0.0])
        w = atlas.total_to_chart(p, 0)
        assert np.allclose(w.w, [1, 0], atol=1e-12)


class TestProjection:
    def test_unproj_axis(self):
        p = atlas.unproj([1.0, 0.0])
        assert np.allclose(p.z, [1, 0]) and np.allclose(p.t, [1, 0])

    def test_round_trip(self):
        z = np.array([3j, 4.0])
        assert np.allclose(atlas.proj(atlas.unproj(z)), z)

    def test_zero_vector_error(self):
        with pytest.raises(atlas.ZeroVectorError):
            atlas.unproj([0.0, 0.0])

    def test_exceptional_error(self):
        p = atlas.BlowupPoint([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(atlas.ExceptionalDivisorError):
            atlas.proj(p)


class TestTransitions:
    def test_fixed_examples(self):
        w = atlas.transition(atlas.ChartPoint(0, [1.0, 1.0]), 1)
        assert np.allclose(w.w, [1, 1], atol=1e-12)
        w = atlas.transition(atlas.ChartPoint(0, [1.0, 2.0]), 1)
        assert np.allclose(w.w, [0.5, 2], atol=1e-12)

    def test_identity(self):
        w = atlas.transition(atlas.ChartPoint(0, [1.0, 2.0]), 0)
        assert np.allclose(w.w, [1, 2])

    def test_transition_exprs_match_pointwise(self):
        T = atlas.transition_exprs(3, 0, 2)
        w = np.array([0.5 + 0.1j, 1.2, 2.0 - 0.3j])
        got = np.array([ex.evaluate(t, ex.Assignment.diagonal(w)) for t in T])
        want = atlas.transition(atlas.ChartPoint(0, w), 2).w
        assert np.allclose(got, want, atol=1e-12)


class TestBlowupPoint:
    def test_incidence_violation(self):
        with pytest.raises(atlas.IncidenceError):
            atlas.BlowupPoint([1.0, 2.0], [1.0, 0.0])

    def test_canonical_phase(self):
        p = atlas.BlowupPoint(np.array([1j, 0]), np.array([2j, 0]))
        assert p.t[0].imag == pytest.approx(0, abs=1e-15)
        assert p.t[0].real > 0
        assert np.linalg.norm(p.t) == pytest.approx(1)

    def test_needs_two_dimensions(self):
        with pytest.raises(atlas.AtlasError):
            atlas.BlowupPoint([1.0], [1.0])


@given(
    j=st.integers(0, 2),
    seed=st.integers(0, 1000),
)
@settings(max_examples=50, deadline=None)
def test_chart_round_trip_random(j, seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    p = atlas.chart_to_total(atlas.ChartPoint(j, w))
    back = atlas.total_to_chart(p, j)
    assert np.max(np.abs(back.w - w)) <= 1e-12 * (1 + np.max(np.abs(w)))


def test_atlas_consistency_and_composition():
    # transitions compose: (j->k) then (k->l) equals (j->l)
    rng = sampling.rng_for(42, "atlas_consistency")
    count = 0
    while count < 100:
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        if np.min(np.abs(w)) < 0.1:
            continue
        count += 1
        for j, k, l in ((0, 1, 2), (2, 0, 1), (1, 2, 0)):
            p = atlas.ChartPoint(j, w)
            two_step = atlas.transition(atlas.transition(p, k), l)
            one_step = atlas.transition(p, l)
            assert np.max(np.abs(two_step.w - one_step.w)) <= 1e-10 * (
                1 + np.max(np.abs(one_step.w))
            )


class TestChartPotentials:
    def test_s_chart_value(self):
        pot = atlas.chart_potential("s", 0, 2)
        # |w_0|^2 (1 + |w|^2 - |w_0|^2) + log(...) at (1, 0) -> 1 + log 1
        assert pot.value([1.0, 0.0]).real == pytest.approx(1.0)

    def test_eh_needs_n2(self):
        with pytest.raises(ValueError):
            atlas.chart_potential("eh", 0, 3)

    def test_s_restriction_is_fs_potential(self):
        rest = atlas.exceptional_restriction("s", 0, 3)
        rng = sampling.rng_for(42, "restriction_values")
        W = sampling.annulus_points(rng, 20, 2)
        (got,) = ex.eval_batch([rest.expr], W)
        want = np.log(1 + np.sum(np.abs(W) ** 2, axis=1))
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_eh_restriction_value(self):
        rest = atlas.exceptional_restriction("eh", 0, 2)
        w = 0.7 - 0.2j
        want = 1 + np.log((1 + abs(w) ** 2) / 2)
        assert ex.evaluate(rest.expr, ex.Assignment.diagonal([w])).real == pytest.approx(want)

    @pytest.mark.parametrize("metric,n", [("s", 2), ("s", 3), ("eh", 2)])
    def test_overlap_consistency(self, metric, n):
        # complex Hessians of phi_j o (transition k->j) and phi_k agree on
        # the overlap: the potentials differ by a pluriharmonic function
        rng = sampling.rng_for(42, "overlap", metric, str(n))
        W = sampling.rejection_sample(
            lambda k: sampling.annulus_points(rng, k, n),
            lambda P: np.min(np.abs(P), axis=1) > 0.15,
            50,
        )
        j, k = 0, 1
        pot_j = atlas.chart_potential(metric, j, n)
        pot_k = atlas.chart_potential(metric, k, n)
        pulled = metrics.pullback(pot_j, atlas.transition_exprs(n, k, j), n)
        H1 = metrics.metric_batch(pulled, W)
        H2 = metrics.metric_batch(pot_k, W)
        assert np.max(np.abs(H1 - H2)) <= 1e-8

    @pytest.mark.parametrize(
        "metric,builder", [("s", potentials.s_potential), ("eh", lambda n: potentials.eh_potential())]
    )
    def test_off_divisor_equivalence(self, metric, builder):
        # chart potentials composed with the blow-down section match the
        # global potentials up to pluriharmonic terms (equal Hessians)
        n = 2
        glob = builder(n)
        j = 0
        chart = atlas.chart_potential(metric, j, n)
        # section of chart j in blow-down coordinates: w = (z_0, z_1/z_0)
        fmap = [ex.zvar(0), ex.quot(ex.zvar(1), ex.zvar(0))]
        pulled = metrics.pullback(chart, fmap, n)
        rng = sampling.rng_for(42, "offh", metric)
        Z = sampling.rejection_sample(
            lambda k: sampling.annulus_points(rng, k, n),
            lambda P: np.abs(P[:, 0]) > 0.15,
            50,
        )
        H1 = metrics.metric_batch(pulled, Z)
        H2 = metrics.metric_batch(glob, Z)
        assert np.max(np.abs(H1 - H2)) <= 1e-8
