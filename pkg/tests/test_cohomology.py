from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gcorr as gc
from gcorr.cohomology import (
    ADDITIVE,
    MULTIPLICATIVE,
    NotACocycle,
    coboundary_residual,
    probability_family_violation,
)
from gcorr.groupoids import make_action, transformation_groupoid
from gcorr.randgen import SplitMix64, random_groupoid, random_haar


class TestInvariantProbabilityFamily:
    def test_cyclic_uniform(self, z3):
        p = gc.invariant_probability_family(z3, gc.counting_haar(z3))
        assert p.weight == (F(1, 3),) * 3
        assert probability_family_violation(p) == 0

    def test_pair_groupoid_weighted(self, pair2):
        # w = (1, 2) by source unit: h ≡ 3, fibre weights (1/3, 2/3)
        haar = gc.haar_from_unit_weights(pair2, (F(1), F(2)))
        p = gc.invariant_probability_family(pair2, haar)
        for u in range(2):
            fibre = {pair2.src[a]: p.weight[a] for a in pair2.fibre_dst[u]}
            assert fibre == {0: F(1, 3), 1: F(2, 3)}
        assert probability_family_violation(p) == 0

    def test_profile_scale_cancels(self, z3):
        haar = gc.counting_haar(z3)
        p1 = gc.invariant_probability_family(z3, haar, F=(F(3, 7),))
        p2 = gc.invariant_probability_family(z3, haar, F=(F(6, 7),))
        assert p1.weight == p2.weight

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_instances_exact(self, seed):
        rng = SplitMix64(seed)
        g = random_groupoid(rng, 30)
        haar = random_haar(rng, g)
        fprof = tuple(rng.fraction() for _ in range(g.n_units))
        p = gc.invariant_probability_family(g, haar, F=fprof)
        assert probability_family_violation(p) == 0  # exact rationals


class TestCheckCocycle:
    def test_unit_arrow_witness(self, pair2):
        c = gc.Cocycle1(pair2, (F(1), F(0), F(0), F(1)), ADDITIVE)
        chk = gc.check_cocycle(c)
        assert not chk.ok and chk.witness is not None

    def test_d0_image_always_passes(self, pair2):
        t = gc.Cochain0(pair2, (F(2), F(-5)), ADDITIVE)
        assert gc.check_cocycle(gc.d0(t)).ok

    def test_multiplicative_positive_required(self, z2):
        with pytest.raises(Exception):
            gc.Cocycle1(z2, (F(1), F(-1)), MULTIPLICATIVE)


class TestD0:
    def test_constant_cochain_trivial(self, z3):
        assert set(gc.d0(gc.Cochain0(z3, (F(4),), ADDITIVE)).value) == {0}
        assert set(gc.d0(gc.Cochain0(z3, (F(4),), MULTIPLICATIVE)).value) == {1}

    def test_pair_groupoid_difference(self, pair2):
        t = gc.Cochain0(pair2, (F(0), F(5)), ADDITIVE)
        c = gc.d0(t)
        for a in range(4):
            assert c.value[a] == t.value[pair2.src[a]] - t.value[pair2.dst[a]]


class TestSolveCoboundary:
    def test_zero_cocycle(self, z3):
        p = gc.invariant_probability_family(z3, gc.counting_haar(z3))
        c = gc.Cocycle1(z3, (F(0),) * 3, ADDITIVE)
        b = gc.solve_coboundary_additive(c, p)
        assert b.value == (F(0),)

    def test_pair_groupoid_recovers_up_to_constant(self, pair2):
        p = gc.invariant_probability_family(pair2, gc.counting_haar(pair2))
        t = gc.Cochain0(pair2, (F(0), F(5)), ADDITIVE)
        c = gc.d0(t)
        b = gc.solve_coboundary_additive(c, p)
        assert coboundary_residual(c, b) == 0
        # differs from t by an orbit constant
        diff = {b.value[u] - t.value[u] for u in range(2)}
        assert len(diff) == 1

    def test_rejects_non_cocycle(self, pair2):
        p = gc.invariant_probability_family(pair2, gc.counting_haar(pair2))
        c = gc.Cocycle1(pair2, (F(0), F(1), F(0), F(0)), ADDITIVE)
        with pytest.raises(NotACocycle):
            gc.solve_coboundary_additive(c, p)

    def test_transformation_groupoid_of_z3_on_six_points(self, z3):
        # Z/3 translating two copies of itself: 6 points, 18 arrows
        pts = [f"{c}{k}" for c in "ab" for k in range(3)]
        table = {
            (p, a): 3 * (p // 3) + (p % 3 + a) % 3
            for p in range(6)
            for a in range(3)
        }
        act = make_action("right", z3, pts, (0,) * 6, table)
        tg, _ = transformation_groupoid(act)
        haar = gc.counting_haar(tg)
        p = gc.invariant_probability_family(tg, haar)
        rng = SplitMix64(11)
        t = gc.Cochain0(tg, tuple(2 * rng.random() - 1 for _ in range(6)), ADDITIVE)
        c = gc.d0(t)
        b = gc.solve_coboundary_additive(c, p)
        assert coboundary_residual(c, b) < 1e-12

    def test_output_class_independent_of_p(self, pair2):
        # two different probability families, same coboundary class
        haar = gc.counting_haar(pair2)
        p1 = gc.invariant_probability_family(pair2, haar)
        p2 = gc.invariant_probability_family(pair2, haar, F=(F(1), F(7)))
        t = gc.Cochain0(pair2, (F(2), F(9)), ADDITIVE)
        c = gc.d0(t)
        b1 = gc.solve_coboundary_additive(c, p1)
        b2 = gc.solve_coboundary_additive(c, p2)
        assert gc.d0(b1).value == gc.d0(b2).value == c.value


class TestDecomposeMultiplicative:
    def test_trivial_stays_exact(self, z3):
        p = gc.invariant_probability_family(z3, gc.counting_haar(z3))
        delta = gc.Cocycle1(z3, (F(1),) * 3, MULTIPLICATIVE)
        b = gc.decompose_multiplicative(delta, p)
        assert b.value == (F(1),) and isinstance(b.value[0], F)

    def test_pair_groupoid_geometric_mean(self, pair2):
        # Δ = q∘src / q∘dst with q = (1, 4): b = q / geomean(q) = (1/2, 2)
        p = gc.invariant_probability_family(pair2, gc.counting_haar(pair2))
        q = gc.Cochain0(pair2, (F(1), F(4)), MULTIPLICATIVE)
        delta = gc.d0(q)
        b = gc.decompose_multiplicative(delta, p)
        assert b.value == pytest.approx((0.5, 2.0))
        assert coboundary_residual(delta, b) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_transformation_groupoids(self, seed):
        rng = SplitMix64(seed)
        g = random_groupoid(rng, 50)
        haar = random_haar(rng, g)
        p = gc.invariant_probability_family(g, haar)
        t = gc.Cochain0(g, tuple(rng.fraction() for _ in range(g.n_units)), MULTIPLICATIVE)
        delta = gc.d0(t)
        b = gc.decompose_multiplicative(delta, p)
        assert coboundary_residual(delta, b) < 1e-9

    def test_bm_symmetric_for_quasi_invariant_m(self, pair2):
        """The split cochain turns a strongly quasi-invariant measure into a
        symmetric one."""
        haar = gc.counting_haar(pair2)
        m = gc.unit_measure(pair2, (F(1), F(4)))
        fwd = gc.induced_measure(m, haar, "forward")
        inv = gc.induced_measure(m, haar, "inverse")
        delta = gc.Cocycle1(
            pair2,
            tuple(fwd.weight[a] / inv.weight[a] for a in range(4)),
            MULTIPLICATIVE,
        )
        assert gc.check_cocycle(delta).ok
        p = gc.invariant_probability_family(pair2, haar)
        b = gc.decompose_multiplicative(delta, p)
        bm = gc.unit_measure(pair2, tuple(b.value[u] * m.weight[u] for u in range(2)))
        chk = gc.is_symmetric(bm, haar, tol=1e-12)
        assert chk.symmetric
