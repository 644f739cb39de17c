#!/usr/bin/env python3
"""Cocycles, the canonical coboundary solver, and measure push-downs.

Every finite groupoid is proper, so real-valued 1-cocycles split as
coboundaries.  The solver integrates against the invariant probability
family built from the Haar system, which fixes the orbit-constant
ambiguity once and for all.

Run:  python demos/02_cocycles_and_measures.py
"""

from fractions import Fraction as F

import gcorr as gc
from gcorr.cohomology import ADDITIVE, coboundary_residual
from gcorr.groupoids import orbit_space, unit_action
from gcorr.measures import compose_with_quotient, cutoff_from_profile

pg = gc.pair_groupoid(["1", "2"])
haar = gc.counting_haar(pg)
p = gc.invariant_probability_family(pg, haar)
print("probability family weights:", p.weight)

# -- split an additive cocycle -----------------------------------------------
t = gc.Cochain0(pg, (F(0), F(5)), ADDITIVE)
c = gc.d0(t)  # c(arrow) = t(src) - t(dst)
b = gc.solve_coboundary_additive(c, p)
print("cochain recovered:", b.value, "(t shifted by the orbit mean)")
print("residual |c - b∘src + b∘dst|:", coboundary_residual(c, b))

# -- multiplicative version: b is a weighted geometric mean ------------------
q = gc.Cochain0(pg, (F(1), F(4)), "multiplicative")
delta = gc.d0(q)
bmul = gc.decompose_multiplicative(delta, p)
print("\nmultiplicative split of q∘src/q∘dst, q=(1,4):", bmul.value)
print("ratio residual:", coboundary_residual(delta, bmul))

# -- measures: induced measures, symmetry, push-down -------------------------
m = gc.unit_measure(pg, (F(1), F(2)))
fwd = gc.induced_measure(m, haar, "forward")
inv = gc.induced_measure(m, haar, "inverse")
print("\nm∘λ   :", fwd.weight)
print("m∘λ⁻¹ :", inv.weight)
print("symmetric?", gc.is_symmetric(m, haar))

m_sym = gc.unit_measure(pg, (F(3), F(3)))
orbits = orbit_space(unit_action(pg))
mu = gc.push_measure_down(m_sym, haar, orbits)
print("\npushed-down measure:", mu.weight)
print("disintegrates back :", compose_with_quotient(mu, haar, orbits).weight)

# the push-down ignores the choice of cutoff
e2 = cutoff_from_profile(haar, (F(9), F(1)))
mu2 = gc.push_measure_down(m_sym, haar, orbits, e=e2)
print("same with a skewed cutoff:", mu2.weight, "(identical)")
