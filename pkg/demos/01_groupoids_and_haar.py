#!/usr/bin/env python3
"""Build finite groupoids, attach Haar systems, and inspect the basics.

Run:  python demos/01_groupoids_and_haar.py
"""

from fractions import Fraction as F

import gcorr as gc
from gcorr.groupoids import groupoid_violations, translation_action, unit_action
from gcorr.measures import fibre_masses

# -- a pair groupoid and a cyclic group -------------------------------------
pg = gc.pair_groupoid(["1", "2", "3"])
z4 = gc.cyclic_group(4)
print("pair groupoid:", pg)
print("cyclic group :", z4)
print("axioms hold  :", not groupoid_violations(pg) and not groupoid_violations(z4))

# -- Haar systems: on a finite groupoid every left-invariant weight table
#    is a positive function of the source unit.  Put weight 1 over unit "1",
#    weight 2 over "2", weight 1/3 over "3":
haar = gc.haar_from_unit_weights(pg, (F(1), F(2), F(1, 3)))
print("\nHaar weights by arrow:")
for a in range(pg.n_arrows):
    print(f"  {pg.arrow_ids[a]:8} -> {haar.w(a)}")
print("left-invariance check:", gc.check_haar(pg, haar.family))
print("range-fibre masses   :", fibre_masses(haar))

# breaking invariance is detected with a witness pair
try:
    gc.make_haar(pg, tuple(F(1 + pg.dst[a]) for a in range(pg.n_arrows)))
except Exception as exc:
    print("tampered weights     :", exc)

# -- transformation groupoids: a group acting on itself by translation is
#    the pair groupoid in disguise
z2 = gc.cyclic_group(2)
tg, _ = gc.transformation_groupoid(translation_action("right", z2))
iso = gc.groupoids.find_groupoid_isomorphism(tg, gc.pair_groupoid(["a", "b"]))
print("\nZ/2 acting on itself ~ pair groupoid:", iso is not None)

# -- orbit spaces come with deterministic representatives
orbits = gc.orbit_space(unit_action(gc.disjoint_union(z2, z4, tags=["a", "b"])))
print("orbits of a disjoint union:", orbits.orbit_ids)

# -- properness evidence (finite: always proper, fibres tabulated)
print("properness evidence, max fibre:", gc.check_proper(z4).max_card)
