from __future__ import annotations

from fractions import Fraction

import pytest

import gcorr as gc
from gcorr.groupoids import make_action, make_bispace
from gcorr.measures import MeasureFamily, counting_haar


@pytest.fixture
def pair2():
    return gc.pair_groupoid(["1", "2"])


@pytest.fixture
def z2():
    return gc.cyclic_group(2)


@pytest.fixture
def z3():
    return gc.cyclic_group(3)


def translation_correspondence(lam=(1, 3)):
    """Z/2 translating on itself from the left over the one-point groupoid,
    with a (generally non-invariant-under-the-left-action) weight family."""
    z2 = gc.cyclic_group(2)
    pt = gc.cyclic_group(1, unit_id="pt*")
    pts = ("a0", "a1")
    left = make_action(
        "left", z2, pts, (0, 0),
        {(a, p): (a + p) % 2 for a in range(2) for p in range(2)},
    )
    right = make_action("right", pt, pts, (0, 0), {(p, 0): p for p in range(2)})
    space = make_bispace(left, right)
    fam = MeasureFamily(pts, pt.unit_ids, (0, 0), tuple(Fraction(v) for v in lam))
    return gc.make_correspondence(counting_haar(z2), counting_haar(pt), space, fam)
