"""Built-in example instances, each a chainable pair ready to compose."""

from __future__ import annotations

from fractions import Fraction

from .correspondence import (
    Correspondence,
    from_group_hom,
    from_map,
    from_span,
    induction_instance,
    make_correspondence,
    regular_bimodule,
    subgroup_groupoid,
)
from .groupoids import cyclic_group, make_action, make_bispace, symmetric_group, units_only_groupoid
from .measures import MeasureFamily, counting_haar
from .util import GcorrError

EXAMPLE_NAMES = ("fn-compose", "quiver", "group-hom", "subgroup", "induction-finite")

FN_X = ("x1", "x2", "x3", "x4")
FN_Y = ("y1", "y2")
FN_Z = ("z1", "z2", "z3")
FN_F = {"x1": "y1", "x2": "y1", "x3": "y2", "x4": "y2"}
FN_G = {"y1": "z2", "y2": "z1"}

GH_PSI = {f"g{k}": f"g{k % 2}" for k in range(4)}  # reduction Z/4 -> Z/2
GH_PHI = {"g0": "g0", "g1": "g1"}  # identity on Z/2

S3_A3 = ("s012", "s120", "s201")  # even permutations
S3_K = ("s012", "s102")  # a transposition subgroup


def _quiver_pair() -> tuple[Correspondence, Correspondence]:
    # weighted span pair between plain spaces (all groupoids are units-only)
    xs = ("q1", "q2", "q3", "q4")
    vs = ("v1", "v2", "v3")
    zq = ("zA", "zB")
    yq = ("yA", "yB")
    wq = ("wA",)
    f = {"q1": "zA", "q2": "zB", "q3": "zA", "q4": "zB"}
    g = {"q1": "yA", "q2": "yA", "q3": "yB", "q4": "yB"}
    k = {"v1": "yA", "v2": "yB", "v3": "yB"}
    l = {"v1": "wA", "v2": "wA", "v3": "wA"}
    lam1 = {"q1": Fraction(1, 2), "q2": Fraction(3), "q3": Fraction(2), "q4": Fraction(5, 3)}
    lam2 = {"v1": Fraction(4), "v2": Fraction(1, 3), "v3": Fraction(7, 2)}
    first = from_span(zq, yq, xs, f, g, lam1)
    second = from_span(yq, wq, vs, k, l, lam2)
    return first, second


def _induction_finite_pair() -> tuple[Correspondence, Correspondence]:
    # subgroup bimodule of Z/4 over H = K = {g0, g2}, then a weighted
    # K-space over the one-point groupoid (nontrivial adjoining cocycle)
    g = cyclic_group(4)
    sub = ("g0", "g2")
    first = regular_bimodule(g, sub, sub)
    kg, _ = subgroup_groupoid(g, sub)
    pt = units_only_groupoid(("pt",))
    pts = kg.arrow_ids
    left = make_action(
        "left", kg, pts, (0,) * len(pts),
        {(a, p): kg.comp[(a, p)] for a in range(kg.n_arrows) for p in range(len(pts))},
    )
    right = make_action("right", pt, pts, (0,) * len(pts), {(p, 0): p for p in range(len(pts))})
    space = make_bispace(left, right)
    kappa = MeasureFamily(pts, pt.unit_ids, (0,) * len(pts), (Fraction(1), Fraction(3)))
    second = make_correspondence(counting_haar(kg), counting_haar(pt), space, kappa)
    return first, second


def example_pair(name: str) -> tuple[Correspondence, Correspondence, dict]:
    """The named catalog pair plus metadata about the expected composite."""
    if name == "fn-compose":
        first = from_map(FN_Y, FN_Z, FN_G)
        second = from_map(FN_X, FN_Y, FN_F)
        meta = {
            "description": "two plain maps; the composite matches the map x -> g(f(x))",
            "target": lambda: from_map(FN_X, FN_Z, {x: FN_G[FN_F[x]] for x in FN_X}),
        }
        return first, second, meta
    if name == "quiver":
        first, second = _quiver_pair()
        meta = {
            "description": "weighted spans of spaces; the composite family is the product family",
        }
        return first, second, meta
    if name == "group-hom":
        k4, h2, g2 = cyclic_group(4), cyclic_group(2), cyclic_group(2)
        first = from_group_hom(k4, h2, GH_PSI)
        second = from_group_hom(h2, g2, GH_PHI)
        meta = {
            "description": "homomorphisms Z/4 -> Z/2 -> Z/2; the composite matches their composite",
            "target": lambda: from_group_hom(cyclic_group(4), cyclic_group(2), {a: GH_PHI[GH_PSI[a]] for a in GH_PSI}),
        }
        return first, second, meta
    if name == "subgroup":
        s3 = symmetric_group(3)
        first, second = induction_instance(s3, S3_A3, S3_K)
        meta = {
            "description": "S3 as a bimodule over A3 and a transposition subgroup",
            "target": lambda: regular_bimodule(symmetric_group(3), S3_A3, S3_K),
        }
        return first, second, meta
    if name == "induction-finite":
        first, second = _induction_finite_pair()
        meta = {
            "description": "subgroup bimodule of Z/4 followed by a weighted module over the point",
        }
        return first, second, meta
    raise GcorrError(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")
