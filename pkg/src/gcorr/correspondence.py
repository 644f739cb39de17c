"""Topological correspondences between finite groupoids with Haar systems.

A correspondence from (G, α) to (H, β) is a G-H-bispace X carrying an
H-invariant, fully supported family of measures λ along the right momentum
map, together with the multiplicative 1-cocycle Δ on the left
transformation groupoid that implements quasi-invariance of λ under
(G, α).  At finite scale Δ is forced by a discrete Radon-Nikodym formula,
so builders derive it rather than ask for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .cohomology import MULTIPLICATIVE, Cocycle1, check_cocycle
from .groupoids import (
    Bispace,
    FiniteGroupoid,
    bispace_violations,
    check_proper,
    group_groupoid,
    groupoid_violations,
    make_action,
    make_bispace,
    transformation_groupoid,
    trivial_action,
    units_only_groupoid,
)
from .measures import HaarSystem, MeasureFamily, check_haar, counting_haar
from .report import Report
from .util import GcorrError, ONE, Scalar, adev, all_exact, rdev


class NotWellDefined(GcorrError):
    pass


class NotAHomomorphism(GcorrError):
    pass


class NotASubgroup(GcorrError):
    pass


@dataclass(frozen=True, eq=False)
class Correspondence:
    left_haar: HaarSystem
    right_haar: HaarSystem
    space: Bispace
    family: MeasureFamily  # along the right momentum map
    adjoining: Cocycle1  # multiplicative, on left_tg
    left_tg: FiniteGroupoid
    left_tg_index: dict[tuple[int, int], int]  # (arrow, point) -> left_tg arrow

    @property
    def left(self) -> FiniteGroupoid:
        return self.left_haar.groupoid

    @property
    def right(self) -> FiniteGroupoid:
        return self.right_haar.groupoid

    def adjoining_at(self, arrow: int, point: int) -> Scalar:
        return self.adjoining.value[self.left_tg_index[(arrow, point)]]

    @property
    def exact(self) -> bool:
        return (
            self.left_haar.exact
            and self.right_haar.exact
            and self.family.exact
            and all_exact(self.adjoining.value)
        )

    def __repr__(self) -> str:
        return (
            f"Correspondence({self.left!r} -> {self.right!r}, "
            f"{self.space.n_points} points)"
        )


def derive_adjoining(
    left_haar: HaarSystem, space: Bispace, family: MeasureFamily
) -> tuple[tuple[Scalar, ...], FiniteGroupoid, dict[tuple[int, int], int]]:
    """The Radon-Nikodym cocycle of the family under the left action.

    For an arrow η acting on a point z,

        Δ(η, z) = w(η⁻¹) λ(z) / (w(η) λ(ηz)).

    Term-by-term this is the unique function making the quasi-invariance
    identity hold on point masses, hence (by spanning) on all test
    functions.  The cocycle property is verified by the caller.
    """
    g = left_haar.groupoid
    tg, idx = transformation_groupoid(space.left)
    values: list[Scalar] = [ONE] * tg.n_arrows
    for (a, p), k in idx.items():
        q = space.left.table[(a, p)]
        values[k] = (left_haar.w(g.inv[a]) * family.weight[p]) / (
            left_haar.w(a) * family.weight[q]
        )
    return tuple(values), tg, idx


def quasi_invariance_residual(
    left_haar: HaarSystem,
    space: Bispace,
    family: MeasureFamily,
    adjoining_at: Callable[[int, int], Scalar],
) -> tuple[float, Optional[str]]:
    """Worst point-mass violation of the quasi-invariance identity.

    On the point mass at (η, z) the two double sums collapse to

        w(η⁻¹) λ(z)   versus   Δ(η, z) w(η) λ(ηz),

    so the sweep below spans all test functions by linearity.
    """
    g = left_haar.groupoid
    worst, witness = 0.0, None
    for a, p in space.left.pairs():
        q = space.left.table[(a, p)]
        lhs = left_haar.w(g.inv[a]) * family.weight[p]
        rhs = adjoining_at(a, p) * left_haar.w(a) * family.weight[q]
        d = rdev(lhs, rhs)
        if d > worst:
            worst, witness = d, f"({g.arrow_ids[a]}, {space.point_ids[p]})"
    return worst, witness


def quasi_invariance_residual_dense(
    corr: "Correspondence", F: dict[tuple[int, int], complex]
) -> float:
    """The full double-sum identity on one arbitrary test function.

    Slower than the point-mass sweep; used as an independent fuzz oracle.
    """
    g = corr.left
    space = corr.space
    lam = corr.family
    lhs_by_unit = [0.0] * corr.right.n_units
    rhs_by_unit = [0.0] * corr.right.n_units
    for p in range(space.n_points):
        u = space.s_momentum(p)
        for a in g.fibre_dst[space.r_momentum(p)]:
            ai = g.inv[a]
            val = F.get((ai, p))
            if val:
                lhs_by_unit[u] += float(corr.left_haar.w(a)) * float(lam.weight[p]) * val
            q = space.left.table[(ai, p)]
            val = F.get((a, q))
            if val:
                rhs_by_unit[u] += (
                    float(corr.adjoining_at(a, q))
                    * float(corr.left_haar.w(a))
                    * float(lam.weight[p])
                    * val
                )
    return max(
        (abs(l - r) for l, r in zip(lhs_by_unit, rhs_by_unit)), default=0.0
    )


def family_invariance_residual(space: Bispace, family: MeasureFamily) -> tuple[float, Optional[str]]:
    """Right invariance: λ(x·η) = λ(x) for every composable pair."""
    worst, witness = 0.0, None
    for p, a in space.right.pairs():
        q = space.right.table[(p, a)]
        d = adev(family.weight[q], family.weight[p])
        if d > worst:
            worst, witness = d, f"({space.point_ids[p]}, {space.right.groupoid.arrow_ids[a]})"
    return worst, witness


def make_correspondence(
    left_haar: HaarSystem,
    right_haar: HaarSystem,
    space: Bispace,
    family: MeasureFamily,
    adjoining_values: Optional[Sequence[Scalar]] = None,
    check: bool = True,
    tol: float = 1e-9,
) -> Correspondence:
    """Assemble a correspondence, deriving the adjoining cocycle if absent."""
    if space.left.groupoid != left_haar.groupoid or space.right.groupoid != right_haar.groupoid:
        raise GcorrError("bispace actions do not match the given groupoids")
    if family.along != space.right.momentum or family.total_ids != space.point_ids:
        raise GcorrError("family must run along the right momentum map")
    derived, tg, idx = derive_adjoining(left_haar, space, family)
    values = tuple(adjoining_values) if adjoining_values is not None else derived
    adj = Cocycle1(tg, values, MULTIPLICATIVE)
    corr = Correspondence(left_haar, right_haar, space, family, adj, tg, idx)
    if check:
        rep = validate(corr, tol=tol)
        if not rep.passed:
            raise NotWellDefined("; ".join(c.render() for c in rep.failures()))
    return corr


def validate(corr: Correspondence, tol: float = 1e-9) -> Report:
    """Run every defining condition, reporting residuals and witnesses."""
    rep = Report("correspondence")
    bad = groupoid_violations(corr.left) + groupoid_violations(corr.right)
    rep.add("groupoid_axioms", not bad, witness=str(bad[0]) if bad else None)

    for name, haar in (("left_haar", corr.left_haar), ("right_haar", corr.right_haar)):
        chk = check_haar(haar.groupoid, haar.family)
        rep.add(name, chk.ok, chk.max_violation, str(chk.witness) if chk.witness else None)

    bad = bispace_violations(corr.space)
    rep.add("bispace_axioms", not bad, witness=str(bad[0]) if bad else None)
    if not rep.passed:
        return rep

    tg_right, _ = transformation_groupoid(corr.space.right)
    evidence = check_proper(tg_right)
    rep.add("right_action_proper", evidence.proper)
    rep.notes["properness_max_fibre"] = evidence.max_card

    res, wit = family_invariance_residual(corr.space, corr.family)
    rep.add("family_right_invariance", res == 0.0 if corr.family.exact else res <= tol, res, wit)

    chk = check_cocycle(corr.adjoining, rel_tol=None if corr.exact else tol)
    rep.add("adjoining_cocycle", chk.ok, chk.max_deviation, str(chk.witness) if chk.witness else None)

    res, wit = quasi_invariance_residual(
        corr.left_haar, corr.space, corr.family, corr.adjoining_at
    )
    rep.add("adjoining_identity", res == 0.0 if corr.exact else res <= tol, res, wit)
    rep.notes["scalar_mode"] = "exact" if corr.exact else "float"
    return rep


# ---------------------------------------------------------------------------
# builders for the example catalog


def from_span(
    left_units: Sequence[str],
    right_units: Sequence[str],
    space_ids: Sequence[str],
    left_momentum: dict[str, str],
    right_momentum: dict[str, str],
    weights: Optional[dict[str, Scalar]] = None,
    left_haar: Optional[HaarSystem] = None,
    right_haar: Optional[HaarSystem] = None,
) -> Correspondence:
    """A correspondence between two spaces viewed as units-only groupoids.

    The data is just a span of finite sets  left <- space -> right  with a
    positive weight family along the right leg (point masses by default).
    """
    gl = left_haar.groupoid if left_haar else units_only_groupoid(left_units)
    gr = right_haar.groupoid if right_haar else units_only_groupoid(right_units)
    left_haar = left_haar or counting_haar(gl)
    right_haar = right_haar or counting_haar(gr)
    lm = tuple(gl.unit_index(left_momentum[p]) for p in space_ids)
    rm = tuple(gr.unit_index(right_momentum[p]) for p in space_ids)
    space = make_bispace(
        trivial_action("left", gl, space_ids, lm),
        trivial_action("right", gr, space_ids, rm),
    )
    w = tuple(ONE if weights is None else weights[p] for p in space_ids)
    fam = MeasureFamily(tuple(space_ids), gr.unit_ids, rm, w)
    return make_correspondence(left_haar, right_haar, space, fam)


def from_map(x_ids: Sequence[str], y_ids: Sequence[str], f: dict[str, str]) -> Correspondence:
    """The correspondence of a map f: X -> Y, running from Y to X.

    The space is X itself with point masses along the identity; the map
    enters as the left momentum.  The adjoining cocycle derives to 1.
    """
    for x in x_ids:
        if f.get(x) not in y_ids:
            raise GcorrError(f"f({x}) = {f.get(x)!r} is not a point of the target")
    return from_span(
        y_ids,
        x_ids,
        x_ids,
        left_momentum=f,
        right_momentum={x: x for x in x_ids},
    )


def check_group_hom(h: FiniteGroupoid, g: FiniteGroupoid, phi: dict[str, str]) -> dict[int, int]:
    """Validate a homomorphism between one-unit groupoids, as an index map."""
    if h.n_units != 1 or g.n_units != 1:
        raise NotAHomomorphism("expected one-unit groupoids")
    try:
        idx = {a: g.arrow_index(phi[h.arrow_ids[a]]) for a in range(h.n_arrows)}
    except KeyError as exc:
        raise NotAHomomorphism(f"φ is not total: missing {exc}") from exc
    for (a, b), c in h.comp.items():
        if g.comp[(idx[a], idx[b])] != idx[c]:
            raise NotAHomomorphism(
                f"φ({h.arrow_ids[a]})φ({h.arrow_ids[b]}) != φ({h.arrow_ids[c]})"
            )
    return idx


def from_group_hom(
    h: FiniteGroupoid,
    g: FiniteGroupoid,
    phi: dict[str, str],
    h_haar: Optional[HaarSystem] = None,
    g_haar: Optional[HaarSystem] = None,
) -> Correspondence:
    """The correspondence of a group homomorphism φ: H -> G.

    H translates on the group G through φ from the left, G from the right;
    the family is counting (finite groups are unimodular, so the inverted
    Haar measure is counting again and the adjoining cocycle derives to 1).
    """
    idx = check_group_hom(h, g, phi)
    h_haar = h_haar or counting_haar(h)
    g_haar = g_haar or counting_haar(g)
    pts = g.arrow_ids
    left = make_action(
        "left", h, pts, (0,) * len(pts),
        {(a, p): g.comp[(idx[a], p)] for a in range(h.n_arrows) for p in range(len(pts))},
    )
    right = make_action(
        "right", g, pts, (0,) * len(pts),
        {(p, b): g.comp[(p, b)] for p in range(len(pts)) for b in range(g.n_arrows)},
    )
    space = make_bispace(left, right)
    fam = MeasureFamily(pts, g.unit_ids, (0,) * len(pts), (ONE,) * len(pts))
    return make_correspondence(h_haar, g_haar, space, fam)


def subgroup_groupoid(g: FiniteGroupoid, elements: Sequence[str]) -> tuple[FiniteGroupoid, dict[str, str]]:
    """The subgroup on `elements` as its own one-unit groupoid.

    Raises NotASubgroup if the subset is not closed under composition and
    inverses or misses the identity.  Also returns the inclusion map.
    """
    if g.n_units != 1:
        raise NotASubgroup("ambient groupoid must be a group")
    subset = set(elements)
    ident = g.arrow_ids[g.unit_arrow[0]]
    if ident not in subset:
        raise NotASubgroup(f"identity {ident} missing")
    names = tuple(sorted(subset, key=g.arrow_index))
    for a in names:
        if g.arrow_ids[g.inv[g.arrow_index(a)]] not in subset:
            raise NotASubgroup(f"{a} has no inverse in the subset")
        for b in names:
            if g.arrow_ids[g.comp[(g.arrow_index(a), g.arrow_index(b))]] not in subset:
                raise NotASubgroup(f"{a}∘{b} escapes the subset")
    mult = {
        (a, b): g.arrow_ids[g.comp[(g.arrow_index(a), g.arrow_index(b))]]
        for a in names
        for b in names
    }
    return group_groupoid(names, mult, ident), {a: a for a in names}


def regular_bimodule(g: FiniteGroupoid, left_sub: Sequence[str], right_sub: Sequence[str]) -> Correspondence:
    """G as a bimodule over two subgroups: left_sub·x·right_sub, counting weights."""
    hg, _ = subgroup_groupoid(g, left_sub)
    kg, _ = subgroup_groupoid(g, right_sub)
    pts = g.arrow_ids
    left = make_action(
        "left", hg, pts, (0,) * len(pts),
        {
            (a, p): g.comp[(g.arrow_index(hg.arrow_ids[a]), p)]
            for a in range(hg.n_arrows)
            for p in range(len(pts))
        },
    )
    right = make_action(
        "right", kg, pts, (0,) * len(pts),
        {
            (p, b): g.comp[(p, g.arrow_index(kg.arrow_ids[b]))]
            for p in range(len(pts))
            for b in range(kg.n_arrows)
        },
    )
    space = make_bispace(left, right)
    fam = MeasureFamily(pts, kg.unit_ids, (0,) * len(pts), (ONE,) * len(pts))
    return make_correspondence(counting_haar(hg), counting_haar(kg), space, fam)


def induction_instance(
    g: FiniteGroupoid, h_elements: Sequence[str], k_elements: Sequence[str]
) -> tuple[Correspondence, Correspondence]:
    """The two subgroup correspondences (H -> G on G, then G -> K on G)."""
    hg, incl_h = subgroup_groupoid(g, h_elements)
    kg, _ = subgroup_groupoid(g, k_elements)
    first = from_group_hom(hg, g, incl_h)

    pts = g.arrow_ids
    left = make_action(
        "left", g, pts, (0,) * len(pts),
        {(a, p): g.comp[(a, p)] for a in range(g.n_arrows) for p in range(len(pts))},
    )
    right = make_action(
        "right", kg, pts, (0,) * len(pts),
        {
            (p, b): g.comp[(p, g.arrow_index(kg.arrow_ids[b]))]
            for p in range(len(pts))
            for b in range(kg.n_arrows)
        },
    )
    space = make_bispace(left, right)
    fam = MeasureFamily(pts, kg.unit_ids, (0,) * len(pts), (ONE,) * len(pts))
    second = make_correspondence(counting_haar(g), counting_haar(kg), space, fam)
    return first, second
