"""Finite groupoids, actions on finite sets, bispaces and orbit spaces.

Conventions used throughout the package:

* An arrow ``a`` runs ``src(a) -> dst(a)``; ``dst`` plays the role of the
  range map and ``src`` of the source map.
* ``comp(a, b)`` means "``a`` after ``b``" and is defined exactly when
  ``src(a) == dst(b)``; the composite runs ``src(b) -> dst(a)``.
* The range fibre at a unit ``u`` is ``fibre_dst(u)`` (arrows into ``u``),
  the source fibre is ``fibre_src(u)``.

All ids are opaque strings in the interchange format; internally every
table is indexed by dense integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .util import GcorrError


@dataclass(frozen=True)
class Violation:
    """One broken groupoid/action axiom, naming the offending arrows."""

    kind: str  # NonAssociative | BadUnit | BadInverse | DanglingEndpoint
    message: str
    where: tuple[str, ...] = ()

    def __str__(self) -> str:
        loc = f" at ({', '.join(self.where)})" if self.where else ""
        return f"{self.kind}{loc}: {self.message}"


class GroupoidAxiomError(GcorrError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations[:5]))


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    unit_ids: tuple[str, ...]
    arrow_ids: tuple[str, ...]
    src: tuple[int, ...]
    dst: tuple[int, ...]
    comp: dict[tuple[int, int], int]  # (a, b) -> a∘b, iff src[a] == dst[b]
    inv: tuple[int, ...]
    unit_arrow: tuple[int, ...]  # unit -> its identity arrow

    @property
    def n_units(self) -> int:
        return len(self.unit_ids)

    @property
    def n_arrows(self) -> int:
        return len(self.arrow_ids)

    @cached_property
    def fibre_dst(self) -> tuple[tuple[int, ...], ...]:
        """Arrows grouped by dst: fibre_dst[u] is the range fibre at u."""
        out: list[list[int]] = [[] for _ in range(self.n_units)]
        for a, u in enumerate(self.dst):
            out[u].append(a)
        return tuple(tuple(f) for f in out)

    @cached_property
    def fibre_src(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_units)]
        for a, u in enumerate(self.src):
            out[u].append(a)
        return tuple(tuple(f) for f in out)

    def composable_pairs(self) -> Iterator[tuple[int, int]]:
        """All (a, b) with src(a) == dst(b), i.e. a∘b defined."""
        for a in range(self.n_arrows):
            for b in self.fibre_dst[self.src[a]]:
                yield a, b

    def is_unit_arrow(self, a: int) -> bool:
        return self.unit_arrow[self.src[a]] == a

    def unit_index(self, unit_id: str) -> int:
        return self._unit_lookup[unit_id]

    def arrow_index(self, arrow_id: str) -> int:
        return self._arrow_lookup[arrow_id]

    @cached_property
    def _unit_lookup(self) -> dict[str, int]:
        return {uid: i for i, uid in enumerate(self.unit_ids)}

    @cached_property
    def _arrow_lookup(self) -> dict[str, int]:
        return {aid: i for i, aid in enumerate(self.arrow_ids)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        return (
            self.unit_ids == other.unit_ids
            and self.arrow_ids == other.arrow_ids
            and self.src == other.src
            and self.dst == other.dst
            and self.comp == other.comp
            and self.inv == other.inv
            and self.unit_arrow == other.unit_arrow
        )

    def __repr__(self) -> str:
        return f"FiniteGroupoid({self.n_units} units, {self.n_arrows} arrows)"


def groupoid_violations(g: FiniteGroupoid) -> list[Violation]:
    """Exhaustively check the groupoid axioms, returning every violation."""
    out: list[Violation] = []
    n_u, n_a = g.n_units, g.n_arrows
    ids = g.arrow_ids

    for a in range(n_a):
        if not (0 <= g.src[a] < n_u and 0 <= g.dst[a] < n_u):
            out.append(Violation("DanglingEndpoint", "src/dst out of range", (ids[a],)))
            return out  # unit-indexed sweeps below would be meaningless

    for u in range(n_u):
        e = g.unit_arrow[u]
        if not (0 <= e < n_a):
            out.append(Violation("BadUnit", "missing identity arrow", (g.unit_ids[u],)))
            continue
        if g.src[e] != u or g.dst[e] != u:
            out.append(Violation("BadUnit", "identity arrow endpoints differ from its unit", (ids[e],)))

    # comp domain = exactly the composable pairs
    for (a, b) in g.comp:
        if g.src[a] != g.dst[b]:
            out.append(Violation("DanglingEndpoint", "comp defined on non-matching endpoints", (ids[a], ids[b])))
    for a, b in g.composable_pairs():
        c = g.comp.get((a, b))
        if c is None:
            out.append(Violation("DanglingEndpoint", "comp missing on matching endpoints", (ids[a], ids[b])))
        elif g.src[c] != g.src[b] or g.dst[c] != g.dst[a]:
            out.append(Violation("DanglingEndpoint", "composite has wrong endpoints", (ids[a], ids[b], ids[c])))
    if out:
        return out

    for u in range(n_u):
        e = g.unit_arrow[u]
        for a in g.fibre_src[u]:  # a∘e = a
            if g.comp[(a, e)] != a:
                out.append(Violation("BadUnit", "identity fails on the right", (ids[a], ids[e])))
        for b in g.fibre_dst[u]:  # e∘b = b
            if g.comp[(e, b)] != b:
                out.append(Violation("BadUnit", "identity fails on the left", (ids[e], ids[b])))

    for a in range(n_a):
        ai = g.inv[a]
        if not (0 <= ai < n_a) or g.src[ai] != g.dst[a] or g.dst[ai] != g.src[a]:
            out.append(Violation("BadInverse", "inverse endpoints not swapped", (ids[a],)))
            continue
        if g.comp[(ai, a)] != g.unit_arrow[g.src[a]] or g.comp[(a, ai)] != g.unit_arrow[g.dst[a]]:
            out.append(Violation("BadInverse", "a⁻¹∘a or a∘a⁻¹ is not an identity", (ids[a],)))

    for a, b in g.composable_pairs():
        ab = g.comp[(a, b)]
        for c in g.fibre_dst[g.src[b]]:
            if g.comp[(ab, c)] != g.comp[(a, g.comp[(b, c)])]:
                out.append(Violation("NonAssociative", "(a∘b)∘c != a∘(b∘c)", (ids[a], ids[b], ids[c])))
    return out


def build_groupoid(
    units: Sequence[str],
    arrows: Sequence[str],
    src: dict[str, str],
    dst: dict[str, str],
    comp: Iterable[tuple[str, str, str]],
    inv: dict[str, str],
    unit_arrows: Optional[dict[str, str]] = None,
) -> FiniteGroupoid:
    """Assemble and validate a groupoid from id-keyed tables.

    ``unit_arrows`` may be omitted, in which case the identity at each unit
    is inferred (the arrow e with src = dst = u and e∘e = e).  Raises
    GroupoidAxiomError carrying the full list of violations on bad input.
    """
    unit_ids = tuple(units)
    arrow_ids = tuple(arrows)
    u_idx = {u: i for i, u in enumerate(unit_ids)}
    a_idx = {a: i for i, a in enumerate(arrow_ids)}
    if len(u_idx) != len(unit_ids) or len(a_idx) != len(arrow_ids):
        raise GroupoidAxiomError([Violation("DanglingEndpoint", "duplicate ids")])

    def look(table: dict[str, str], key: str, pool: dict[str, int], what: str) -> int:
        val = table.get(key)
        if val is None or val not in pool:
            raise GroupoidAxiomError([Violation("DanglingEndpoint", f"{what}({key}) = {val!r} unknown", (key,))])
        return pool[val]

    src_t = tuple(look(src, a, u_idx, "src") for a in arrow_ids)
    dst_t = tuple(look(dst, a, u_idx, "dst") for a in arrow_ids)
    inv_t = tuple(look(inv, a, a_idx, "inv") for a in arrow_ids)
    comp_t: dict[tuple[int, int], int] = {}
    for a, b, c in comp:
        if a not in a_idx or b not in a_idx or c not in a_idx:
            raise GroupoidAxiomError([Violation("DanglingEndpoint", "comp entry names unknown arrow", (a, b, c))])
        comp_t[(a_idx[a], a_idx[b])] = a_idx[c]

    if unit_arrows is not None:
        ua_t = tuple(look(unit_arrows, u, a_idx, "unit_arrow") for u in unit_ids)
    else:
        ua: list[int] = []
        for u, uid in enumerate(unit_ids):
            cands = [
                a for a in range(len(arrow_ids))
                if src_t[a] == u and dst_t[a] == u and comp_t.get((a, a)) == a
            ]
            cands = [a for a in cands if all(comp_t.get((a, b)) == b for b in range(len(arrow_ids)) if dst_t[b] == u)]
            if len(cands) != 1:
                raise GroupoidAxiomError([Violation("BadUnit", f"cannot infer identity arrow at {uid}", (uid,))])
            ua.append(cands[0])
        ua_t = tuple(ua)

    g = FiniteGroupoid(unit_ids, arrow_ids, src_t, dst_t, comp_t, inv_t, ua_t)
    bad = groupoid_violations(g)
    if bad:
        raise GroupoidAxiomError(bad)
    return g


# ---------------------------------------------------------------------------
# stock constructors


def units_only_groupoid(unit_ids: Sequence[str]) -> FiniteGroupoid:
    """The co-trivial groupoid of a finite set: identity arrows only."""
    n = len(unit_ids)
    return FiniteGroupoid(
        unit_ids=tuple(unit_ids),
        arrow_ids=tuple(f"id:{u}" for u in unit_ids),
        src=tuple(range(n)),
        dst=tuple(range(n)),
        comp={(i, i): i for i in range(n)},
        inv=tuple(range(n)),
        unit_arrow=tuple(range(n)),
    )


def pair_groupoid(unit_ids: Sequence[str]) -> FiniteGroupoid:
    """All ordered pairs (i, j), composing (i,j)∘(j,k) = (i,k)."""
    units = tuple(unit_ids)
    n = len(units)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    idx = {p: k for k, p in enumerate(pairs)}
    return FiniteGroupoid(
        unit_ids=units,
        arrow_ids=tuple(f"({units[i]},{units[j]})" for i, j in pairs),
        src=tuple(j for _, j in pairs),
        dst=tuple(i for i, _ in pairs),
        comp={(idx[(i, j)], idx[(j, k)]): idx[(i, k)] for i in range(n) for j in range(n) for k in range(n)},
        inv=tuple(idx[(j, i)] for i, j in pairs),
        unit_arrow=tuple(idx[(i, i)] for i in range(n)),
    )


def group_groupoid(names: Sequence[str], mult: dict[tuple[str, str], str], identity: str, unit_id: str = "*") -> FiniteGroupoid:
    """A finite group as a one-unit groupoid; mult[(a, b)] = a∘b."""
    names = tuple(names)
    idx = {x: i for i, x in enumerate(names)}
    inv = [None] * len(names)
    e = idx[identity]
    for a in names:
        for b in names:
            if idx[mult[(a, b)]] == e and idx[mult[(b, a)]] == e:
                inv[idx[a]] = idx[b]
    comp = {(idx[a], idx[b]): idx[mult[(a, b)]] for a in names for b in names}
    g = FiniteGroupoid(
        unit_ids=(unit_id,),
        arrow_ids=names,
        src=(0,) * len(names),
        dst=(0,) * len(names),
        comp=comp,
        inv=tuple(inv),  # type: ignore[arg-type]
        unit_arrow=(e,),
    )
    bad = groupoid_violations(g)
    if bad:
        raise GroupoidAxiomError(bad)
    return g


def cyclic_group(n: int, unit_id: str = "*") -> FiniteGroupoid:
    names = [f"g{k}" for k in range(n)]
    mult = {(f"g{a}", f"g{b}"): f"g{(a + b) % n}" for a in range(n) for b in range(n)}
    return group_groupoid(names, mult, "g0", unit_id)


def symmetric_group(n: int, unit_id: str = "*") -> FiniteGroupoid:
    """S_n on {0..n-1} as a one-unit groupoid (meant for tiny n)."""
    perms = sorted(itertools.permutations(range(n)))
    names = ["s" + "".join(map(str, p)) for p in perms]
    name_of = {p: names[i] for i, p in enumerate(perms)}
    mult = {}
    for p in perms:
        for q in perms:
            pq = tuple(p[q[i]] for i in range(n))  # p after q
            mult[(name_of[p], name_of[q])] = name_of[pq]
    return group_groupoid(names, mult, name_of[tuple(range(n))], unit_id)


def disjoint_union(*parts: FiniteGroupoid, tags: Optional[Sequence[str]] = None) -> FiniteGroupoid:
    if tags is None:
        tags = [str(i) for i in range(len(parts))]
    unit_ids: list[str] = []
    arrow_ids: list[str] = []
    src: list[int] = []
    dst: list[int] = []
    inv: list[int] = []
    unit_arrow: list[int] = []
    comp: dict[tuple[int, int], int] = {}
    for tag, g in zip(tags, parts):
        ub, ab = len(unit_ids), len(arrow_ids)
        unit_ids += [f"{tag}.{u}" for u in g.unit_ids]
        arrow_ids += [f"{tag}.{a}" for a in g.arrow_ids]
        src += [ub + u for u in g.src]
        dst += [ub + u for u in g.dst]
        inv += [ab + a for a in g.inv]
        unit_arrow += [ab + a for a in g.unit_arrow]
        comp.update({(ab + a, ab + b): ab + c for (a, b), c in g.comp.items()})
    return FiniteGroupoid(tuple(unit_ids), tuple(arrow_ids), tuple(src), tuple(dst), comp, tuple(inv), tuple(unit_arrow))


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True, eq=False)
class GSpaceAction:
    """A groupoid action on a finite point set.

    ``momentum`` anchors the action (the range-style map for left actions,
    the source-style map for right actions).  ``table`` is keyed
    (arrow, point) for left actions and (point, arrow) for right actions,
    and is defined exactly on the fibre product.
    """

    side: str  # "left" | "right"
    groupoid: FiniteGroupoid
    point_ids: tuple[str, ...]
    momentum: tuple[int, ...]  # point -> unit
    table: dict[tuple[int, int], int]

    @property
    def n_points(self) -> int:
        return len(self.point_ids)

    def left_apply(self, arrow: int, point: int) -> int:
        return self.table[(arrow, point)]

    def right_apply(self, point: int, arrow: int) -> int:
        return self.table[(point, arrow)]

    @cached_property
    def points_at(self) -> tuple[tuple[int, ...], ...]:
        """Points grouped by momentum unit."""
        out: list[list[int]] = [[] for _ in range(self.groupoid.n_units)]
        for p, u in enumerate(self.momentum):
            out[u].append(p)
        return tuple(tuple(f) for f in out)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """The fibre product: composable (arrow, point) / (point, arrow)."""
        g = self.groupoid
        if self.side == "left":
            for a in range(g.n_arrows):
                for p in self.points_at[g.src[a]]:
                    yield a, p
        else:
            for p in range(self.n_points):
                for a in g.fibre_dst[self.momentum[p]]:
                    yield p, a

    def __repr__(self) -> str:
        return f"GSpaceAction({self.side}, {self.n_points} points over {self.groupoid!r})"


def action_violations(act: GSpaceAction) -> list[Violation]:
    """Check the action axioms: domain, units, compatibility, momentum."""
    out: list[Violation] = []
    g = act.groupoid
    pids, aids = act.point_ids, g.arrow_ids
    needed = set(act.pairs())
    have = set(act.table)
    for key in have - needed:
        out.append(Violation("DanglingEndpoint", "action defined off the fibre product", _act_where(act, key)))
    for key in needed - have:
        out.append(Violation("DanglingEndpoint", "action missing on the fibre product", _act_where(act, key)))
    if out:
        return out

    if act.side == "left":
        for a, p in needed:
            q = act.table[(a, p)]
            if act.momentum[q] != g.dst[a]:
                out.append(Violation("DanglingEndpoint", "momentum of γ·x is not dst(γ)", (aids[a], pids[p])))
        if out:  # compatibility sweeps chain lookups; stop while keys still resolve
            return out
        for p in range(act.n_points):
            e = g.unit_arrow[act.momentum[p]]
            if act.table[(e, p)] != p:
                out.append(Violation("BadUnit", "unit arrow moves a point", (pids[p],)))
        for a, b in g.composable_pairs():
            for p in act.points_at[g.src[b]]:
                if act.table[(g.comp[(a, b)], p)] != act.table[(a, act.table[(b, p)])]:
                    out.append(Violation("NonAssociative", "(a∘b)·x != a·(b·x)", (aids[a], aids[b], pids[p])))
    else:
        for p, a in needed:
            q = act.table[(p, a)]
            if act.momentum[q] != g.src[a]:
                out.append(Violation("DanglingEndpoint", "momentum of x·γ is not src(γ)", (pids[p], aids[a])))
        if out:
            return out
        for p in range(act.n_points):
            e = g.unit_arrow[act.momentum[p]]
            if act.table[(p, e)] != p:
                out.append(Violation("BadUnit", "unit arrow moves a point", (pids[p],)))
        for a, b in g.composable_pairs():
            for p in act.points_at[g.dst[a]]:
                if act.table[(p, g.comp[(a, b)])] != act.table[(act.table[(p, a)], b)]:
                    out.append(Violation("NonAssociative", "x·(a∘b) != (x·a)·b", (pids[p], aids[a], aids[b])))
    return out


def _act_where(act: GSpaceAction, key: tuple[int, int]) -> tuple[str, str]:
    if act.side == "left":
        a, p = key
        return (act.groupoid.arrow_ids[a], act.point_ids[p])
    p, a = key
    return (act.point_ids[p], act.groupoid.arrow_ids[a])


def make_action(side, groupoid, point_ids, momentum, table) -> GSpaceAction:
    act = GSpaceAction(side, groupoid, tuple(point_ids), tuple(momentum), dict(table))
    bad = action_violations(act)
    if bad:
        raise GroupoidAxiomError(bad)
    return act


def trivial_action(side: str, groupoid: FiniteGroupoid, point_ids: Sequence[str], momentum: Sequence[int]) -> GSpaceAction:
    """Action of a units-only groupoid (only identities act)."""
    momentum = tuple(momentum)
    table = {}
    for p, u in enumerate(momentum):
        e = groupoid.unit_arrow[u]
        table[(e, p) if side == "left" else (p, e)] = p
    return make_action(side, groupoid, point_ids, momentum, table)


def translation_action(side: str, g: FiniteGroupoid) -> GSpaceAction:
    """A group(oid) acting on its own arrow set by translation.

    Left: γ·a = γ∘a with momentum dst(a); right: a·γ = a∘γ with momentum
    src(a).  For a one-unit groupoid this is translation of the group on
    itself.
    """
    if side == "left":
        table = {(a, b): g.comp[(a, b)] for a, b in g.composable_pairs()}
        return make_action("left", g, g.arrow_ids, g.dst, table)
    table = {(b, a): g.comp[(b, a)] for b, a in g.composable_pairs()}
    return make_action("right", g, g.arrow_ids, g.src, table)


@dataclass(frozen=True, eq=False)
class Bispace:
    """Commuting left/right actions on the same point set."""

    left: GSpaceAction
    right: GSpaceAction

    @property
    def point_ids(self) -> tuple[str, ...]:
        return self.left.point_ids

    @property
    def n_points(self) -> int:
        return self.left.n_points

    def r_momentum(self, p: int) -> int:
        return self.left.momentum[p]

    def s_momentum(self, p: int) -> int:
        return self.right.momentum[p]


def bispace_violations(b: Bispace) -> list[Violation]:
    out: list[Violation] = []
    if b.left.side != "left" or b.right.side != "right":
        out.append(Violation("DanglingEndpoint", "bispace sides are mislabeled"))
        return out
    if b.left.point_ids != b.right.point_ids:
        out.append(Violation("DanglingEndpoint", "left/right actions disagree on the point set"))
        return out
    out += action_violations(b.left)
    out += action_violations(b.right)
    if out:
        return out
    pids = b.point_ids
    for a, p in b.left.pairs():
        q = b.left.table[(a, p)]
        if b.right.momentum[q] != b.right.momentum[p]:
            out.append(Violation("DanglingEndpoint", "left action moves the right momentum", (b.left.groupoid.arrow_ids[a], pids[p])))
    for p, c in b.right.pairs():
        q = b.right.table[(p, c)]
        if b.left.momentum[q] != b.left.momentum[p]:
            out.append(Violation("DanglingEndpoint", "right action moves the left momentum", (pids[p], b.right.groupoid.arrow_ids[c])))
    if out:  # the commutation sweep chains lookups across both actions
        return out
    for a, p in b.left.pairs():
        for c in b.right.groupoid.fibre_dst[b.right.momentum[p]]:
            lhs = b.right.table[(b.left.table[(a, p)], c)]
            rhs = b.left.table[(a, b.right.table[(p, c)])]
            if lhs != rhs:
                out.append(Violation("NonAssociative", "(γ·x)·η != γ·(x·η)", (b.left.groupoid.arrow_ids[a], pids[p], b.right.groupoid.arrow_ids[c])))
    return out


def make_bispace(left: GSpaceAction, right: GSpaceAction) -> Bispace:
    b = Bispace(left, right)
    bad = bispace_violations(b)
    if bad:
        raise GroupoidAxiomError(bad)
    return b


# ---------------------------------------------------------------------------
# transformation groupoids, properness, fibre products, orbit spaces


def transformation_groupoid(act: GSpaceAction) -> tuple[FiniteGroupoid, dict[tuple[int, int], int]]:
    """The action groupoid; units are the points.

    Right actions: arrow (z, γ) runs z·γ -> z and (z,γ)∘(zγ,η) = (z, γ∘η).
    Left actions: arrow (γ, x) runs x -> γ·x and (γ, ηx)∘(η, x) = (γ∘η, x).
    Also returns the lookup from table keys to arrow indices.
    """
    g = act.groupoid
    keys = list(act.pairs())
    idx = {k: i for i, k in enumerate(keys)}
    if act.side == "right":
        arrow_ids = tuple(f"({act.point_ids[p]};{g.arrow_ids[a]})" for p, a in keys)
        src = tuple(act.table[k] for k in keys)  # z·γ
        dst = tuple(k[0] for k in keys)  # z
        inv = tuple(idx[(act.table[k], g.inv[k[1]])] for k in keys)
        unit_arrow = tuple(idx[(p, g.unit_arrow[act.momentum[p]])] for p in range(act.n_points))
        comp = {}
        for i, (p, a) in enumerate(keys):
            pa = act.table[(p, a)]
            for b in g.fibre_dst[g.src[a]]:
                comp[(i, idx[(pa, b)])] = idx[(p, g.comp[(a, b)])]
    else:
        arrow_ids = tuple(f"({g.arrow_ids[a]};{act.point_ids[p]})" for a, p in keys)
        src = tuple(k[1] for k in keys)  # x
        dst = tuple(act.table[k] for k in keys)  # γ·x
        inv = tuple(idx[(g.inv[k[0]], act.table[k])] for k in keys)
        unit_arrow = tuple(idx[(g.unit_arrow[act.momentum[p]], p)] for p in range(act.n_points))
        comp = {}
        for i, (a, p) in enumerate(keys):
            ap = act.table[(a, p)]
            for b in g.fibre_src[g.dst[a]]:  # b with src(b) = dst(a): b∘a defined
                comp[(idx[(b, ap)], i)] = idx[(g.comp[(b, a)], p)]
    tg = FiniteGroupoid(act.point_ids, arrow_ids, src, dst, comp, inv, unit_arrow)
    return tg, idx


@dataclass(frozen=True)
class ProperEvidence:
    """Finiteness evidence mirroring the compact-fibre hypothesis."""

    proper: bool
    fibre_card: dict[tuple[str, str], int]  # (u, v) -> |arrows v -> u|

    @property
    def max_card(self) -> int:
        return max(self.fibre_card.values(), default=0)


def check_proper(g: FiniteGroupoid) -> ProperEvidence:
    """Always proper at finite scale; returns all two-sided fibre sizes."""
    card: dict[tuple[str, str], int] = {
        (u, v): 0 for u in g.unit_ids for v in g.unit_ids
    }
    for a in range(g.n_arrows):
        card[(g.unit_ids[g.dst[a]], g.unit_ids[g.src[a]])] += 1
    return ProperEvidence(True, card)


@dataclass(frozen=True)
class OrbitSpace:
    orbit_ids: tuple[str, ...]
    proj: tuple[int, ...]  # point -> orbit
    reps: tuple[int, ...]  # orbit -> representative point (smallest id)

    @property
    def n_orbits(self) -> int:
        return len(self.orbit_ids)

    @cached_property
    def members(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.orbit_ids]
        for p, o in enumerate(self.proj):
            out[o].append(p)
        return tuple(tuple(m) for m in out)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if x != y:
            self.parent[y] = x


def orbit_space(act: GSpaceAction) -> OrbitSpace:
    """Orbits of the action, with deterministic representatives.

    Each orbit's representative is its lexicographically smallest point id,
    and orbits are ordered by representative id, so downstream golden files
    are stable.
    """
    uf = _UnionFind(act.n_points)
    for key in act.pairs():
        p = key[1] if act.side == "left" else key[0]
        uf.union(p, act.table[key])
    groups: dict[int, list[int]] = {}
    for p in range(act.n_points):
        groups.setdefault(uf.find(p), []).append(p)
    orbits = sorted(groups.values(), key=lambda ps: min(act.point_ids[p] for p in ps))
    reps = tuple(min(ps, key=lambda p: act.point_ids[p]) for ps in orbits)
    proj = [0] * act.n_points
    for o, ps in enumerate(orbits):
        for p in ps:
            proj[p] = o
    orbit_ids = tuple(f"[{act.point_ids[r]}]" for r in reps)
    return OrbitSpace(orbit_ids, tuple(proj), reps)


def unit_action(g: FiniteGroupoid) -> GSpaceAction:
    """The canonical left action of a groupoid on its own units: γ·src(γ) = dst(γ)."""
    table = {(a, g.src[a]): g.dst[a] for a in range(g.n_arrows)}
    return make_action("left", g, g.unit_ids, tuple(range(g.n_units)), table)


@dataclass(frozen=True)
class FibreProduct:
    """Pairs (x, y) matching right momentum of X with left momentum of Y."""

    point_ids: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...]  # (x index, y index)
    index: dict[tuple[int, int], int]
    diagonal: GSpaceAction  # right action of the middle groupoid


def fibre_product(x_right: GSpaceAction, y_left: GSpaceAction) -> FibreProduct:
    """Z = {(x, y) : s_X(x) = r_Y(y)} with the diagonal (x,y)·γ = (xγ, γ⁻¹y)."""
    if x_right.side != "right" or y_left.side != "left":
        raise GroupoidAxiomError([Violation("DanglingEndpoint", "fibre product needs a right and a left action")])
    if x_right.groupoid is not y_left.groupoid and x_right.groupoid != y_left.groupoid:
        raise GroupoidAxiomError([Violation("DanglingEndpoint", "actions live over different middle groupoids")])
    g = x_right.groupoid
    pairs = tuple(
        (x, y)
        for x in range(x_right.n_points)
        for y in y_left.points_at[x_right.momentum[x]]
    )
    index = {p: i for i, p in enumerate(pairs)}
    ids = tuple(f"({x_right.point_ids[x]},{y_left.point_ids[y]})" for x, y in pairs)
    momentum = tuple(x_right.momentum[x] for x, _ in pairs)
    table = {}
    for i, (x, y) in enumerate(pairs):
        for a in g.fibre_dst[momentum[i]]:
            table[(i, a)] = index[(x_right.table[(x, a)], y_left.table[(g.inv[a], y)])]
    diag = GSpaceAction("right", g, ids, momentum, table)
    return FibreProduct(ids, pairs, index, diag)


# ---------------------------------------------------------------------------
# brute-force isomorphism (tiny test helper)


def find_groupoid_isomorphism(a: FiniteGroupoid, b: FiniteGroupoid, max_arrows: int = 16):
    """Search all unit/arrow bijections; None if not isomorphic.

    Deliberately naive: meant for table comparisons in tests on instances
    with at most `max_arrows` arrows.
    """
    if a.n_units != b.n_units or a.n_arrows != b.n_arrows:
        return None
    if a.n_arrows > max_arrows:
        raise ValueError("instance too large for the brute-force helper")
    for uperm in itertools.permutations(range(b.n_units)):
        grouped: list[list[int]] = []
        ok = True
        for x in range(a.n_arrows):
            cands = [
                y
                for y in range(b.n_arrows)
                if b.src[y] == uperm[a.src[x]] and b.dst[y] == uperm[a.dst[x]]
            ]
            if not cands:
                ok = False
                break
            grouped.append(cands)
        if not ok:
            continue
        for assign in itertools.product(*grouped):
            if len(set(assign)) != a.n_arrows:
                continue
            if all(
                b.comp.get((assign[x], assign[y])) == assign[c]
                for (x, y), c in a.comp.items()
            ) and all(b.inv[assign[x]] == assign[a.inv[x]] for x in range(a.n_arrows)):
                return {"units": dict(enumerate(uperm)), "arrows": dict(enumerate(assign))}
    return None
