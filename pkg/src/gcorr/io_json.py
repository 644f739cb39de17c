"""Versioned JSON interchange for groupoids and correspondences.

Weights travel as strings ("3/4" or "0.25") when exact and as JSON numbers
when inexact; parsing is the mirror image, so a file round-trips to
canonical form byte-identically.  All referential integrity problems raise
ParseError with a path into the document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .correspondence import Correspondence, make_correspondence
from .groupoids import (
    GSpaceAction,
    GroupoidAxiomError,
    make_action,
    make_bispace,
)
from .measures import HaarSystem, MeasureFamily, make_haar
from .util import GcorrError, format_scalar, parse_scalar

FORMAT = "gcorr"
VERSION = 1


class ParseError(GcorrError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class InstanceData:
    groupoids: dict[str, HaarSystem]
    correspondences: list[tuple[str, Correspondence]] = field(default_factory=list)


def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise ParseError(path, f"missing field {key!r}")
    return obj[key]


def _parse_groupoid(name: str, doc: dict, path: str) -> HaarSystem:
    units = _need(doc, "units", path)
    arrows = _need(doc, "arrows", path)
    try:
        from .groupoids import build_groupoid

        g = build_groupoid(
            units,
            arrows,
            _need(doc, "src", path),
            _need(doc, "dst", path),
            [tuple(entry) for entry in _need(doc, "comp", path)],
            _need(doc, "inv", path),
            doc.get("unit_arrows"),
        )
    except GroupoidAxiomError as exc:
        raise ParseError(path, str(exc)) from exc
    haar_doc = _need(doc, "haar", path)
    weights = []
    for a in arrows:
        if a not in haar_doc:
            raise ParseError(f"{path}.haar", f"missing weight for arrow {a!r}")
        try:
            w = parse_scalar(haar_doc[a])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{path}.haar.{a}", str(exc)) from exc
        if not (w > 0):
            raise ParseError(f"{path}.haar.{a}", f"weight must be positive, got {w}")
        weights.append(w)
    try:
        return make_haar(g, tuple(weights))
    except GcorrError as exc:
        raise ParseError(f"{path}.haar", str(exc)) from exc


def _parse_action(side, haar, points, momentum_doc, table_doc, path) -> GSpaceAction:
    g = haar.groupoid
    p_idx = {p: i for i, p in enumerate(points)}
    momentum = []
    for p in points:
        u = momentum_doc.get(p)
        if u not in g._unit_lookup:
            raise ParseError(f"{path}.momentum.{p}", f"unknown unit {u!r}")
        momentum.append(g.unit_index(u))
    table = {}
    for k, entry in enumerate(table_doc):
        if len(entry) != 3:
            raise ParseError(f"{path}[{k}]", "expected a triple")
        if side == "left":
            a, p, q = entry
            if a not in g._arrow_lookup or p not in p_idx or q not in p_idx:
                raise ParseError(f"{path}[{k}]", f"unknown id in {entry}")
            table[(g.arrow_index(a), p_idx[p])] = p_idx[q]
        else:
            p, a, q = entry
            if a not in g._arrow_lookup or p not in p_idx or q not in p_idx:
                raise ParseError(f"{path}[{k}]", f"unknown id in {entry}")
            table[(p_idx[p], g.arrow_index(a))] = p_idx[q]
    try:
        return make_action(side, g, tuple(points), tuple(momentum), table)
    except GroupoidAxiomError as exc:
        raise ParseError(path, str(exc)) from exc


def _parse_correspondence(idx, doc, groupoids, path) -> tuple[str, Correspondence]:
    name = doc.get("name", f"corr{idx}")
    left_name = _need(doc, "left", path)
    right_name = _need(doc, "right", path)
    for gname in (left_name, right_name):
        if gname not in groupoids:
            raise ParseError(path, f"unknown groupoid {gname!r}")
    left_haar = groupoids[left_name]
    right_haar = groupoids[right_name]
    space_doc = _need(doc, "space", path)
    points = _need(space_doc, "points", f"{path}.space")
    if len(set(points)) != len(points):
        raise ParseError(f"{path}.space.points", "duplicate point ids")
    left = _parse_action(
        "left", left_haar, points,
        _need(space_doc, "left_momentum", f"{path}.space"),
        _need(space_doc, "left_action", f"{path}.space"),
        f"{path}.space.left_action",
    )
    right = _parse_action(
        "right", right_haar, points,
        _need(space_doc, "right_momentum", f"{path}.space"),
        _need(space_doc, "right_action", f"{path}.space"),
        f"{path}.space.right_action",
    )
    try:
        space = make_bispace(left, right)
    except GroupoidAxiomError as exc:
        raise ParseError(f"{path}.space", str(exc)) from exc

    fam_doc = _need(doc, "family", path)
    weights = []
    for p in points:
        if p not in fam_doc:
            raise ParseError(f"{path}.family", f"missing weight for point {p!r}")
        try:
            w = parse_scalar(fam_doc[p])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{path}.family.{p}", str(exc)) from exc
        if not (w > 0):
            raise ParseError(f"{path}.family.{p}", f"weight must be positive, got {w}")
        weights.append(w)
    try:
        family = MeasureFamily(tuple(points), right_haar.groupoid.unit_ids, right.momentum, tuple(weights))
    except ValueError as exc:
        raise ParseError(f"{path}.family", str(exc)) from exc

    adjoining = None
    if "adjoining" in doc:
        from .groupoids import transformation_groupoid

        _, tg_idx = transformation_groupoid(space.left)
        values = [None] * len(tg_idx)
        p_idx = {p: i for i, p in enumerate(points)}
        g = left_haar.groupoid
        for k, entry in enumerate(doc["adjoining"]):
            a, p, raw = entry
            if a not in g._arrow_lookup or p not in p_idx:
                raise ParseError(f"{path}.adjoining[{k}]", f"unknown id in {entry}")
            key = (g.arrow_index(a), p_idx[p])
            if key not in tg_idx:
                raise ParseError(f"{path}.adjoining[{k}]", "pair is not composable")
            values[tg_idx[key]] = parse_scalar(raw)
        if any(v is None for v in values):
            raise ParseError(f"{path}.adjoining", "cocycle values missing for some pairs")
        adjoining = tuple(values)

    try:
        corr = make_correspondence(left_haar, right_haar, space, family, adjoining, check=False)
    except GcorrError as exc:
        raise ParseError(path, str(exc)) from exc
    return name, corr


def parse_instance(text: str, source: str = "<instance>") -> InstanceData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ParseError(source, f"not a {FORMAT} instance file")
    if doc.get("version") != VERSION:
        raise ParseError(source, f"unsupported version {doc.get('version')!r}")
    groupoids = {}
    for name, gdoc in sorted(_need(doc, "groupoids", source).items()):
        groupoids[name] = _parse_groupoid(name, gdoc, f"{source}.groupoids.{name}")
    data = InstanceData(groupoids)
    for i, cdoc in enumerate(doc.get("correspondences", [])):
        data.correspondences.append(
            _parse_correspondence(i, cdoc, groupoids, f"{source}.correspondences[{i}]")
        )
    return data


# ---------------------------------------------------------------------------
# serialization


def _groupoid_doc(haar: HaarSystem) -> dict:
    g = haar.groupoid
    return {
        "units": list(g.unit_ids),
        "arrows": list(g.arrow_ids),
        "src": {g.arrow_ids[a]: g.unit_ids[g.src[a]] for a in range(g.n_arrows)},
        "dst": {g.arrow_ids[a]: g.unit_ids[g.dst[a]] for a in range(g.n_arrows)},
        "comp": sorted(
            [g.arrow_ids[a], g.arrow_ids[b], g.arrow_ids[c]]
            for (a, b), c in g.comp.items()
        ),
        "inv": {g.arrow_ids[a]: g.arrow_ids[g.inv[a]] for a in range(g.n_arrows)},
        "unit_arrows": {g.unit_ids[u]: g.arrow_ids[g.unit_arrow[u]] for u in range(g.n_units)},
        "haar": {g.arrow_ids[a]: format_scalar(haar.w(a)) for a in range(g.n_arrows)},
    }


def _action_doc(act: GSpaceAction) -> tuple[dict, list]:
    g = act.groupoid
    momentum = {act.point_ids[p]: g.unit_ids[act.momentum[p]] for p in range(act.n_points)}
    if act.side == "left":
        table = sorted(
            [g.arrow_ids[a], act.point_ids[p], act.point_ids[q]]
            for (a, p), q in act.table.items()
        )
    else:
        table = sorted(
            [act.point_ids[p], g.arrow_ids[a], act.point_ids[q]]
            for (p, a), q in act.table.items()
        )
    return momentum, table


def serialize_instance(correspondences: list[tuple[str, Correspondence]]) -> str:
    """Canonical JSON text for a list of named correspondences.

    Shared groupoids are registered once (matched structurally), so a
    chainable pair shows its middle groupoid a single time.
    """
    registry: list[tuple[str, HaarSystem]] = []

    def register(haar: HaarSystem) -> str:
        for name, known in registry:
            if known == haar:
                return name
        name = f"G{len(registry)}"
        registry.append((name, haar))
        return name

    corr_docs = []
    for name, corr in correspondences:
        left_name = register(corr.left_haar)
        right_name = register(corr.right_haar)
        lmom, ltab = _action_doc(corr.space.left)
        rmom, rtab = _action_doc(corr.space.right)
        g = corr.left
        adjoining = sorted(
            [g.arrow_ids[a], corr.space.point_ids[p], format_scalar(corr.adjoining.value[k])]
            for (a, p), k in corr.left_tg_index.items()
        )
        corr_docs.append(
            {
                "name": name,
                "left": left_name,
                "right": right_name,
                "space": {
                    "points": list(corr.space.point_ids),
                    "left_momentum": lmom,
                    "right_momentum": rmom,
                    "left_action": ltab,
                    "right_action": rtab,
                },
                "family": {
                    corr.space.point_ids[p]: format_scalar(corr.family.weight[p])
                    for p in range(corr.space.n_points)
                },
                "adjoining": adjoining,
            }
        )
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "groupoids": {name: _groupoid_doc(h) for name, h in registry},
        "correspondences": corr_docs,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
