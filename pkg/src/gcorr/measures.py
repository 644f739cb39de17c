"""Families of measures along maps, Haar systems, and measure push-downs.

A family of measures along f: T -> B is stored as one strictly positive
weight per point of T; the measure attached to b in B is the restriction of
that weight table to the fibre f⁻¹(b).  Haar systems are the special case
T = arrows, f = dst, subject to left invariance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .groupoids import FiniteGroupoid, OrbitSpace
from .util import GcorrError, Scalar, adev, all_exact, ksum


class NotHaar(GcorrError):
    def __init__(self, witness, max_violation):
        self.witness = witness
        self.max_violation = max_violation
        super().__init__(f"left invariance fails at {witness}, violation {max_violation}")


class NotInvariant(GcorrError):
    def __init__(self, residual, message="measure is not symmetric"):
        self.residual = residual
        super().__init__(f"{message} (residual {residual})")


@dataclass(frozen=True, eq=False)
class MeasureFamily:
    """Strictly positive weights on `total_ids` fibred along `along`."""

    total_ids: tuple[str, ...]
    base_ids: tuple[str, ...]
    along: tuple[int, ...]  # total -> base
    weight: tuple[Scalar, ...]

    def __post_init__(self):
        for t, w in enumerate(self.weight):
            if not (w > 0):
                raise ValueError(
                    f"full support violated: weight({self.total_ids[t]}) = {w}"
                )

    @cached_property
    def fibres(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.base_ids]
        for t, b in enumerate(self.along):
            out[b].append(t)
        return tuple(tuple(f) for f in out)

    def mass(self, b: int) -> Scalar:
        return ksum(self.weight[t] for t in self.fibres[b])

    @property
    def exact(self) -> bool:
        return all_exact(self.weight)

    def __repr__(self) -> str:
        return f"MeasureFamily({len(self.total_ids)} points over {len(self.base_ids)} base)"


def unit_measure(g: FiniteGroupoid, weights: Sequence[Scalar]) -> MeasureFamily:
    """A single measure on the unit space (family over a one-point base)."""
    return MeasureFamily(g.unit_ids, ("*",), (0,) * g.n_units, tuple(weights))


@dataclass(frozen=True, eq=False)
class HaarSystem:
    groupoid: FiniteGroupoid
    family: MeasureFamily  # total = arrows, along = dst

    def w(self, arrow: int) -> Scalar:
        return self.family.weight[arrow]

    @property
    def exact(self) -> bool:
        return self.family.exact

    def __eq__(self, other) -> bool:
        if not isinstance(other, HaarSystem):
            return NotImplemented
        return self.groupoid == other.groupoid and self.family.weight == other.family.weight


@dataclass(frozen=True)
class HaarCheck:
    ok: bool
    max_violation: float
    witness: Optional[tuple[str, str]]  # (η, γ) with weight(ηγ) != weight(γ)


def check_haar(g: FiniteGroupoid, family: MeasureFamily) -> HaarCheck:
    """Left invariance: weight(η∘γ) = weight(γ) on every composable pair."""
    if len(family.total_ids) != g.n_arrows or family.along != g.dst:
        raise ValueError("family must live on the arrows along dst")
    worst = 0.0
    witness = None
    for a, b in g.composable_pairs():
        d = adev(family.weight[g.comp[(a, b)]], family.weight[b])
        if d > worst:
            worst = d
            witness = (g.arrow_ids[a], g.arrow_ids[b])
    return HaarCheck(worst == 0.0, worst, witness if worst else None)


def make_haar(g: FiniteGroupoid, weights: Sequence[Scalar]) -> HaarSystem:
    fam = MeasureFamily(g.arrow_ids, g.unit_ids, g.dst, tuple(weights))
    chk = check_haar(g, fam)
    if not chk.ok:
        raise NotHaar(chk.witness, chk.max_violation)
    return HaarSystem(g, fam)


def counting_haar(g: FiniteGroupoid) -> HaarSystem:
    from .util import ONE

    return make_haar(g, (ONE,) * g.n_arrows)


def haar_from_unit_weights(g: FiniteGroupoid, unit_w: Sequence[Scalar]) -> HaarSystem:
    """Haar system with weight(γ) = unit_w(src(γ)).

    Left invariance forces every finite Haar weight table into this shape
    (compose with the identity at the source); the constructor still
    re-validates.
    """
    return make_haar(g, tuple(unit_w[g.src[a]] for a in range(g.n_arrows)))


@dataclass(frozen=True, eq=False)
class GroupoidMeasure:
    """A single measure on the arrow set (m∘λ and friends)."""

    groupoid: FiniteGroupoid
    weight: tuple[Scalar, ...]


def induced_measure(m: MeasureFamily, haar: HaarSystem, direction: str) -> GroupoidMeasure:
    """m∘λ ("forward") or m∘λ⁻¹ ("inverse") on the arrows.

    Forward weighs γ by m(dst γ)·λ(γ); inverse by m(src γ)·λ(γ⁻¹).
    """
    g = haar.groupoid
    if len(m.total_ids) != g.n_units or len(m.base_ids) != 1:
        raise ValueError("m must be a single measure on the unit space")
    if direction == "forward":
        w = tuple(m.weight[g.dst[a]] * haar.w(a) for a in range(g.n_arrows))
    elif direction == "inverse":
        w = tuple(m.weight[g.src[a]] * haar.w(g.inv[a]) for a in range(g.n_arrows))
    else:
        raise ValueError("direction must be 'forward' or 'inverse'")
    return GroupoidMeasure(g, w)


@dataclass(frozen=True)
class SymmetryCheck:
    symmetric: bool
    residual: float


def is_symmetric(m: MeasureFamily, haar: HaarSystem, tol: float = 0.0) -> SymmetryCheck:
    """Whether m∘λ = m∘λ⁻¹ arrow by arrow; residual is the worst |difference|."""
    fwd = induced_measure(m, haar, "forward").weight
    inv = induced_measure(m, haar, "inverse").weight
    if all_exact(fwd) and all_exact(inv):
        residual = max((adev(a, b) for a, b in zip(fwd, inv)), default=0.0)
        return SymmetryCheck(residual == 0.0, residual)
    residual = 0.0
    scale = 1.0
    for a, b in zip(fwd, inv):
        residual = max(residual, adev(a, b))
        scale = max(scale, abs(float(a)), abs(float(b)))
    return SymmetryCheck(residual <= tol * scale, residual)


def quotient_family(haar: HaarSystem, orbits: OrbitSpace) -> MeasureFamily:
    """The family induced along the orbit projection of the unit space.

    The measure at an orbit weighs a unit v by the Haar mass of the arrows
    from v into the stored representative; invariance makes the choice of
    representative immaterial.
    """
    g = haar.groupoid
    if len(orbits.proj) != g.n_units:
        raise ValueError("orbit space does not match the unit space")
    weight = [None] * g.n_units
    for o in range(orbits.n_orbits):
        rep = orbits.reps[o]
        for a in g.fibre_dst[rep]:
            v = g.src[a]
            weight[v] = haar.w(a) if weight[v] is None else weight[v] + haar.w(a)
    if any(w is None for w in weight):
        raise ValueError("some unit is unreachable from its orbit representative")
    return MeasureFamily(g.unit_ids, orbits.orbit_ids, orbits.proj, tuple(weight))


def fibre_masses(haar: HaarSystem) -> tuple[Scalar, ...]:
    """Total Haar mass of each range fibre; constant along unit orbits."""
    g = haar.groupoid
    return tuple(ksum(haar.w(a) for a in g.fibre_dst[u]) for u in range(g.n_units))


def default_cutoff(haar: HaarSystem) -> tuple[Scalar, ...]:
    """e = 1/h with h the range-fibre mass; normalizes to 1 on every fibre."""
    return tuple(1 / h for h in fibre_masses(haar))


def cutoff_from_profile(haar: HaarSystem, profile: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """Normalize any positive profile F into a cutoff e = F / h_F.

    h_F(u) sums F(src γ) against the fibre at u and is constant along
    orbits, which is exactly what makes e integrate to one on every fibre.
    """
    g = haar.groupoid
    h = [
        ksum(profile[g.src[a]] * haar.w(a) for a in g.fibre_dst[u])
        for u in range(g.n_units)
    ]
    return tuple(profile[u] / h[u] for u in range(g.n_units))


def cutoff_residual(haar: HaarSystem, e: Sequence[Scalar]) -> float:
    """How far e is from satisfying sum over the fibre of e(src γ)·λ(γ) = 1."""
    g = haar.groupoid
    worst = 0.0
    for u in range(g.n_units):
        total = ksum(e[g.src[a]] * haar.w(a) for a in g.fibre_dst[u])
        worst = max(worst, adev(total, 1))
    return worst


def push_measure_down(
    m: MeasureFamily,
    haar: HaarSystem,
    orbits: OrbitSpace,
    e: Optional[Sequence[Scalar]] = None,
    tol: float = 1e-9,
) -> MeasureFamily:
    """Push an invariant measure on the units down to the orbit space.

    Returns the unique measure μ with μ∘[λ] = m.  Requires m symmetric
    (within `tol` on float data) and e a normalized cutoff; the result does
    not depend on the choice of e.
    """
    g = haar.groupoid
    sym = is_symmetric(m, haar, tol)
    if not sym.symmetric:
        raise NotInvariant(sym.residual)
    if e is None:
        e = default_cutoff(haar)
    if cutoff_residual(haar, e) > (0.0 if all_exact(e) and haar.exact else tol):
        raise ValueError("cutoff is not normalized on every fibre")
    weights = tuple(
        ksum(m.weight[v] * e[v] for v in orbits.members[o])
        for o in range(orbits.n_orbits)
    )
    mu = MeasureFamily(orbits.orbit_ids, ("*",), (0,) * orbits.n_orbits, weights)
    # postcondition μ∘[λ] = m
    ql = quotient_family(haar, orbits)
    worst = 0.0
    for v in range(g.n_units):
        worst = max(worst, adev(mu.weight[orbits.proj[v]] * ql.weight[v], m.weight[v]))
    if worst > (0.0 if mu.exact and ql.exact and m.exact else tol):
        raise NotInvariant(worst, "push-down failed to disintegrate m")
    return mu


def compose_with_quotient(mu: MeasureFamily, haar: HaarSystem, orbits: OrbitSpace) -> MeasureFamily:
    """μ∘[λ]: the measure on the units induced by a measure on the orbits."""
    ql = quotient_family(haar, orbits)
    weight = tuple(
        mu.weight[orbits.proj[v]] * ql.weight[v] for v in range(haar.groupoid.n_units)
    )
    return unit_measure(haar.groupoid, weight)
