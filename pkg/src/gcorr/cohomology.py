"""1-cocycles on finite groupoids and the canonical coboundary solver.

Every finite groupoid is proper, so every real-valued 1-cocycle is the
coboundary of a 0-cochain.  The solver integrates the cocycle against the
canonical invariant family of probability measures (built from the Haar
system with the constant test function), which pins one specific cochain
out of the orbit-constant ambiguity and makes downstream composites
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .groupoids import FiniteGroupoid
from .measures import HaarSystem
from .util import GcorrError, ONE, Scalar, adev, all_exact, is_exact, ksum, rdev

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


class NotACocycle(GcorrError):
    def __init__(self, witness, deviation):
        self.witness = witness
        self.deviation = deviation
        super().__init__(f"homomorphism identity fails at {witness} (dev {deviation})")


class NonPositive(GcorrError):
    pass


@dataclass(frozen=True, eq=False)
class Cocycle1:
    groupoid: FiniteGroupoid
    value: tuple[Scalar, ...]  # per arrow
    flavor: str  # ADDITIVE (ℝ-valued) | MULTIPLICATIVE (ℝ⁺-valued)

    def __post_init__(self):
        if self.flavor not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor == MULTIPLICATIVE and any(not (v > 0) for v in self.value):
            raise NonPositive("multiplicative cocycle values must be positive")


@dataclass(frozen=True, eq=False)
class Cochain0:
    groupoid: FiniteGroupoid
    value: tuple[Scalar, ...]  # per unit
    flavor: str

    def __post_init__(self):
        if self.flavor == MULTIPLICATIVE and any(not (v > 0) for v in self.value):
            raise NonPositive("multiplicative cochain values must be positive")


@dataclass(frozen=True, eq=False)
class ProbabilityFamily:
    """Nonnegative arrow weights fibred along dst, each fibre of mass 1,
    invariant under left translation."""

    groupoid: FiniteGroupoid
    weight: tuple[Scalar, ...]


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    max_deviation: float
    witness: Optional[tuple[str, ...]]


def check_cocycle(c: Cocycle1, rel_tol: Optional[float] = None) -> CocycleCheck:
    """Homomorphism identity on all composable pairs, identities at units.

    Exact inputs are compared exactly; float inputs use `rel_tol`
    (default 1e-9, the post-exponentiation tolerance).
    """
    g = c.groupoid
    exact = all_exact(c.value)
    tol = 0.0 if exact and rel_tol is None else (1e-9 if rel_tol is None else rel_tol)
    ident = 0 if c.flavor == ADDITIVE else 1
    worst = 0.0
    witness = None

    for u in range(g.n_units):
        d = rdev(c.value[g.unit_arrow[u]], ident)
        if d > worst:
            worst, witness = d, (g.arrow_ids[g.unit_arrow[u]],)
    for a, b in g.composable_pairs():
        lhs = c.value[g.comp[(a, b)]]
        rhs = c.value[a] + c.value[b] if c.flavor == ADDITIVE else c.value[a] * c.value[b]
        d = rdev(lhs, rhs)
        if d > worst:
            worst, witness = d, (g.arrow_ids[a], g.arrow_ids[b])
    return CocycleCheck(worst <= tol, worst, witness if worst > tol else None)


def d0(t: Cochain0) -> Cocycle1:
    """The coboundary of a 0-cochain: t∘src - t∘dst, or t∘src / t∘dst."""
    g = t.groupoid
    if t.flavor == ADDITIVE:
        vals = tuple(t.value[g.src[a]] - t.value[g.dst[a]] for a in range(g.n_arrows))
    else:
        vals = tuple(t.value[g.src[a]] / t.value[g.dst[a]] for a in range(g.n_arrows))
    return Cocycle1(g, vals, t.flavor)


def invariant_probability_family(
    g: FiniteGroupoid,
    haar: HaarSystem,
    F: Optional[Sequence[Scalar]] = None,
) -> ProbabilityFamily:
    """Normalize the Haar system into an invariant probability family.

    h(u) = sum over the range fibre at u of F(src γ)·w(γ) is checked to be
    orbit-constant, then each fibre weight is F(src γ)·w(γ)/h(u).  F
    defaults to the constant 1; only its values up to a per-orbit scale
    matter.
    """
    if haar.groupoid is not g and haar.groupoid != g:
        raise ValueError("Haar system lives on a different groupoid")
    if F is None:
        F = (ONE,) * g.n_units
    if any(not (f > 0) for f in F):
        raise NonPositive("F must be strictly positive")
    h = [ksum(F[g.src[a]] * haar.w(a) for a in g.fibre_dst[u]) for u in range(g.n_units)]
    for a in range(g.n_arrows):  # h constant along arrows => constant on orbits
        if adev(h[g.src[a]], h[g.dst[a]]) > (0.0 if all_exact(h) else 1e-12):
            raise GcorrError(f"fibre mass is not orbit-constant at {g.arrow_ids[a]}")
    weight = tuple(
        F[g.src[a]] * haar.w(a) / h[g.dst[a]] for a in range(g.n_arrows)
    )
    return ProbabilityFamily(g, weight)


def probability_family_violation(p: ProbabilityFamily) -> float:
    """Worst deviation from fibre mass one and from translation invariance."""
    g = p.groupoid
    worst = 0.0
    for u in range(g.n_units):
        worst = max(worst, adev(ksum(p.weight[a] for a in g.fibre_dst[u]), 1))
    # invariance on indicator functions: p(η⁻¹δ) = p(δ) for δ in the fibre at dst(η)
    for eta in range(g.n_arrows):
        for delta in g.fibre_dst[g.dst[eta]]:
            worst = max(worst, adev(p.weight[g.comp[(g.inv[eta], delta)]], p.weight[delta]))
    return worst


def solve_coboundary_additive(c: Cocycle1, p: ProbabilityFamily) -> Cochain0:
    """Split an additive cocycle as b∘src - b∘dst.

    b(u) is minus the p-average of the cocycle over the range fibre at u
    (the sign makes the stated identity come out; averaging c itself splits
    the cocycle with the opposite sign).  Raises NotACocycle if c fails the
    homomorphism sweep.
    """
    if c.flavor != ADDITIVE:
        raise ValueError("expected an additive cocycle")
    g = c.groupoid
    chk = check_cocycle(c)
    if not chk.ok:
        raise NotACocycle(chk.witness, chk.max_deviation)
    vals = tuple(
        -ksum(c.value[a] * p.weight[a] for a in g.fibre_dst[u])
        for u in range(g.n_units)
    )
    return Cochain0(g, vals, ADDITIVE)


def coboundary_residual(c: Cocycle1, b: Cochain0) -> float:
    """max over arrows of |c - (b∘src - b∘dst)| (or the ratio version)."""
    g = c.groupoid
    worst = 0.0
    for a in range(g.n_arrows):
        if c.flavor == ADDITIVE:
            worst = max(worst, adev(c.value[a], b.value[g.src[a]] - b.value[g.dst[a]]))
        else:
            worst = max(worst, rdev(c.value[a] * b.value[g.dst[a]], b.value[g.src[a]]))
    return worst


def decompose_multiplicative(delta: Cocycle1, p: ProbabilityFamily, rel_tol: float = 1e-9) -> Cochain0:
    """Positive b with b∘src / b∘dst = delta.

    Goes through log/exp in double precision, except that the trivial
    cocycle keeps the pipeline exact (b ≡ 1).  The ratio identity is
    re-verified to `rel_tol`.
    """
    if delta.flavor != MULTIPLICATIVE:
        raise ValueError("expected a multiplicative cocycle")
    g = delta.groupoid
    chk = check_cocycle(delta)
    if not chk.ok:
        raise NotACocycle(chk.witness, chk.max_deviation)
    if all(is_exact(v) and Fraction(v) == 1 for v in delta.value):
        return Cochain0(g, (ONE,) * g.n_units, MULTIPLICATIVE)
    logc = Cocycle1(g, tuple(math.log(float(v)) for v in delta.value), ADDITIVE)
    under = solve_coboundary_additive(logc, p)
    b = Cochain0(g, tuple(math.exp(v) for v in under.value), MULTIPLICATIVE)
    res = coboundary_residual(delta, b)
    if res > rel_tol:
        raise NotACocycle(None, res)
    return b
