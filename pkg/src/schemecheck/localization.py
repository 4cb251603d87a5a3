"""Localization of finite rings: the explicit quotient of R × S, its
universal property, and the three-condition localization predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import MalformedInput, NotAUnit
from .ring_core import (
    FiniteRing,
    RingHom,
    Submonoid,
    enumerate_homs,
    s_torsion,
    submonoid_generated_by,
)


@dataclass(frozen=True, eq=False)
class LocalizedRing:
    base: FiniteRing
    monoid: Submonoid
    ring: FiniteRing
    canonical: RingHom
    class_of: dict[tuple[int, int], int]
    representatives: tuple[tuple[int, int], ...]

    def frac(self, r: int, s: int) -> int:
        """Index of the class of r/s."""
        return self.class_of[(r, s)]

    def __repr__(self) -> str:
        return f"LocalizedRing({self.ring.label})"


def _label(R: FiniteRing, S: Submonoid) -> str:
    return f"{R.label}[1/{S}]"


@lru_cache(maxsize=None)
def localize(R: FiniteRing, S: Submonoid) -> LocalizedRing:
    """R[1/S] as classes of pairs (r, s) under (r,s) ~ (r',s') iff t(rs' - r's) = 0 for some t in S.

    Classes are indexed by their least pair in lexicographic (r, s) order.
    """
    if S.ring != R:
        raise MalformedInput("submonoid belongs to a different ring")
    torsion = s_torsion(R, S).members
    mul, sub = R.mul_table, R.sub
    monoid = sorted(S.members)
    reps: list[tuple[int, int]] = []
    class_of: dict[tuple[int, int], int] = {}
    for r in R.elements:
        for s in monoid:
            for idx, (r2, s2) in enumerate(reps):
                if sub(mul[r][s2], mul[r2][s]) in torsion:
                    class_of[(r, s)] = idx
                    break
            else:
                class_of[(r, s)] = len(reps)
                reps.append((r, s))
    add_t, mul_t = R.add_table, R.mul_table
    add = [
        [class_of[(add_t[mul_t[r][s2]][mul_t[r2][s]], mul_t[s][s2])] for (r2, s2) in reps]
        for (r, s) in reps
    ]
    prod = [[class_of[(mul_t[r][r2], mul_t[s][s2])] for (r2, s2) in reps] for (r, s) in reps]
    ring = FiniteRing.from_tables(add, prod, class_of[(R.zero, R.one)], class_of[(R.one, R.one)], _label(R, S))
    canonical = RingHom(R, ring, tuple(class_of[(r, R.one)] for r in R.elements))
    return LocalizedRing(R, S, ring, canonical, class_of, tuple(reps))


def localize_at_element(R: FiniteRing, f: int) -> LocalizedRing:
    return localize(R, submonoid_generated_by(R, [f]))


def complement_submonoid(R: FiniteRing, prime_members: frozenset[int]) -> Submonoid:
    """R minus a prime ideal, checked to be a submonoid."""
    return Submonoid(R, frozenset(R.elements) - prime_members)


def induced_map(L: LocalizedRing, g: RingHom) -> RingHom:
    """The unique h : L.ring -> A with h ∘ canonical = g."""
    if g.source != L.base:
        raise MalformedInput("g must start at the base ring of the localization")
    A = g.target
    for s in L.monoid:
        if g(s) not in A.inverse:
            raise NotAUnit(s, g(s))
    value = [None] * L.ring.size
    for (r, s), idx in L.class_of.items():
        v = A.mul_table[g(r)][A.inverse[g(s)]]
        if value[idx] is None:
            value[idx] = v
        elif value[idx] != v:
            raise AssertionError(f"induced map not well defined at class {idx}")
    h = RingHom(L.ring, A, tuple(value))
    problem = h.violation()
    if problem:
        raise AssertionError(f"induced map is not a ring hom: {problem}")
    if h.compose(L.canonical).images != g.images:
        raise AssertionError("induced map does not extend g")
    return h


# -- the localization predicate ------------------------------------------------


@dataclass
class Condition:
    ok: bool
    witness: object = None


@dataclass
class PredicateReport:
    cond_units: Condition
    cond_fractions: Condition
    cond_kernel: Condition

    @property
    def verdict(self) -> bool:
        return self.cond_units.ok and self.cond_fractions.ok and self.cond_kernel.ok

    def summary(self) -> str:
        parts = []
        for name in ("cond_units", "cond_fractions", "cond_kernel"):
            c = getattr(self, name)
            parts.append(f"{name}={'pass' if c.ok else f'fail[{c.witness}]'}")
        return ", ".join(parts)

    def as_dict(self) -> dict:
        return {
            name: {"ok": getattr(self, name).ok, "witness": getattr(self, name).witness}
            for name in ("cond_units", "cond_fractions", "cond_kernel")
        } | {"verdict": self.verdict}


def strickland_check(f: RingHom, S: Submonoid) -> PredicateReport:
    R, T = f.source, f.target
    if S.ring != R:
        raise MalformedInput("submonoid belongs to a different ring")
    bad_unit = next((s for s in S if f(s) not in T.inverse), None)
    units_ok = Condition(bad_unit is None, bad_unit)

    image = set(f.images)
    f_S = {f(s) for s in S}
    bad_t = next(
        (t for t in T.elements if not any(T.mul_table[t][fs] in image for fs in f_S)),
        None,
    )
    fractions_ok = Condition(bad_t is None, bad_t)

    diff = f.kernel ^ s_torsion(R, S).members
    kernel_ok = Condition(not diff, min(diff) if diff else None)
    return PredicateReport(units_ok, fractions_ok, kernel_ok)


def is_localization(f: RingHom, S: Submonoid) -> bool:
    return strickland_check(f, S).verdict


@dataclass
class UniversalPropertyReport:
    ok: bool
    family: list[str]
    witness: str | None = None
    maps_checked: int = 0


def universal_property_check(
    f: RingHom, S: Submonoid, family: Sequence[FiniteRing], **budget
) -> UniversalPropertyReport:
    """Bounded check of the universal property over the given test rings.

    Includes the requirement that f itself sends S into units.  The verdict
    speaks only for the listed family.
    """
    R, T = f.source, f.target
    labels = [A.label for A in family]
    bad = next((s for s in S if f(s) not in T.inverse), None)
    if bad is not None:
        return UniversalPropertyReport(False, labels, f"f({bad}) is not a unit")
    checked = 0
    for A in family:
        lifts: dict[tuple[int, ...], int] = {}
        for h in enumerate_homs(T, A, **budget):
            key = h.compose(f).images
            lifts[key] = lifts.get(key, 0) + 1
        for g in enumerate_homs(R, A, **budget):
            if any(g(s) not in A.inverse for s in S):
                continue
            checked += 1
            count = lifts.get(g.images, 0)
            if count != 1:
                return UniversalPropertyReport(
                    False, labels, f"{count} lifts for g={list(g.images)} into {A.label}", checked
                )
    return UniversalPropertyReport(True, labels, None, checked)


def unique_algebra_map(i1: RingHom, S1: Submonoid, i2: RingHom) -> RingHom | None:
    """The unique h with h ∘ i1 = i2, or None.

    ``i1`` must satisfy the localization predicate for ``S1``; h is then
    forced on fractions: h(i1(r)/i1(s)) = i2(r) i2(s)^-1.
    """
    if i1.source != i2.source:
        raise MalformedInput("both maps must start at the same ring")
    if not strickland_check(i1, S1).verdict:
        raise MalformedInput("first map is not a localization at the given submonoid")
    T1, T2 = i1.target, i2.target
    if any(i2(s) not in T2.inverse for s in S1):
        return None
    image_pairs = {}
    for r in i1.source.elements:
        image_pairs.setdefault(i1(r), r)
    value = []
    for t in T1.elements:
        for s in S1:
            r = image_pairs.get(T1.mul_table[t][i1(s)])
            if r is not None:
                value.append(T2.mul_table[i2(r)][T2.inverse[i2(s)]])
                break
    h = RingHom(T1, T2, tuple(value))
    if h.violation() is not None or h.compose(i1).images != i2.images:
        return None
    return h


@dataclass
class EquivalenceReport:
    definition1: bool
    definition2: bool
    definition3: bool
    family: list[str] = field(default_factory=list)
    iso: RingHom | None = None
    predicate: PredicateReport | None = None
    universal: UniversalPropertyReport | None = None

    @property
    def agree(self) -> bool:
        return self.definition1 == self.definition2 == self.definition3

    @property
    def verdicts(self) -> tuple[bool, bool, bool]:
        return (self.definition1, self.definition2, self.definition3)


class DefinitionsDisagree(AssertionError):
    pass


def algebra_isomorphism(f: RingHom, S: Submonoid, **budget) -> RingHom | None:
    """A bijective h : R[1/S] -> target with h ∘ canonical = f, if one exists."""
    L = localize(f.source, S)
    if L.ring.size != f.target.size:
        return None
    for h in enumerate_homs(L.ring, f.target, **budget):
        if h.is_bijective and h.compose(L.canonical).images == f.images:
            return h
    return None


def definitions_equivalence_check(
    f: RingHom, S: Submonoid, family: Sequence[FiniteRing] = (), **budget
) -> EquivalenceReport:
    """Evaluate all three definitions of 'f is a localization at S'.

    The test family is augmented with R[1/S] and f.target; with both present
    the bounded universal-property check decides the unbounded one.
    Raises DefinitionsDisagree if the verdicts differ.
    """
    L = localize(f.source, S)
    tested = list(family)
    for extra in (L.ring, f.target):
        if extra not in tested:
            tested.append(extra)
    iso = algebra_isomorphism(f, S, **budget)
    up = universal_property_check(f, S, tested, **budget)
    pred = strickland_check(f, S)
    report = EquivalenceReport(iso is not None, up.ok, pred.verdict, [A.label for A in tested], iso, pred, up)
    if not report.agree:
        raise DefinitionsDisagree(f"definitions disagree: {report.verdicts}")
    return report


def double_localization_check(R: FiniteRing, f: int, g: int) -> bool:
    """Does R -> R[1/f] -> R[1/f][1/g] satisfy the predicate for <f·g>?"""
    L1 = localize_at_element(R, f)
    L2 = localize_at_element(L1.ring, L1.canonical(g))
    composite = L2.canonical.compose(L1.canonical)
    return strickland_check(composite, submonoid_generated_by(R, [R.mul_table[f][g]])).verdict
