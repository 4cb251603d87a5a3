"""Prime spectra of finite rings with their Zariski topology."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .errors import BudgetExceeded, MalformedInput
from .ring_core import FiniteRing, Ideal, ideal_generated_by, ideal_sum

DEFAULT_MAX_IDEALS = 20_000

Point = Hashable
OpenSet = frozenset


@dataclass(frozen=True)
class PrimeIdeal:
    underlying: Ideal

    def __post_init__(self):
        ok, witness = is_prime_ideal(self.underlying.ring, self.underlying)
        if not ok:
            raise MalformedInput(f"{self.underlying} is not prime (witness {witness})")

    @property
    def ring(self) -> FiniteRing:
        return self.underlying.ring

    @property
    def members(self) -> frozenset[int]:
        return self.underlying.members

    def __contains__(self, x: int) -> bool:
        return x in self.underlying.members

    def __str__(self) -> str:
        return str(self.underlying)

    def __repr__(self) -> str:
        return f"PrimeIdeal{self.underlying}"


@dataclass(frozen=True)
class FiniteTopology:
    """A topology on finitely many hashable points.

    ``opens`` are frozensets of points in a canonical order (size, then point
    order); ``basis`` is a sublist generating every open by unions.
    """

    points: tuple
    opens: tuple[frozenset, ...]
    basis: tuple[frozenset, ...] = ()

    def __post_init__(self):
        order = {p: i for i, p in enumerate(self.points)}
        if len(order) != len(self.points):
            raise MalformedInput("duplicate points")
        opens = tuple(sorted(set(self.opens), key=lambda U: _open_key(U, order)))
        object.__setattr__(self, "opens", opens)
        basis = tuple(sorted(set(self.basis or opens), key=lambda U: _open_key(U, order)))
        object.__setattr__(self, "basis", basis)
        problem = topology_violation(self)
        if problem:
            raise MalformedInput(problem)

    @property
    def whole(self) -> frozenset:
        return frozenset(self.points)

    def index(self, p) -> int:
        return self.points.index(p)

    def opens_within(self, U: frozenset) -> list[frozenset]:
        return [V for V in self.opens if V <= U]

    def minimal_neighbourhood(self, x) -> frozenset:
        out = self.whole
        for U in self.opens:
            if x in U:
                out = out & U
        return out

    def is_open(self, U: Iterable) -> bool:
        return frozenset(U) in set(self.opens)

    @property
    def is_discrete(self) -> bool:
        return all(frozenset({p}) in set(self.opens) for p in self.points)

    def describe(self, U: frozenset) -> str:
        return "{" + ",".join(str(p) for p in self.points if p in U) + "}"


def _open_key(U: frozenset, order: dict) -> tuple:
    return (len(U), sorted(order[p] for p in U))


def topology_violation(X: FiniteTopology) -> str | None:
    opens = set(X.opens)
    whole = frozenset(X.points)
    if frozenset() not in opens:
        return "empty set is not open"
    if whole not in opens:
        return "whole space is not open"
    for U in opens:
        if not U <= whole:
            return "open contains unknown points"
    for U, V in combinations(X.opens, 2):
        if U | V not in opens:
            return f"union of {X.describe(U)} and {X.describe(V)} is not open"
        if U & V not in opens:
            return f"intersection of {X.describe(U)} and {X.describe(V)} is not open"
    if not set(X.basis) <= opens:
        return "basis element is not open"
    for U in X.opens:
        covered = frozenset().union(*[B for B in X.basis if B <= U])
        if covered != U:
            return f"{X.describe(U)} is not a union of basis elements"
    return None


def discrete_topology(points: Sequence) -> FiniteTopology:
    points = tuple(points)
    opens = [frozenset(c) for k in range(len(points) + 1) for c in combinations(points, k)]
    return FiniteTopology(points, tuple(opens))


def subspace(X: FiniteTopology, U: frozenset) -> FiniteTopology:
    points = tuple(p for p in X.points if p in U)
    return FiniteTopology(points, tuple({V & U for V in X.opens}))


# -- ideals and primes -------------------------------------------------------


@lru_cache(maxsize=4096)
def enumerate_ideals(R: FiniteRing, max_ideals: int = DEFAULT_MAX_IDEALS) -> tuple[Ideal, ...]:
    """All ideals: principal ideals closed under pairwise sums until fixpoint."""
    found = {ideal_generated_by(R, [a]).members: None for a in R.elements}
    ideals = {m: Ideal(R, m) for m in found}
    frontier = list(ideals.values())
    while frontier:
        nxt = []
        current = list(ideals.values())
        for I in frontier:
            for J in current:
                if I.members <= J.members or J.members <= I.members:
                    continue
                K = ideal_sum(I, J)
                if K.members not in ideals:
                    ideals[K.members] = K
                    nxt.append(K)
                    current.append(K)
                    if len(ideals) > max_ideals:
                        raise BudgetExceeded(f"more than {max_ideals} ideals")
        frontier = nxt
    return tuple(sorted(ideals.values(), key=lambda I: (len(I), I.sorted_members())))


def is_prime_ideal(R: FiniteRing, I: Ideal) -> tuple[bool, tuple[int, int] | None]:
    """(verdict, witness); the witness is ``(a, b)`` with ab in I but a, b not in I."""
    if not I.is_proper:
        return False, None
    outside = [a for a in R.elements if a not in I.members]
    for a in outside:
        row = R.mul_table[a]
        for b in outside:
            if b >= a and row[b] in I.members:
                return False, (a, b)
    return True, None


@lru_cache(maxsize=4096)
def spec_points(R: FiniteRing) -> tuple[PrimeIdeal, ...]:
    primes = [PrimeIdeal(I) for I in enumerate_ideals(R) if is_prime_ideal(R, I)[0]]
    return tuple(sorted(primes, key=lambda p: p.underlying.sorted_members()))


def vanishing_locus(R: FiniteRing, I: Ideal) -> frozenset[PrimeIdeal]:
    return frozenset(p for p in spec_points(R) if I.members <= p.members)


def basic_open(R: FiniteRing, f: int) -> frozenset[PrimeIdeal]:
    """D(f), computed both as a complement and directly; the two must agree."""
    points = spec_points(R)
    via_complement = frozenset(points) - vanishing_locus(R, ideal_generated_by(R, [f]))
    direct = frozenset(p for p in points if f not in p.members)
    if via_complement != direct:
        raise AssertionError(f"D({f}) disagrees between its two computations")
    return direct


@lru_cache(maxsize=1024)
def basic_opens(R: FiniteRing) -> dict[int, frozenset[PrimeIdeal]]:
    return {f: basic_open(R, f) for f in R.elements}


@lru_cache(maxsize=1024)
def zariski_topology(R: FiniteRing) -> FiniteTopology:
    points = spec_points(R)
    whole = frozenset(points)
    opens = {whole - vanishing_locus(R, I) for I in enumerate_ideals(R)}
    basis = set(basic_opens(R).values())
    return FiniteTopology(points, tuple(opens), tuple(basis))


@dataclass
class BasisReport:
    ok: bool
    witness: str | None = None
    intersections_checked: int = 0


def basis_check(R: FiniteRing) -> BasisReport:
    X = zariski_topology(R)
    D = basic_opens(R)
    basics = set(D.values())
    for U in X.opens:
        if frozenset().union(*[B for B in basics if B <= U]) != U:
            return BasisReport(False, f"{X.describe(U)} is not a union of basic opens")
    checked = 0
    for f in R.elements:
        for g in R.elements:
            checked += 1
            if D[f] & D[g] != D[R.mul_table[f][g]]:
                return BasisReport(False, f"D({f}) ∩ D({g}) != D({R.mul_table[f][g]})", checked)
    return BasisReport(True, None, checked)
