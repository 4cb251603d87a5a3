"""Finite commutative rings given by explicit operation tables.

Elements are plain ``int`` indices into the tables.  Everything here is
immutable after construction and all checks are exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, MalformedInput, HomSearchTruncated

DEFAULT_MAX_RING_SIZE = 256
DEFAULT_MAX_HOM_NODES = 2_000_000

Table = tuple[tuple[int, ...], ...]


def _freeze(table: Sequence[Sequence[int]]) -> Table:
    return tuple(tuple(int(x) for x in row) for row in table)


@dataclass(frozen=True, eq=False)
class FiniteRing:
    """A commutative unital ring on the carrier ``range(size)``.

    Equality and hashing are structural on the tables; the label is cosmetic.
    """

    add_table: Table
    mul_table: Table
    zero: int
    one: int
    label: str = "R"

    def __post_init__(self):
        n = len(self.add_table)
        if n == 0:
            raise MalformedInput("a ring needs at least one element")
        for table in (self.add_table, self.mul_table):
            if len(table) != n or any(len(row) != n for row in table):
                raise MalformedInput("operation tables must be square")
            if any(not 0 <= x < n for row in table for x in row):
                raise MalformedInput("operation table entry out of range")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise MalformedInput("zero/one index out of range")

    @classmethod
    def from_tables(cls, add, mul, zero=0, one=1, label="R") -> FiniteRing:
        return cls(_freeze(add), _freeze(mul), int(zero), int(one), label)

    @property
    def size(self) -> int:
        return len(self.add_table)

    @property
    def elements(self) -> range:
        return range(self.size)

    @cached_property
    def _key(self):
        return (self.add_table, self.mul_table, self.zero, self.one)

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteRing):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __repr__(self) -> str:
        return f"FiniteRing({self.label}, size={self.size})"

    # -- arithmetic -------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        neg = []
        for a in self.elements:
            row = self.add_table[a]
            neg.append(next((b for b in self.elements if row[b] == self.zero), -1))
        return tuple(neg)

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def power(self, a: int, k: int) -> int:
        result = self.one
        for _ in range(k):
            result = self.mul_table[result][a]
        return result

    def sum(self, items: Iterable[int]) -> int:
        total = self.zero
        for x in items:
            total = self.add_table[total][x]
        return total

    def prod(self, items: Iterable[int]) -> int:
        total = self.one
        for x in items:
            total = self.mul_table[total][x]
        return total

    @cached_property
    def inverse(self) -> dict[int, int]:
        """Map from each unit to its multiplicative inverse."""
        inv = {}
        for u in self.elements:
            row = self.mul_table[u]
            for v in self.elements:
                if row[v] == self.one:
                    inv[u] = v
                    break
        return inv

    def is_unit(self, a: int) -> bool:
        return a in self.inverse

    @property
    def is_zero_ring(self) -> bool:
        return self.size == 1

    @cached_property
    def np_add(self) -> np.ndarray:
        arr = np.array(self.add_table, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def np_mul(self) -> np.ndarray:
        arr = np.array(self.mul_table, dtype=np.int64)
        arr.setflags(write=False)
        return arr


def _membership(ring: FiniteRing, members: Iterable[int]) -> frozenset[int]:
    out = frozenset(int(m) for m in members)
    if any(not 0 <= m < ring.size for m in out):
        raise MalformedInput("member index out of range")
    return out


@dataclass(frozen=True)
class Ideal:
    ring: FiniteRing
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", _membership(self.ring, self.members))
        problem = ideal_violation(self.ring, self.members)
        if problem is not None:
            raise MalformedInput(f"not an ideal: {problem}")

    @classmethod
    def _closed(cls, ring: FiniteRing, members: frozenset[int]) -> "Ideal":
        """Wrap a set already known to be an ideal, skipping validation."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "ring", ring)
        object.__setattr__(obj, "members", members)
        return obj

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: Ideal) -> bool:
        return self.members <= other.members

    @property
    def is_proper(self) -> bool:
        return self.ring.one not in self.members

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """Greedy generating set: repeatedly add the least member not yet generated."""
        gens: list[int] = []
        current = frozenset({self.ring.zero})
        for x in sorted(self.members):
            if x not in current:
                gens.append(x)
                current = ideal_generated_by(self.ring, gens).members
        return tuple(gens)

    def __str__(self) -> str:
        if not self.generators:
            return f"({self.ring.zero})"
        return "(" + ",".join(map(str, self.generators)) + ")"

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


def ideal_violation(R: FiniteRing, members: frozenset[int]) -> str | None:
    if R.zero not in members:
        return "does not contain zero"
    for a in members:
        row = R.add_table[a]
        for b in members:
            if row[b] not in members:
                return f"{a}+{b} not a member"
    for r in R.elements:
        row = R.mul_table[r]
        for a in members:
            if row[a] not in members:
                return f"{r}*{a} not a member"
    return None


@dataclass(frozen=True)
class Submonoid:
    ring: FiniteRing
    members: frozenset[int]

    def __post_init__(self):
        members = _membership(self.ring, self.members)
        object.__setattr__(self, "members", members)
        R = self.ring
        if R.one not in members:
            raise MalformedInput("submonoid must contain one")
        for a in members:
            row = R.mul_table[a]
            for b in members:
                if row[b] not in members:
                    raise MalformedInput(f"not multiplicatively closed: {a}*{b}")

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, sorted(self.members))) + "}"


@dataclass(frozen=True)
class RingHom:
    """A map of carriers ``source -> target`` stored as an image table."""

    source: FiniteRing
    target: FiniteRing
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if len(self.images) != self.source.size:
            raise MalformedInput("image table has the wrong length")
        if any(not 0 <= y < self.target.size for y in self.images):
            raise MalformedInput("image out of range")

    @cached_property
    def np_images(self) -> np.ndarray:
        arr = np.array(self.images, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, inner: RingHom) -> RingHom:
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise MalformedInput("cannot compose: codomain/domain mismatch")
        return RingHom(inner.source, self.target, tuple(self.images[y] for y in inner.images))

    def violation(self) -> str | None:
        """First failed hom axiom as text, or None."""
        S, T, f = self.source, self.target, self.images
        if f[S.one] != T.one:
            return f"one maps to {f[S.one]}, not {T.one}"
        for a in S.elements:
            for b in S.elements:
                if f[S.add_table[a][b]] != T.add_table[f[a]][f[b]]:
                    return f"additivity fails at ({a},{b})"
                if f[S.mul_table[a][b]] != T.mul_table[f[a]][f[b]]:
                    return f"multiplicativity fails at ({a},{b})"
        return None

    @property
    def is_hom(self) -> bool:
        return self.violation() is None

    @cached_property
    def kernel(self) -> frozenset[int]:
        return frozenset(x for x in self.source.elements if self.images[x] == self.target.zero)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.images)

    @property
    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.size

    @property
    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and self.is_injective

    def inverse(self) -> RingHom:
        if not self.is_bijective:
            raise MalformedInput("only bijective homs have inverses")
        inv = [0] * self.target.size
        for x, y in enumerate(self.images):
            inv[y] = x
        return RingHom(self.target, self.source, tuple(inv))


def identity_hom(R: FiniteRing) -> RingHom:
    return RingHom(R, R, tuple(R.elements))


def ring_hom(source: FiniteRing, target: FiniteRing, images) -> RingHom:
    """Build a RingHom, raising MalformedInput if it is not a unital ring hom."""
    h = RingHom(source, target, tuple(images))
    problem = h.violation()
    if problem:
        raise MalformedInput(f"not a ring homomorphism: {problem}")
    return h


# -- constructors -----------------------------------------------------------


def _check_size(n: int, max_size: int | None):
    limit = DEFAULT_MAX_RING_SIZE if max_size is None else max_size
    if n > limit:
        raise BudgetExceeded(f"ring of size {n} exceeds the size cap {limit}")


def mk_zmod(n: int, *, max_size: int | None = None) -> FiniteRing:
    if n < 1:
        raise MalformedInput("Z/n needs n >= 1")
    _check_size(n, max_size)
    add = [[(a + b) % n for b in range(n)] for a in range(n)]
    mul = [[(a * b) % n for b in range(n)] for a in range(n)]
    return FiniteRing.from_tables(add, mul, 0, 1 % n, f"Z/{n}")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def poly_to_text(coeffs: Sequence[int], var: str = "x") -> str:
    """Render low-degree-first coefficients, e.g. ``[1, 1, 1] -> x^2+x+1``."""
    terms = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = coeffs[deg]
        if c == 0:
            continue
        if deg == 0:
            terms.append(str(c))
            continue
        mono = var if deg == 1 else f"{var}^{deg}"
        terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


def mk_gf_poly_quotient(p: int, coeffs: Sequence[int], *, max_size: int | None = None) -> FiniteRing:
    """(Z/p)[x]/(f) with ``coeffs`` the coefficients of f, lowest degree first.

    Element index ``sum(c_i * p**i)`` encodes the remainder ``sum(c_i x^i)``.
    """
    if not is_prime(p):
        raise MalformedInput(f"{p} is not prime")
    coeffs = [int(c) % p for c in coeffs]
    d = len(coeffs) - 1
    if d < 1:
        raise MalformedInput("polynomial must have degree >= 1")
    if coeffs[-1] != 1:
        raise MalformedInput("polynomial must be monic")
    size = p**d
    _check_size(size, max_size)

    def digits(a: int) -> list[int]:
        out = []
        for _ in range(d):
            out.append(a % p)
            a //= p
        return out

    def encode(v: Sequence[int]) -> int:
        return sum(c * p**i for i, c in enumerate(v))

    def reduce(v: list[int]) -> list[int]:
        v = v[:]
        for deg in range(len(v) - 1, d - 1, -1):
            c = v[deg] % p
            if c:
                for i in range(d + 1):
                    v[deg - d + i] = (v[deg - d + i] - c * coeffs[i]) % p
        return [c % p for c in v[:d]]

    vecs = [digits(a) for a in range(size)]
    add = [[encode([(x + y) % p for x, y in zip(va, vb)]) for vb in vecs] for va in vecs]
    mul = []
    for va in vecs:
        row = []
        for vb in vecs:
            conv = [0] * (2 * d - 1)
            for i, x in enumerate(va):
                if x:
                    for j, y in enumerate(vb):
                        conv[i + j] += x * y
            row.append(encode(reduce(conv)))
        mul.append(row)
    one = encode([1] + [0] * (d - 1))
    return FiniteRing.from_tables(add, mul, 0, one, f"GF({p})[x]/({poly_to_text(coeffs)})")


def mk_product(A: FiniteRing, B: FiniteRing, *, max_size: int | None = None) -> FiniteRing:
    """A × B with pair (a, b) encoded as ``a * |B| + b``."""
    m = B.size
    n = A.size * m
    _check_size(n, max_size)
    pairs = [divmod(i, m) for i in range(n)]
    add = [[A.add_table[a][c] * m + B.add_table[b][d] for c, d in pairs] for a, b in pairs]
    mul = [[A.mul_table[a][c] * m + B.mul_table[b][d] for c, d in pairs] for a, b in pairs]
    return FiniteRing.from_tables(add, mul, A.zero * m + B.zero, A.one * m + B.one, f"{A.label} x {B.label}")


def mk_quotient(R: FiniteRing, I: Ideal) -> tuple[FiniteRing, RingHom]:
    """R/I with cosets indexed in order of their least member."""
    if I.ring != R:
        raise MalformedInput("ideal belongs to a different ring")
    coset_of = [-1] * R.size
    reps: list[int] = []
    for x in R.elements:
        if coset_of[x] >= 0:
            continue
        idx = len(reps)
        reps.append(x)
        for i in I.members:
            coset_of[R.add_table[x][i]] = idx
    add = [[coset_of[R.add_table[a][b]] for b in reps] for a in reps]
    mul = [[coset_of[R.mul_table[a][b]] for b in reps] for a in reps]
    Q = FiniteRing.from_tables(add, mul, coset_of[R.zero], coset_of[R.one], f"{R.label}/{I}")
    return Q, RingHom(R, Q, tuple(coset_of))


# -- axioms -----------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    ok: bool
    witness: tuple[int, ...] | None = None


@dataclass
class AxiomReport:
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failed(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.ok]

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in hits[0])


def verify_ring_axioms(R: FiniteRing) -> AxiomReport:
    """Exhaustively check every commutative-ring axiom, with counterexamples."""
    A, M = R.np_add, R.np_mul
    n = R.size
    idx = np.arange(n)
    report = AxiomReport()

    def record(name, bad_mask):
        w = _first(bad_mask)
        report.results.append(AxiomResult(name, w is None, w))

    record("add_commutative", A != A.T)
    record("mul_commutative", M != M.T)
    # (a+b)+c vs a+(b+c), indexed [a, b, c]
    record("add_associative", A[A[:, :, None], idx[None, None, :]] != A[idx[:, None, None], A[None, :, :]])
    record("mul_associative", M[M[:, :, None], idx[None, None, :]] != M[idx[:, None, None], M[None, :, :]])
    record("add_identity", (A[R.zero, :] != idx)[:, None])
    record("mul_identity", (M[R.one, :] != idx)[:, None])
    has_neg = (A == R.zero).any(axis=1)
    record("add_inverse", ~has_neg[:, None])
    # a*(b+c) vs a*b + a*c
    lhs = M[idx[:, None, None], A[None, :, :]]
    rhs = A[M[:, :, None], M[:, None, :]]
    record("distributive", lhs != rhs)
    return report


# -- derived sets -----------------------------------------------------------


def units(R: FiniteRing) -> frozenset[int]:
    return frozenset(R.inverse)


def additive_span(R: FiniteRing, gens: Iterable[int]) -> frozenset[int]:
    gens = set(gens)
    members = {R.zero}
    frontier = [R.zero]
    while frontier:
        nxt = []
        for x in frontier:
            row = R.add_table[x]
            for g in gens:
                y = row[g]
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(members)


def ideal_generated_by(R: FiniteRing, gens: Iterable[int]) -> Ideal:
    gens = list(gens)
    if any(g in R.inverse for g in gens):
        return Ideal._closed(R, frozenset(R.elements))
    multiples = {R.mul_table[r][g] for g in gens for r in R.elements}
    # the additive span of an R-stable set is an ideal
    return Ideal._closed(R, additive_span(R, multiples))


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    R = I.ring
    return Ideal(R, frozenset(R.add_table[a][b] for a in I.members for b in J.members))


def submonoid_generated_by(R: FiniteRing, gens: Iterable[int]) -> Submonoid:
    gens = set(gens)
    members = {R.one}
    frontier = [R.one]
    while frontier:
        nxt = []
        for x in frontier:
            row = R.mul_table[x]
            for g in gens:
                y = row[g]
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return Submonoid(R, frozenset(members))


def s_torsion(R: FiniteRing, S: Submonoid) -> Ideal:
    """The kernel of R -> R[1/S]: elements killed by some member of S."""
    members = frozenset(r for r in R.elements if any(R.mul_table[s][r] == R.zero for s in S.members))
    return Ideal(R, members)


def annihilator(R: FiniteRing, a: int) -> frozenset[int]:
    return frozenset(r for r in R.elements if R.mul_table[a][r] == R.zero)


def idempotents(R: FiniteRing) -> list[int]:
    return [e for e in R.elements if R.mul_table[e][e] == e]


# -- homomorphism search ----------------------------------------------------


def subring_closure(R: FiniteRing, gens: Iterable[int]) -> frozenset[int]:
    members = {R.zero, R.one, *gens}
    frontier = list(members)
    while frontier:
        nxt = []
        current = list(members)
        for a in frontier:
            ra, ma = R.add_table[a], R.mul_table[a]
            for b in current:
                for c in (ra[b], ma[b]):
                    if c not in members:
                        members.add(c)
                        nxt.append(c)
                        current.append(c)
        frontier = nxt
    return frozenset(members)


def generating_set(R: FiniteRing) -> list[int]:
    """Greedy ring generators: add the least element not yet generated."""
    gens: list[int] = []
    generated = subring_closure(R, gens)
    for x in R.elements:
        if x not in generated:
            gens.append(x)
            generated = subring_closure(R, gens)
    return gens


def _propagate(R: FiniteRing, T: FiniteRing, img: list[int], known: list[int], seeds: list[int]) -> bool:
    """Close ``img`` under + and ×; False on a conflicting relation."""
    work = list(seeds)
    Ra, Rm, Ta, Tm = R.add_table, R.mul_table, T.add_table, T.mul_table
    while work:
        a = work.pop()
        ia = img[a]
        ra, rm, ta, tm = Ra[a], Rm[a], Ta[ia], Tm[ia]
        for b in list(known):
            ib = img[b]
            for c, ic in ((ra[b], ta[ib]), (rm[b], tm[ib])):
                cur = img[c]
                if cur < 0:
                    img[c] = ic
                    known.append(c)
                    work.append(c)
                elif cur != ic:
                    return False
    return True


def enumerate_homs(
    R: FiniteRing,
    T: FiniteRing,
    *,
    max_product: int | None = None,
    max_nodes: int = DEFAULT_MAX_HOM_NODES,
) -> list[RingHom]:
    """All unital ring homs R -> T, by backtracking over generator images."""
    limit = DEFAULT_MAX_RING_SIZE**2 if max_product is None else max_product
    if R.size * T.size > limit:
        raise HomSearchTruncated(f"|R|*|T| = {R.size * T.size} exceeds the budget {limit}")
    gens = generating_set(R)
    img = [-1] * R.size
    img[R.zero] = T.zero
    known = [R.zero]
    if img[R.one] >= 0 and T.one != T.zero:
        return []
    img[R.one] = T.one
    if R.one != R.zero:
        known.append(R.one)
    if not _propagate(R, T, img, known, list(known)):
        return []
    found: list[RingHom] = []
    nodes = 0

    def search(k: int, img: list[int], known: list[int]):
        nonlocal nodes
        if k == len(gens):
            h = RingHom(R, T, tuple(img))
            if h.violation() is None:
                found.append(h)
            return
        g = gens[k]
        if img[g] >= 0:
            search(k + 1, img, known)
            return
        for y in T.elements:
            nodes += 1
            if nodes > max_nodes:
                raise HomSearchTruncated(f"hom search exceeded {max_nodes} nodes")
            img2, known2 = img[:], known[:]
            img2[g] = y
            known2.append(g)
            if _propagate(R, T, img2, known2, [g]):
                search(k + 1, img2, known2)

    search(0, img, known)
    return found


# -- locality ---------------------------------------------------------------


@dataclass
class LocalityWitness:
    is_local: bool
    maximal_ideal: Ideal | None = None
    competing: tuple[Ideal, Ideal] | None = None


def maximal_ideals(R: FiniteRing) -> list[Ideal]:
    from .spectrum import enumerate_ideals

    proper = [I for I in enumerate_ideals(R) if I.is_proper]
    return [I for I in proper if not any(I.members < J.members for J in proper)]


def is_local_ring(R: FiniteRing) -> LocalityWitness:
    if R.is_zero_ring:
        return LocalityWitness(False)
    inv = R.inverse
    nonunits = frozenset(x for x in R.elements if x not in inv)
    if ideal_violation(R, nonunits) is None:
        return LocalityWitness(True, maximal_ideal=Ideal(R, nonunits))
    maxes = maximal_ideals(R)
    return LocalityWitness(False, competing=(maxes[0], maxes[1]))


def is_isomorphic(A: FiniteRing, B: FiniteRing, **budget) -> RingHom | None:
    """A bijective hom A -> B if one exists."""
    if A.size != B.size:
        return None
    for h in enumerate_homs(A, B, **budget):
        if h.is_bijective:
            return h
    return None


def ring_of_tuples(
    rings: Sequence[FiniteRing], tuples: Iterable[tuple[int, ...]], label: str = "R"
) -> tuple[FiniteRing, dict[tuple[int, ...], int]]:
    """The subring of ∏ rings carried by ``tuples`` (sorted), with its index map.

    Raises MalformedInput if the tuples are not closed under the operations.
    """
    elems = sorted(set(tuples))
    index = {t: i for i, t in enumerate(elems)}
    adds = [R.add_table for R in rings]
    muls = [R.mul_table for R in rings]
    k = range(len(rings))
    try:
        add = [[index[tuple(adds[c][a[c]][b[c]] for c in k)] for b in elems] for a in elems]
        mul = [[index[tuple(muls[c][a[c]][b[c]] for c in k)] for b in elems] for a in elems]
        zero = index[tuple(R.zero for R in rings)]
        one = index[tuple(R.one for R in rings)]
    except KeyError as exc:
        raise MalformedInput(f"tuples not closed under ring operations: {exc}") from None
    return FiniteRing.from_tables(add, mul, zero, one, label), index
