"""Presheaves of rings on finite spaces and the sheaf condition.

Opens are frozensets of points.  A presheaf stores one ring per open and one
restriction hom per inclusion V ⊆ U.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterator, Mapping, Sequence

from .errors import CocycleFailure, MalformedInput
from .ring_core import FiniteRing, RingHom, identity_hom, ring_of_tuples
from .spectrum import FiniteTopology

DEFAULT_MAX_COVERS = 4096


@dataclass(frozen=True, eq=False)
class PresheafOfRings:
    space: FiniteTopology
    sections: Mapping[frozenset, FiniteRing]
    restrictions: Mapping[tuple[frozenset, frozenset], RingHom]
    label: str = "F"

    def __call__(self, U) -> FiniteRing:
        return self.sections[frozenset(U)]

    def res(self, U, V) -> RingHom:
        return self.restrictions[(frozenset(U), frozenset(V))]

    def __repr__(self) -> str:
        return f"PresheafOfRings({self.label}, opens={len(self.space.opens)})"


def build_presheaf(
    space: FiniteTopology,
    section: Callable[[frozenset], FiniteRing],
    restriction: Callable[[frozenset, frozenset], RingHom],
    label: str = "F",
) -> PresheafOfRings:
    sections = {U: section(U) for U in space.opens}
    restrictions = {(U, V): restriction(U, V) for U in space.opens for V in space.opens if V <= U}
    return PresheafOfRings(space, sections, restrictions, label)


def constant_presheaf(space: FiniteTopology, R: FiniteRing) -> PresheafOfRings:
    ident = identity_hom(R)
    return build_presheaf(space, lambda U: R, lambda U, V: ident, f"const {R.label}")


@dataclass
class PresheafReport:
    ok: bool
    witness: str | None = None
    chain: tuple = ()


def check_presheaf(F: PresheafOfRings) -> PresheafReport:
    X = F.space
    for U in X.opens:
        for V in X.opens:
            if not V <= U:
                continue
            rho = F.restrictions.get((U, V))
            if rho is None:
                return PresheafReport(False, "missing restriction", (U, V))
            if rho.source != F(U) or rho.target != F(V):
                return PresheafReport(False, "restriction has the wrong rings", (U, V))
            problem = rho.violation()
            if problem:
                return PresheafReport(False, f"restriction is not a ring hom: {problem}", (U, V))
        if F.res(U, U).images != tuple(F(U).elements):
            return PresheafReport(False, "restriction to itself is not the identity", (U,))
    for W in X.opens:
        for V in X.opens:
            if not V <= W:
                continue
            for U in X.opens:
                if U <= V and F.res(V, U).compose(F.res(W, V)).images != F.res(W, U).images:
                    return PresheafReport(False, "restrictions do not compose", (W, V, U))
    return PresheafReport(True)


# -- covers and the sheaf axiom ----------------------------------------------


@dataclass(frozen=True)
class Cover:
    target: frozenset
    members: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(frozenset(m) for m in self.members))
        if any(not m <= self.target for m in self.members):
            raise MalformedInput("cover member is not inside the target")
        if frozenset().union(*self.members) != self.target:
            raise MalformedInput("members do not cover the target")


def compatible_families(F: PresheafOfRings, members: Sequence[frozenset]) -> Iterator[tuple[int, ...]]:
    """Families (f_i) with f_i|U_i∩U_j = f_j|U_i∩U_j for all i < j."""
    n = len(members)
    checks = []
    for j in range(n):
        row = []
        for i in range(j):
            W = members[i] & members[j]
            row.append((i, F.res(members[i], W).images, F.res(members[j], W).images))
        checks.append(row)
    sizes = [F(U).size for U in members]
    family = [0] * n

    def extend(j):
        if j == n:
            yield tuple(family)
            return
        for x in range(sizes[j]):
            if all(ri[family[i]] == rj[x] for i, ri, rj in checks[j]):
                family[j] = x
                yield from extend(j + 1)

    yield from extend(0)


@dataclass
class CoverVerdict:
    ok: bool
    injective: bool
    gluing: bool
    witness: object = None
    sections: int = 0
    families: int = 0


def sheaf_condition_on_cover(F: PresheafOfRings, cover: Cover) -> CoverVerdict:
    U = cover.target
    restr = [F.res(U, Ui).images for Ui in cover.members]
    seen: dict[tuple[int, ...], int] = {}
    injective, witness = True, None
    for s in F(U).elements:
        fam = tuple(r[s] for r in restr)
        if fam in seen and injective:
            injective, witness = False, ("sections", seen[fam], s)
        seen.setdefault(fam, s)
    gluing = True
    count = 0
    for fam in compatible_families(F, cover.members):
        count += 1
        if fam not in seen and gluing:
            gluing = False
            if witness is None:
                witness = ("family", fam)
    return CoverVerdict(injective and gluing, injective, gluing, witness, F(U).size, count)


def enumerate_covers(X: FiniteTopology, U: frozenset) -> Iterator[Cover]:
    """Irredundant covers of U: antichains of opens with union U.

    The empty open is covered by the empty family and by {∅}.
    """
    if not U:
        yield Cover(U, ())
        yield Cover(U, (U,))
        return
    candidates = [V for V in X.opens if V and V <= U]

    def extend(start, chosen, union):
        if union == U:
            yield Cover(U, tuple(chosen))
        for k in range(start, len(candidates)):
            V = candidates[k]
            if any(V <= C or C <= V for C in chosen):
                continue
            chosen.append(V)
            yield from extend(k + 1, chosen, union | V)
            chosen.pop()

    yield from extend(0, [], frozenset())


@dataclass
class SheafVerdict:
    ok: bool
    truncated: bool
    covers_checked: int
    failure: tuple[Cover, CoverVerdict] | None = None

    @property
    def passed(self) -> bool:
        return self.ok and not self.truncated


def is_sheaf(F: PresheafOfRings, cover_budget: int = DEFAULT_MAX_COVERS) -> SheafVerdict:
    checked = 0
    for U in F.space.opens:
        for cover in enumerate_covers(F.space, U):
            if checked >= cover_budget:
                return SheafVerdict(True, True, checked)
            checked += 1
            verdict = sheaf_condition_on_cover(F, cover)
            if not verdict.ok:
                return SheafVerdict(False, False, checked, (cover, verdict))
    return SheafVerdict(True, False, checked)


# -- stalks --------------------------------------------------------------------


@dataclass
class Stalk:
    point: object
    neighbourhood: frozenset
    ring: FiniteRing
    germ: dict[frozenset, RingHom]


def stalk(F: PresheafOfRings, x) -> Stalk:
    U_x = F.space.minimal_neighbourhood(x)
    germs = {U: F.res(U, U_x) for U in F.space.opens if x in U}
    return Stalk(x, U_x, F(U_x), germs)


def stalk_colimit(F: PresheafOfRings, x) -> tuple[FiniteRing, Callable[[frozenset, int], int]]:
    """Direct colimit over neighbourhoods of x: pairs (U, s) modulo agreement near x."""
    X = F.space
    nbhds = [U for U in X.opens if x in U]
    pairs = [(U, s) for U in nbhds for s in F(U).elements]
    parent = list(range(len(pairs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in combinations(range(len(pairs)), 2):
        (U, s), (V, t) = pairs[a], pairs[b]
        for W in nbhds:
            if W <= U & V and F.res(U, W)(s) == F.res(V, W)(t):
                parent[find(a)] = find(b)
                break
    root_index: dict[int, int] = {}
    cls = []
    for i in range(len(pairs)):
        cls.append(root_index.setdefault(find(i), len(root_index)))
    pos = {p: i for i, p in enumerate(pairs)}
    rep = {}
    for i, c in enumerate(cls):
        rep.setdefault(c, pairs[i])

    def germ_of(U, s):
        return cls[pos[(U, s)]]

    def op(kind):
        table = []
        for c1 in range(len(rep)):
            U, s = rep[c1]
            row = []
            for c2 in range(len(rep)):
                V, t = rep[c2]
                W = U & V
                A = F(W)
                a, b = F.res(U, W)(s), F.res(V, W)(t)
                row.append(germ_of(W, A.add_table[a][b] if kind == "add" else A.mul_table[a][b]))
            table.append(row)
        return table

    whole = X.whole
    ring = FiniteRing.from_tables(
        op("add"), op("mul"), germ_of(whole, F(whole).zero), germ_of(whole, F(whole).one), f"{F.label}_{x}"
    )
    return ring, germ_of


def stalk_matches_colimit(F: PresheafOfRings, x) -> bool:
    """The minimal-neighbourhood stalk maps isomorphically onto the colimit."""
    st = stalk(F, x)
    ring, germ_of = stalk_colimit(F, x)
    h = RingHom(st.ring, ring, tuple(germ_of(st.neighbourhood, s) for s in st.ring.elements))
    return h.violation() is None and h.is_bijective


# -- embeddings, pullback, comparison -----------------------------------------------


@dataclass(frozen=True, eq=False)
class OpenEmbedding:
    source: FiniteTopology
    target: FiniteTopology
    point_map: Mapping

    def __post_init__(self):
        problem = embedding_violation(self)
        if problem:
            raise MalformedInput(problem)

    def __call__(self, V) -> frozenset:
        return frozenset(self.point_map[p] for p in V)

    @property
    def image(self) -> frozenset:
        return self(self.source.points)

    def preimage(self, U) -> frozenset:
        return frozenset(p for p in self.source.points if self.point_map[p] in U)


def embedding_violation(e: OpenEmbedding) -> str | None:
    if set(e.point_map) != set(e.source.points):
        return "point map is not defined on every source point"
    if len(set(e.point_map.values())) != len(e.point_map):
        return "point map is not injective"
    if not set(e.point_map.values()) <= set(e.target.points):
        return "point map leaves the target space"
    target_opens = set(e.target.opens)
    for V in e.source.opens:
        if e(V) not in target_opens:
            return f"image of {e.source.describe(V)} is not open"
    source_opens = set(e.source.opens)
    for U in e.target.opens:
        if e.preimage(U) not in source_opens:
            return f"preimage of {e.target.describe(U)} is not open"
    return None


def identity_embedding(X: FiniteTopology) -> OpenEmbedding:
    return OpenEmbedding(X, X, {p: p for p in X.points})


def inclusion_embedding(X: FiniteTopology, U: frozenset) -> OpenEmbedding:
    from .spectrum import subspace

    Y = subspace(X, U)
    return OpenEmbedding(Y, X, {p: p for p in Y.points})


def pullback(iota: OpenEmbedding, F: PresheafOfRings) -> PresheafOfRings:
    """V ↦ F(ι(V)), with restrictions inherited from F."""
    if F.space != iota.target and set(F.space.opens) != set(iota.target.opens):
        raise MalformedInput("presheaf lives on a different space")
    sections = {V: F(iota(V)) for V in iota.source.opens}
    restrictions = {
        (V, W): F.res(iota(V), iota(W)) for V in iota.source.opens for W in iota.source.opens if W <= V
    }
    P = PresheafOfRings(iota.source, sections, restrictions, f"pullback {F.label}")
    report = check_presheaf(P)
    if not report.ok:
        raise AssertionError(f"pullback is not a presheaf: {report.witness}")
    return P


def along_preimage(iota: OpenEmbedding, F: PresheafOfRings) -> PresheafOfRings:
    """V ↦ F({x : x = ι(v) for some v in V}), the open of the target named by V."""

    def named(V):
        return frozenset(x for x in iota.target.points if any(iota.point_map[v] == x for v in V))

    sections = {V: F(named(V)) for V in iota.source.opens}
    restrictions = {
        (V, W): F.res(named(V), named(W)) for V in iota.source.opens for W in iota.source.opens if W <= V
    }
    return PresheafOfRings(iota.source, sections, restrictions, f"{F.label}|")


@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    source: PresheafOfRings
    target: PresheafOfRings
    components: Mapping[frozenset, RingHom]


@dataclass
class MorphismReport:
    ok: bool
    natural: bool
    bijective: bool
    witness: str | None = None


def check_morphism(m: PresheafMorphism, *, require_iso: bool = True) -> MorphismReport:
    P, Q = m.source, m.target
    for V in P.space.opens:
        c = m.components.get(V)
        if c is None:
            return MorphismReport(False, False, False, f"no component on {P.space.describe(V)}")
        if c.source != P(V) or c.target != Q(V):
            return MorphismReport(False, False, False, f"component on {P.space.describe(V)} has wrong rings")
        problem = c.violation()
        if problem:
            return MorphismReport(False, False, False, f"component on {P.space.describe(V)}: {problem}")
    for V in P.space.opens:
        for W in P.space.opens:
            if W <= V:
                lhs = Q.res(V, W).compose(m.components[V]).images
                rhs = m.components[W].compose(P.res(V, W)).images
                if lhs != rhs:
                    return MorphismReport(
                        False, False, False, f"square {P.space.describe(V)} ⊇ {P.space.describe(W)} fails"
                    )
    bad = [V for V in P.space.opens if not m.components[V].is_bijective]
    if bad and require_iso:
        return MorphismReport(False, True, False, f"component on {P.space.describe(bad[0])} not bijective")
    return MorphismReport(True, True, not bad)


@dataclass
class ComparisonResult:
    morphism: PresheafMorphism
    report: MorphismReport

    @property
    def ok(self) -> bool:
        return self.report.ok


def restriction_comparison_iso(iota: OpenEmbedding, F: PresheafOfRings) -> ComparisonResult:
    """Compare ι*F with F along ι using restriction maps, never identity coercions.

    Each component is F's restriction from ι(V) to the open named by V; the
    two sets coincide, so transitivity of restriction makes the squares commute.
    """
    pulled = pullback(iota, F)
    named = along_preimage(iota, F)
    components = {}
    for V in iota.source.opens:
        image = iota(V)
        target_open = frozenset(x for x in iota.target.points if any(iota.point_map[v] == x for v in V))
        if not target_open <= image:
            raise AssertionError("named open must lie inside the image")
        components[V] = F.res(image, target_open)
    m = PresheafMorphism(pulled, named, components)
    return ComparisonResult(m, check_morphism(m))


# -- gluing ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Gluing:
    presheaf: PresheafOfRings
    members: tuple[frozenset, ...]
    projections: Mapping[tuple[frozenset, int], RingHom]


def glue_presheaves(
    space: FiniteTopology,
    members: Sequence[frozenset],
    locals_: Sequence[PresheafOfRings],
    overlaps: Mapping[tuple[int, int], Mapping[frozenset, RingHom]],
    *,
    cover_budget: int = DEFAULT_MAX_COVERS,
) -> Gluing:
    """Glue sheaves F_i on opens U_i along isomorphisms φ_ij on U_i ∩ U_j.

    ``overlaps[(i, j)][V]`` maps F_i(V) -> F_j(V); missing diagonal entries
    are identities and a missing (j, i) is the inverse of (i, j).  The
    cocycle condition φ_ik = φ_jk ∘ φ_ij is verified on every triple overlap.
    """
    members = tuple(frozenset(U) for U in members)
    Cover(space.whole, members)
    n = len(members)
    for i, F in enumerate(locals_):
        if set(F.space.points) != set(members[i]):
            raise MalformedInput(f"local presheaf {i} does not live on member {i}")
        verdict = is_sheaf(F, cover_budget)
        if not verdict.passed:
            raise MalformedInput(f"local presheaf {i} is not a sheaf within budget")

    phi: dict[tuple[int, int], dict[frozenset, RingHom]] = {}
    for i in range(n):
        for j in range(n):
            overlap = members[i] & members[j]
            opens = [V for V in space.opens if V <= overlap]
            given = overlaps.get((i, j))
            if given is not None:
                phi[(i, j)] = {V: given[V] for V in opens}
            elif i == j:
                phi[(i, j)] = {V: identity_hom(locals_[i](V)) for V in opens}
            elif (j, i) in overlaps:
                phi[(i, j)] = {V: overlaps[(j, i)][V].inverse() for V in opens}
            else:
                raise MalformedInput(f"no overlap isomorphism for ({i},{j})")
            for V, h in phi[(i, j)].items():
                if h.source != locals_[i](V) or h.target != locals_[j](V) or not h.is_bijective:
                    raise MalformedInput(f"overlap map ({i},{j}) is not an isomorphism on {space.describe(V)}")
            for V in opens:
                for W in opens:
                    if W <= V:
                        lhs = locals_[j].res(V, W).compose(phi[(i, j)][V]).images
                        rhs = phi[(i, j)][W].compose(locals_[i].res(V, W)).images
                        if lhs != rhs:
                            raise MalformedInput(f"overlap map ({i},{j}) is not natural")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                triple = members[i] & members[j] & members[k]
                for V in space.opens:
                    if V <= triple and phi[(i, k)][V].images != phi[(j, k)][V].compose(phi[(i, j)][V]).images:
                        raise CocycleFailure((i, j, k), V)

    sections, index_maps, projections = {}, {}, {}
    for U in space.opens:
        parts = [U & Ui for Ui in members]
        rings = [locals_[i](parts[i]) for i in range(n)]
        fams = []
        for fam in product(*(R.elements for R in rings)):
            if all(
                phi[(i, j)][U & members[i] & members[j]](locals_[i].res(parts[i], U & members[i] & members[j])(fam[i]))
                == locals_[j].res(parts[j], U & members[i] & members[j])(fam[j])
                for i in range(n)
                for j in range(i + 1, n)
            ):
                fams.append(fam)
        ring, index = ring_of_tuples(rings, fams, f"glued({space.describe(U)})")
        sections[U] = ring
        index_maps[U] = index
        order = sorted(index, key=index.get)
        for i in range(n):
            projections[(U, i)] = RingHom(ring, rings[i], tuple(t[i] for t in order))
    restrictions = {}
    for U in space.opens:
        order = sorted(index_maps[U], key=index_maps[U].get)
        for V in space.opens:
            if V <= U:
                maps = [locals_[i].res(U & members[i], V & members[i]) for i in range(n)]
                restrictions[(U, V)] = RingHom(
                    sections[U],
                    sections[V],
                    tuple(index_maps[V][tuple(maps[i](t[i]) for i in range(n))] for t in order),
                )
    glued = PresheafOfRings(space, sections, restrictions, "glued")
    report = check_presheaf(glued)
    if not report.ok:
        raise AssertionError(f"glued data is not a presheaf: {report.witness}")
    return Gluing(glued, members, projections)

