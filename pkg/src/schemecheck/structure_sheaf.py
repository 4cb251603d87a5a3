"""The structure sheaf on Spec(R), built two independent ways.

1. Basis route: O(U) = R[1/S_U] on distinct basic opens, extended to every
   open as compatible families (a limit over the basic opens inside U).
2. Function route: sections are functions p ↦ R_p that are locally a single
   fraction r/s, each carried with its certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping

from .errors import MalformedInput
from .localization import (
    LocalizedRing,
    complement_submonoid,
    induced_map,
    localize,
    localize_at_element,
)
from .ring_core import FiniteRing, LocalityWitness, RingHom, Submonoid, is_local_ring, ring_of_tuples
from .sheaf import PresheafMorphism, PresheafOfRings, MorphismReport, check_morphism, check_presheaf, stalk
from .spectrum import FiniteTopology, PrimeIdeal, basic_opens, spec_points, zariski_topology


def s_of_open(R: FiniteRing, U) -> Submonoid:
    """S_U = {g : U ⊆ D(g)}, the elements lying in no prime of U."""
    U = frozenset(U)
    return Submonoid(R, frozenset(g for g in R.elements if all(g not in p.members for p in U)))


@dataclass(frozen=True, eq=False)
class BasisPresheaf:
    ring: FiniteRing
    basis_opens: tuple[frozenset, ...]
    section: Mapping[frozenset, LocalizedRing]
    restriction: Mapping[tuple[frozenset, frozenset], RingHom]


@lru_cache(maxsize=512)
def presheaf_on_basis(R: FiniteRing) -> BasisPresheaf:
    X = zariski_topology(R)
    distinct = set(basic_opens(R).values())
    opens = tuple(U for U in X.opens if U in distinct)
    section = {U: localize(R, s_of_open(R, U)) for U in opens}
    restriction = {}
    for U in opens:
        for V in opens:
            if V <= U:
                restriction[(U, V)] = induced_map(section[U], section[V].canonical)
    B = BasisPresheaf(R, opens, section, restriction)
    problem = basis_presheaf_violation(B)
    if problem:
        raise AssertionError(problem)
    return B


def basis_presheaf_violation(B: BasisPresheaf) -> str | None:
    for (U, V), rho in B.restriction.items():
        if rho.compose(B.section[U].canonical).images != B.section[V].canonical.images:
            return "restriction does not commute with the canonical maps"
    for U in B.basis_opens:
        if B.restriction[(U, U)].images != tuple(B.section[U].ring.elements):
            return "restriction to itself is not the identity"
        for V in B.basis_opens:
            for W in B.basis_opens:
                if W <= V <= U:
                    lhs = B.restriction[(V, W)].compose(B.restriction[(U, V)])
                    if lhs.images != B.restriction[(U, W)].images:
                        return "basis restrictions do not compose"
    return None


@dataclass(frozen=True, eq=False)
class StructureSheaf:
    """O_R on all opens, with the data linking it back to the basis."""

    ring: FiniteRing
    basis: BasisPresheaf
    presheaf: PresheafOfRings
    components: Mapping[frozenset, tuple[frozenset, ...]]
    family_index: Mapping[frozenset, Mapping[tuple[int, ...], int]]
    from_basis: Mapping[frozenset, RingHom]

    def family(self, U, x: int) -> dict[frozenset, int]:
        """The compatible family behind section ``x`` of O(U)."""
        U = frozenset(U)
        fam = next(t for t, i in self.family_index[U].items() if i == x)
        return dict(zip(self.components[U], fam))


def _label_open(X: FiniteTopology, U: frozenset) -> str:
    return f"O({X.describe(U)})"


def extend_from_basis(B: BasisPresheaf) -> StructureSheaf:
    """O(U) = compatible families (x_V) over basic V ⊆ U; restriction forgets components."""
    R = B.ring
    X = zariski_topology(R)
    components, index_maps, sections = {}, {}, {}
    for U in X.opens:
        inside = sorted((V for V in B.basis_opens if V <= U), key=lambda V: -len(V))
        comps = tuple(inside)
        rings = [B.section[V].ring for V in comps]
        constraints = [
            [(i, B.restriction[(comps[i], comps[j])].images) for i in range(j) if comps[j] <= comps[i]]
            for j in range(len(comps))
        ]
        fams = list(_families(rings, constraints))
        ring, index = ring_of_tuples(rings, fams, _label_open(X, U))
        components[U], index_maps[U], sections[U] = comps, index, ring
    restrictions = {}
    for U in X.opens:
        order = sorted(index_maps[U], key=index_maps[U].get)
        for V in X.opens:
            if V <= U:
                pos = [components[U].index(W) for W in components[V]]
                restrictions[(U, V)] = RingHom(
                    sections[U], sections[V], tuple(index_maps[V][tuple(t[k] for k in pos)] for t in order)
                )
    O = PresheafOfRings(X, sections, restrictions, f"O_{R.label}")
    report = check_presheaf(O)
    if not report.ok:
        raise AssertionError(f"extension is not a presheaf: {report.witness}")
    from_basis = {}
    for U in B.basis_opens:
        src = B.section[U].ring
        images = []
        for x in src.elements:
            fam = tuple(B.restriction[(U, V)](x) for V in components[U])
            images.append(index_maps[U][fam])
        h = RingHom(src, sections[U], tuple(images))
        if h.violation() is not None or not h.is_bijective:
            raise AssertionError(f"extension disagrees with the basis on {X.describe(U)}")
        from_basis[U] = h
    return StructureSheaf(R, B, O, components, index_maps, from_basis)


def _families(rings, constraints):
    """Tuples over ``rings`` with x_j = rho(x_i) for each (i, rho) in constraints[j].

    Components are ordered by decreasing size, so each constraint only looks
    back at already assigned slots.
    """
    n = len(rings)
    fam = [0] * n

    def extend(j):
        if j == n:
            yield tuple(fam)
            return
        for x in rings[j].elements:
            if all(rho[fam[i]] == x for i, rho in constraints[j]):
                fam[j] = x
                yield from extend(j + 1)

    yield from extend(0)


@lru_cache(maxsize=512)
def structure_sheaf(R: FiniteRing) -> StructureSheaf:
    return extend_from_basis(presheaf_on_basis(R))


def global_section_map(R: FiniteRing) -> RingHom:
    """R -> O(Spec R), r ↦ the family of r/1."""
    O = structure_sheaf(R)
    whole = O.presheaf.space.whole
    index = O.family_index[whole]
    comps = O.components[whole]
    return RingHom(
        R,
        O.presheaf(whole),
        tuple(index[tuple(O.basis.section[V].canonical(r) for V in comps)] for r in R.elements),
    )


# -- the function construction -------------------------------------------------


@lru_cache(maxsize=512)
def local_ring_at(R: FiniteRing, p: PrimeIdeal) -> LocalizedRing:
    return localize(R, complement_submonoid(R, p.members))


@dataclass(frozen=True)
class HartshorneSection:
    """A function p ↦ R_p on an open, with a fraction certificate at each point.

    ``certificate[p] = (W, r, s)``: W is a basic open with p ∈ W ⊆ U and the
    function equals r/s at every point of W.
    """

    open: frozenset
    value: tuple[tuple[PrimeIdeal, int], ...]
    certificate: tuple[tuple[PrimeIdeal, tuple[frozenset, int, int]], ...]

    def at(self, p: PrimeIdeal) -> int:
        return dict(self.value)[p]


def certificate_violation(R: FiniteRing, sec: HartshorneSection) -> str | None:
    values = dict(sec.value)
    if set(values) != set(sec.open):
        return "function is not defined exactly on its open"
    certs = dict(sec.certificate)
    for p in sec.open:
        if p not in certs:
            return f"no certificate at {p}"
        W, r, s = certs[p]
        if p not in W or not W <= sec.open:
            return f"certificate neighbourhood at {p} is not inside the open"
        for q in W:
            if s in q.members:
                return f"denominator {s} vanishes at {q}"
            if local_ring_at(R, q).frac(r, s) != values[q]:
                return f"value at {q} is not {r}/{s}"
    return None


@dataclass(frozen=True, eq=False)
class HartshornePresheaf:
    ring: FiniteRing
    presheaf: PresheafOfRings
    sections: Mapping[frozenset, tuple[HartshorneSection, ...]]
    points_of: Mapping[frozenset, tuple[PrimeIdeal, ...]]


@lru_cache(maxsize=512)
def hartshorne_presheaf(R: FiniteRing) -> HartshornePresheaf:
    X = zariski_topology(R)
    stalks = {p: local_ring_at(R, p) for p in X.points}
    basics = sorted(set(basic_opens(R).values()), key=len)
    local_functions: dict[frozenset, dict[tuple[int, ...], tuple[int, int]]] = {}
    for W in basics:
        pts = [p for p in X.points if p in W]
        table: dict[tuple[int, ...], tuple[int, int]] = {}
        for s in s_of_open(R, W):
            for r in R.elements:
                table.setdefault(tuple(stalks[q].frac(r, s) for q in pts), (r, s))
        local_functions[W] = table

    sections, points_of, rings = {}, {}, {}
    for U in X.opens:
        pts = tuple(p for p in X.points if p in U)
        points_of[U] = pts
        found = []
        for values in product(*(stalks[p].ring.elements for p in pts)):
            assignment = dict(zip(pts, values))
            certs = []
            for p in pts:
                cert = None
                for W in basics:
                    if p in W and W <= U:
                        key = tuple(assignment[q] for q in X.points if q in W)
                        frac = local_functions[W].get(key)
                        if frac is not None:
                            cert = (W, *frac)
                            break
                if cert is None:
                    break
                certs.append((p, cert))
            else:
                found.append(HartshorneSection(U, tuple(assignment.items()), tuple(certs)))
        sections[U] = tuple(found)
        values = [tuple(v for _, v in s.value) for s in found]
        ring, _ = ring_of_tuples([stalks[p].ring for p in pts], values, f"H({X.describe(U)})")
        rings[U] = ring
    restrictions = {}
    for U in X.opens:
        elems_U = sorted(tuple(v for _, v in s.value) for s in sections[U])
        for V in X.opens:
            if V <= U:
                keep = [k for k, p in enumerate(points_of[U]) if p in V]
                index_V = {t: i for i, t in enumerate(sorted(tuple(v for _, v in s.value) for s in sections[V]))}
                images = tuple(index_V[tuple(t[k] for k in keep)] for t in elems_U)
                restrictions[(U, V)] = RingHom(rings[U], rings[V], images)
    H = PresheafOfRings(X, rings, restrictions, f"H_{R.label}")
    report = check_presheaf(H)
    if not report.ok:
        raise AssertionError(f"function presheaf is not a presheaf: {report.witness}")
    return HartshornePresheaf(R, H, sections, points_of)


@dataclass
class ComparisonVerdict:
    ok: bool
    report: MorphismReport
    morphism: PresheafMorphism


def compare_constructions(R: FiniteRing) -> ComparisonVerdict:
    """Family ↦ pointwise germs, checked natural and bijective on every open."""
    O = structure_sheaf(R)
    H = hartshorne_presheaf(R)
    X = O.presheaf.space
    germ_maps: dict[tuple[frozenset, PrimeIdeal], RingHom] = {}

    def germ(V, p):
        if (V, p) not in germ_maps:
            germ_maps[(V, p)] = induced_map(O.basis.section[V], local_ring_at(R, p).canonical)
        return germ_maps[(V, p)]

    components = {}
    for U in X.opens:
        pts = H.points_of[U]
        index_H = {t: i for i, t in enumerate(sorted(tuple(v for _, v in s.value) for s in H.sections[U]))}
        comps = O.components[U]
        images = []
        for fam in sorted(O.family_index[U], key=O.family_index[U].get):
            values = []
            for p in pts:
                k = next(k for k, V in enumerate(comps) if p in V)
                values.append(germ(comps[k], p)(fam[k]))
            images.append(index_H.get(tuple(values), -1))
        if -1 in images:
            raise AssertionError(f"a family has no certified function on {X.describe(U)}")
        components[U] = RingHom(O.presheaf(U), H.presheaf(U), tuple(images))
    m = PresheafMorphism(O.presheaf, H.presheaf, components)
    report = check_morphism(m)
    return ComparisonVerdict(report.ok, report, m)


@dataclass
class GlobalSectionsVerdict:
    ok: bool
    basis_route: bool
    function_route: bool
    size: int


def global_sections_check(R: FiniteRing) -> GlobalSectionsVerdict:
    can = global_section_map(R)
    basis_ok = can.violation() is None and can.is_bijective
    H = hartshorne_presheaf(R)
    whole = H.presheaf.space.whole
    pts = H.points_of[whole]
    index_H = {t: i for i, t in enumerate(sorted(tuple(v for _, v in s.value) for s in H.sections[whole]))}
    fn = RingHom(
        R,
        H.presheaf(whole),
        tuple(index_H[tuple(local_ring_at(R, p).canonical(r) for p in pts)] for r in R.elements),
    )
    fn_ok = fn.violation() is None and fn.is_bijective
    return GlobalSectionsVerdict(basis_ok and fn_ok, basis_ok, fn_ok, can.target.size)


@dataclass
class StalkIdentification:
    ok: bool
    point: PrimeIdeal
    stalk_size: int
    iso: RingHom | None
    locality: LocalityWitness


def stalk_identification(R: FiniteRing, p: PrimeIdeal) -> StalkIdentification:
    """Stalk of O at p ≅ R localized at the complement of p, and it is local."""
    O = structure_sheaf(R).presheaf
    st = stalk(O, p)
    whole = O.space.whole
    to_stalk = st.germ[whole].compose(global_section_map(R))
    L = local_ring_at(R, p)
    iso = induced_map(L, to_stalk)
    bijective = iso.is_bijective
    locality = is_local_ring(st.ring)
    return StalkIdentification(bijective and locality.is_local, p, st.ring.size, iso if bijective else None, locality)


def basic_open_homeomorphism(R: FiniteRing, f: int) -> dict[PrimeIdeal, PrimeIdeal] | None:
    """Spec(R[1/f]) -> D(f), q ↦ canonical⁻¹(q); None unless it is a bijection."""
    L = localize_at_element(R, f)
    D = basic_opens(R)[f]
    out = {}
    for q in spec_points(L.ring):
        pre = frozenset(r for r in R.elements if L.canonical(r) in q.members)
        matches = [p for p in D if p.members == pre]
        if len(matches) != 1:
            return None
        out[q] = matches[0]
    if set(out.values()) != set(D) or len(out) != len(D):
        return None
    return out


# -- functoriality along ring maps, used for explicit isomorphism data -------


def spec_map(phi: RingHom) -> dict[PrimeIdeal, PrimeIdeal]:
    """Spec(target) -> Spec(source), q ↦ φ⁻¹(q)."""
    R, T = phi.source, phi.target
    primes = {p.members: p for p in spec_points(R)}
    out = {}
    for q in spec_points(T):
        pre = frozenset(r for r in R.elements if phi(r) in q.members)
        out[q] = primes[pre]
    return out


def sheaf_map(phi: RingHom) -> dict[frozenset, RingHom]:
    """O_R(V) -> O_T(f⁻¹V) for every open V of Spec R, where f = spec_map(φ).

    Built on basic opens via the universal property; every open of a finite
    spectrum is basic.
    """
    R, T = phi.source, phi.target
    OR, OT = structure_sheaf(R), structure_sheaf(T)
    f = spec_map(phi)
    out = {}
    for V in OR.presheaf.space.opens:
        pre = frozenset(q for q, p in f.items() if p in V)
        if V not in OR.from_basis or pre not in OT.from_basis:
            raise MalformedInput("open is not basic")
        LV, LT = OR.basis.section[V], OT.basis.section[pre]
        down = induced_map(LV, LT.canonical.compose(phi))
        out[V] = OT.from_basis[pre].compose(down).compose(OR.from_basis[V].inverse())
    return out
