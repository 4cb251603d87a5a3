"""Ringed spaces, locally ringed spaces and checkable scheme certificates.

Certificates are supplied and verified, never searched for.  Isomorphisms are
always explicit per-open ring maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import MalformedInput
from .ring_core import FiniteRing, LocalityWitness, RingHom, is_local_ring
from .sheaf import (
    DEFAULT_MAX_COVERS,
    ComparisonResult,
    OpenEmbedding,
    PresheafOfRings,
    SheafVerdict,
    glue_presheaves,
    identity_embedding,
    is_sheaf,
    pullback,
    restriction_comparison_iso,
    stalk,
)
from .spectrum import FiniteTopology, subspace, zariski_topology
from .structure_sheaf import stalk_identification, structure_sheaf


@dataclass(frozen=True, eq=False)
class RingedSpace:
    space: FiniteTopology
    sheaf: PresheafOfRings
    sheaf_certificate: SheafVerdict

    def __post_init__(self):
        if not self.sheaf_certificate.ok:
            raise MalformedInput("sheaf certificate does not pass")


@dataclass(frozen=True, eq=False)
class LocallyRingedSpace:
    base: RingedSpace
    stalk_certificates: Mapping[object, LocalityWitness]

    def __post_init__(self):
        bad = [x for x, w in self.stalk_certificates.items() if not w.is_local]
        if bad:
            raise MalformedInput(f"stalk at {bad[0]} is not local")

    @property
    def space(self) -> FiniteTopology:
        return self.base.space

    @property
    def sheaf(self) -> PresheafOfRings:
        return self.base.sheaf


def ringed_space(F: PresheafOfRings, cover_budget: int = DEFAULT_MAX_COVERS) -> RingedSpace:
    return RingedSpace(F.space, F, is_sheaf(F, cover_budget))


def stalk_certificates(F: PresheafOfRings) -> dict[object, LocalityWitness]:
    return {x: is_local_ring(stalk(F, x).ring) for x in F.space.points}


def locally_ringed(X: RingedSpace) -> LocallyRingedSpace:
    return LocallyRingedSpace(X, stalk_certificates(X.sheaf))


def mk_affine(R: FiniteRing, cover_budget: int = DEFAULT_MAX_COVERS) -> LocallyRingedSpace:
    O = structure_sheaf(R).presheaf
    base = RingedSpace(O.space, O, is_sheaf(O, cover_budget))
    certs = {p: stalk_identification(R, p).locality for p in O.space.points}
    return LocallyRingedSpace(base, certs)


# -- isomorphisms ---------------------------------------------------------------


@dataclass
class IsoVerdict:
    ok: bool
    witness: str | None = None


def _presheaf(X) -> PresheafOfRings:
    return X if isinstance(X, PresheafOfRings) else X.sheaf


def ringed_space_iso_check(X, Y, point_map: Mapping, homs: Mapping[frozenset, RingHom]) -> IsoVerdict:
    """Is (f, f#) an isomorphism X -> Y?

    ``point_map`` is f on points; ``homs[V]`` maps O_Y(V) -> O_X(f⁻¹V) for
    each open V of Y.
    """
    FX, FY = _presheaf(X), _presheaf(Y)
    SX, SY = FX.space, FY.space
    if set(point_map) != set(SX.points) or set(point_map.values()) != set(SY.points):
        return IsoVerdict(False, "point map is not a bijection of points")
    if len(set(point_map.values())) != len(point_map):
        return IsoVerdict(False, "point map is not injective")

    def pre(V):
        return frozenset(x for x in SX.points if point_map[x] in V)

    opens_X = set(SX.opens)
    if {pre(V) for V in SY.opens} != opens_X:
        return IsoVerdict(False, "point map is not a homeomorphism")
    for V in SY.opens:
        h = homs.get(V)
        if h is None:
            return IsoVerdict(False, f"no map on {SY.describe(V)}")
        if h.source != FY(V) or h.target != FX(pre(V)):
            return IsoVerdict(
                False, f"map on {SY.describe(V)} does not go {FY(V).label} -> {FX(pre(V)).label}"
            )
        problem = h.violation()
        if problem:
            return IsoVerdict(False, f"map on {SY.describe(V)}: {problem}")
        if not h.is_bijective:
            return IsoVerdict(False, f"map on {SY.describe(V)} is not bijective")
    for V in SY.opens:
        for W in SY.opens:
            if W <= V:
                lhs = FX.res(pre(V), pre(W)).compose(homs[V]).images
                rhs = homs[W].compose(FY.res(V, W)).images
                if lhs != rhs:
                    return IsoVerdict(False, f"square {SY.describe(V)} ⊇ {SY.describe(W)} fails")
    return IsoVerdict(True)


# -- scheme certificates ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CertificateMember:
    """U_i ≅ Spec(R_i): ``iso[V]`` maps (ι*O_X)(V) -> O_{R_i}(V)."""

    open: frozenset
    ring: FiniteRing
    embedding: OpenEmbedding
    iso: Mapping[frozenset, RingHom]
    comparison: ComparisonResult | None = None


@dataclass(frozen=True, eq=False)
class SchemeCertificate:
    members: tuple[CertificateMember, ...]


@dataclass
class SchemeVerdict:
    ok: bool
    uncovered: tuple = ()
    member_failures: dict[int, str] = field(default_factory=dict)


def scheme_check(
    X: LocallyRingedSpace, cert: SchemeCertificate, cover_budget: int = DEFAULT_MAX_COVERS
) -> SchemeVerdict:
    covered = frozenset().union(*(m.open for m in cert.members))
    uncovered = tuple(p for p in X.space.points if p not in covered)
    failures: dict[int, str] = {}
    opens_X = set(X.space.opens)
    for k, m in enumerate(cert.members):
        e = m.embedding
        spec_space = zariski_topology(m.ring)
        if m.open not in opens_X:
            failures[k] = "member is not open"
            continue
        if e.target is not X.space and e.target != X.space:
            failures[k] = "embedding does not land in the space"
            continue
        if set(e.source.opens) != set(spec_space.opens):
            failures[k] = "embedding does not start at Spec of the member ring"
            continue
        if e.image != m.open:
            failures[k] = "embedding is not onto its member"
            continue
        if {e(V) for V in e.source.opens} != {U for U in X.space.opens if U <= m.open}:
            failures[k] = "embedding is not a homeomorphism onto its member"
            continue
        pulled = pullback(e, X.sheaf)
        affine = structure_sheaf(m.ring).presheaf
        verdict = ringed_space_iso_check(affine, pulled, {p: p for p in spec_space.points}, m.iso)
        if not verdict.ok:
            failures[k] = verdict.witness
    return SchemeVerdict(not uncovered and not failures, uncovered, failures)


def affine_is_scheme(R: FiniteRing) -> SchemeCertificate:
    """Cover Spec(R) by itself; the comparison maps are restrictions ρ_{ι(U),U}."""
    X = mk_affine(R)
    iota = identity_embedding(X.space)
    comparison = restriction_comparison_iso(iota, X.sheaf)
    if not comparison.ok:
        raise AssertionError(f"comparison is not an isomorphism: {comparison.report.witness}")
    member = CertificateMember(X.space.whole, R, iota, dict(comparison.morphism.components), comparison)
    return SchemeCertificate((member,))


# -- gluing affines along empty overlaps ------------------------------------------


def disjoint_union_topology(spaces: Sequence[FiniteTopology]) -> FiniteTopology:
    points = tuple((i, p) for i, X in enumerate(spaces) for p in X.points)
    opens = [frozenset()]
    for i, X in enumerate(spaces):
        opens = [U | frozenset((i, p) for p in V) for U in opens for V in X.opens]
    return FiniteTopology(points, tuple(opens))


@dataclass(frozen=True, eq=False)
class DisjointUnion:
    scheme: LocallyRingedSpace
    certificate: SchemeCertificate
    members: tuple[frozenset, ...]


def disjoint_union_of_affines(rings: Sequence[FiniteRing], cover_budget: int = DEFAULT_MAX_COVERS) -> DisjointUnion:
    """Glue Spec(R_1), ..., Spec(R_n) along empty overlaps, with its affine cover."""
    specs = [zariski_topology(R) for R in rings]
    X = disjoint_union_topology(specs)
    members = tuple(frozenset((i, p) for p in S.points) for i, S in enumerate(specs))
    locals_ = []
    for i, R in enumerate(rings):
        sub = subspace(X, members[i])
        to_spec = OpenEmbedding(sub, specs[i], {(i, p): p for p in specs[i].points})
        locals_.append(pullback(to_spec, structure_sheaf(R).presheaf))
    overlaps = {}
    for i in range(len(rings)):
        for j in range(len(rings)):
            if i != j:
                empty = frozenset()
                overlaps[(i, j)] = {empty: RingHom(locals_[i](empty), locals_[j](empty), (0,))}
    glued = glue_presheaves(X, members, locals_, overlaps, cover_budget=cover_budget)
    F = glued.presheaf
    space = locally_ringed(ringed_space(F, cover_budget))
    cert_members = []
    for i, R in enumerate(rings):
        iota = OpenEmbedding(specs[i], X, {p: (i, p) for p in specs[i].points})
        iso = {V: glued.projections[(iota(V), i)] for V in specs[i].opens}
        cert_members.append(CertificateMember(members[i], R, iota, iso))
    return DisjointUnion(space, SchemeCertificate(tuple(cert_members)), members)
