import pytest

from oracles import brute_homs, brute_torsion, brute_units, is_local_brute, powers
from schemecheck.errors import BudgetExceeded, HomSearchTruncated, MalformedInput
from schemecheck.ring_core import (
    FiniteRing,
    Ideal,
    RingHom,
    Submonoid,
    enumerate_homs,
    idempotents,
    ideal_generated_by,
    identity_hom,
    is_isomorphic,
    is_local_ring,
    mk_gf_poly_quotient,
    mk_product,
    mk_quotient,
    mk_zmod,
    ring_hom,
    ring_of_tuples,
    s_torsion,
    submonoid_generated_by,
    units,
    verify_ring_axioms,
)


def test_zero_ring():
    Z1 = mk_zmod(1)
    assert Z1.size == 1 and Z1.one == Z1.zero
    assert Z1.is_zero_ring
    assert verify_ring_axioms(Z1).ok
    assert units(Z1) == {0}


def test_z12_basics():
    R = mk_zmod(12)
    assert R.size == 12
    assert verify_ring_axioms(R).ok
    assert units(R) == {1, 5, 7, 11}


def test_z2_is_field():
    assert units(mk_zmod(2)) == {1}


@pytest.mark.parametrize("n", [0, -3])
def test_zmod_rejects_nonpositive(n):
    with pytest.raises(MalformedInput):
        mk_zmod(n)


def test_size_cap():
    with pytest.raises(BudgetExceeded):
        mk_zmod(300)
    assert mk_zmod(300, max_size=300).size == 300


def test_gf_quotients():
    deg1 = mk_gf_poly_quotient(2, [0, 1])
    assert deg1.size == 2 and is_isomorphic(deg1, mk_zmod(2)) is not None
    F4 = mk_gf_poly_quotient(2, [1, 1, 1])
    assert F4.size == 4 and units(F4) == {1, 2, 3}
    dual = mk_gf_poly_quotient(2, [0, 0, 1])
    x = 2  # index of x
    assert dual.mul(x, x) == dual.zero
    assert is_local_ring(dual).is_local
    assert verify_ring_axioms(F4).ok and verify_ring_axioms(dual).ok


@pytest.mark.parametrize("p, coeffs", [(4, [1, 1]), (2, [1, 0]), (3, [2])])
def test_gf_rejects_bad_input(p, coeffs):
    with pytest.raises(MalformedInput):
        mk_gf_poly_quotient(p, coeffs)


def test_gf_element_encoding():
    R = mk_gf_poly_quotient(3, [1, 0, 1])  # x^2 = -1
    x = 3
    assert R.mul(x, x) == 2  # -1 = 2 as a constant
    assert R.add(x, 1) == 4


def test_products():
    Z4, Z3 = mk_zmod(4), mk_zmod(3)
    P = mk_product(Z4, Z3)
    assert P.size == 12 and verify_ring_axioms(P).ok
    assert P.mul(1 * 3 + 2, 3 * 3 + 2) == (3 % 4) * 3 + (4 % 3)  # (1,2)(3,2) = (3,1)
    assert is_isomorphic(P, mk_zmod(12)) is not None
    assert is_isomorphic(mk_product(mk_zmod(1), Z4), Z4) is not None
    Z2sq = mk_product(mk_zmod(2), mk_zmod(2))
    assert len([e for e in idempotents(Z2sq) if e not in (Z2sq.zero, Z2sq.one)]) == 2


def test_quotients():
    R = mk_zmod(12)
    Q0, _ = mk_quotient(R, ideal_generated_by(R, []))
    assert is_isomorphic(Q0, R) is not None
    Q1, _ = mk_quotient(R, ideal_generated_by(R, [1]))
    assert Q1.is_zero_ring
    I = ideal_generated_by(R, [4])
    assert I.members == {0, 4, 8}
    Q, proj = mk_quotient(R, I)
    assert Q.size == 4 and is_isomorphic(Q, mk_zmod(4)) is not None
    assert proj.kernel == I.members and proj.is_hom


def test_ideal_generation():
    R = mk_zmod(12)
    assert ideal_generated_by(R, []).members == {0}
    assert not ideal_generated_by(R, [3, 4]).is_proper
    assert ideal_generated_by(R, [8]).members == {0, 4, 8}
    assert str(ideal_generated_by(R, [9])) == "(3)"
    with pytest.raises(MalformedInput):
        Ideal(R, frozenset({0, 3}))


def test_submonoids():
    R = mk_zmod(12)
    assert submonoid_generated_by(R, []).members == {1}
    assert submonoid_generated_by(R, [3]).members == {1, 3, 9}
    assert submonoid_generated_by(R, [2]).members == {1, 2, 4, 8}
    with pytest.raises(MalformedInput):
        Submonoid(R, frozenset({1, 2}))


def test_s_torsion():
    R = mk_zmod(12)
    assert s_torsion(R, submonoid_generated_by(R, [])).members == {0}
    assert s_torsion(R, submonoid_generated_by(R, [3])).members == {0, 4, 8}
    assert s_torsion(R, submonoid_generated_by(R, [5])).members == {0}


def test_homs_examples():
    Z12, Z4, Z3 = mk_zmod(12), mk_zmod(4), mk_zmod(3)
    assert identity_hom(Z12).images in {h.images for h in enumerate_homs(Z12, Z12)}
    assert len(enumerate_homs(Z12, Z4)) == 1
    assert enumerate_homs(Z3, Z4) == []


def test_hom_search_budget():
    with pytest.raises(HomSearchTruncated):
        enumerate_homs(mk_zmod(12), mk_zmod(12), max_product=100)


SMALL = [
    mk_zmod(1),
    mk_zmod(2),
    mk_zmod(4),
    mk_zmod(6),
    mk_gf_poly_quotient(2, [1, 1, 1]),
    mk_gf_poly_quotient(2, [0, 0, 1]),
    mk_product(mk_zmod(2), mk_zmod(2)),
]


@pytest.mark.parametrize("R", SMALL, ids=lambda R: R.label)
@pytest.mark.parametrize("T", SMALL[:5], ids=lambda R: R.label)
def test_homs_match_brute_force(R, T):
    if T.size**R.size > 300_000:
        pytest.skip("too large for the brute-force oracle")
    assert {h.images for h in enumerate_homs(R, T)} == brute_homs(R, T)


@pytest.mark.parametrize("R", SMALL + [mk_zmod(12), mk_zmod(30)], ids=lambda R: R.label)
def test_units_and_locality_match_brute_force(R):
    assert units(R) == brute_units(R)
    assert is_local_ring(R).is_local == is_local_brute(R)
    for f in R.elements:
        S = submonoid_generated_by(R, [f])
        assert S.members == powers(R, f)
        assert s_torsion(R, S).members == brute_torsion(R, S)


def test_locality_examples():
    w = is_local_ring(mk_zmod(4))
    assert w.is_local and w.maximal_ideal.members == {0, 2}
    w = is_local_ring(mk_zmod(12))
    assert not w.is_local
    assert {str(I) for I in w.competing} == {"(2)", "(3)"}
    w = is_local_ring(mk_zmod(7))
    assert w.is_local and w.maximal_ideal.members == {0}
    assert not is_local_ring(mk_zmod(1)).is_local


def _swap_one_entry(R: FiniteRing, a: int, b: int, value: int) -> FiniteRing:
    mul = [list(row) for row in R.mul_table]
    mul[a][b] = mul[b][a] = value
    return FiniteRing.from_tables(R.add_table, mul, R.zero, R.one, "defective")


def test_axiom_defect_is_reported_with_witness():
    R = mk_zmod(6)
    assert verify_ring_axioms(R).ok
    bad = _swap_one_entry(R, 2, 3, 1)  # 2*3 should be 0
    report = verify_ring_axioms(bad)
    assert not report.ok
    dist = report["distributive"]
    assert not dist.ok
    a, b, c = dist.witness
    lhs = bad.mul(a, bad.add(b, c))
    rhs = bad.add(bad.mul(a, b), bad.mul(a, c))
    assert lhs != rhs


def test_axiom_report_catches_noncommutative_table():
    R = mk_zmod(3)
    mul = [list(row) for row in R.mul_table]
    mul[1][2] = 0
    report = verify_ring_axioms(FiniteRing.from_tables(R.add_table, mul, 0, 1))
    assert not report["mul_commutative"].ok
    assert report["mul_commutative"].witness in {(1, 2), (2, 1)}


def test_ring_hom_validation():
    Z12, Z4 = mk_zmod(12), mk_zmod(4)
    h = ring_hom(Z12, Z4, [r % 4 for r in range(12)])
    assert h.kernel == {0, 4, 8} and h.is_surjective
    with pytest.raises(MalformedInput):
        ring_hom(Z12, Z4, [r % 2 for r in range(12)])
    with pytest.raises(MalformedInput):
        RingHom(Z12, Z4, (0,) * 11)


def test_ring_of_tuples_requires_closure():
    Z2 = mk_zmod(2)
    R, index = ring_of_tuples([Z2, Z2], [(0, 0), (1, 1)])
    assert R.size == 2 and index[(1, 1)] == R.one
    with pytest.raises(MalformedInput):
        ring_of_tuples([Z2, Z2], [(0, 0), (1, 0)])


def test_structural_equality_ignores_label():
    a = mk_zmod(5)
    b = FiniteRing.from_tables(a.add_table, a.mul_table, 0, 1, "other")
    assert a == b and hash(a) == hash(b)
    assert a != mk_zmod(6)
