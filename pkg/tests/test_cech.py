from itertools import combinations

import pytest

from schemecheck.cech import (
    beta_alpha_vanishes,
    beta_kernel,
    bezout_witness,
    build_sequence,
    check_exactness,
    commuting_squares_check,
)
from schemecheck.errors import NotUnitIdeal, PredicateFailure
from schemecheck.localization import localize_at_element
from schemecheck.ring_core import (
    identity_hom,
    ideal_generated_by,
    mk_gf_poly_quotient,
    mk_product,
    mk_zmod,
    ring_hom,
)
from schemecheck.spectrum import basic_open, spec_points

Z4, Z12, Z30 = mk_zmod(4), mk_zmod(12), mk_zmod(30)
SMALL = [
    mk_zmod(6),
    mk_zmod(8),
    Z12,
    mk_gf_poly_quotient(2, [0, 0, 1]),
    mk_product(mk_zmod(2), mk_zmod(3)),
    mk_product(mk_zmod(2), mk_zmod(2)),
]


def test_field_with_unit_element():
    F = mk_zmod(5)
    seq = build_sequence(F, [1])
    assert seq.level1[0][0].size == 5
    v = check_exactness(seq)
    assert v.exact and v.kernel_size == 5


def test_z12_slots():
    seq = build_sequence(Z12, [3, 4])
    assert [T.size for T, _ in seq.level1] == [4, 3]
    assert seq.level2[(0, 1)][0].is_zero_ring  # 3 * 4 = 0
    assert seq.level2[(0, 0)][0].size == 4
    v = check_exactness(seq)
    assert v.exact and v.alpha_injective and v.kernel_size == 12
    assert beta_alpha_vanishes(seq)


def test_substituted_witness_is_accepted():
    reduce4 = ring_hom(Z12, Z4, [r % 4 for r in Z12.elements])
    seq = build_sequence(Z12, [3, 4], {"level1": {0: (Z4, reduce4)}})
    assert seq.level1[0][0] is Z4
    assert check_exactness(seq).exact


def test_bad_witness_is_rejected():
    with pytest.raises(PredicateFailure) as info:
        build_sequence(Z12, [3, 4], {"level1": {0: (Z12, identity_hom(Z12))}})
    assert info.value.slot == "T_1"
    assert not info.value.report.verdict


def test_proper_ideal_is_refused():
    with pytest.raises(NotUnitIdeal) as info:
        build_sequence(Z12, [3])
    assert "(3)" in str(info.value)
    with pytest.raises(NotUnitIdeal):
        build_sequence(Z12, [])


def test_kernel_when_hypothesis_is_skipped():
    v = check_exactness(build_sequence(Z12, [3], require_unit_ideal=False))
    assert not v.exact and not v.alpha_injective
    assert v.alpha_kernel == {0, 4, 8}
    assert v.witness == ("alpha_kernel", 4)


def test_bezout():
    assert bezout_witness(Z12, [3, 4]) == (3, 1)
    a, b = bezout_witness(Z12, [3, 4])
    assert (3 * a + 4 * b) % 12 == 1
    assert bezout_witness(Z12, [2, 4]) is None


@pytest.mark.parametrize(
    "R, f, gs",
    [(Z12, 2, [3, 2]), (Z30, 2, [3, 5]), (Z12, 1, [3, 4]), (Z30, 1, [6, 10, 15])],
    ids=str,
)
def test_commuting_squares(R, f, gs):
    v = commuting_squares_check(R, f, gs)
    assert v.ok, v.witness


@pytest.mark.parametrize("R", SMALL, ids=lambda R: R.label)
def test_kernel_count_matches_enumeration(R):
    for n in (1, 2, 3):
        for fs in combinations(R.elements, n):
            seq = build_sequence(R, fs, require_unit_ideal=False)
            v = check_exactness(seq)
            kernel = list(beta_kernel(seq))
            assert v.kernel_size == len(kernel)
            images = {seq.alpha(r) for r in R.elements}
            assert v.kernel_in_image == (set(kernel) <= images)
            assert v.image_in_kernel == beta_alpha_vanishes(seq)


@pytest.mark.parametrize("R", SMALL + [Z30], ids=lambda R: R.label)
def test_unit_ideal_iff_basic_opens_cover(R):
    whole = frozenset(spec_points(R))
    for n in (1, 2):
        for fs in combinations(R.elements, n):
            covers = frozenset().union(*(basic_open(R, f) for f in fs)) == whole
            assert covers == (not ideal_generated_by(R, fs).is_proper)


@pytest.mark.parametrize("R", SMALL, ids=lambda R: R.label)
def test_equal_localization_data_gives_equal_verdicts(R):
    def data(f):
        L = localize_at_element(R, f)
        return (L.ring, L.canonical.images)

    mul = R.mul_table
    by_key: dict = {}
    for n in (1, 2):
        for fs in combinations(R.elements, n):
            if ideal_generated_by(R, fs).is_proper:
                continue
            key = tuple(data(f) for f in fs) + tuple(
                data(mul[fs[i]][fs[j]]) for i in range(n) for j in range(i, n)
            )
            record = check_exactness(build_sequence(R, fs)).record()
            assert by_key.setdefault(key, record) == record
