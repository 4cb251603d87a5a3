import random

from hypothesis import given, settings
from hypothesis import strategies as st

from fuzz_exprs import random_expr, spell
from oracles import localization_class_count
from schemecheck.errors import BudgetExceeded, MalformedInput
from schemecheck.expr import parse_ring_expr, to_ring, to_text
from schemecheck.localization import localize
from schemecheck.ring_core import (
    ideal_generated_by,
    mk_gf_poly_quotient,
    mk_product,
    mk_quotient,
    mk_zmod,
    s_torsion,
    submonoid_generated_by,
    units,
    verify_ring_axioms,
)
from schemecheck.spectrum import basic_open, enumerate_ideals

BASE = [mk_zmod(n) for n in (1, 2, 3, 4, 6, 8, 9, 12)] + [
    mk_gf_poly_quotient(2, [1, 1, 1]),
    mk_gf_poly_quotient(2, [0, 0, 1]),
    mk_gf_poly_quotient(3, [0, 0, 1]),
]


@st.composite
def rings(draw):
    kind = draw(st.sampled_from(["base", "product", "quotient"]))
    A = draw(st.sampled_from(BASE))
    if kind == "product":
        B = draw(st.sampled_from([R for R in BASE if R.size * A.size <= 36]))
        return mk_product(A, B)
    if kind == "quotient":
        gens = draw(st.lists(st.integers(0, A.size - 1), max_size=2))
        return mk_quotient(A, ideal_generated_by(A, gens))[0]
    return A


@st.composite
def ring_and_elements(draw, n=2):
    R = draw(rings())
    return R, draw(st.lists(st.integers(0, R.size - 1), min_size=n, max_size=n))


settings.register_profile("schemecheck", max_examples=60, deadline=None)
settings.load_profile("schemecheck")


@given(rings())
def test_constructed_rings_satisfy_axioms(R):
    assert verify_ring_axioms(R).ok


@given(ring_and_elements(1))
def test_localization_kernel_and_size(data):
    R, (f,) = data
    S = submonoid_generated_by(R, [f])
    L = localize(R, S)
    assert L.canonical.kernel == s_torsion(R, S).members
    assert L.ring.size == localization_class_count(R, S)
    assert verify_ring_axioms(L.ring).ok


@given(rings(), st.data())
def test_inverting_units_changes_nothing(R, data):
    us = sorted(units(R))
    gens = data.draw(st.lists(st.sampled_from(us), max_size=3))
    assert localize(R, submonoid_generated_by(R, gens)).canonical.is_bijective


@given(ring_and_elements(2))
def test_basic_opens_multiply(data):
    R, (f, g) = data
    assert basic_open(R, f) & basic_open(R, g) == basic_open(R, R.mul(f, g))


@given(rings())
def test_ideals_closed_under_sum(R):
    ideals = enumerate_ideals(R)
    members = {I.members for I in ideals}
    for I in ideals:
        for J in ideals:
            total = frozenset(R.add(a, b) for a in I.members for b in J.members)
            assert total in members


@given(st.integers(0, 2**32 - 1))
def test_print_parse_fixpoint(seed):
    rng = random.Random(seed)
    e = random_expr(rng, 2)
    assert parse_ring_expr(to_text(e)) == e
    assert parse_ring_expr(spell(rng, e)) == e
    text = to_text(e)
    assert to_text(parse_ring_expr(text)) == text


@given(st.integers(0, 2**32 - 1))
def test_printed_expression_builds_same_ring(seed):
    e = random_expr(random.Random(seed), 1)
    try:
        R = to_ring(e, 64)
    except (BudgetExceeded, MalformedInput):
        return
    assert to_ring(parse_ring_expr(to_text(e)), 64) == R
