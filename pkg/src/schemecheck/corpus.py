"""The regression corpus of small rings used by the property and acceptance suites."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .ring_core import FiniteRing, mk_gf_poly_quotient, mk_product, mk_zmod

MAX_PRODUCT_SIZE = 36


def monic_polys(p: int, max_degree: int) -> list[list[int]]:
    """Coefficient lists (low degree first) of monic polynomials of degree 1..max_degree."""
    out = []
    for d in range(1, max_degree + 1):
        for lower in product(range(p), repeat=d):
            out.append(list(lower) + [1])
    return out


@lru_cache(maxsize=None)
def base_rings() -> tuple[FiniteRing, ...]:
    rings = [mk_zmod(n) for n in range(2, 25)]
    for p in (2, 3):
        rings.extend(mk_gf_poly_quotient(p, f) for f in monic_polys(p, 2))
    return tuple(rings)


@lru_cache(maxsize=None)
def product_rings(max_size: int = MAX_PRODUCT_SIZE) -> tuple[FiniteRing, ...]:
    base = base_rings()
    out = []
    for i, A in enumerate(base):
        for B in base[i:]:
            if A.size * B.size <= max_size:
                out.append(mk_product(A, B))
    return tuple(out)


@lru_cache(maxsize=None)
def corpus(max_size: int | None = None) -> tuple[FiniteRing, ...]:
    rings = base_rings() + product_rings()
    if max_size is not None:
        rings = tuple(R for R in rings if R.size <= max_size)
    return rings
