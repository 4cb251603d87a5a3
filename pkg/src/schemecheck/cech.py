"""Exactness of 0 -> R -> ⊕ T_i -> ⊕ T_ij for elements generating the unit ideal.

T_i and T_ij may be any rings with homs from R satisfying the localization
predicate for <f_i> and <f_i f_j>; the explicit localizations are only the
default choice.  Maps T_i -> T_ij are always the unique algebra maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .errors import MalformedInput, NotUnitIdeal, PredicateFailure
from .localization import (
    double_localization_check,
    localize_at_element,
    strickland_check,
    unique_algebra_map,
)
from .ring_core import FiniteRing, Ideal, RingHom, ideal_generated_by, identity_hom, submonoid_generated_by

Slot = tuple[FiniteRing, RingHom]


def bezout_witness(R: FiniteRing, fs: Sequence[int]) -> tuple[int, ...] | None:
    """Coefficients a_i with sum a_i f_i = 1, or None."""
    reach: dict[int, tuple[int, ...]] = {R.zero: ()}
    for f in fs:
        nxt: dict[int, tuple[int, ...]] = {}
        for total, coeffs in reach.items():
            for a in R.elements:
                nxt.setdefault(R.add_table[total][R.mul_table[a][f]], coeffs + (a,))
        reach = nxt
    return reach.get(R.one)


@dataclass(frozen=True, eq=False)
class CechSequence:
    base: FiniteRing
    elements: tuple[int, ...]
    level1: tuple[Slot, ...]
    level2: Mapping[tuple[int, int], Slot]
    connect: Mapping[tuple[int, int, int], RingHom]
    unit_ideal: Ideal

    @property
    def bezout(self) -> tuple[int, ...] | None:
        return bezout_witness(self.base, self.elements)

    @property
    def n(self) -> int:
        return len(self.elements)

    def alpha(self, r: int) -> tuple[int, ...]:
        return tuple(phi(r) for _, phi in self.level1)

    def beta(self, xs: Sequence[int]) -> dict[tuple[int, int], int]:
        """(i, j) ↦ image of x_i in T_ij minus image of x_j, for i < j."""
        out = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                T = self.level2[(i, j)][0]
                out[(i, j)] = T.sub(self.connect[(i, j, i)](xs[i]), self.connect[(i, j, j)](xs[j]))
        return out


def build_sequence(
    R: FiniteRing,
    fs: Sequence[int],
    witnesses: Mapping | None = None,
    *,
    require_unit_ideal: bool = True,
) -> CechSequence:
    """Assemble and verify the sequence.

    ``witnesses`` may hold ``"level1": {i: (T, phi)}`` and
    ``"level2": {(i, j): (T, psi)}`` overriding the explicit localizations.
    """
    fs = tuple(fs)
    ideal = ideal_generated_by(R, fs)
    if require_unit_ideal and ideal.is_proper:
        raise NotUnitIdeal(ideal)
    witnesses = witnesses or {}
    given1 = witnesses.get("level1", {})
    given2 = witnesses.get("level2", {})
    n = len(fs)
    level1 = []
    for i, f in enumerate(fs):
        slot = given1.get(i)
        if slot is None:
            slot = _default_slot(R, f)
        else:
            _check_slot(R, slot, [f], f"T_{i + 1}")
        level1.append(slot)
    level2 = {}
    for i in range(n):
        for j in range(i, n):
            slot = given2.get((i, j))
            g = R.mul_table[fs[i]][fs[j]]
            if slot is None:
                slot = _default_slot(R, g)
            else:
                _check_slot(R, slot, [g], f"T_{i + 1}{j + 1}")
            level2[(i, j)] = slot
    connect = {}
    for (i, j), (_, psi) in level2.items():
        g = R.mul_table[fs[i]][fs[j]]
        for k in (i, j):
            if k not in given1 and (i, j) not in given2:
                h = _default_connect(R, fs[k], g)
            else:
                phi = level1[k][1]
                h = unique_algebra_map(phi, submonoid_generated_by(R, [fs[k]]), psi)
            if h is None:
                raise MalformedInput(f"no algebra map T_{k + 1} -> T_{i + 1}{j + 1}")
            connect[(i, j, k)] = h
    return CechSequence(R, fs, tuple(level1), level2, connect, ideal)


@lru_cache(maxsize=1 << 16)
def _default_slot(R: FiniteRing, f: int) -> Slot:
    L = localize_at_element(R, f)
    slot = (L.ring, L.canonical)
    _check_slot(R, slot, [f], f"R[1/{f}]")
    return slot


@lru_cache(maxsize=1 << 16)
def _default_connect(R: FiniteRing, f: int, g: int) -> RingHom | None:
    """R[1/f] -> R[1/g] over R, for the explicit localizations."""
    return unique_algebra_map(_default_slot(R, f)[1], submonoid_generated_by(R, [f]), _default_slot(R, g)[1])


def _check_slot(R: FiniteRing, slot: Slot, gens: Sequence[int], name: str):
    T, phi = slot
    if phi.source != R or phi.target != T:
        raise MalformedInput(f"{name}: hom does not go from the base ring to the slot ring")
    report = strickland_check(phi, submonoid_generated_by(R, gens))
    if not report.verdict:
        raise PredicateFailure(name, report)


@dataclass
class ExactnessVerdict:
    exact: bool
    alpha_injective: bool
    alpha_kernel: frozenset[int]
    image_in_kernel: bool
    kernel_in_image: bool
    kernel_size: int
    witness: object = None

    def record(self) -> dict:
        return {
            "exact": self.exact,
            "alpha_injective": self.alpha_injective,
            "alpha_kernel": sorted(self.alpha_kernel),
            "image_in_kernel": self.image_in_kernel,
            "kernel_in_image": self.kernel_in_image,
            "kernel_size": self.kernel_size,
            "witness": self.witness,
        }


def beta_kernel(seq: CechSequence):
    """Enumerate tuples (x_i) with beta = 0, pruning on each prefix."""
    n = seq.n
    rings = [T for T, _ in seq.level1]
    pairs = []
    for j in range(n):
        pairs.append([(i, seq.connect[(i, j, i)].images, seq.connect[(i, j, j)].images) for i in range(j)])
    xs = [0] * n

    def extend(j):
        if j == n:
            yield tuple(xs)
            return
        for x in rings[j].elements:
            if all(ci[xs[i]] == cj[x] for i, ci, cj in pairs[j]):
                xs[j] = x
                yield from extend(j + 1)

    yield from extend(0)


def beta_alpha_vanishes(seq: CechSequence) -> bool:
    """beta ∘ alpha = 0, checked on every element of the base ring."""
    for r in seq.base.elements:
        for key, v in seq.beta(seq.alpha(r)).items():
            if v != seq.level2[key][0].zero:
                return False
    return True


def _kernel_size(seq: CechSequence) -> int:
    """|ker beta| as a contraction of the pairwise agreement matrices."""
    n = seq.n
    if n == 0:
        return 1
    letters = "abcdefghijklmnopqrstuvwxyz"
    if n > len(letters):
        return sum(1 for _ in beta_kernel(seq))
    operands, subscripts = [], []
    for i in range(n):
        operands.append(np.ones(seq.level1[i][0].size, dtype=np.int64))
        subscripts.append(letters[i])
    for i in range(n):
        for j in range(i + 1, n):
            ci = seq.connect[(i, j, i)].np_images
            cj = seq.connect[(i, j, j)].np_images
            operands.append((ci[:, None] == cj[None, :]).astype(np.int64))
            subscripts.append(letters[i] + letters[j])
    return int(np.einsum(",".join(subscripts) + "->", *operands, optimize=n > 3))


def check_exactness(seq: CechSequence) -> ExactnessVerdict:
    """Verdict for 0 -> R -> ⊕ T_i -> ⊕ T_ij.

    Since im(alpha) ⊆ ker(beta) is checked first, the reverse inclusion holds
    iff both sets have the same size; tuples are enumerated only to produce a
    witness when it does not.
    """
    R, n = seq.base, seq.n
    A = np.array([phi.np_images for _, phi in seq.level1], dtype=np.int64).reshape(n, R.size)
    zeros = np.array([T.zero for T, _ in seq.level1], dtype=np.int64).reshape(n, 1)
    kernel = frozenset(np.flatnonzero((A == zeros).all(axis=0)).tolist())
    codes = np.zeros(R.size, dtype=np.int64)
    for i, (T, _) in enumerate(seq.level1):
        codes = codes * T.size + A[i]
    distinct = len(set(codes.tolist()))

    injective_witness = None
    nonzero_kernel = sorted(k for k in kernel if k != R.zero)
    if nonzero_kernel:
        injective_witness = ("alpha_kernel", nonzero_kernel[0])
    elif distinct < R.size:
        seen: dict[int, int] = {}
        for r, c in enumerate(codes.tolist()):
            if c in seen:
                injective_witness = ("alpha", seen[c], r)
                break
            seen[c] = r
    injective = injective_witness is None

    image_in_kernel = True
    for i in range(n):
        for j in range(i + 1, n):
            ci = seq.connect[(i, j, i)].np_images
            cj = seq.connect[(i, j, j)].np_images
            if not (ci[A[i]] == cj[A[j]]).all():
                image_in_kernel = False
    count = _kernel_size(seq)
    missing = None
    if not image_in_kernel or count != distinct:
        images = {tuple(col) for col in A.T.tolist()}
        missing = next((("kernel_not_image", xs) for xs in beta_kernel(seq) if xs not in images), None)
    kernel_in_image = missing is None
    witness = injective_witness or (None if image_in_kernel else ("image_not_kernel",)) or missing
    return ExactnessVerdict(
        injective and image_in_kernel and kernel_in_image,
        injective,
        kernel,
        image_in_kernel,
        kernel_in_image,
        count,
        witness,
    )


# -- comparing the two rows for a ring R[1/f] -------------------------------------


@dataclass
class SquaresVerdict:
    ok: bool
    row1_exact: bool
    row2_exact: bool
    squares_commute: bool
    verticals_bijective: bool
    witness: str | None = None


def commuting_squares_check(R: FiniteRing, f: int, gs: Sequence[int]) -> SquaresVerdict:
    """Compare the sequence for R[1/f] at g_i/1 with the one built from R[1/f g_i].

    Row 1 uses R[1/f][1/g_i] and R[1/f][1/g_i g_j]; row 2 uses R[1/f g_i] and
    R[1/f g_i g_j] made into R[1/f]-algebras.  Vertical maps are the unique
    algebra maps; every square is compared pointwise.
    """
    L = localize_at_element(R, f)
    A = L.ring
    hs = tuple(L.canonical(g) for g in gs)
    row1 = build_sequence(A, hs)

    def over_A(element_of_R: int, name: str) -> Slot:
        Lx = localize_at_element(R, element_of_R)
        structure = unique_algebra_map(L.canonical, L.monoid, Lx.canonical)
        if structure is None:
            raise MalformedInput(f"{name}: no R[1/f]-algebra structure")
        return (Lx.ring, structure)

    for g in gs:
        if not double_localization_check(R, f, g):
            raise AssertionError(f"R[1/f][1/{g}] fails the predicate for <f*{g}>")
    n = len(gs)
    mul = R.mul_table
    witnesses = {
        "level1": {i: over_A(mul[f][gs[i]], f"T'_{i + 1}") for i in range(n)},
        "level2": {
            (i, j): over_A(mul[mul[f][gs[i]]][gs[j]], f"T'_{i + 1}{j + 1}") for i in range(n) for j in range(i, n)
        },
    }
    row2 = build_sequence(A, hs, witnesses)

    verticals1 = []
    for i in range(n):
        v = unique_algebra_map(row1.level1[i][1], submonoid_generated_by(A, [hs[i]]), row2.level1[i][1])
        verticals1.append(v)
    verticals2 = {}
    for (i, j) in row1.level2:
        S = submonoid_generated_by(A, [A.mul_table[hs[i]][hs[j]]])
        verticals2[(i, j)] = unique_algebra_map(row1.level2[(i, j)][1], S, row2.level2[(i, j)][1])
    if any(v is None for v in verticals1) or any(v is None for v in verticals2.values()):
        return SquaresVerdict(False, False, False, False, False, "a vertical map does not exist")
    bijective = all(v.is_bijective for v in verticals1) and all(v.is_bijective for v in verticals2.values())

    v0 = identity_hom(A)
    witness = None
    for x in A.elements:
        top = tuple(verticals1[i](c) for i, c in enumerate(row1.alpha(x)))
        if top != row2.alpha(v0(x)):
            witness = f"left square fails at {x}"
            break
    if witness is None:
        for xs in product(*(T.elements for T, _ in row1.level1)):
            b1 = row1.beta(xs)
            b2 = row2.beta(tuple(verticals1[i](x) for i, x in enumerate(xs)))
            if any(verticals2[k](b1[k]) != b2[k] for k in b1):
                witness = f"right square fails at {xs}"
                break
    e1, e2 = check_exactness(row1).exact, check_exactness(row2).exact
    commute = witness is None
    return SquaresVerdict(e1 and e2 and commute and bijective, e1, e2, commute, bijective, witness)
