import itertools
import random
from fractions import Fraction
from types import SimpleNamespace

import pytest

from parahoric.fields import PrimeField, RationalField
from parahoric.group import LocalGroup
from parahoric.hecke import (
    AntiCharacter,
    HeckeAlgebra,
    build_anti_character,
    convolve_oracle,
    fiber_dimension_sandwich,
)
from parahoric.weyl import ExtendedWeyl, all_perms, is_antidominant


def ball_elements(W, lmax, box=1):
    """Every (perm, lam, torus) with entries of lam in [-box, box] and
    length at most lmax."""
    out = []
    for perm in all_perms(W.n):
        for lam in itertools.product(range(-box, box + 1), repeat=W.n):
            for torus in itertools.product(range(1, W.q), repeat=W.n):
                w = W.make(perm, lam, torus)
                if W.length(w) <= lmax:
                    out.append(w)
    return out


def translations(W, box, dressed=True):
    toruses = (
        list(itertools.product(range(1, W.q), repeat=W.n))
        if dressed
        else [(1,) * W.n]
    )
    out = []
    for lam in itertools.product(range(-box, box + 1), repeat=W.n):
        for torus in toruses:
            out.append(W.make(tuple(range(W.n)), lam, torus))
    return out


# -- ring axioms --------------------------------------------------------


@pytest.mark.parametrize("n,q", [(2, 3), (3, 2)])
def test_unit_laws(n, q):
    W = ExtendedWeyl(n, q)
    H = HeckeAlgebra(W, RationalField())
    rng = random.Random(11)
    pool = ball_elements(W, 3)
    for w in rng.sample(pool, 8):
        b = H.basis(w)
        assert H.multiply(H.unit(), b) == b
        assert H.multiply(b, H.unit()) == b


def test_associativity_random_triples():
    W = ExtendedWeyl(2, 3)
    pool = ball_elements(W, 2)
    rng = random.Random(23)
    for k in (PrimeField(3), RationalField()):
        H = HeckeAlgebra(W, k)
        for _ in range(100):
            a, b, c = (H.basis(rng.choice(pool)) for _ in range(3))
            left = H.multiply(H.multiply(a, b), c)
            right = H.multiply(a, H.multiply(b, c))
            assert left == right


def test_budget_guards_runaway_products():
    W = ExtendedWeyl(2, 2)
    H = HeckeAlgebra(W, RationalField(), budget=3)
    long = H.basis(W.from_translation((2, 0)))
    with pytest.raises(ValueError):
        H.multiply(long, long)


# -- the two defining relations -----------------------------------------


def test_translation_parts_multiply_additively():
    """Antidominant dressed translations: products are single basis
    elements indexed by the group product."""
    W = ExtendedWeyl(2, 3)
    H = HeckeAlgebra(W, RationalField())
    elts = [
        w
        for w in translations(W, 2)
        if is_antidominant(w[1])
    ]
    for a in elts:
        for b in elts:
            got = H.multiply(H.basis(a), H.basis(b))
            assert got == H.basis(W.mul(a, b))
            assert W.length(W.mul(a, b)) == W.length(a) + W.length(b)


@pytest.mark.parametrize("n,q", [(2, 3), (3, 2)])
def test_commutative_part_commutes(n, q):
    W = ExtendedWeyl(n, q)
    H = HeckeAlgebra(W, PrimeField(q))
    box = 2 if n == 2 else 1
    elts = [
        w
        for w in translations(W, box)
        if is_antidominant(w[1])
    ]
    for a in elts:
        for b in elts:
            x, y = H.basis(a), H.basis(b)
            assert H.multiply(x, y) == H.multiply(y, x)


def test_square_of_reflection_q2():
    W = ExtendedWeyl(2, 2)
    s1 = W.simple_reflection(1)
    s0 = W.simple_reflection(0)

    H = HeckeAlgebra(W, RationalField())
    for s in (s1, s0):
        got = H.multiply(H.basis(s), H.basis(s))
        # q = 2 leaves no residue dressing, so the extra term is s itself
        assert got == {W.make((0, 1), (0, 0)): Fraction(2), s: Fraction(1)}

    # over F_2 the q tau_1 term vanishes and the square is idempotent
    H2 = HeckeAlgebra(W, PrimeField(2))
    for s in (s1, s0):
        assert H2.multiply(H2.basis(s), H2.basis(s)) == H2.basis(s)


def test_square_of_reflection_q3():
    W = ExtendedWeyl(2, 3)
    H = HeckeAlgebra(W, RationalField())

    s1 = W.simple_reflection(1)
    got = H.multiply(H.basis(s1), H.basis(s1))
    assert got == {
        W.make((0, 1), (0, 0)): Fraction(3),
        W.make((1, 0), (0, 0), (1, 2)): Fraction(1),
        W.make((1, 0), (0, 0), (2, 1)): Fraction(1),
    }

    s0 = W.simple_reflection(0)
    got = H.multiply(H.basis(s0), H.basis(s0))
    assert got == {
        W.make((0, 1), (0, 0)): Fraction(3),
        W.make((1, 0), (1, -1), (1, 2)): Fraction(1),
        W.make((1, 0), (1, -1), (2, 1)): Fraction(1),
    }


# -- agreement with the coset-counting oracle ---------------------------


def oracle_matches(G, H, pairs, cache):
    k = H.k
    for w, w2 in pairs:
        got = H.multiply(H.basis(w), H.basis(w2))
        want = convolve_oracle(G, k, w, w2, reps_cache=cache)
        assert got == want, (w, w2)


def test_oracle_pins_q3():
    G = LocalGroup(2, 3)
    W = G.W
    H = HeckeAlgebra(W, RationalField())
    cache = {}

    # the square of a reflection, counted in the group
    s1 = W.simple_reflection(1)
    want = convolve_oracle(G, RationalField(), s1, s1, reps_cache=cache)
    assert want == H.multiply(H.basis(s1), H.basis(s1))
    assert want[W.make((0, 1), (0, 0))] == Fraction(3)

    # dressed length-zero times length-zero: a single product coset
    a = W.make((0, 1), (0, 0), (2, 1))
    b = W.make((0, 1), (1, 1), (2, 2))
    want = convolve_oracle(G, RationalField(), a, b, reps_cache=cache)
    assert want == {W.mul(a, b): Fraction(1)}

    # additive lengths: again a single coset, now of length 2
    c = W.from_translation((0, 1))
    d = W.from_translation((0, 1))
    want = convolve_oracle(G, RationalField(), c, d, reps_cache=cache)
    assert want == {W.from_translation((0, 2)): Fraction(1)}


def test_multiply_matches_oracle_q2_exhaustive():
    G = LocalGroup(2, 2)
    H = HeckeAlgebra(G.W, RationalField())
    pool = ball_elements(G.W, 2)
    pairs = [
        (w, w2)
        for w in pool
        for w2 in pool
        if G.W.length(w) + G.W.length(w2) <= 2
    ]
    oracle_matches(G, H, pairs, {})


def test_multiply_matches_oracle_q3_sampled():
    G = LocalGroup(2, 3)
    H = HeckeAlgebra(G.W, RationalField())
    pool = ball_elements(G.W, 2)
    pairs = [
        (w, w2)
        for w in pool
        for w2 in pool
        if G.W.length(w) + G.W.length(w2) <= 2
    ]
    rng = random.Random(7)
    oracle_matches(G, H, rng.sample(pairs, 40), {})


def test_multiply_matches_oracle_longer_spot_checks():
    G = LocalGroup(2, 2)
    W = G.W
    H = HeckeAlgebra(W, RationalField())
    cache = {}
    pairs = [
        (W.from_translation((2, -1)), W.make((1, 0), (0, 0))),
        (W.make((1, 0), (0, 2)), W.make((1, 0), (0, 0))),
        (W.from_translation((2, 0)), W.from_translation((0, 1))),
    ]
    for w, w2 in pairs:
        assert W.length(w) + W.length(w2) in (3, 4)
    oracle_matches(G, H, pairs, cache)


# -- characters of the commutative part ---------------------------------


def test_anticharacter_multiplicative():
    k = RationalField()
    W = ExtendedWeyl(2, 3)
    chibar = AntiCharacter(k, 3, (Fraction(2), Fraction(5, 3)), (1, 0))
    pool = translations(W, 3)
    rng = random.Random(3)
    for _ in range(100):
        a, b = rng.choice(pool), rng.choice(pool)
        va = chibar.of_translation(a)
        vb = chibar.of_translation(b)
        assert chibar.of_translation(W.mul(a, b)) == k.mul(va, vb)


def test_anticharacter_antidominant_roundtrip():
    k = RationalField()
    W = ExtendedWeyl(3, 3)
    chibar = AntiCharacter(
        k, 3, (Fraction(2), Fraction(3), Fraction(7, 2)), (0, 1, 1))
    for w in translations(W, 2, dressed=False):
        assert chibar.value_via_antidominant(w) == chibar.of_translation(w)


def test_anticharacter_trivial_is_one():
    k = RationalField()
    W = ExtendedWeyl(2, 3)
    chibar = AntiCharacter(k, 3, (Fraction(1), Fraction(1)), (0, 0))
    for w in translations(W, 2):
        assert chibar.of_translation(w) == Fraction(1)


def test_anticharacter_rejects_bad_input():
    k = RationalField()
    with pytest.raises(ValueError):
        AntiCharacter(k, 3, (Fraction(0), Fraction(1)), (0, 0))
    # residue characters of even order have nowhere to go in char 2
    with pytest.raises(ValueError):
        AntiCharacter(PrimeField(2), 3, (1, 1), (1, 0))
    chibar = AntiCharacter(k, 3, (Fraction(2), Fraction(3)), (0, 0))
    with pytest.raises(ValueError):
        chibar.of_translation(((1, 0), (0, 0), (1, 1)))


def test_build_anti_character_reads_the_character_data():
    chi = SimpleNamespace(
        field=RationalField(), q=3,
        z=(Fraction(4), Fraction(9)), tame=(1, 1))
    chibar = build_anti_character(chi)
    W = ExtendedWeyl(2, 3)
    w = W.make((0, 1), (1, 0), (2, 1))
    # z_0^1 times the inverse tame factor at residue 2 in slot 0
    assert chibar.of_translation(w) == Fraction(-4)


# -- fibers of the induced module ---------------------------------------


def generic_rational(n, q):
    z = tuple(Fraction(i + 2) for i in range(n))
    return AntiCharacter(RationalField(), q, z, (0,) * n)


@pytest.mark.parametrize("n,q,expect", [(2, 2, 2), (2, 3, 2), (3, 2, 6)])
def test_fiber_dimension_generic(n, q, expect):
    W = ExtendedWeyl(n, q)
    H = HeckeAlgebra(W, RationalField())
    upper, lower = fiber_dimension_sandwich(
        H, [H.unit()], generic_rational(n, q), 3)
    assert upper == expect
    assert lower == 0


def test_fiber_dimension_char_p_and_tame():
    # equal characteristic
    W = ExtendedWeyl(2, 3)
    H = HeckeAlgebra(W, PrimeField(3))
    chibar = AntiCharacter(PrimeField(3), 3, (1, 2), (0, 0))
    upper, _ = fiber_dimension_sandwich(H, [H.unit()], chibar, 3)
    assert upper == 2

    # nontrivial tame dressing
    H = HeckeAlgebra(W, RationalField())
    chibar = AntiCharacter(
        RationalField(), 3, (Fraction(2), Fraction(3)), (1, 0))
    upper, _ = fiber_dimension_sandwich(H, [H.unit()], chibar, 3)
    assert upper == 2


def test_fiber_dimension_is_stable_in_the_window():
    W = ExtendedWeyl(2, 2)
    H = HeckeAlgebra(W, RationalField())
    chibar = generic_rational(2, 2)
    dims = [
        fiber_dimension_sandwich(H, [H.unit()], chibar, L)[0]
        for L in (2, 3, 4, 5)
    ]
    assert dims == [2, 2, 2, 2]


def test_fiber_respects_the_budget():
    W = ExtendedWeyl(2, 2)
    H = HeckeAlgebra(W, RationalField(), budget=2)
    with pytest.raises(ValueError):
        fiber_dimension_sandwich(H, [H.unit()], generic_rational(2, 2), 3)
