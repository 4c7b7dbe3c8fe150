import itertools
import random
from collections import deque

import pytest

from parahoric.weyl import (
    ExtendedWeyl,
    antidominant_decomposition,
    apartment_stabilizer_check,
    distinguished_reps,
    facet_blocks,
    facet_weyl_perms,
    facets_through_origin,
    is_antidominant,
    is_strongly_antidominant,
    orbit_facets,
    perm_identity,
    perm_inv,
    perm_mul,
    all_perms,
    vertex_key,
)


def canon(w):
    p, l, _ = w
    m = min(l)
    return (p, tuple(x - m for x in l))


def bfs_lengths(n, depth):
    """First-visit depths for words rho^a s_{j_1} … s_{j_d}, d <= depth,
    in the quotient by the center and the finite torus."""
    W = ExtendedWeyl(n, 2)
    refl = [W.simple_reflection(i) for i in range(n)]
    dist = {}
    frontier = []
    for a in range(n):
        k = canon(W.rotation_power(a))
        dist[k] = 0
        frontier.append(W.rotation_power(a))
    d = 0
    while d < depth:
        d += 1
        nxt = []
        for w in frontier:
            for s in refl:
                ws = W.mul(w, s)
                k = canon(ws)
                if k not in dist:
                    dist[k] = d
                    nxt.append(ws)
        frontier = nxt
    return W, dist


@pytest.mark.parametrize("n", [2, 3])
def test_length_formula_matches_word_search(n):
    depth = 4
    W, dist = bfs_lengths(n, depth)
    # forward: the closed form reproduces every first-visit depth
    for (p, l), d in dist.items():
        assert W.length((p, l, (1,) * n)) == d
    # converse: every boxed element of small formula length was reached
    for p in all_perms(n):
        for l in itertools.product(range(5), repeat=n):
            if min(l) != 0:
                continue
            w = (p, l, (1,) * n)
            lw = W.length(w)
            if lw <= depth:
                assert dist.get(canon(w)) == lw


def test_pinned_lengths():
    W = ExtendedWeyl(2, 2)
    assert W.length(W.identity) == 0
    assert W.length(W.simple_reflection(1)) == 1
    assert W.length(W.simple_reflection(0)) == 1
    assert W.length(W.from_translation((0, 1))) == 1
    assert W.length(W.rotation()) == 0
    W3 = ExtendedWeyl(3, 3)
    for i in range(3):
        assert W3.length(W3.simple_reflection(i)) == 1
    assert W3.length(W3.rotation()) == 0
    assert W3.length(W3.from_translation((0, 0, 1))) == 2


def test_group_law_and_inverse():
    rng = random.Random(42)
    for n, q in ((2, 2), (2, 3), (3, 2), (3, 3)):
        W = ExtendedWeyl(n, q)
        perms = all_perms(n)
        for _ in range(200):
            def rand():
                return W.make(rng.choice(perms),
                              [rng.randrange(-3, 4) for _ in range(n)],
                              [rng.randrange(1, q) for _ in range(n)])
            a, b, c = rand(), rand(), rand()
            assert W.mul(W.mul(a, b), c) == W.mul(a, W.mul(b, c))
            assert W.mul(a, W.inv(a)) == W.identity
            assert W.mul(W.inv(a), a) == W.identity


def test_translation_subgroup_and_weyl_action():
    W = ExtendedWeyl(2, 3)
    s1 = W.simple_reflection(1)
    lhs = W.mul(s1, W.from_translation((1, 0)))
    rhs = W.mul(W.from_translation((0, 1)), s1)
    assert lhs == rhs
    for n, q in ((2, 3), (3, 2)):
        W = ExtendedWeyl(n, q)
        for lam in itertools.product(range(-2, 3), repeat=n):
            for mu in itertools.product(range(-1, 2), repeat=n):
                assert (W.mul(W.from_translation(lam), W.from_translation(mu))
                        == W.from_translation(
                            tuple(a + b for a, b in zip(lam, mu))))
            # splitting commutes with the finite Weyl action
            for p in all_perms(n):
                u = W.from_perm(p)
                conj = W.mul(W.mul(u, W.from_translation(lam)), W.inv(u))
                pi = perm_inv(p)
                assert conj == W.from_translation(
                    tuple(lam[pi[i]] for i in range(n)))


def test_torus_invariance_of_length():
    W = ExtendedWeyl(3, 3)
    rng = random.Random(1)
    for _ in range(100):
        p = rng.choice(all_perms(3))
        lam = tuple(rng.randrange(-3, 4) for _ in range(3))
        base = W.length(W.make(p, lam))
        torus = tuple(rng.randrange(1, 3) for _ in range(3))
        assert W.length(W.make(p, lam, torus)) == base


@pytest.mark.parametrize("n", [2, 3])
def test_subadditivity_and_inverse_exhaustive(n):
    W, dist = bfs_lengths(n, 3)
    elts = [(p, l, (1,) * n) for (p, l) in dist]
    # length is central- and torus-invariant, so canonical pairs cover all
    for a in elts:
        assert W.length(W.inv(a)) == W.length(a)
    for a in elts:
        la = W.length(a)
        for b in elts:
            assert W.length(W.mul(a, b)) <= la + W.length(b)


@pytest.mark.parametrize("n", [2, 3])
def test_antidominant_additivity(n):
    W = ExtendedWeyl(n, 2)
    anti = [lam for lam in itertools.product(range(-3, 4), repeat=n)
            if is_antidominant(lam)]
    for lam in anti:
        ll = W.length(W.from_translation(lam))
        for mu in anti:
            s = tuple(a + b for a, b in zip(lam, mu))
            assert (W.length(W.from_translation(s))
                    == ll + W.length(W.from_translation(mu)))


def test_antidominant_predicates():
    assert is_antidominant((0, 0, 0))
    assert not is_strongly_antidominant((0, 0, 0))
    assert is_antidominant((0, 1, 2))
    assert is_strongly_antidominant((0, 1, 2))
    assert not is_antidominant((1, 0))
    lam1, lam2 = antidominant_decomposition((3, 0, -1))
    assert is_antidominant(lam1) and is_antidominant(lam2)
    assert tuple(a - b for a, b in zip(lam1, lam2)) == (3, 0, -1)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_reduced_word_roundtrip(n, q):
    W = ExtendedWeyl(n, q)
    rng = random.Random(7)
    _, dist = bfs_lengths(n, 4)
    for (p, l) in dist:
        torus = tuple(rng.randrange(1, q) for _ in range(n))
        w = W.make(p, l, torus)
        omega, word, t0 = W.reduced_word(w)
        assert len(word) == W.length(w)
        assert W.length(omega) == 0
        assert W.is_torus(t0)
        acc = omega
        for i in word:
            acc = W.mul(acc, W.simple_reflection(i))
        assert W.mul(acc, t0) == w


def test_reduced_word_simple_cases():
    W = ExtendedWeyl(2, 2)
    omega, word, t0 = W.reduced_word(W.identity)
    assert word == [] and omega == W.identity and t0 == W.identity
    for i in (0, 1):
        omega, word, t0 = W.reduced_word(W.simple_reflection(i))
        assert word == [i] and omega == W.identity and t0 == W.identity
    # e^{(0,1)} is rotation times one reflection
    omega, word, t0 = W.reduced_word(W.from_translation((0, 1)))
    assert len(word) == 1
    a, _ = W.decompose_length_zero(omega)
    assert a != 0


def test_rotation_structure():
    for n, q in ((2, 2), (3, 3)):
        W = ExtendedWeyl(n, q)
        rho_n = W.rotation_power(n)
        assert rho_n == W.from_translation((-1,) * n)
        a, t0 = W.decompose_length_zero(W.rotation_power(5))
        assert a == 5 and t0 == W.identity
        a, t0 = W.decompose_length_zero(
            W.mul(W.rotation_power(-2), W.from_torus((q - 1,) * n)))
        assert a == -2


def test_make_validation():
    W = ExtendedWeyl(2, 3)
    with pytest.raises(ValueError):
        W.make((0, 1), (0, 0), (0, 1))
    with pytest.raises(ValueError):
        W.simple_reflection(2)
    with pytest.raises(ValueError):
        ExtendedWeyl(1, 2)


def test_facet_combinatorics():
    assert facet_blocks(3, frozenset({0})) == [3]
    assert facet_blocks(3, frozenset({0, 1})) == [2, 1]
    assert facet_blocks(3, frozenset({0, 1, 2})) == [1, 1, 1]
    assert facet_blocks(3, frozenset({0, 2})) == [1, 2]
    assert len(facet_weyl_perms(3, frozenset({0}))) == 6
    assert len(facet_weyl_perms(3, frozenset({0, 1}))) == 2
    assert len(facet_weyl_perms(3, frozenset({0, 1, 2}))) == 1
    assert len(distinguished_reps(3, frozenset({0}))) == 1
    assert len(distinguished_reps(3, frozenset({0, 1}))) == 3
    assert len(distinguished_reps(3, frozenset({0, 1, 2}))) == 6
    # transversal times facet group covers S_n exactly once
    for types in facets_through_origin(3):
        pairs = {perm_mul(d, w)
                 for d in distinguished_reps(3, types)
                 for w in facet_weyl_perms(3, types)}
        assert len(pairs) == 6


def test_facets_through_origin():
    assert facets_through_origin(2) == [frozenset({0}), frozenset({0, 1})]
    got = facets_through_origin(3)
    assert len(got) == 4
    assert all(0 in f for f in got)


def test_orbit_facets():
    assert orbit_facets(2, 0) == [frozenset({0})]
    assert orbit_facets(2, 1) == [frozenset({0, 1})]
    assert orbit_facets(3, 0) == [frozenset({0})]
    assert orbit_facets(3, 1) == [frozenset({0, 1})]
    assert orbit_facets(3, 2) == [frozenset({0, 1, 2})]
    with pytest.raises(ValueError):
        orbit_facets(3, 3)


def test_apartment_stabilizer_check():
    assert apartment_stabilizer_check(2, frozenset({0}))
    assert apartment_stabilizer_check(2, frozenset({0, 1}))
    for types in facets_through_origin(3):
        assert apartment_stabilizer_check(3, types)


def test_vertex_keys():
    assert vertex_key((2, 2, 2)) == (0, 0, 0)
    assert vertex_key((0, -1, -1)) == (1, 0, 0)
