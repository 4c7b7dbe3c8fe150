"""The extended Weyl group of GL_n over a local field, combinatorially.

An element is a triple (perm, lam, torus):

    perm   a permutation of {0,…,n-1}, the finite Weyl part
    lam    a vector in Z^n, the translation part
    torus  a vector of nonzero residues mod q, the finite torus part

and corresponds to the monomial matrix D.P(perm) where
D = diag(torus_i * t^(-lam_i)) and P(perm) e_j = e_{perm(j)}.  The
translation e^lam alone lifts to diag(t^(-lam_1),…,t^(-lam_n)).  That
sign convention is what makes "antidominant", "nondecreasing lam" and
the contraction property of the Iwahori agree; it is validated against
the matrix model elsewhere.

The group law, read off from the matrix product, is

    (p1, l1, c1) . (p2, l2, c2) = (p1 p2, l1 + p1.l2, c1 * p1.c2)

with (p.l)_i = l_{p^{-1}(i)}.

Length is the affine-length sum over positive roots e_i - e_j, i < j:

    l(e^lam u) =   sum_{u^{-1}(i) < u^{-1}(j)} |lam_i - lam_j|
                 + sum_{u^{-1}(i) > u^{-1}(j)} |lam_i - lam_j - 1|

independent of the torus part.  The closed form is cross-validated by
breadth-first word search in the tests.

The length-zero subgroup modulo the finite torus is infinite cyclic,
generated by the rotation rho: e_1 -> t e_n, e_i -> e_{i-1}; rho^n is
central.  Every element factors as rho^a . s_{j_1} ... s_{j_m} . t0
with m = l(w) and t0 in the finite torus; reduced_word computes that
factorization.
"""

from __future__ import annotations

import itertools

# ---------------------------------------------------------------------------
# permutations: tuples p with p[i] = image of i


def perm_identity(n):
    return tuple(range(n))


def perm_mul(a, b):
    """(a b)(i) = a(b(i))."""
    return tuple(a[b[i]] for i in range(len(a)))


def perm_inv(a):
    out = [0] * len(a)
    for i, ai in enumerate(a):
        out[ai] = i
    return tuple(out)


def perm_apply_vector(p, v):
    """(p.v)_i = v_{p^{-1}(i)}, the action matching the group law."""
    pi = perm_inv(p)
    return tuple(v[pi[i]] for i in range(len(p)))


def all_perms(n):
    return [tuple(p) for p in itertools.permutations(range(n))]


# ---------------------------------------------------------------------------
# coweight predicates; positive roots are e_i - e_j for i < j


def is_antidominant(lam):
    """<lam, e_i - e_j> <= 0 for i < j, i.e. lam is nondecreasing.

    >>> is_antidominant((0, 1, 2))
    True
    >>> is_antidominant((1, 0))
    False
    """
    return all(lam[i] <= lam[i + 1] for i in range(len(lam) - 1))


def is_strongly_antidominant(lam):
    """Strict inequalities on all positive roots: lam strictly increasing."""
    return all(lam[i] < lam[i + 1] for i in range(len(lam) - 1))


def antidominant_decomposition(lam):
    """Write lam = lam1 - lam2 with both parts antidominant.

    lam2 is a multiple of the strongly antidominant (0, 1, …, n-1), large
    enough that lam + lam2 is nondecreasing.

    >>> antidominant_decomposition((3, 0))
    ((3, 3), (0, 3))
    """
    n = len(lam)
    spread = max((lam[i] - lam[i + 1] for i in range(n - 1)), default=0)
    m = max(spread, 0)
    lam2 = tuple(m * i for i in range(n))
    lam1 = tuple(a + b for a, b in zip(lam, lam2))
    assert is_antidominant(lam1) and is_antidominant(lam2)
    return lam1, lam2


class ExtendedWeyl:
    """The group object; elements are plain (perm, lam, torus) tuples."""

    def __init__(self, n, q):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        self.q = q
        self.identity = (perm_identity(n), (0,) * n, (1,) * n)

    def make(self, perm, lam, torus=None):
        if torus is None:
            torus = (1,) * self.n
        torus = tuple(c % self.q for c in torus)
        if any(c == 0 for c in torus):
            raise ValueError("torus entries must be nonzero mod q")
        return (tuple(perm), tuple(lam), torus)

    def from_translation(self, lam):
        return self.make(perm_identity(self.n), lam)

    def from_perm(self, perm):
        return self.make(perm, (0,) * self.n)

    def from_torus(self, torus):
        return self.make(perm_identity(self.n), (0,) * self.n, torus)

    def mul(self, a, b):
        (p1, l1, c1), (p2, l2, c2) = a, b
        l2p = perm_apply_vector(p1, l2)
        c2p = perm_apply_vector(p1, c2)
        return (perm_mul(p1, p2),
                tuple(x + y for x, y in zip(l1, l2p)),
                tuple((x * y) % self.q for x, y in zip(c1, c2p)))

    def mul_all(self, elts):
        acc = self.identity
        for e in elts:
            acc = self.mul(acc, e)
        return acc

    def inv(self, a):
        p, l, c = a
        pi = perm_inv(p)
        li = tuple(-l[p[i]] for i in range(self.n))
        q = self.q
        ci = tuple(pow(c[p[i]], q - 2, q) if q > 2 else 1
                   for i in range(self.n))
        return (pi, li, ci)

    def simple_reflection(self, i):
        """s_i for 1 <= i <= n-1; s_0 is the affine reflection."""
        n = self.n
        if not 0 <= i <= n - 1:
            raise ValueError(f"reflection index {i} out of range")
        if i == 0:
            perm = list(range(n))
            perm[0], perm[n - 1] = n - 1, 0
            lam = (1,) + (0,) * (n - 2) + (-1,)
            return self.make(perm, lam)
        perm = list(range(n))
        perm[i - 1], perm[i] = i, i - 1
        return self.make(perm, (0,) * n)

    def rotation(self):
        """rho: e_1 -> t e_n, e_i -> e_{i-1}; generates the length-zero
        part modulo torus; rho^n is the central matrix t.id."""
        n = self.n
        perm = (n - 1,) + tuple(range(n - 1))
        lam = (0,) * (n - 1) + (-1,)
        return self.make(perm, lam)

    def rotation_power(self, a):
        rho = self.rotation()
        if a < 0:
            rho = self.inv(rho)
            a = -a
        acc = self.identity
        for _ in range(a):
            acc = self.mul(acc, rho)
        return acc

    def length(self, w):
        p, l, _ = w
        pi = perm_inv(p)
        total = 0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = l[i] - l[j]
                if pi[i] < pi[j]:
                    total += abs(d)
                else:
                    total += abs(d - 1)
        return total

    def is_torus(self, w):
        return w[0] == perm_identity(self.n) and all(x == 0 for x in w[1])

    def decompose_length_zero(self, w):
        """w with l(w) = 0 as (a, t0) with w = rho^a . t0, t0 finite torus."""
        if self.length(w) != 0:
            raise ValueError("element has positive length")
        n = self.n
        rho = self.rotation()
        acc = self.identity
        k = None
        for m in range(n):
            if acc[0] == w[0]:
                k = m
                break
            acc = self.mul(acc, rho)
        if k is None:
            raise ValueError("length-zero element outside <rho> torus")
        base = self.rotation_power(k)
        delta = [x - y for x, y in zip(w[1], base[1])]
        if any(d != delta[0] for d in delta):
            raise ValueError("length-zero element outside <rho> torus")
        # rho^n is the translation by (-1,…,-1), so each extra central
        # power shifts lam down by 1
        a = k - n * delta[0]
        t0 = self.mul(self.inv(self.rotation_power(a)), w)
        assert self.is_torus(t0)
        return a, t0

    def reduced_word(self, w):
        """Factor w = omega . s_{j_1} ... s_{j_m} . t0 exactly.

        omega is a power of the rotation (trivial torus part), the word
        has length m = l(w), and t0 is a finite torus element.  At each
        step the lowest reflection index that shortens the element is
        peeled from the right, so the output is deterministic.
        """
        word = []
        cur = w
        lcur = self.length(cur)
        while lcur > 0:
            for i in range(self.n):
                s = self.simple_reflection(i)
                cand = self.mul(cur, s)
                lc = self.length(cand)
                if lc < lcur:
                    word.append(i)
                    cur, lcur = cand, lc
                    break
            else:
                raise AssertionError("no descent at positive length")
        a, t0 = self.decompose_length_zero(cur)
        word.reverse()
        omega = self.rotation_power(a)
        # torus part commutes up to relabeling; recompute it exactly so
        # that omega . word . t0 = w on the nose
        prefix = omega
        for i in word:
            prefix = self.mul(prefix, self.simple_reflection(i))
        t0 = self.mul(self.inv(prefix), w)
        assert self.is_torus(t0)
        return omega, word, t0


# ---------------------------------------------------------------------------
# facets of the base chamber, labeled by the vertex types they span
#
# The base vertex x_j is the lattice-chain point v_{mu(j)} with
# mu(j) = (0,…,0,-1,…,-1), j trailing entries.  A facet is a nonempty
# subset of {0,…,n-1}; it contains x_0 iff 0 is a member.  For S with
# 0 in S, the finite parabolic attached to S is block upper triangular
# with block boundaries at {n - l : l in S, l != 0}.


def facet_blocks(n, types):
    """Block sizes of the parabolic attached to a facet through x_0."""
    cuts = sorted({n - l for l in types if l != 0})
    sizes = []
    prev = 0
    for c in cuts:
        sizes.append(c - prev)
        prev = c
    sizes.append(n - prev)
    return sizes


def facet_block_ranges(n, types):
    sizes = facet_blocks(n, types)
    out = []
    start = 0
    for s in sizes:
        out.append(range(start, start + s))
        start += s
    return out


def facet_weyl_perms(n, types):
    """The finite Weyl group of the facet: block permutations."""
    ranges = facet_block_ranges(n, types)
    out = []
    for parts in itertools.product(
            *[itertools.permutations(r) for r in ranges]):
        perm = [0] * n
        for rng, part in zip(ranges, parts):
            for pos, img in zip(rng, part):
                perm[pos] = img
        out.append(tuple(perm))
    return sorted(out)


def distinguished_reps(n, types):
    """Permutations increasing within each block: the minimal-length
    transversal of the facet Weyl group inside S_n."""
    ranges = facet_block_ranges(n, types)
    out = []
    for p in all_perms(n):
        ok = all(p[i] < p[j]
                 for rng in ranges
                 for i, j in itertools.combinations(rng, 2))
        if ok:
            out.append(p)
    return out


def facets_through_origin(n):
    """All facets containing x_0, smallest dimension first."""
    out = []
    for size in range(1, n + 1):
        for rest in itertools.combinations(range(1, n), size - 1):
            out.append(frozenset((0,) + rest))
    return out


def orbit_facets(n, i):
    """One representative per rotation orbit of i-dimensional facets,
    each containing the type-0 vertex.

    >>> orbit_facets(2, 0)
    [frozenset({0})]
    >>> orbit_facets(3, 1) == [frozenset({0, 1})]
    True
    """
    if not 0 <= i <= n - 1:
        raise ValueError(f"facet dimension {i} out of range")
    seen = set()
    reps = []
    for sub in itertools.combinations(range(n), i + 1):
        key = frozenset(sub)
        if key in seen:
            continue
        orbit = set()
        cur = key
        for _ in range(n):
            orbit.add(cur)
            cur = frozenset((x + 1) % n for x in cur)
        seen |= orbit
        with_zero = sorted(tuple(sorted(s)) for s in orbit if 0 in s)
        reps.append(frozenset(with_zero[0]))
    return reps


def vertex_key(lam):
    """Lattice class of e^lam . x_0 modulo the center: shift to min 0."""
    m = min(lam)
    return tuple(x - m for x in lam)


def facet_vertex_coweight(n, j):
    """mu(j): the coweight whose translate of x_0 is the type-j vertex."""
    return (0,) * (n - j) + (-1,) * j


def apartment_stabilizer_check(n, types, box=2):
    """Translations fixing the facet setwise and moving x_0 into it are
    central: the combinatorial heart of the parahoric-normalizer bound.

    Enumerates lam with |lam_i| <= box and returns False on any
    noncentral witness.
    """
    keys = {vertex_key(facet_vertex_coweight(n, j)) for j in types}
    for lam in itertools.product(range(-box, box + 1), repeat=n):
        if vertex_key(lam) not in keys:
            continue
        moved = {vertex_key(tuple(a + b for a, b in
                                  zip(lam, facet_vertex_coweight(n, j))))
                 for j in types}
        if moved == keys and any(x != lam[0] for x in lam):
            return False
    return True
