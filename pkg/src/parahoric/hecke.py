"""The pro-p Iwahori Hecke algebra of GL_n(F_q(t)) in the natural basis.

An element is a finite k-linear combination of extended Weyl group
elements w, standing for the double coset indicator functions tau_w.
Elements are plain dicts {w: coefficient} with no zero coefficients
stored; HeckeAlgebra carries the group data and the coefficient field
and keeps every product normalized.

The product is computed from two relations only:

    tau_w . tau_w' = tau_{ww'}          when l(w) + l(w') = l(ww'),

    tau_s^2 = q . tau_1 + sum_rho tau_{c_rho . s}   for a simple
    affine reflection s, rho over F_q^x, where c_rho is the torus
    element with rho in the lower moved slot and -rho^{-1} in the
    upper one.

The second line is where the convention lives, so it is never trusted
on its own: convolve_oracle recomputes products from scratch by coset
enumeration inside the matrix group, and the two routes are compared
term by term over several coefficient fields in the tests.

The commutative part is spanned by the tau_w with w an extended
translation whose coweight is antidominant; characters of it are the
AntiCharacter objects below, determined by n invertible scalars z_i
(the images of the slot translations) and n tame exponents.
"""

from __future__ import annotations

import itertools

from .fields import power, primitive_root, root_of_unity
from .linalg import ScaledPartition, SparseEchelon, rank
from .weyl import antidominant_decomposition, is_antidominant, perm_identity


class HeckeAlgebra:
    """Product, unit, and linear algebra of H for one (n, q, k)."""

    def __init__(self, W, k, budget=40):
        self.W = W
        self.k = k
        self.q = W.q
        self.n = W.n
        self.budget = budget
        self._q_scalar = k.from_int(W.q)
        self._char_elts = {j: self._build_char_elts(j) for j in range(W.n)}

    def _build_char_elts(self, j):
        """The torus elements c_rho whose tau's appear in tau_{s_j}^2."""
        n, q = self.n, self.q
        lo, hi = (0, n - 1) if j == 0 else (j - 1, j)
        out = []
        for rho in range(1, q):
            tor = [1] * n
            tor[lo] = rho
            tor[hi] = (-pow(rho, q - 2, q)) % q
            out.append(self.W.from_torus(tor))
        return out

    # -- element helpers ----------------------------------------------

    def unit(self):
        return {self.W.identity: self.k.one}

    def basis(self, w):
        return {w: self.k.one}

    def add(self, a, b):
        out = dict(a)
        for w, c in b.items():
            s = self.k.add(out.get(w, self.k.zero), c)
            if self.k.is_zero(s):
                out.pop(w, None)
            else:
                out[w] = s
        return out

    def scale(self, a, c):
        if self.k.is_zero(c):
            return {}
        return {w: self.k.mul(c, x) for w, x in a.items()}

    def sub(self, a, b):
        return self.add(a, self.scale(b, self.k.neg(self.k.one)))

    def support_length(self, a):
        return max((self.W.length(w) for w in a), default=0)

    # -- multiplication -----------------------------------------------

    def multiply(self, a, b):
        out = {}
        for wb, cb in b.items():
            part = self._mul_elt_basis(a, wb)
            out = self.add(out, self.scale(part, cb))
        return out

    def _mul_elt_basis(self, a, wb):
        """a . tau_{wb}, by absorbing the reduced word of wb from the
        left end: length-zero parts translate the support, and each
        simple reflection either extends a basis element or triggers
        the quadratic relation."""
        if not a:
            return {}
        if self.support_length(a) + self.W.length(wb) > self.budget:
            raise ValueError("product support exceeds the length budget")
        omega, word, t0 = self.W.reduced_word(wb)
        cur = {self.W.mul(v, omega): c for v, c in a.items()}
        for j in word:
            cur = self._mul_simple(cur, j)
        return {self.W.mul(v, t0): c for v, c in cur.items()}

    def _mul_simple(self, cur, j):
        W, k = self.W, self.k
        s = W.simple_reflection(j)
        out = {}

        def acc(w, c):
            x = k.add(out.get(w, k.zero), c)
            if k.is_zero(x):
                out.pop(w, None)
            else:
                out[w] = x

        for v, c in cur.items():
            vs = W.mul(v, s)
            if W.length(vs) == W.length(v) + 1:
                acc(vs, c)
            else:
                # tau_v tau_s = q tau_{vs} + sum_rho tau_{vs . c_rho . s}
                qc = k.mul(c, self._q_scalar)
                if not k.is_zero(qc):
                    acc(vs, qc)
                for crho in self._char_elts[j]:
                    acc(W.mul(W.mul(vs, crho), s), c)
        return out


def convolve_oracle(G, k, w, w2, budget=16.0, reps_cache=None):
    """tau_w . tau_{w2} from first principles: enumerate the single
    cosets of both double cosets inside the matrix group, find which
    products I w I . I w2 I can meet, and count representatives.

    The coefficient of tau_v is #{x in coset_reps(w) : x^{-1}.lift(v)
    lies in I w2 I}, reduced into k.  Shares nothing with
    HeckeAlgebra.multiply beyond the group itself.
    """
    if reps_cache is None:
        reps_cache = {}

    def reps_of(u):
        if u not in reps_cache:
            reps_cache[u] = G.coset_reps(u, budget)
        return reps_cache[u]

    reps = reps_of(w)
    reps2 = reps_of(w2)
    candidates = set()
    for x in reps:
        for y in reps2:
            candidates.add(G.bruhat_iwahori_class(G.mul(x, y)))
    out = {}
    for v in sorted(candidates):
        vhat = G.canonical_lift(v)
        cnt = 0
        for x in reps:
            if G.bruhat_iwahori_class(G.mul(G.inv(x), vhat)) == w2:
                cnt += 1
        c = k.from_int(cnt)
        if not k.is_zero(c):
            out[v] = c
    return out


class AntiCharacter:
    """A character of the commutative part, given by the images z_i of
    the slot translations and the tame exponents o_i.

    On the basis element of an extended translation with coweight lam
    and residue dressing c the value is

        prod_i z_i^{lam_i} . prod_i tame_i(c_i)^{-1}

    where tame_i(c) = zeta^{o_i . log(c)} with zeta the fixed root of
    unity of order q - 1 in k and log the discrete logarithm to the
    least primitive root mod q.  The formula is multiplicative in
    (lam, c); its restriction to antidominant lam is the character of
    the commutative subalgebra, and `value_via_antidominant` recovers
    general values using only antidominant ones, the way a character
    of the full diagonal torus is rebuilt from them.
    """

    def __init__(self, field, q, z, tame):
        self.field = field
        self.q = q
        self.z = tuple(z)
        self.n = len(self.z)
        for zi in self.z:
            if field.is_zero(zi):
                raise ValueError("character parameters must be invertible")
        self.tame = tuple(int(o) % (q - 1) if q > 2 else 0 for o in tame)
        if len(self.tame) != self.n:
            raise ValueError("need one tame exponent per slot")
        if q > 2 and any(self.tame):
            self.zeta = root_of_unity(field, q - 1)
        else:
            self.zeta = field.one
        g = primitive_root(q)
        self.dlog = {pow(g, e, q): e for e in range(max(q - 1, 1))}

    def tame_value(self, i, c):
        """The i-th tame factor at a unit residue c."""
        e = (self.tame[i] * self.dlog[c % self.q]) % max(self.q - 1, 1)
        return power(self.field, self.zeta, e)

    def of_translation(self, w):
        """Value on tau_w for w an extended translation (any coweight)."""
        perm, lam, torus = w
        if perm != perm_identity(self.n):
            raise ValueError("not a translation element")
        F = self.field
        acc = F.one
        for i in range(self.n):
            acc = F.mul(acc, power(F, self.z[i], lam[i]))
            acc = F.mul(acc, F.inv(self.tame_value(i, torus[i])))
        return acc

    def value_via_antidominant(self, w):
        """The same value reached through antidominant arguments only:
        split lam = lam1 - lam2 with both parts antidominant and divide.
        Agreement with of_translation is the round-trip property."""
        perm, lam, torus = w
        lam1, lam2 = antidominant_decomposition(lam)
        a = self.of_translation((perm, lam1, torus))
        b = self.of_translation((perm, lam2, (1,) * self.n))
        return self.field.div(a, b)


def build_anti_character(chi):
    """The character of the commutative part induced by a diagonal
    character chi (an object with field, q, z, tame): tau at the
    translation by lam goes to chi of the inverse canonical lift,
    which is the z^lam tame^{-1} formula above."""
    return AntiCharacter(chi.field, chi.q, chi.z, chi.tame)


def fiber_dimension_sandwich(H, generators, chibar, L, margin=2,
                             extra_relations=None, evaluate=None):
    """Bounds for the k-dimension of the chibar-fiber of the module
    generated over H by `generators` (slot j of a symbol (j, w) stands
    for generator j times tau_w).

    upper: the rank of the core symbols (j, w), l(w) <= L, inside the
    span of a scratch window of radius L + margin modulo every relation
    tau_mu . h = chibar(mu) . h (mu antidominant, nonzero) whose
    product support stays inside the window, plus any caller-supplied
    extra relations.  Only true relations are imposed, so this never
    undershoots the dimension of the part of the fiber the core
    reaches.  The margin matters: a relation eliminating a dominant
    symbol routinely involves terms one length step above it, so a
    window cut exactly at L starves its own top shell.

    lower: the rank of the vectors evaluate(j, w) over the core, an
    explicit linear image of the fiber, so it never overshoots.  0
    when no evaluation map is given.

    Relations in two stages: translations that act by a single basis
    element (length-additively) give two-term identifications handled
    by union-find with ratios; everything else is projected onto the
    surviving classes and echeloned.
    """
    W, k = H.W, H.k
    n = H.n
    big = L + margin

    def canonical(w):
        """(scalar, symbol): peel the central coweight and the torus
        dressing, both of which the relations scale away."""
        perm, lam, torus = w
        m = min(lam)
        lam0 = tuple(x - m for x in lam)
        factor = chibar.of_translation(
            (perm_identity(n), tuple([m] * n), torus))
        return factor, (perm, lam0, (1,) * n)

    symbols = []
    core = []
    for w in _weyl_ball(W, big):
        _, wc = canonical(w)
        if wc == w:
            inner = W.length(w) <= L
            for j in range(len(generators)):
                symbols.append((j, w))
                if inner:
                    core.append((j, w))
    symbols = sorted(set(symbols))
    core = sorted(set(core))
    index = {s: i for i, s in enumerate(symbols)}

    part = ScaledPartition(k, len(symbols))

    def project(j, w, coeff):
        """Index and scalar of the canonical symbol under the current
        identifications; None when the class is dead."""
        factor, wc = canonical(w)
        got = part.canonical(index[(j, wc)])
        if got is None:
            return None
        root, weight = got
        return root, k.mul(coeff, k.mul(factor, weight))

    mus = [(W.from_translation(mu), mu) for mu in
           _antidominant_generators(n, L)]
    two_term = []
    general = []
    for j, w in symbols:
        lw = W.length(w)
        for wmu, mu in mus:
            lmu = W.length(wmu)
            if lmu - lw > big:
                # every product term has length >= lmu - lw
                continue
            prod_elt = W.mul(wmu, w)
            if W.length(prod_elt) == lmu + lw:
                if lmu + lw <= big:
                    two_term.append((j, prod_elt, wmu, w))
                continue
            general.append((j, wmu, w))

    for j, prod_elt, wmu, w in two_term:
        # tau_mu tau_w = tau_{mu.w} identified with chibar(mu) tau_w
        fl, wl = canonical(prod_elt)
        fr = chibar.of_translation(wmu)
        # fl . x_{wl} = fr . x_w
        part.relate(index[(j, wl)], index[(j, w)],
                    k.mul(k.inv(fl), fr))

    echelon = SparseEchelon(k)

    def accumulate(row, got):
        if got is None:
            return
        root, val = got
        s = k.add(row.get(root, k.zero), val)
        if k.is_zero(s):
            row.pop(root, None)
        else:
            row[root] = s

    for j, wmu, w in general:
        prod = H.multiply(H.basis(wmu), H.basis(w))
        if any(W.length(v) > big for v in prod):
            # the relation leaves the scratch window; dropping it only
            # loosens the upper bound
            continue
        row = {}
        for v, c in prod.items():
            accumulate(row, project(j, v, c))
        accumulate(row, project(j, w, k.neg(chibar.of_translation(wmu))))
        if row:
            echelon.add(row)
    if extra_relations:
        for rel in extra_relations:
            row = {}
            for (j, w), c in rel.items():
                got = project(j, w, c)
                if got is None:
                    continue
                root, val = got
                s = k.add(row.get(root, k.zero), val)
                if k.is_zero(s):
                    row.pop(root, None)
                else:
                    row[root] = s
            if row:
                echelon.add(row)

    # rank of the core inside the windowed quotient: count the core
    # classes that are independent of the relation rows already echeloned
    upper = 0
    for j, w in core:
        got = project(j, w, k.one)
        if got is None:
            continue
        root, weight = got
        if echelon.add({root: weight}) is not None:
            upper += 1

    lower = 0
    if evaluate is not None:
        vectors = [evaluate(j, w) for (j, w) in core]
        lower = rank(k, vectors)
    assert upper >= lower, "sandwich inverted: bounds are unsound"
    return upper, lower


def _weyl_ball(W, L):
    """All (perm, lam, trivial torus) with min(lam) = 0 and length <= L.

    Entries up to L + 1 must be scanned: an inversion discounts one
    unit of spread, so (L+1, 0) with the inverted permutation still has
    length L."""
    n = W.n
    triv = (1,) * n
    out = []
    for perm in itertools.permutations(range(n)):
        for lam in itertools.product(range(L + 2), repeat=n):
            if min(lam) != 0:
                continue
            w = (tuple(perm), tuple(lam), triv)
            if W.length(w) <= L:
                out.append(w)
    return out


def _antidominant_generators(n, L):
    """Nonzero antidominant coweights with min 0 to impose as
    relations; bounded entries keep the relation set finite."""
    out = []
    for lam in itertools.product(range(L + 1), repeat=n):
        if min(lam) != 0 or max(lam) == 0:
            continue
        if is_antidominant(lam):
            out.append(lam)
    return out
