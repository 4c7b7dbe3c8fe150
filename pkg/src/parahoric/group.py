"""The matrix model of G = GL_n over F_q(t).

Group elements are n x n tuples-of-tuples of rational functions in t,
always with nonzero determinant.  The rational function field stands in
for the Laurent series field: every subgroup test is an exact valuation
pattern, every decomposition an exact identity of matrices.

Subgroups, with t the uniformizer and O the functions regular at 0:

    K       GL_n(O): integral entries, unit determinant
    K_m     kernel of reduction mod t^m, m >= 1
    I'      upper Iwahori: in K, upper triangular mod t
    I       pro-p Iwahori: in I', unipotent upper triangular mod t
    I+      I intersect upper unipotent;  I0 = T1;  I- lower, val >= 1
    B       upper triangular (not nec. integral);  B0 = B cap K
    T0      integral diagonal with unit entries;  T1 = 1 mod t
    Z       scalars
    I_F     for a facet through the origin: elements of K whose
            reduction lies in the unipotent radical of the block
            parabolic attached to the facet; conjugated by an optional
            translate.  F = chamber gives I, F = {0} gives K_1.

The decompositions implemented here (Iwasawa G = BK, the Bruhat double
coset class of I g I, the factorization I = I+ I0 I-) are all verified
by re-multiplication in the tests; the class map is additionally tested
for invariance under random I-multiplications on both sides.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

from .fields import INF, FunctionField, poly_trim
from .weyl import ExtendedWeyl, facet_block_ranges


@dataclass(frozen=True)
class SubgroupSpec:
    tag: str
    level: int = 0
    types: frozenset = dc_field(default=None)
    translate: tuple = dc_field(default=None)

    _TAGS = ("K", "K_m", "Iwahori", "ProPIwahori", "IPlus", "IMinus",
             "T0", "T1", "B", "U", "Uminus", "B0", "Center",
             "ParahoricPro_p")

    def __post_init__(self):
        if self.tag not in self._TAGS:
            raise ValueError(f"unknown subgroup tag {self.tag!r}")
        if self.tag == "K_m" and self.level < 1:
            raise ValueError("K_m needs m >= 1")
        if self.tag == "ParahoricPro_p" and not self.types:
            raise ValueError("facet subgroup needs a nonempty type set")


def spec_K():
    return SubgroupSpec("K")


def spec_K_m(m):
    return SubgroupSpec("K_m", level=m)


def spec_iwahori():
    return SubgroupSpec("Iwahori")


def spec_pro_p_iwahori():
    return SubgroupSpec("ProPIwahori")


def spec_parahoric_pro_p(types, translate=None):
    return SubgroupSpec("ParahoricPro_p", types=frozenset(types),
                        translate=translate)


class LocalGroup:
    """Bundles the field F_q(t), the extended Weyl group, and the matrix
    operations for one (n, q)."""

    def __init__(self, n, q):
        self.n = n
        self.q = q
        self.F = FunctionField(q)
        self.W = ExtendedWeyl(n, q)
        one, zero = self.F.one, self.F.zero
        self.identity = tuple(tuple(one if i == j else zero
                                    for j in range(n)) for i in range(n))

    # -- constructors -------------------------------------------------

    def mat(self, rows):
        return tuple(tuple(r) for r in rows)

    def from_ints(self, rows):
        return tuple(tuple(self.F.from_int(x) for x in r) for r in rows)

    def diag(self, entries):
        z = self.F.zero
        return tuple(tuple(entries[i] if i == j else z
                           for j in range(self.n)) for i in range(self.n))

    def scalar(self, s):
        return self.diag([s] * self.n)

    def elementary(self, i, j, s):
        """1 + s E_ij, zero-indexed, i != j."""
        assert i != j
        rows = [list(r) for r in self.identity]
        rows[i][j] = s
        return self.mat(rows)

    def canonical_lift(self, w):
        """The fixed monomial lift: column j carries c_i t^{-lam_i} at
        row i = perm(j)."""
        perm, lam, torus = w
        z = self.F.zero
        rows = [[z] * self.n for _ in range(self.n)]
        for j in range(self.n):
            i = perm[j]
            rows[i][j] = self.F.mul(self.F.from_int(torus[i]),
                                    self.F.t_power(-lam[i]))
        return self.mat(rows)

    def strongly_antidominant_lift(self, m=1):
        """Canonical lift of m.(0,1,…,n-1), the fixed contracting element."""
        lam = tuple(m * i for i in range(self.n))
        return self.canonical_lift(self.W.from_translation(lam))

    # -- arithmetic ---------------------------------------------------

    def mul(self, a, b):
        F = self.F
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = F.zero
                for k in range(n):
                    x = a[i][k]
                    if x[0]:
                        acc = F.add(acc, F.mul(x, b[k][j]))
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def mul_all(self, mats):
        acc = self.identity
        for m in mats:
            acc = self.mul(acc, m)
        return acc

    def inv(self, a):
        F = self.F
        n = self.n
        aug = [list(a[i]) + [F.one if k == i else F.zero for k in range(n)]
               for i in range(n)]
        for c in range(n):
            pr = None
            for i in range(c, n):
                if aug[i][c][0]:
                    pr = i
                    break
            if pr is None:
                raise ZeroDivisionError("singular matrix")
            aug[c], aug[pr] = aug[pr], aug[c]
            piv = F.inv(aug[c][c])
            aug[c] = [F.mul(piv, x) for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c][0]:
                    f = aug[i][c]
                    aug[i] = [F.sub(x, F.mul(f, y))
                              for x, y in zip(aug[i], aug[c])]
        return tuple(tuple(row[n:]) for row in aug)

    def det(self, a):
        F = self.F
        n = self.n
        m = [list(r) for r in a]
        d = F.one
        for c in range(n):
            pr = None
            for i in range(c, n):
                if m[i][c][0]:
                    pr = i
                    break
            if pr is None:
                return F.zero
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                d = F.neg(d)
            d = F.mul(d, m[c][c])
            inv = F.inv(m[c][c])
            for i in range(c + 1, n):
                if m[i][c][0]:
                    f = F.mul(inv, m[i][c])
                    m[i] = [F.sub(x, F.mul(f, y))
                            for x, y in zip(m[i], m[c])]
        return d

    # -- membership ---------------------------------------------------

    def is_member(self, g, spec):
        F = self.F
        n = self.n
        val = F.valuation
        tag = spec.tag
        if tag == "K":
            return (all(val(x) >= 0 for row in g for x in row)
                    and val(self.det(g)) == 0)
        if tag == "K_m":
            m = spec.level
            return all(val(F.sub(g[i][j],
                                 F.one if i == j else F.zero)) >= m
                       for i in range(n) for j in range(n))
        if tag == "Iwahori":
            return (all(val(g[i][j]) >= (1 if i > j else 0)
                        for i in range(n) for j in range(n))
                    and all(val(g[i][i]) == 0 for i in range(n)))
        if tag == "ProPIwahori":
            return (self.is_member(g, SubgroupSpec("Iwahori"))
                    and all(F.residue(g[i][i]) == 1 for i in range(n)))
        if tag == "IPlus":
            return all(
                (val(F.sub(g[i][j], F.one)) == INF if i == j else
                 val(g[i][j]) >= 0 if i < j else g[i][j] == F.zero)
                for i in range(n) for j in range(n))
        if tag == "IMinus":
            return all(
                (val(F.sub(g[i][j], F.one)) == INF if i == j else
                 val(g[i][j]) >= 1 if i > j else g[i][j] == F.zero)
                for i in range(n) for j in range(n))
        if tag == "T0":
            return (all(g[i][j] == F.zero
                        for i in range(n) for j in range(n) if i != j)
                    and all(val(g[i][i]) == 0 for i in range(n)))
        if tag == "T1":
            return (all(g[i][j] == F.zero
                        for i in range(n) for j in range(n) if i != j)
                    and all(val(F.sub(g[i][i], F.one)) >= 1
                            for i in range(n)))
        if tag == "B":
            return (all(g[i][j] == F.zero
                        for i in range(n) for j in range(n) if i > j)
                    and all(g[i][i] != F.zero for i in range(n)))
        if tag == "U":
            return (self.is_member(g, SubgroupSpec("B"))
                    and all(g[i][i] == F.one for i in range(n)))
        if tag == "Uminus":
            return (all(g[i][j] == F.zero
                        for i in range(n) for j in range(n) if i < j)
                    and all(g[i][i] == F.one for i in range(n)))
        if tag == "B0":
            return (self.is_member(g, SubgroupSpec("B"))
                    and all(val(x) >= 0 for row in g for x in row)
                    and all(val(g[i][i]) == 0 for i in range(n)))
        if tag == "Center":
            s = g[0][0]
            return (s != F.zero
                    and g == self.scalar(s))
        if tag == "ParahoricPro_p":
            h = g
            if spec.translate is not None:
                h = self.mul(self.mul(self.inv(spec.translate), g),
                             spec.translate)
            types = spec.types
            if 0 not in types:
                # rotate the facet back onto one through the origin
                a = min(types)
                types = frozenset((x - a) % n for x in types)
                rho_a = self.canonical_lift(self.W.rotation_power(a))
                h = self.mul(self.mul(self.inv(rho_a), h), rho_a)
            if not self.is_member(h, SubgroupSpec("K")):
                return False
            blk = self._block_index(types)
            for i in range(n):
                for j in range(n):
                    if blk[i] == blk[j]:
                        target = F.one if i == j else F.zero
                        if val(F.sub(h[i][j], target)) < 1:
                            return False
                    elif blk[i] > blk[j]:
                        if val(h[i][j]) < 1:
                            return False
            return True
        raise ValueError(f"unknown subgroup tag {tag!r}")

    def _block_index(self, types):
        blk = [0] * self.n
        for bi, rng in enumerate(facet_block_ranges(self.n, types)):
            for i in rng:
                blk[i] = bi
        return blk

    # -- decompositions ----------------------------------------------

    def iwasawa(self, g):
        """g = b . k with b upper triangular and k in K, by column
        reduction from the bottom row up; a matrix already in B comes
        back unchanged with k = 1."""
        F = self.F
        n = self.n
        a = [list(r) for r in g]
        kmat = self.identity

        def colswap(j1, j2):
            for r in range(n):
                a[r][j1], a[r][j2] = a[r][j2], a[r][j1]

        for i in range(n - 1, -1, -1):
            piv, pv = None, INF
            for j in range(i + 1):
                v = F.valuation(a[i][j])
                if v < pv:
                    piv, pv = j, v
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            if piv != i:
                colswap(piv, i)
                kmat = self.mul(self._transposition(piv, i), kmat)
            for j in range(i):
                if a[i][j][0]:
                    f = F.div(a[i][j], a[i][i])
                    for r in range(n):
                        a[r][j] = F.sub(a[r][j], F.mul(f, a[r][i]))
                    kmat = self.mul(self.elementary(i, j, f), kmat)
        b = self.mat(a)
        return b, kmat

    def _transposition(self, i, j):
        rows = [list(r) for r in self.identity]
        rows[i][i] = rows[j][j] = self.F.zero
        rows[i][j] = rows[j][i] = self.F.one
        return self.mat(rows)

    def bruhat_iwahori_class(self, g):
        """The extended Weyl element w with I g I = I w I.

        Valuation-pivoted elimination: repeatedly take the entry of
        minimal valuation (ties: lowest row, then leftmost column) and
        clear its row and column.  The tie-break makes every clearing
        operation a pro-p Iwahori elementary matrix, so the double
        coset never changes; the result is a monomial matrix read off
        as (perm, lam, torus).
        """
        F = self.F
        n = self.n
        a = [list(r) for r in g]
        rows_left = set(range(n))
        cols_left = set(range(n))
        perm = [0] * n
        lam = [0] * n
        torus = [1] * n
        for _ in range(n):
            best = None
            for i in rows_left:
                for j in cols_left:
                    v = F.valuation(a[i][j])
                    if v == INF:
                        continue
                    key = (v, -i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is None:
                raise ZeroDivisionError("singular matrix")
            _, pi, pj = best
            piv = a[pi][pj]
            for j in list(cols_left):
                if j != pj and a[pi][j][0]:
                    f = F.div(a[pi][j], piv)
                    for r in range(n):
                        a[r][j] = F.sub(a[r][j], F.mul(f, a[r][pj]))
            for i in list(rows_left):
                if i != pi and a[i][pj][0]:
                    f = F.div(a[i][pj], piv)
                    for c in range(n):
                        a[i][c] = F.sub(a[i][c], F.mul(f, a[pi][c]))
            rows_left.remove(pi)
            cols_left.remove(pj)
            perm[pj] = pi
            v = F.valuation(piv)
            lam[pi] = -v
            torus[pi] = F.residue(piv)
        return self.W.make(perm, lam, torus)

    def iwahori_factor(self, g):
        """g in I as uplus . t0 . uminus, exactly."""
        if not self.is_member(g, SubgroupSpec("ProPIwahori")):
            raise ValueError("element is not in the pro-p Iwahori")
        F = self.F
        n = self.n
        a = [list(r) for r in g]
        uminus_inv = self.identity
        for i in range(n - 1, 0, -1):
            for j in range(i):
                if a[i][j][0]:
                    f = F.div(a[i][j], a[i][i])
                    for r in range(n):
                        a[r][j] = F.sub(a[r][j], F.mul(f, a[r][i]))
                    uminus_inv = self.mul(uminus_inv,
                                          self.elementary(i, j, F.neg(f)))
        t0 = self.diag([a[i][i] for i in range(n)])
        t0_inv = self.diag([F.inv(a[i][i]) for i in range(n)])
        uplus = self.mul(self.mat(a), t0_inv)
        uminus = self.inv(uminus_inv)
        assert self.is_member(uplus, SubgroupSpec("IPlus"))
        assert self.is_member(t0, SubgroupSpec("T1"))
        assert self.is_member(uminus, SubgroupSpec("IMinus"))
        return uplus, t0, uminus

    # -- coset enumeration --------------------------------------------

    def root_subgroup_elt(self, j, c):
        """u_j(c): the one-parameter subgroup attached to the affine
        simple reflection s_j; u_0 carries the t factor."""
        s = self.F.from_int(c)
        if j == 0:
            return self.elementary(self.n - 1, 0, self.F.mul(s, self.F.t))
        return self.elementary(j - 1, j, s)

    def coset_reps(self, w, budget=16.0):
        """q^{l(w)} representatives x with I w I equal to the disjoint
        union of the x I, built along the canonical reduced word."""
        lw = self.W.length(w)
        if lw * math.log2(self.q) > budget:
            raise ValueError(
                f"coset enumeration budget exceeded: length {lw} at q={self.q}")
        omega, word, t0 = self.W.reduced_word(w)
        base = self.canonical_lift(omega)
        tail = self.canonical_lift(t0)
        slifts = [self.canonical_lift(self.W.simple_reflection(j))
                  for j in range(self.n)]
        out = []
        for params in itertools.product(range(self.q), repeat=lw):
            x = base
            for c, j in zip(params, word):
                x = self.mul(x, self.root_subgroup_elt(j, c))
                x = self.mul(x, slifts[j])
            out.append(self.mul(x, tail))
        return out

    # -- contraction criterion ---------------------------------------

    def contraction_test(self, lam, torus=None):
        """True iff the canonical lift g of the (possibly torus-dressed)
        translation e^lam contracts I+ and expands I-: g I+ g^{-1} in I+
        and g^{-1} I- g in I-, checked on the elementary generators by
        actual conjugation."""
        w = (self.W.from_translation(lam) if torus is None
             else self.W.make(self.W.identity[0], lam, torus))
        g = self.canonical_lift(w)
        gi = self.inv(g)
        n, F = self.n, self.F
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for c in range(1, self.q):
                    if i < j:
                        u = self.elementary(i, j, F.from_int(c))
                        conj = self.mul(self.mul(g, u), gi)
                        if not self.is_member(conj, SubgroupSpec("IPlus")):
                            return False
                    else:
                        u = self.elementary(i, j,
                                            F.mul(F.from_int(c), F.t))
                        conj = self.mul(self.mul(gi, u), g)
                        if not self.is_member(conj, SubgroupSpec("IMinus")):
                            return False
        return True

    # -- double coset counting in a finite quotient -------------------

    def double_coset_count(self, spec):
        """|B \\ G / Omega| with representatives, for Omega compact open
        between some K_m and K; computed as orbits of the Borel image
        acting with Omega's image on GL_n(F_q[t]/t^m)."""
        n, q = self.n, self.q
        m = self._finite_level(spec)
        size_gl = 1
        for k in range(n):
            size_gl *= q ** n - q ** k
        if size_gl * q ** (n * n * (m - 1)) > 1_000_000:
            raise ValueError("finite quotient too large")
        elems = _enumerate_gl(n, q, m)
        left = self._borel_image_gens(m)
        right = self._omega_image_gens(spec, m)
        index = {e: i for i, e in enumerate(elems)}
        parent = list(range(len(elems)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                if rx > ry:
                    rx, ry = ry, rx
                parent[ry] = rx

        for idx, e in enumerate(elems):
            for gmat in left:
                union(idx, index[_rmat_mul(gmat, e, q, m)])
            for gmat in right:
                union(idx, index[_rmat_mul(e, gmat, q, m)])
        roots = {}
        for idx, e in enumerate(elems):
            r = find(idx)
            if r not in roots or e < roots[r]:
                roots[r] = e
        reps = [self._lift_rmat(key) for key in sorted(roots.values())]
        return len(reps), reps

    def _finite_level(self, spec):
        tag = spec.tag
        if tag == "K":
            return 1
        if tag == "K_m":
            return spec.level
        if tag in ("Iwahori", "ProPIwahori"):
            return 1
        if tag == "ParahoricPro_p":
            if spec.translate is not None and spec.translate != self.identity:
                raise ValueError("only the standard position is of "
                                 "finite level here")
            return 1
        raise ValueError(f"subgroup {tag} is not compact open of finite level")

    def _rpoly(self, c, k, m):
        return tuple((c if a == k else 0) for a in range(m))

    def _borel_image_gens(self, m):
        n, q = self.n, self.q
        gens = []
        for u in _units(q, m):
            if u == _rpoly_one(m):
                continue
            for i in range(n):
                gens.append(_rmat_diag_unit(n, m, i, u))
        for i in range(n):
            for j in range(i + 1, n):
                for c in range(1, q):
                    for k in range(m):
                        gens.append(_rmat_elem(n, m, i, j, c, k))
        return gens

    def _omega_image_gens(self, spec, m):
        n, q = self.n, self.q
        tag = spec.tag
        gens = []

        def add_elem(i, j, kmin):
            for c in range(1, q):
                for k in range(kmin, m):
                    gens.append(_rmat_elem(n, m, i, j, c, k))

        def add_diag(congruent_level):
            for u in _units(q, m):
                if u == _rpoly_one(m):
                    continue
                if any(u[a] != (1 if a == 0 else 0)
                       for a in range(congruent_level)):
                    continue
                for i in range(n):
                    gens.append(_rmat_diag_unit(n, m, i, u))

        if tag == "K":
            for i in range(n):
                for j in range(n):
                    if i != j:
                        add_elem(i, j, 0)
            add_diag(0)
        elif tag == "K_m":
            lvl = spec.level
            for i in range(n):
                for j in range(n):
                    if i != j:
                        add_elem(i, j, lvl)
            add_diag(lvl)
        elif tag == "Iwahori":
            for i in range(n):
                for j in range(n):
                    if i != j:
                        add_elem(i, j, 0 if i < j else 1)
            add_diag(0)
        elif tag == "ProPIwahori":
            for i in range(n):
                for j in range(n):
                    if i != j:
                        add_elem(i, j, 0 if i < j else 1)
            add_diag(1)
        elif tag == "ParahoricPro_p":
            if 0 not in spec.types:
                raise ValueError("counting needs a facet through the origin")
            blk = self._block_index(spec.types)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        add_elem(i, j, 0 if blk[i] < blk[j] else 1)
            add_diag(1)
        else:
            raise ValueError(f"no finite image for {tag}")
        return gens

    def _lift_rmat(self, e):
        return tuple(tuple(self.F.make(poly_trim(x)) for x in row)
                     for row in e)

    # -- lattice keys (for the tree walk) -----------------------------

    def lattice_key(self, g):
        """Canonical form of the O-lattice spanned by the columns of g,
        up to scaling by powers of t.

        Hermite form over the valuation ring: after normalizing the
        matrix so its minimal entry valuation is 0 (the homothety
        representative), rows are processed top down; row i gets a
        pivot column with entry exactly t^{k_i}, later columns are
        cleared at row i, and earlier pivot columns are reduced mod
        t^{k_i}, leaving polynomial remainders of degree < k_i.  The
        result is the unique such form of the lattice, so equal keys
        mean equal lattices up to t-power scaling.
        """
        F = self.F
        n = self.n
        vmin = min(F.valuation(x) for row in g for x in row)
        scale = F.t_power(-vmin)
        a = [[F.mul(scale, x) for x in row] for row in g]
        order = []
        used = set()
        for i in range(n):
            piv, pv = None, INF
            for j in range(n):
                if j in used:
                    continue
                v = F.valuation(a[i][j])
                if v < pv:
                    piv, pv = j, v
            if piv is None or pv == INF:
                raise ZeroDivisionError("singular matrix")
            unit_inv = F.inv(F.mul(a[i][piv], F.t_power(-pv)))
            for r in range(n):
                a[r][piv] = F.mul(unit_inv, a[r][piv])
            tpow = F.t_power(pv)
            for j in range(n):
                if j == piv or not a[i][j][0]:
                    continue
                if j in used:
                    rem = F.make(self.truncate(a[i][j], pv))
                    f = F.div(F.sub(a[i][j], rem), tpow)
                else:
                    f = F.div(a[i][j], tpow)
                if not f[0]:
                    continue
                for r in range(n):
                    a[r][j] = F.sub(a[r][j], F.mul(f, a[r][piv]))
            used.add(piv)
            order.append(piv)
        return tuple(tuple(a[r][j] for r in range(n)) for j in order)

    # -- convenience --------------------------------------------------

    def truncate(self, x, m):
        """Coefficient tuple of the polynomial x mod t^m, for integral x."""
        if m <= 0:
            return ()
        F = self.F
        assert F.valuation(x) >= 0
        num, den = x
        inv = _poly_inverse_mod(den, m, self.q)
        return _poly_mulmod(num, inv, m, self.q)


# ---------------------------------------------------------------------------
# finite quotient matrices: entries are length-m coefficient tuples mod q

def _rpoly_one(m):
    return tuple(1 if a == 0 else 0 for a in range(m))


def _rpoly_mul(x, y, q, m):
    out = [0] * m
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                if yj and i + j < m:
                    out[i + j] = (out[i + j] + xi * yj) % q
    return tuple(out)


def _rmat_mul(a, b, q, m):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = [0] * m
            for k in range(n):
                p = _rpoly_mul(a[i][k], b[k][j], q, m)
                for s in range(m):
                    acc[s] = (acc[s] + p[s]) % q
            row.append(tuple(acc))
        out.append(tuple(row))
    return tuple(out)


def _rmat_identity(n, m):
    one, zero = _rpoly_one(m), (0,) * m
    return tuple(tuple(one if i == j else zero for j in range(n))
                 for i in range(n))


def _rmat_elem(n, m, i, j, c, k):
    rows = [list(r) for r in _rmat_identity(n, m)]
    rows[i][j] = tuple(c if a == k else 0 for a in range(m))
    return tuple(tuple(r) for r in rows)


def _rmat_diag_unit(n, m, i, u):
    rows = [list(r) for r in _rmat_identity(n, m)]
    rows[i][i] = u
    return tuple(tuple(r) for r in rows)


def _units(q, m):
    out = []
    for code in itertools.product(range(q), repeat=m):
        if code[0] != 0:
            out.append(tuple(code))
    return out


def _det_mod_q(mat0, q):
    n = len(mat0)
    m = [list(r) for r in mat0]
    d = 1
    for c in range(n):
        pr = None
        for i in range(c, n):
            if m[i][c] % q:
                pr = i
                break
        if pr is None:
            return 0
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            d = -d
        d = (d * m[c][c]) % q
        inv = pow(m[c][c], q - 2, q)
        for i in range(c + 1, n):
            if m[i][c] % q:
                f = (m[i][c] * inv) % q
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[c])]
    return d % q


_GL_CACHE = {}


def _enumerate_gl(n, q, m):
    """All of GL_n(F_q[t]/t^m), as tuples of coefficient tuples, in a
    fixed enumeration order."""
    key = (n, q, m)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    cells = n * n
    out = []
    for const in itertools.product(range(q), repeat=cells):
        mat0 = [list(const[i * n:(i + 1) * n]) for i in range(n)]
        if _det_mod_q(mat0, q) == 0:
            continue
        if m == 1:
            out.append(tuple(tuple((x,) for x in row) for row in mat0))
        else:
            higher = itertools.product(range(q), repeat=cells * (m - 1))
            for h in higher:
                e = []
                for i in range(n):
                    row = []
                    for j in range(n):
                        idx = i * n + j
                        row.append((mat0[i][j],)
                                   + tuple(h[idx * (m - 1):(idx + 1) * (m - 1)]))
                    e.append(tuple(row))
                out.append(tuple(e))
    _GL_CACHE[key] = out
    return out


def _poly_inverse_mod(den, m, q):
    """Inverse of den mod t^m; den(0) must be a unit."""
    if not den or den[0] % q == 0:
        raise ZeroDivisionError("denominator not a unit at t=0")
    inv0 = pow(den[0], q - 2, q)
    out = [inv0] + [0] * (m - 1)
    for k in range(1, m):
        acc = 0
        for i in range(1, k + 1):
            if i < len(den):
                acc = (acc + den[i] * out[k - i]) % q
        out[k] = (-inv0 * acc) % q
    return tuple(out)


def _poly_mulmod(a, b, m, q):
    out = [0] * m
    for i, x in enumerate(a):
        if i >= m:
            break
        if x:
            for j, y in enumerate(b):
                if i + j < m:
                    out[i + j] = (out[i + j] + x * y) % q
    return poly_trim(out)
