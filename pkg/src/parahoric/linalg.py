"""Exact linear algebra over the coefficient fields.

Everything here is deterministic: fixed pivot choices, fixed orderings,
no randomization.  The numpy path for prime fields must produce the same
reduced echelon form as the reference path (tested), so certificates do
not depend on which path ran.
"""

from __future__ import annotations

import numpy as np

from .fields import PrimeField


def mat_identity(field, n):
    z, o = field.zero, field.one
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def mat_mul(field, a, b):
    n, m = len(a), len(b[0])
    k = len(b)
    assert len(a[0]) == k
    z = field.zero
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(m):
            acc = z
            for l in range(k):
                x = ai[l]
                if x != z:
                    acc = field.add(acc, field.mul(x, b[l][j]))
            row.append(acc)
        out.append(row)
    return out


def mat_sub(field, a, b):
    return [[field.sub(x, y) for x, y in zip(ra, rb)]
            for ra, rb in zip(a, b)]


def rref_reference(field, rows):
    """Reduced row echelon form, pure field arithmetic.

    Pivot choice: columns left to right, first row from the top with a
    nonzero entry in the column.  Returns (rank, pivot_columns, rref).
    """
    m = [list(r) for r in rows]
    if not m:
        return 0, [], []
    ncols = len(m[0])
    z = field.zero
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(m)):
            if m[i][c] != z:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != z:
                f = m[i][c]
                m[i] = [field.sub(x, field.mul(f, y))
                        for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return r, pivots, m


def rref_prime_numpy(p, rows):
    m = np.array(rows, dtype=np.int64) % p
    if m.size == 0:
        return 0, [], m
    nrows, ncols = m.shape
    pivots = []
    r = 0
    for c in range(ncols):
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = (m[r] * pow(int(m[r, c]), p - 2, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            m[mask] = (m[mask] - np.outer(col[mask], m[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return r, pivots, m


def rref(field, rows):
    if isinstance(field, PrimeField) and rows:
        rank, pivots, m = rref_prime_numpy(field.p, rows)
        return rank, pivots, [[int(x) for x in row] for row in m]
    return rref_reference(field, rows)


def rank(field, rows):
    return rref(field, rows)[0]


def rank_and_kernel(field, rows):
    """Rank and a basis of the right kernel {v : rows . v = 0}.

    Kernel vectors are indexed by free columns in increasing order; the
    entry at the free column is 1.  Exact and deterministic.
    """
    if not rows:
        return 0, []
    ncols = len(rows[0])
    r, pivots, m = rref(field, rows)
    pivset = set(pivots)
    z, o = field.zero, field.one
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [z] * ncols
        v[f] = o
        for j, c in enumerate(pivots):
            v[c] = field.neg(m[j][f])
        basis.append(v)
    return r, basis


def solve_in_span(field, basis_vectors, target):
    """Coefficients c with sum c_i basis_vectors[i] = target, or None.

    The basis vectors need not be independent; the returned combination
    is the one read off the reduced echelon form of the augmented system.
    """
    if not basis_vectors:
        return [] if all(x == field.zero for x in target) else None
    n = len(target)
    assert all(len(v) == n for v in basis_vectors)
    k = len(basis_vectors)
    aug = [[basis_vectors[j][i] for j in range(k)] + [target[i]]
           for i in range(n)]
    r, pivots, m = rref(field, aug)
    if k in pivots:
        return None
    coeffs = [field.zero] * k
    for j, c in enumerate(pivots):
        coeffs[c] = m[j][k]
    return coeffs


class SparseEchelon:
    """Incremental echelon form with dict rows, for large sparse systems.

    Rows are {column: coefficient}; the pivot of a stored row is its
    minimum column and its coefficient is 1.  add() reduces the incoming
    row against the stored ones and either inserts it (returning the new
    pivot column) or returns None when it reduced to zero.  Not fully
    reduced above pivots; rank and membership are what it answers.
    """

    def __init__(self, field):
        self.field = field
        self.rows = {}

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, row):
        f = self.field
        z = f.zero
        row = {c: v for c, v in row.items() if v != z}
        while row:
            c = min(row)
            piv = self.rows.get(c)
            if piv is None:
                return row
            coef = row[c]
            for cc, vv in piv.items():
                nv = f.sub(row.get(cc, z), f.mul(coef, vv))
                if nv == z:
                    row.pop(cc, None)
                else:
                    row[cc] = nv
        return row

    def add(self, row):
        f = self.field
        row = self.reduce(row)
        if not row:
            return None
        c = min(row)
        inv = f.inv(row[c])
        self.rows[c] = {cc: f.mul(inv, vv) for cc, vv in row.items()}
        return c

    def contains(self, row):
        return not self.reduce(row)


class ScaledPartition:
    """Union-find with multiplicative weights over a field.

    Tracks relations x_i = c . x_j between formal basis symbols.  An
    inconsistent pair of relations forces the whole class to zero; such
    classes are marked dead.  canonical(i) returns (root, w) meaning
    x_i = w . x_root for a live class, or None when x_i is forced zero.
    """

    def __init__(self, field, n):
        self.field = field
        self.parent = list(range(n))
        self.weight = [field.one] * n
        self.dead = [False] * n

    def find(self, i):
        path = []
        while self.parent[i] != i:
            path.append(i)
            i = self.parent[i]
        root = i
        acc = self.field.one
        for j in reversed(path):
            acc = self.field.mul(self.weight[j], acc)
            self.parent[j] = root
            self.weight[j] = acc
        return root, acc

    def relate(self, i, j, c):
        """Impose x_i = c . x_j."""
        f = self.field
        if c == f.zero:
            self.set_zero(i)
            return
        ri, wi = self.find(i)
        rj, wj = self.find(j)
        if ri == rj:
            if wi != f.mul(c, wj):
                self.dead[ri] = True
            return
        if ri < rj:
            self.parent[rj] = ri
            self.weight[rj] = f.div(wi, f.mul(c, wj))
            self.dead[ri] = self.dead[ri] or self.dead[rj]
        else:
            self.parent[ri] = rj
            self.weight[ri] = f.div(f.mul(c, wj), wi)
            self.dead[rj] = self.dead[rj] or self.dead[ri]

    def set_zero(self, i):
        r, _ = self.find(i)
        self.dead[r] = True

    def canonical(self, i):
        r, w = self.find(i)
        if self.dead[r]:
            return None
        return r, w

    def live_roots(self):
        seen = []
        got = set()
        for i in range(len(self.parent)):
            r, _ = self.find(i)
            if not self.dead[r] and r not in got:
                got.add(r)
                seen.append(r)
        return seen
