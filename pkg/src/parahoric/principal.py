"""The principal series at pro-p level.

Induction from the Borel of a torus character trivial on the pro-p
torus units.  Fixed vectors under a pro-p open subgroup are supported
on finitely many Borel double cosets, and evaluation at coset
representatives identifies the fixed space with k^(number of cosets).
Every evaluation of such a vector at a group element goes through one
Iwasawa step (splitting off the Borel part exactly) followed by
residue-level bookkeeping: the remaining maximal-compact factor only
matters modulo its principal congruence subgroup, which every level
in scope contains.

The right convolution action on the Iwahori-fixed space is an honest
coset sum over the enumerated simple cosets of a double coset, so it
is independent of the multiplication table and can be played against
it.
"""

import itertools

from .fields import INF, power
from .group import SubgroupSpec
from .hecke import AntiCharacter, build_anti_character, \
    fiber_dimension_sandwich
from .linalg import rank
from .weyl import all_perms

# The side and sign conventions below are frozen by the normalization
# requirement f_1 . tau_{e^lam} = chibar(tau_{e^lam}) . f_1 for
# antidominant lam, checked in the tests; they are not independently
# adjustable.  (The tame direction carries no analogous knob here:
# residue characters for q <= 3 are quadratic, so a value equals its
# own inverse.)
_Z_EXP = 1           # unramified parameters see the valuation directly
_ACT_INVERSE = True  # coset sum runs over representatives of w^{-1}


class PrincipalSeriesChar:
    """A torus character through valuations and residue units: n
    unramified parameters z_i in k^x and n tame exponents against the
    fixed generator of the residue character group.

    >>> from .fields import RationalField
    >>> from fractions import Fraction
    >>> chi = PrincipalSeriesChar(RationalField(), 3,
    ...                           (Fraction(2), Fraction(5)), (0, 1))
    >>> chi.n
    2
    """

    def __init__(self, field, q, unramified, tame):
        z = tuple(unramified)
        if len(z) != len(tame):
            raise ValueError("unramified and tame data disagree on n")
        for v in z:
            if field.is_zero(v):
                raise ValueError("unramified parameter must be invertible")
        self.field = field
        self.q = q
        self.z = z
        self.unramified = z
        self.tame = tuple(int(o) % (q - 1) if q > 2 else 0 for o in tame)
        self.n = len(z)
        self._probe = None

    def _tame_probe(self):
        if self._probe is None:
            self._probe = AntiCharacter(
                self.field, self.q, (self.field.one,) * self.n, self.tame)
        return self._probe

    def tame_value(self, i, c):
        """Value of the i-th tame character at the residue unit c."""
        return self._tame_probe().tame_value(i, c)

    def borel_value(self, F, diag_entries):
        """chi on an upper-triangular matrix with the given diagonal."""
        k = self.field
        acc = k.one
        for i, d in enumerate(diag_entries):
            v = F.valuation(d)
            if v == INF:
                raise ZeroDivisionError("singular Borel part")
            acc = k.mul(acc, power(k, self.z[i], _Z_EXP * v))
            acc = k.mul(acc, self.tame_value(i, F.residue(d)))
        return acc

    def key(self):
        return (self.q, self.z, self.tame)


def chi_to_string(chi):
    zs = ",".join(str(v) for v in chi.z)
    ts = ",".join(str(o) for o in chi.tame)
    return f"z=[{zs}];tame=[{ts}]"


def chi_from_string(field, q, text):
    """Parse "z=[v1,...,vn];tame=[o1,...,on]".  Values are integers
    (taken into the field) or fractions a/b for the rational field."""
    text = text.strip()
    try:
        zpart, tpart = text.split(";")
        zvals = zpart.split("=", 1)[1].strip("[]").split(",")
        tvals = tpart.split("=", 1)[1].strip("[]").split(",")
    except (ValueError, IndexError):
        raise ValueError(f"malformed character string {text!r}")

    def scalar(s):
        s = s.strip()
        if "/" in s:
            a, b = s.split("/")
            return field.div(field.from_int(int(a)), field.from_int(int(b)))
        return field.from_int(int(s))

    return PrincipalSeriesChar(
        field, q, tuple(scalar(s) for s in zvals),
        tuple(int(s) for s in tvals))


# -- levels: supported pro-p subgroups at residue depth one -------------


def _require_pro_p(spec, q):
    if spec.tag == "ProPIwahori":
        return
    if spec.tag == "Iwahori":
        if q == 2:
            return
        raise ValueError("the Iwahori is not pro-p unless q = 2")
    if spec.tag == "K_m":
        return
    if spec.tag == "ParahoricPro_p":
        if spec.translate:
            raise ValueError("only facets through the base vertex here")
        if 0 not in spec.types:
            raise ValueError("facet must contain the base vertex type")
        return
    raise ValueError(f"level {spec.tag} is not a pro-p subgroup of K")


def _residue_generators(R, spec):
    if spec.tag in ("ProPIwahori", "Iwahori"):
        return R.unitriangular_generators()
    if spec.tag == "K_m":
        return []
    return R.radical_generators(sorted(spec.types))


class _ResidueLevel:
    """Borel double cosets of a residue-level subgroup, with a Borel
    witness per group element: x = bpart(x) . rep(x) . (level part).
    The witness's chi-value is well defined because a conjugate of the
    (unipotent, pro-p) level meeting the Borel has unit diagonal."""

    def __init__(self, R, spec):
        self.R = R
        self.spec = spec
        ogens = _residue_generators(R, spec)
        bgens = (R.unitriangular_generators()
                 + [R.diagonal((1,) * i + (c,) + (1,) * (R.n - 1 - i))
                    for i in range(R.n) for c in range(2, R.q)])
        seen = {}
        reps = []
        for g in R.elements:
            if g in seen:
                continue
            orbit = {g}
            frontier = [g]
            while frontier:
                nxt = []
                for x in frontier:
                    for e in bgens:
                        y = R.mul(e, x)
                        if y not in orbit:
                            orbit.add(y)
                            nxt.append(y)
                    for e in ogens:
                        y = R.mul(x, e)
                        if y not in orbit:
                            orbit.add(y)
                            nxt.append(y)
                frontier = nxt
            rep = min(orbit)
            reps.append(rep)
            # second pass from the canonical representative, tracking
            # the Borel factor
            bpart = {rep: R.identity}
            frontier = [rep]
            while frontier:
                nxt = []
                for x in frontier:
                    for e in bgens:
                        y = R.mul(e, x)
                        if y not in bpart:
                            bpart[y] = R.mul(e, bpart[x])
                            nxt.append(y)
                    for e in ogens:
                        y = R.mul(x, e)
                        if y not in bpart:
                            bpart[y] = bpart[x]
                            nxt.append(y)
                frontier = nxt
            for x in orbit:
                seen[x] = (rep, bpart[x])
        self.reps = sorted(reps)
        self.witness = seen
        self._perm_map = None

    def resolve(self, x):
        return self.witness[x]

    def perm_map(self):
        """Class key -> finite permutation, when the representatives
        are exhausted by permutation matrices (Iwahori-type levels)."""
        if self._perm_map is None:
            n = self.R.n
            out = {}
            for p in all_perms(n):
                mat = tuple(tuple(1 if p[j] == i else 0 for j in range(n))
                            for i in range(n))
                rep, _ = self.resolve(mat)
                out[rep] = p
            self._perm_map = out
        return self._perm_map


_levels = {}


def _level_data(LG, spec):
    from .finitelevel import residue_group
    key = (LG.n, LG.q, spec.tag, spec.level,
           tuple(sorted(spec.types)) if spec.types else None)
    if key not in _levels:
        _require_pro_p(spec, LG.q)
        _levels[key] = _ResidueLevel(residue_group(LG.n, LG.q), spec)
    return _levels[key]


def _residue_matrix(LG, kmat):
    """Reduce an element of K modulo the uniformizer."""
    q = LG.q
    out = []
    for row in kmat:
        r = []
        for a in row:
            na, da = a
            if not na:
                r.append(0)
                continue
            if da[0] % q == 0:
                raise ValueError("matrix entry is not integral")
            r.append(na[0] * pow(da[0], q - 2, q) % q)
        out.append(tuple(r))
    return tuple(out)


class InvariantVector:
    """A fixed vector, stored by its values at the double-coset
    representatives of its level."""

    def __init__(self, chi, level, values):
        self.chi = chi
        self.level = level
        self.values = {r: c for r, c in values.items()
                       if not chi.field.is_zero(c)}

    def __eq__(self, other):
        return (isinstance(other, InvariantVector)
                and self.level == other.level
                and self.values == other.values
                and self.chi.key() == other.chi.key())

    def __repr__(self):
        return f"InvariantVector({self.level.tag}, {self.values!r})"

    def scale(self, c):
        k = self.chi.field
        return InvariantVector(
            self.chi, self.level,
            {r: k.mul(c, v) for r, v in self.values.items()})

    def add(self, other):
        k = self.chi.field
        out = dict(self.values)
        for r, v in other.values.items():
            out[r] = k.add(out.get(r, k.zero), v)
        return InvariantVector(self.chi, self.level, out)


def invariant_space(LG, chi, omega):
    """Basis of the omega-fixed vectors: one characteristic-type
    function per Borel double coset.  Representatives are permutation
    tuples at Iwahori-type levels and residue class keys otherwise."""
    if chi.n != LG.n or chi.q != LG.q:
        raise ValueError("character does not match the group")
    data = _level_data(LG, omega)
    k = chi.field
    if omega.tag in ("ProPIwahori", "Iwahori"):
        perm_of = data.perm_map()
        if len(perm_of) != len(data.reps):
            raise ValueError("permutation representatives do not exhaust "
                             "the double cosets")
        return [InvariantVector(chi, omega, {p: k.one})
                for p in sorted(perm_of.values())]
    return [InvariantVector(chi, omega, {r: k.one}) for r in data.reps]


def evaluate_vector(LG, vec, g):
    """The vector's underlying function at an arbitrary group element:
    Iwasawa step, then residue resolution, then the stored value."""
    chi = vec.chi
    k = chi.field
    b, kmat = LG.iwasawa(g)
    acc = chi.borel_value(LG.F, [b[i][i] for i in range(LG.n)])
    data = _level_data(LG, vec.level)
    rep, bpart = data.resolve(_residue_matrix(LG, kmat))
    for i in range(LG.n):
        acc = k.mul(acc, chi.tame_value(i, bpart[i][i]))
    if vec.level.tag in ("ProPIwahori", "Iwahori"):
        key = data.perm_map()[rep]
    else:
        key = rep
    c = vec.values.get(key)
    if c is None:
        return k.zero
    return k.mul(acc, c)


def hecke_right_action(LG, vec, w, budget=16.0):
    """vec . tau_w by summation over the simple cosets of the double
    coset of w; only defined at the Iwahori-type level."""
    if vec.level.tag not in ("ProPIwahori", "Iwahori"):
        raise ValueError("the convolution action lives at Iwahori level")
    chi = vec.chi
    k = chi.field
    W = LG.W
    target = W.inv(w) if _ACT_INVERSE else w
    reps = LG.coset_reps(target, budget)
    out = {}
    for p in all_perms(LG.n):
        r = LG.canonical_lift(W.from_perm(p))
        acc = k.zero
        for x in reps:
            acc = k.add(acc, evaluate_vector(LG, vec, LG.mul(r, x)))
        if not k.is_zero(acc):
            out[p] = acc
    return InvariantVector(chi, vec.level, out)


def unit_vector(LG, chi, omega=None):
    """f_1: value one on the identity double coset."""
    if omega is None:
        omega = SubgroupSpec("ProPIwahori")
    ident = tuple(range(LG.n))
    return InvariantVector(chi, omega, {ident: chi.field.one})


# -- certificates -------------------------------------------------------


def _omega_sample_elements(LG, spec, count=5, seed=909):
    """Deterministic members of the level subgroup: products of
    elementary and diagonal candidates filtered by exact membership."""
    import random
    rng = random.Random(seed)
    F = LG.F
    n = LG.n
    pool = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for c in range(1, LG.q):
                for deg in (0, 1, 2):
                    e = LG.elementary(i, j, F.make((0,) * deg + (c,)))
                    if LG.is_member(e, spec):
                        pool.append(e)
    for i in range(n):
        d = [F.one] * n
        d[i] = F.add(F.one, F.t)
        dm = LG.diag(d)
        if LG.is_member(dm, spec):
            pool.append(dm)
    if not pool:
        return [LG.identity] * count
    out = []
    for _ in range(count):
        g = LG.identity
        for _ in range(3):
            g = LG.mul(g, rng.choice(pool))
        out.append(g)
    return out


def verify_invariant_rank(LG, chi, omega):
    """Dimension of the fixed space against the independent double
    coset count, evaluation bijectivity, and honest fixedness of each
    basis vector under sampled level elements."""
    basis = invariant_space(LG, chi, omega)
    k = chi.field
    expected, _ = LG.double_coset_count(omega)
    data = _level_data(LG, omega)
    if omega.tag in ("ProPIwahori", "Iwahori"):
        points = [LG.canonical_lift(LG.W.from_perm(p))
                  for p in sorted(data.perm_map().values())]
    else:
        points = [LG.from_ints([[int(c) for c in row] for row in r])
                  for r in data.reps]
    eval_rows = []
    for v in basis:
        eval_rows.append([evaluate_vector(LG, v, pt) for pt in points])
    eval_rank = rank(k, eval_rows)
    fixed_ok = True
    samples = _omega_sample_elements(LG, omega)
    for v in basis[: min(3, len(basis))]:
        for pt in points[: min(3, len(points))]:
            want = evaluate_vector(LG, v, pt)
            for s in samples:
                if evaluate_vector(LG, v, LG.mul(pt, s)) != want:
                    fixed_ok = False
    ok = (len(basis) == expected == eval_rank and fixed_ok)
    return {
        "check": "invariant_rank",
        "n": LG.n,
        "q": LG.q,
        "level": omega.tag + (str(sorted(omega.types))
                              if omega.types else ""),
        "chi": chi_to_string(chi),
        "dim": len(basis),
        "coset_count": expected,
        "eval_rank": eval_rank,
        "fixed_ok": fixed_ok,
        "ok": ok,
    }


def _short_antidominant_steps(n, lam):
    """An antidominant coweight as a sum of short antidominant pieces:
    the central part, then one fundamental step (0,..,0,1,..,1) per
    unit of each successive difference.  Lengths add across the sum,
    and each step has length at most j(n-j)."""
    assert list(lam) == sorted(lam)
    steps = []
    if lam[0]:
        steps.append((lam[0],) * n)
    for j in range(1, n):
        step = (0,) * j + (1,) * (n - j)
        for _ in range(lam[j] - lam[j - 1]):
            steps.append(step)
    return steps


def verify_normalization(LG, chi, box=2, max_len=6):
    """f_1 is a chibar-eigenvector for every antidominant translation
    in the box; long translations are reached through short
    antidominant factors, which multiply length-additively."""
    W = LG.W
    k = chi.field
    chibar = build_anti_character(chi)
    f1 = unit_vector(LG, chi)
    checked = 0
    failures = []
    for lam in itertools.product(range(-box, box + 1), repeat=LG.n):
        if list(lam) != sorted(lam):
            continue
        w = W.from_translation(lam)
        expect = chibar.of_translation(w)
        if W.length(w) <= max_len:
            got = hecke_right_action(LG, f1, w)
        else:
            got = f1
            for step in _short_antidominant_steps(LG.n, lam):
                got = hecke_right_action(LG, got, W.from_translation(step))
        want = f1.scale(expect)
        checked += 1
        if got != want:
            failures.append(lam)
    ok = not failures
    return {
        "check": "normalization",
        "n": LG.n,
        "q": LG.q,
        "chi": chi_to_string(chi),
        "box": box,
        "checked": checked,
        "failures": [list(l) for l in failures[:5]],
        "ok": ok,
    }


def verify_fiber(LG, chi, L=3, margin=2):
    """The fiber of the induced module over chibar: sandwich bounds
    plus the explicit witness tau_{w-lift} acting on f_1 landing on
    f_w, every finite permutation w."""
    from .hecke import HeckeAlgebra
    W = LG.W
    k = chi.field
    chibar = build_anti_character(chi)
    H = HeckeAlgebra(W, k)
    f1 = unit_vector(LG, chi)
    perms = sorted(all_perms(LG.n))
    pindex = {p: i for i, p in enumerate(perms)}

    def evaluate(j, w):
        vec = hecke_right_action(LG, f1, w)
        out = [k.zero] * len(perms)
        for p, c in vec.values.items():
            out[pindex[p]] = c
        return out

    upper, lower = fiber_dimension_sandwich(
        H, [H.unit()], chibar, L, margin=margin, evaluate=evaluate)

    witness_ok = True
    nfact = len(perms)
    for p in perms:
        got = hecke_right_action(LG, f1, W.from_perm(p))
        if got != InvariantVector(chi, f1.level, {p: k.one}):
            witness_ok = False

    failed = None
    if lower != nfact:
        failed = "evaluation rank"
    elif upper != nfact:
        failed = "upper bound"
    elif not witness_ok:
        failed = "basis witness"
    return {
        "check": "fiber",
        "n": LG.n,
        "q": LG.q,
        "chi": chi_to_string(chi),
        "L": L,
        "upper": upper,
        "lower": lower,
        "witness_ok": witness_ok,
        "failed": failed,
        "ok": failed is None,
    }
