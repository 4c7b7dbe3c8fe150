"""Exact scalar arithmetic.

Four kinds of coefficient domains, all exact:

  * PrimeField(ell)       elements are ints in [0, ell)
  * ExtField(ell, d)      F_{ell^d}, elements are length-d tuples of ints
                          (coordinates w.r.t. the fixed irreducible modulus)
  * RationalField()       elements are fractions.Fraction
  * FunctionField(q)      F_q(t), elements are reduced (num, den) pairs of
                          coefficient tuples with monic denominator

The function field is the computational stand-in for the Laurent series
field: every group element the verifier ever constructs has rational
function entries, so no truncation occurs anywhere.  The uniformizer is t
and t_adic_valuation(t) = 1.

A field object carries the arithmetic; elements are plain immutable Python
values, cheap to hash and compare.  Mixing elements of different field
objects is the caller's bug; ExactMatrix guards against it.
"""

from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf


# ---------------------------------------------------------------------------
# dense polynomials over a prime field, coefficient tuples low degree first,
# never any trailing zero; () is the zero polynomial

def poly_trim(cs):
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    return tuple(cs[:n])


def poly_add(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return poly_trim(out)


def poly_neg(a, p):
    return tuple((-c) % p for c in a)


def poly_sub(a, b, p):
    return poly_add(a, poly_neg(b, p), p)


def poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return poly_trim([c % p for c in out])


def poly_scale(a, c, p):
    c %= p
    if c == 0:
        return ()
    return tuple((x * c) % p for x in a)


def poly_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, p - 2, p)
    quo = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = rem[i] % p
        if c:
            f = (c * inv_lb) % p
            quo[i - db] = f
            for j in range(db + 1):
                rem[i - db + j] = (rem[i - db + j] - f * b[j]) % p
    return poly_trim(quo), poly_trim(rem)


def poly_gcd(a, b, p):
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if a:
        a = poly_scale(a, pow(a[-1], p - 2, p), p)  # monic normalization
    return a


def poly_val(a):
    """Order of vanishing at t = 0; INF for the zero polynomial."""
    for i, c in enumerate(a):
        if c:
            return i
    return INF


def poly_shift(a, k):
    """Multiply by t^k, k >= 0."""
    if not a:
        return ()
    return (0,) * k + tuple(a)


def poly_eval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def poly_is_irreducible(f, p):
    """Deterministic irreducibility test by trial division, small degrees."""
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    # any factorization has a factor of degree <= d // 2
    divisors = [()]
    for deg in range(1, d // 2 + 1):
        for code in range(p ** deg):
            cs, c = [], code
            for _ in range(deg):
                cs.append(c % p)
                c //= p
            cand = tuple(cs) + (1,)  # monic of degree deg
            if not poly_divmod(f, cand, p)[1]:
                return False
    return True


_MODULUS_CACHE: dict[tuple[int, int], tuple] = {}


def extension_modulus(p, d):
    """The fixed monic irreducible of degree d over F_p: lexicographically
    first in the coefficient encoding.  Cached so it is stable per (p, d)."""
    key = (p, d)
    got = _MODULUS_CACHE.get(key)
    if got is not None:
        return got
    for code in range(p ** d):
        cs, c = [], code
        for _ in range(d):
            cs.append(c % p)
            c //= p
        f = tuple(cs) + (1,)
        if poly_is_irreducible(f, p):
            _MODULUS_CACHE[key] = f
            return f
    raise ArithmeticError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# field objects


class PrimeField:
    def __init__(self, p):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.zero = 0
        self.one = 1

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def elements(self):
        return range(self.p)

    def encode(self, a):
        return str(a % self.p)

    def parse(self, s):
        return int(s) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"F{self.p}"


class ExtField:
    """F_{p^d} with the fixed stored modulus from extension_modulus."""

    def __init__(self, p, d):
        if d < 1:
            raise ValueError("extension degree must be positive")
        PrimeField(p)  # primality check
        self.p = p
        self.d = d
        self.char = p
        self.modulus = extension_modulus(p, d)
        self.zero = (0,) * d
        self.one = ((1,) + (0,) * (d - 1)) if d > 1 else (1,)

    def from_int(self, n):
        return ((n % self.p,) + (0,) * (self.d - 1))

    def _red(self, cs):
        _, r = poly_divmod(poly_trim(cs), self.modulus, self.p)
        return tuple(r) + (0,) * (self.d - len(r))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        return self._red(poly_mul(poly_trim(a), poly_trim(b), self.p))

    def inv(self, a):
        at = poly_trim(a)
        if not at:
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid against the modulus
        r0, r1 = self.modulus, at
        s0, s1 = (), (1,)
        while r1:
            q, r = poly_divmod(r0, r1, self.p)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, self.p), self.p)
        # r0 is a nonzero constant gcd
        c = pow(r0[0], self.p - 2, self.p)
        return self._red(poly_scale(s0, c, self.p))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def elements(self):
        total = self.p ** self.d
        for code in range(total):
            cs, c = [], code
            for _ in range(self.d):
                cs.append(c % self.p)
                c //= self.p
            yield tuple(cs)

    def encode(self, a):
        return ",".join(str(x) for x in a)

    def parse(self, s):
        cs = tuple(int(x) % self.p for x in s.split(","))
        return cs + (0,) * (self.d - len(cs))

    def __eq__(self, other):
        return (isinstance(other, ExtField) and other.p == self.p
                and other.d == self.d)

    def __hash__(self):
        return hash(("F", self.p, self.d))

    def __repr__(self):
        return f"F{self.p}^{self.d}"


class RationalField:
    char = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b

    def is_zero(self, a):
        return a == 0

    def encode(self, a):
        return str(a)

    def parse(self, s):
        return Fraction(s)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class FunctionField:
    """F_q(t), q prime.  Elements are pairs (num, den) of coefficient
    tuples, den monic, gcd(num, den) = 1, and ((), (1,)) is zero."""

    char_t = None  # not a coefficient field for matrices over k; char is q

    def __init__(self, q):
        PrimeField(q)
        self.q = q
        self.char = q
        self.zero = ((), (1,))
        self.one = ((1,), (1,))
        self.t = ((0, 1), (1,))

    def from_int(self, n):
        n %= self.q
        return (((n,) if n else ()), (1,))

    def make(self, num, den=(1,)):
        return self._reduce(poly_trim(num), poly_trim(den))

    def _reduce(self, num, den):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = poly_gcd(num, den, self.q)
        if len(g) > 1:
            num = poly_divmod(num, g, self.q)[0]
            den = poly_divmod(den, g, self.q)[0]
        lc = den[-1]
        if lc != 1:
            c = pow(lc, self.q - 2, self.q)
            num = poly_scale(num, c, self.q)
            den = poly_scale(den, c, self.q)
        return (num, den)

    def add(self, a, b):
        (na, da), (nb, db) = a, b
        if not na:
            return b
        if not nb:
            return a
        if da == db:
            return self._reduce(poly_add(na, nb, self.q), da)
        num = poly_add(poly_mul(na, db, self.q), poly_mul(nb, da, self.q),
                       self.q)
        return self._reduce(num, poly_mul(da, db, self.q))

    def neg(self, a):
        return (poly_neg(a[0], self.q), a[1])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        (na, da), (nb, db) = a, b
        if not na or not nb:
            return self.zero
        return self._reduce(poly_mul(na, nb, self.q),
                            poly_mul(da, db, self.q))

    def inv(self, a):
        na, da = a
        if not na:
            raise ZeroDivisionError("inverse of zero")
        return self._reduce(da, na)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a[0]

    def t_power(self, k):
        """t^k for any integer k."""
        if k >= 0:
            return (poly_shift((1,), k), (1,))
        return ((1,), poly_shift((1,), -k))

    def valuation(self, a):
        """t-adic valuation; INF for zero.  val(t) = 1."""
        na, da = a
        if not na:
            return INF
        return poly_val(na) - poly_val(da)

    def residue(self, a):
        """Leading residue: the F_q coefficient of t^val(a).  0 for zero."""
        na, da = a
        if not na:
            return 0
        vn, vd = poly_val(na), poly_val(da)
        return (na[vn] * pow(da[vd], self.q - 2, self.q)) % self.q

    def is_integral(self, a):
        return self.valuation(a) >= 0

    def encode(self, a):
        na, da = a
        return ".".join(str(c) for c in na) + "/" + ".".join(str(c) for c in da)

    def __eq__(self, other):
        return isinstance(other, FunctionField) and other.q == self.q

    def __hash__(self):
        return hash(("Fqt", self.q))

    def __repr__(self):
        return f"F{self.q}(t)"


def t_adic_valuation(field: FunctionField, s):
    """val of a rational function at t = 0; INF iff s = 0; val(t) = 1.

    >>> F = FunctionField(2)
    >>> t_adic_valuation(F, F.make((0, 0, 1), (1, 1)))  # t^2/(1+t)
    2
    >>> t_adic_valuation(F, F.zero)
    inf
    >>> t_adic_valuation(F, F.make((1, 1), (0, 1)))  # (1+t)/t
    -1
    """
    return field.valuation(s)


def field_of_characteristic(char: int, ext_degree: int = 1):
    """Coefficient field from a (characteristic, extension degree) spec;
    char 0 is the rationals (ext_degree must be 1 there)."""
    if char == 0:
        if ext_degree != 1:
            raise ValueError("no extensions of the rationals are supported")
        return RationalField()
    if ext_degree == 1:
        return PrimeField(char)
    return ExtField(char, ext_degree)


def power(field, x, e: int):
    """x^e by repeated squaring; negative e goes through the inverse.

    >>> power(RationalField(), Fraction(2), -3)
    Fraction(1, 8)
    >>> power(PrimeField(3), 2, 4)
    1
    """
    if e < 0:
        return power(field, field.inv(x), -e)
    acc = field.one
    base = x
    while e:
        if e & 1:
            acc = field.mul(acc, base)
        base = field.mul(base, base)
        e >>= 1
    return acc


def primitive_root(q: int):
    """The least generator of (Z/q)^x for a prime q.

    >>> primitive_root(3)
    2
    >>> primitive_root(7)
    3
    """
    if q == 2:
        return 1
    for g in range(2, q):
        seen = set()
        x = 1
        for _ in range(q - 1):
            x = (x * g) % q
            seen.add(x)
        if len(seen) == q - 1:
            return g
    raise ValueError(f"{q} is not prime")


def root_of_unity(field, order: int):
    """A fixed element of multiplicative order `order`, or raise.

    Used for character values on the residue torus: a character of F_q^x
    needs order dividing q - 1.  Deterministic: order 1 gives 1, order 2
    gives -1, larger orders search ExtField/PrimeField elements in the
    canonical enumeration order.
    """
    if order == 1:
        return field.one
    if getattr(field, "char", None) == 2 and order % 2 == 0:
        raise ValueError("no elements of even order in characteristic 2")
    if order == 2:
        return field.neg(field.one)
    if isinstance(field, RationalField):
        raise ValueError(f"the rationals contain no element of order {order}")
    # small search over the multiplicative group
    for x in field.elements():
        if field.is_zero(x):
            continue
        p = x
        k = 1
        while p != field.one and k <= order:
            p = field.mul(p, x)
            k += 1
        if k == order and p == field.one:
            return x
    raise ValueError(f"no element of order {order} in {field!r}")
