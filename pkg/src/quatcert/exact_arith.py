"""Exact arithmetic in Z[i] and F_q[t], and in their fraction fields.

Everything here is value-semantic and exact: Gaussian integers are pairs of
arbitrary-precision integers, polynomials carry their coefficient field, and
field elements are stored as canonically reduced fractions.  Canonical forms
are what make places, factorizations and certificates unique:

* the canonical associate of a Gaussian integer is the one with re > 0 and
  im >= 0 (one representative per prime ideal; 1+i is canonical for the
  even prime),
* the canonical associate of a polynomial is the monic one,
* a Gaussian fraction has the least positive rational-integer denominator,
  a function-field fraction a monic denominator coprime to the numerator.
"""

from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .finitefield import GF, Fq, FqElem


class QuatcertError(Exception):
    """Base class for all library errors."""


class GrammarError(QuatcertError):
    """Malformed element/place/certificate text."""


class InputError(QuatcertError):
    """Structurally valid input violating an operation's preconditions."""


class SearchExhausted(QuatcertError):
    """A bounded deterministic search ran out of candidates."""


class ConsistencyError(Exception):
    """Two independent computations of the same value disagreed."""


# ---------------------------------------------------------------------------
# Gaussian integers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussInt:
    """An element of Z[i], stored exactly."""

    re: int
    im: int = 0

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __mul__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a ring element")
        acc, base = GaussInt(1), self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def conjugate(self):
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def height(self) -> int:
        return max(abs(self.re), abs(self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_rational(self) -> bool:
        return self.im == 0

    def __divmod__(self, other):
        # nearest-integer division: the remainder has norm < norm(other)
        other = _as_gauss(other)
        if other.is_zero():
            raise ZeroDivisionError("Gaussian division by zero")
        n = other.norm()
        t = self * other.conjugate()
        q = GaussInt(_round_div(t.re, n), _round_div(t.im, n))
        return q, self - q * other

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other) -> bool:
        return (other % self).is_zero()

    def __str__(self):
        return format_gauss(self)

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"


def _round_div(a: int, b: int) -> int:
    # round a/b to the nearest integer, b > 0; tie direction is irrelevant
    # for the Euclidean property, so pick round-half-up for determinism
    return (2 * a + b) // (2 * b)


def _as_gauss(x):
    if isinstance(x, GaussInt):
        return x
    if isinstance(x, int):
        return GaussInt(x)
    raise TypeError(f"cannot coerce {x!r} to GaussInt")


GAUSS_UNITS = (GaussInt(1), GaussInt(0, 1), GaussInt(-1), GaussInt(0, -1))


def gauss_gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    while not b.is_zero():
        a, b = b, a % b
    return a


def gauss_xgcd(a: GaussInt, b: GaussInt):
    """(g, u, v) with u*a + v*b = g."""
    r0, r1 = a, b
    s0, s1 = GaussInt(1), GaussInt(0)
    t0, t1 = GaussInt(0), GaussInt(1)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def gauss_sqrt(w: GaussInt):
    """Exact square root in Z[i], or None.  Deterministic choice of root."""
    if w.is_zero():
        return GaussInt(0)
    n = w.norm()
    r = math.isqrt(n)
    if r * r != n:
        return None
    # z = x + yi with z^2 = w: x^2 = (re(w) + |w|)/2, 2xy = im(w)
    twice_x2 = w.re + r
    if twice_x2 % 2 == 0:
        x2 = twice_x2 // 2
        x = math.isqrt(x2)
        if x * x == x2:
            if x != 0:
                if w.im % (2 * x) == 0:
                    z = GaussInt(x, w.im // (2 * x))
                    if (z * z) == w:
                        return z
            else:
                y2 = -w.re
                y = math.isqrt(y2)
                if y * y == y2:
                    z = GaussInt(0, y)
                    if z * z == w:
                        return z
    return None


# ---------------------------------------------------------------------------
# polynomials over F_q
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FqPoly:
    """A polynomial in F_q[t]; coeffs ascending, top coefficient nonzero."""

    field: Fq
    coeffs: tuple  # tuple[FqElem, ...]

    @staticmethod
    def make(field: Fq, coeffs) -> "FqPoly":
        c = [field(x) if isinstance(x, int) else x for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        return FqPoly(field, tuple(c))

    @staticmethod
    def constant(field: Fq, value) -> "FqPoly":
        return FqPoly.make(field, [value])

    @staticmethod
    def variable(field: Fq) -> "FqPoly":
        return FqPoly.make(field, [0, 1])

    def degree(self) -> int:
        if not self.coeffs:
            raise InputError("degree of the zero polynomial")
        return len(self.coeffs) - 1

    def height(self) -> int:
        return 0 if self.is_zero() else self.degree()

    def leading(self) -> FqElem:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.leading() == self.field.one()

    def _check(self, other):
        if not isinstance(other, FqPoly) or other.field != self.field:
            raise TypeError("mixed polynomial arithmetic")

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero()
        return FqPoly.make(self.field, [
            (self.coeffs[i] if i < len(self.coeffs) else z)
            + (other.coeffs[i] if i < len(other.coeffs) else z)
            for i in range(n)
        ])

    def __neg__(self):
        return FqPoly(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return FqPoly(self.field, ())
        z = self.field.zero()
        out = [z] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return FqPoly.make(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a ring element")
        acc, base = FqPoly.constant(self.field, 1), self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def _coerce(self, other):
        if isinstance(other, int):
            return FqPoly.constant(self.field, other)
        self._check(other)
        return other

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = FqPoly(self.field, ())
        r = self
        inv_lead = other.leading().inverse()
        d = other.degree()
        while not r.is_zero() and r.degree() >= d:
            shift = r.degree() - d
            coeff = r.leading() * inv_lead
            term = FqPoly.make(self.field,
                               [self.field.zero()] * shift + [coeff])
            q = q + term
            r = r - term * other
        return q, r

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other) -> bool:
        return (other % self).is_zero()

    def monic(self) -> "FqPoly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return FqPoly(self.field, tuple(c * inv for c in self.coeffs))

    def evaluate(self, x: FqElem) -> FqElem:
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "FqPoly":
        return FqPoly.make(self.field, [
            self.coeffs[i] * i for i in range(1, len(self.coeffs))
        ])

    def reversed_coeffs(self, upto: int) -> "FqPoly":
        """t^upto * self(1/t); upto must be >= degree."""
        z = self.field.zero()
        c = list(self.coeffs) + [z] * (upto + 1 - len(self.coeffs))
        return FqPoly.make(self.field, list(reversed(c)))

    def enc_key(self):
        """Deterministic ordering key: (degree, coefficients from the top)."""
        if self.is_zero():
            return (-1,)
        return (self.degree(),) + tuple(c.encoding for c in reversed(self.coeffs))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"FqPoly(q={self.field.q}, {format_poly(self)!r})"


def poly_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: FqPoly, b: FqPoly):
    """(g, u, v) with u*a + v*b = g, g monic (or zero)."""
    f = a.field
    r0, r1 = a, b
    s0, s1 = FqPoly.constant(f, 1), FqPoly(f, ())
    t0, t1 = FqPoly(f, ()), FqPoly.constant(f, 1)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0.is_zero() and not r0.is_monic():
        scale = FqPoly.make(f, [r0.leading().inverse()])
        r0, s0, t0 = r0 * scale, s0 * scale, t0 * scale
    return r0, s0, t0


def poly_powmod(a: FqPoly, e: int, m: FqPoly) -> FqPoly:
    result = FqPoly.constant(a.field, 1)
    base = a % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def poly_is_irreducible(f: FqPoly) -> bool:
    """Rabin test over F_q."""
    if f.is_zero() or f.degree() == 0:
        return False
    g = f.monic()
    q = f.field.q
    n = g.degree()
    t = FqPoly.variable(f.field)
    if poly_powmod(t, q ** n, g) != t % g:
        return False
    for r in sympy.primefactors(n):
        h = poly_powmod(t, q ** (n // r), g) - t
        if poly_gcd(h, g).degree() != 0:
            return False
    return True


def poly_sqrt(w: FqPoly):
    """Exact square root in F_q[t] (q odd), or None."""
    from .finitefield import field_sqrt
    if w.is_zero():
        return w
    if w.degree() % 2 != 0:
        return None
    lead = field_sqrt(w.field, w.leading())
    if lead is None:
        return None
    m = w.degree() // 2
    z = w.field.zero()
    b = [z] * (m + 1)
    b[m] = lead
    wc = list(w.coeffs)
    inv2lead = (w.field(2) * lead).inverse()
    for i in range(m - 1, -1, -1):
        s = wc[m + i]
        for j in range(i + 1, m):
            if m + i - j <= m:
                s = s - b[j] * b[m + i - j]
        b[i] = s * inv2lead
    cand = FqPoly.make(w.field, b)
    if cand * cand == w:
        return cand
    return None


# ---------------------------------------------------------------------------
# canonical associates and factorization
# ---------------------------------------------------------------------------

def canonical_associate(x):
    """Split x != 0 as (unit, canonical) with canonical * unit == x.

    Gaussian canonical form: re > 0 and im >= 0 (the even prime class is
    represented by 1+i).  Polynomial canonical form: monic.
    """
    if isinstance(x, GaussInt):
        if x.is_zero():
            raise InputError("canonical associate of zero")
        for u in GAUSS_UNITS:
            c = x * u
            if c.re > 0 and c.im >= 0:
                # c * (x/c) == x; x/c is the inverse unit of u
                unit = x // c
                return unit, c
        raise AssertionError("unreachable: some rotation lands in quadrant")
    if isinstance(x, FqPoly):
        if x.is_zero():
            raise InputError("canonical associate of zero")
        lead = x.leading()
        return FqPoly.constant(x.field, lead), x.monic()
    raise TypeError(f"not a ring element: {x!r}")


def ring_gcd(a, b):
    if isinstance(a, GaussInt):
        g = gauss_gcd(a, b)
        if g.is_zero():
            return g
        return canonical_associate(g)[1]
    return poly_gcd(a, b)


def prime_sort_key(p):
    """Deterministic total order on canonical primes."""
    if isinstance(p, GaussInt):
        return (p.norm(), p.re, p.im)
    return p.enc_key()


@dataclass(frozen=True)
class Factorization:
    """unit * prod(prime^exp); primes canonical and strictly ordered."""

    unit: object
    factors: tuple  # tuple[(prime, exp), ...]

    def value(self):
        acc = self.unit
        for p, e in self.factors:
            for _ in range(e):
                acc = acc * p
        return acc

    def exponent(self, prime) -> int:
        for p, e in self.factors:
            if p == prime:
                return e
        return 0


def factor(x) -> Factorization:
    """Exact factorization of a nonzero ring element into canonical primes."""
    if isinstance(x, GaussInt):
        return _factor_gauss(x)
    if isinstance(x, FqPoly):
        return _factor_poly(x)
    raise TypeError(f"not a ring element: {x!r}")


def _valuation_ring(x, prime) -> int:
    v = 0
    while True:
        q, r = divmod(x, prime)
        if not r.is_zero():
            return v
        x = q
        v += 1


def _factor_gauss(x: GaussInt) -> Factorization:
    if x.is_zero():
        raise InputError("factorization of zero")
    pairs = []
    n = x.norm()
    for p in sorted(sympy.factorint(n)):
        if p == 2:
            pi = GaussInt(1, 1)
            e = _valuation_ring(x, pi)
            pairs.append((pi, e))
        elif p % 4 == 3:
            pi = GaussInt(p)
            e = _valuation_ring(x, pi)
            pairs.append((pi, e))
        else:
            s = sympy.ntheory.sqrt_mod(-1, p)
            pi = canonical_associate(gauss_gcd(GaussInt(p), GaussInt(s, 1)))[1]
            pibar = canonical_associate(pi.conjugate())[1]
            for prime in (pi, pibar):
                e = _valuation_ring(x, prime)
                if e:
                    pairs.append((prime, e))
    pairs = [(p, e) for p, e in pairs if e]
    pairs.sort(key=lambda pe: prime_sort_key(pe[0]))
    rest = x
    for p, e in pairs:
        for _ in range(e):
            rest = rest // p
    if not rest.is_unit():
        raise ConsistencyError(f"factor({x}): non-unit cofactor {rest}")
    return Factorization(rest, tuple(pairs))


def _poly_pth_root(g: FqPoly) -> FqPoly:
    """p-th root of a monic g with g' = 0, via Frobenius on coefficients."""
    field = g.field
    p = field.p
    root = [field.zero()] * (g.degree() // p + 1)
    for i, c in enumerate(g.coeffs):
        if not c.is_zero():
            root[i // p] = c ** (field.q // p)
    return FqPoly.make(field, root)


def _poly_radical(g: FqPoly) -> FqPoly:
    """Product of the distinct monic irreducible divisors of monic g."""
    field = g.field
    rad = FqPoly.constant(field, 1)
    rest = g.monic()
    while rest.degree() > 0:
        d = rest.derivative()
        if d.is_zero():
            rest = _poly_pth_root(rest)
            continue
        s = poly_gcd(rest, d)
        w = (rest // s).monic()  # distinct factors with exponent not in pZ
        rad = rad * (w // poly_gcd(rad, w))
        rest = s
    return rad.monic()


def _equal_degree_split(f: FqPoly, d: int) -> list:
    """Cantor-Zassenhaus with a deterministic trial sequence."""
    if f.degree() == d:
        return [f]
    q = f.field.q
    e = (q ** d - 1) // 2
    for enc in range(1, q ** f.degree()):
        u = _poly_from_encoding(f.field, enc)
        if u.degree() == 0:
            continue
        w = poly_powmod(u, e, f) - FqPoly.constant(f.field, 1)
        g = poly_gcd(w, f)
        if 0 < g.degree() < f.degree():
            return (_equal_degree_split(g, d)
                    + _equal_degree_split((f // g).monic(), d))
    raise ConsistencyError("equal-degree splitting exhausted its trials")


def _poly_from_encoding(field: Fq, enc: int) -> FqPoly:
    digits = []
    q = field.q
    while enc:
        digits.append(field.from_encoding(enc % q))
        enc //= q
    return FqPoly.make(field, digits)


def _factor_poly(x: FqPoly) -> Factorization:
    if x.is_zero():
        raise InputError("factorization of zero")
    unit = FqPoly.constant(x.field, x.leading())
    g = x.monic()
    primes = []
    sf = _poly_radical(g) if g.degree() > 0 else g
    # distinct-degree then equal-degree on the radical
    t = FqPoly.variable(x.field)
    q = x.field.q
    rest = sf
    d = 1
    tq = t
    while rest.degree() > 0:
        if 2 * d > rest.degree():
            primes.append(rest)
            break
        tq = poly_powmod(tq, q, rest)
        block = poly_gcd(tq - t, rest)
        if block.degree() > 0:
            primes.extend(_equal_degree_split(block, d))
            rest = (rest // block).monic()
            if rest.degree() > 0:
                tq = tq % rest
        d += 1
    pairs = [(p, _valuation_ring(g, p)) for p in primes]
    pairs.sort(key=lambda pe: prime_sort_key(pe[0]))
    check = unit
    for p, e in pairs:
        for _ in range(e):
            check = check * p
    if check != x:
        raise ConsistencyError(f"factor({x}): product mismatch")
    return Factorization(unit, tuple(pairs))


def is_prime_element(x) -> bool:
    """Is x (up to units) a prime of its ring?"""
    if isinstance(x, GaussInt):
        if x.is_zero() or x.is_unit():
            return False
        n = x.norm()
        if sympy.isprime(n):
            return True
        # inert case: an associate of a rational prime p = 3 mod 4
        r = math.isqrt(n)
        if r * r != n or not sympy.isprime(r) or r % 4 != 3:
            return False
        return any(x * u == GaussInt(r) for u in GAUSS_UNITS)
    if isinstance(x, FqPoly):
        return (not x.is_zero()) and poly_is_irreducible(x)
    raise TypeError(f"not a ring element: {x!r}")


# ---------------------------------------------------------------------------
# fraction-field elements
# ---------------------------------------------------------------------------

GAUSSIAN = "gaussian"
FUNCTION_FIELD = "function-field"


@dataclass(frozen=True)
class FieldElem:
    """An element of Q(i) or F_q(t) in reduced canonical form.

    Construct through make_elem / gauss_elem / ff_elem, which canonicalize;
    direct construction assumes the representation is already canonical.
    """

    num: object  # GaussInt | FqPoly
    den: object  # GaussInt (positive rational) | FqPoly (monic)

    @property
    def backend(self) -> str:
        return GAUSSIAN if isinstance(self.num, GaussInt) else FUNCTION_FIELD

    @property
    def ff_field(self):
        return self.num.field if isinstance(self.num, FqPoly) else None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_ring_element(self) -> bool:
        if isinstance(self.den, GaussInt):
            return self.den == GaussInt(1)
        return self.den == FqPoly.constant(self.den.field, 1)

    def _check(self, other):
        if not isinstance(other, FieldElem):
            raise TypeError(f"cannot combine FieldElem with {other!r}")
        if self.backend != other.backend:
            raise InputError("mixed Gaussian / function-field arithmetic")
        if self.backend == FUNCTION_FIELD and self.ff_field != other.ff_field:
            raise InputError("mixed function-field arithmetic (different q)")

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            self._check(other)
            return other
        if isinstance(other, int):
            if self.backend == GAUSSIAN:
                return make_elem(GaussInt(other), GaussInt(1))
            return make_elem(FqPoly.constant(self.ff_field, other),
                             FqPoly.constant(self.ff_field, 1))
        if isinstance(other, (GaussInt, FqPoly)):
            return make_elem(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        other = self._coerce(other)
        return make_elem(self.num * other.den + other.num * self.den,
                         self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElem(-self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        return make_elem(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("field division by zero")
        return make_elem(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return (self.inverse()) ** (-e)
        acc = self._coerce(1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return make_elem(self.den, self.num)

    def height(self) -> int:
        return max(self.num.height(), self.den.height())

    def __str__(self):
        return format_elem(self)

    def __repr__(self):
        return f"FieldElem({format_elem(self)!r})"


def make_elem(num, den=None) -> FieldElem:
    """Canonicalize num/den into a FieldElem."""
    if isinstance(num, FieldElem):
        if den is not None:
            raise TypeError("make_elem(FieldElem, den) is ambiguous")
        return num
    if isinstance(num, int):
        num = GaussInt(num)
    if isinstance(num, GaussInt):
        if den is None:
            den = GaussInt(1)
        if isinstance(den, int):
            den = GaussInt(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return FieldElem(GaussInt(0), GaussInt(1))
        # clear to the least positive rational denominator
        n = num * den.conjugate()
        m = den.norm()
        g = math.gcd(math.gcd(abs(n.re), abs(n.im)), m)
        return FieldElem(GaussInt(n.re // g, n.im // g), GaussInt(m // g))
    if isinstance(num, FqPoly):
        if den is None:
            den = FqPoly.constant(num.field, 1)
        if isinstance(den, int):
            den = FqPoly.constant(num.field, den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return FieldElem(FqPoly(num.field, ()),
                             FqPoly.constant(num.field, 1))
        g = poly_gcd(num, den)
        num, den = num // g, den // g
        inv = den.leading().inverse()
        scale = FqPoly.make(num.field, [inv])
        return FieldElem(num * scale, den * scale)
    raise TypeError(f"cannot build a field element from {num!r}")


def gauss_elem(re: int, im: int = 0, den: int = 1) -> FieldElem:
    return make_elem(GaussInt(re, im), GaussInt(den))


def ff_elem(q_or_field, coeffs, den_coeffs=None) -> FieldElem:
    field = q_or_field if isinstance(q_or_field, Fq) else GF(q_or_field)
    num = FqPoly.make(field, coeffs)
    den = (FqPoly.make(field, den_coeffs)
           if den_coeffs is not None else FqPoly.constant(field, 1))
    return make_elem(num, den)


def elem_one(like: FieldElem) -> FieldElem:
    return like._coerce(1)


# ---------------------------------------------------------------------------
# global squares
# ---------------------------------------------------------------------------

def is_global_square(x: FieldElem) -> bool:
    """Is x a square in the global field Q(i) or F_q(t)?"""
    if not isinstance(x, FieldElem):
        x = make_elem(x)
    if x.is_zero():
        raise InputError("squareness of zero")
    # x = (num*den) / den^2, so test the ring element num*den
    f = factor(x.num * x.den)
    if any(e % 2 for _, e in f.factors):
        return False
    u = f.unit
    if isinstance(u, GaussInt):
        return u.im == 0  # squares among {1,i,-1,-i} are exactly {1,-1}
    return u.leading().is_square()


def square_class_witness_prime(x: FieldElem):
    """First canonical prime with odd exponent in x, or None."""
    f = factor(x.num * x.den)
    for p, e in f.factors:
        if e % 2:
            return p
    return None


# ---------------------------------------------------------------------------
# Smith normal form helpers for Gaussian residue systems
# ---------------------------------------------------------------------------

def gauss_quotient_data(m: GaussInt):
    """Describe the additive group Z[i]/(m) as Z/d1 x Z/d2.

    Returns (U, (d1, d2), Uinv) where U is a unimodular 2x2 integer matrix
    such that z = x+yi maps to coords (U @ (x,y)) mod (d1,d2), and Uinv maps
    coordinates back to a representative.
    """
    if m.is_zero():
        raise InputError("quotient by zero")
    # lattice basis: columns m and i*m
    a, b = m.re, m.im
    mat = [[a, -b], [b, a]]
    u = [[1, 0], [0, 1]]

    def rowop(k):  # row_1 -= k*row_0, tracked in u
        mat[1][0] -= k * mat[0][0]
        mat[1][1] -= k * mat[0][1]
        u[1][0] -= k * u[0][0]
        u[1][1] -= k * u[0][1]

    def rowswap():
        mat[0], mat[1] = mat[1], mat[0]
        u[0], u[1] = u[1], u[0]

    def colop(k):  # col_1 -= k*col_0 (free: changes the lattice basis only)
        mat[0][1] -= k * mat[0][0]
        mat[1][1] -= k * mat[1][0]

    def colswap():
        for r in mat:
            r[0], r[1] = r[1], r[0]

    while mat[1][0] != 0 or mat[0][1] != 0:
        while mat[1][0] != 0:
            if mat[0][0] == 0:
                rowswap()
                continue
            rowop(mat[1][0] // mat[0][0])
            if mat[1][0] != 0:
                rowswap()
        while mat[0][1] != 0:
            if mat[0][0] == 0:
                colswap()
                continue
            colop(mat[0][1] // mat[0][0])
            if mat[0][1] != 0:
                colswap()
    if mat[0][0] < 0:
        mat[0][0] = -mat[0][0]
        u[0][0], u[0][1] = -u[0][0], -u[0][1]
    if mat[1][1] < 0:
        mat[1][1] = -mat[1][1]
        u[1][0], u[1][1] = -u[1][0], -u[1][1]
    d1, d2 = mat[0][0], mat[1][1]
    assert d1 > 0 and d2 > 0 and d1 * d2 == m.norm()
    det = u[0][0] * u[1][1] - u[0][1] * u[1][0]
    assert det in (1, -1)
    uinv = [[u[1][1] * det, -u[0][1] * det],
            [-u[1][0] * det, u[0][0] * det]]
    return u, (d1, d2), uinv


def gauss_coords(z: GaussInt, u, dd):
    return ((u[0][0] * z.re + u[0][1] * z.im) % dd[0],
            (u[1][0] * z.re + u[1][1] * z.im) % dd[1])


def gauss_from_coords(c, uinv) -> GaussInt:
    return GaussInt(uinv[0][0] * c[0] + uinv[0][1] * c[1],
                    uinv[1][0] * c[0] + uinv[1][1] * c[1])


@lru_cache(maxsize=None)
def _quotient_cached(m: GaussInt):
    return gauss_quotient_data(m)


def gauss_mod(z: GaussInt, m: GaussInt) -> GaussInt:
    """Canonical representative of z mod (m)."""
    u, dd, uinv = _quotient_cached(m)
    return gauss_from_coords(gauss_coords(z, u, dd), uinv)


def gauss_residues(m: GaussInt):
    """All canonical residues mod (m), in deterministic order."""
    u, dd, uinv = _quotient_cached(m)
    return [gauss_from_coords((c1, c2), uinv)
            for c1 in range(dd[0]) for c2 in range(dd[1])]


# ---------------------------------------------------------------------------
# element text grammar
# ---------------------------------------------------------------------------

_GAUSS_RE = _re.compile(
    r"^(?P<re>[+-]?\d+(?![0-9it]))?(?P<im>[+-]?(?:\d+)?i)?$")
_TERM_RE = _re.compile(r"([+-]?)(\d+)?(?:(t)(?:\^(\d+))?)?")


def parse_gauss(text: str) -> GaussInt:
    m = _GAUSS_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise GrammarError(f"bad Gaussian integer: {text!r}")
    re_part = int(m.group("re")) if m.group("re") else 0
    im_part = 0
    imtxt = m.group("im")
    if imtxt:
        body = imtxt[:-1]
        if body in ("", "+"):
            im_part = 1
        elif body == "-":
            im_part = -1
        else:
            im_part = int(body)
    return GaussInt(re_part, im_part)


def format_gauss(z: GaussInt) -> str:
    if z.im == 0:
        return str(z.re)
    if z.im == 1:
        imtxt = "i"
    elif z.im == -1:
        imtxt = "-i"
    else:
        imtxt = f"{z.im}i"
    if z.re == 0:
        return imtxt
    if z.im > 0:
        return f"{z.re}+{imtxt}"
    return f"{z.re}{imtxt}"


def parse_poly(text: str, field: Fq) -> FqPoly:
    if not text:
        raise GrammarError("empty polynomial")
    coeffs = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise GrammarError(f"bad polynomial: {text!r}")
        sign, digits, tvar, expo = m.groups()
        if sign == "" and not first:
            raise GrammarError(f"bad polynomial: {text!r}")
        if digits is None and tvar is None:
            raise GrammarError(f"bad polynomial: {text!r}")
        coeff_enc = int(digits) if digits is not None else 1
        if coeff_enc >= field.q and field.k > 1:
            raise GrammarError(
                f"coefficient {coeff_enc} out of range for GF({field.q})")
        if field.k > 1:
            c = field.from_encoding(coeff_enc % field.q)
        else:
            c = field(coeff_enc)
        if sign == "-":
            c = -c
        deg = 0
        if tvar:
            deg = int(expo) if expo else 1
        coeffs[deg] = coeffs.get(deg, field.zero()) + c
        pos = m.end()
        first = False
    top = max(coeffs)
    return FqPoly.make(field, [coeffs.get(i, field.zero())
                               for i in range(top + 1)])


def format_poly(f: FqPoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for deg in range(f.degree(), -1, -1):
        c = f.coeffs[deg]
        if c.is_zero():
            continue
        enc = c.encoding
        if deg == 0:
            parts.append(str(enc))
        else:
            var = "t" if deg == 1 else f"t^{deg}"
            parts.append(var if enc == 1 else f"{enc}{var}")
    return "+".join(parts)


def parse_elem(text: str) -> FieldElem:
    """Parse the element grammar; '@q' marks function-field elements."""
    if "@" in text:
        body, qtxt = text.rsplit("@", 1)
        if not qtxt.isdigit():
            raise GrammarError(f"bad field suffix in {text!r}")
        try:
            field = GF(int(qtxt))
        except ValueError as exc:
            raise GrammarError(str(exc)) from exc
        if "/" in body:
            numtxt, dentxt = body.split("/", 1)
            num = parse_poly(numtxt, field)
            den = parse_poly(dentxt, field)
            if den.is_zero():
                raise GrammarError(f"zero denominator in {text!r}")
            return make_elem(num, den)
        return make_elem(parse_poly(body, field))
    if "/" in text:
        numtxt, dentxt = text.split("/", 1)
        if not dentxt.isdigit() or int(dentxt) == 0:
            raise GrammarError(f"bad denominator in {text!r}")
        return make_elem(parse_gauss(numtxt), GaussInt(int(dentxt)))
    return make_elem(parse_gauss(text))


def format_elem(x: FieldElem) -> str:
    if x.backend == GAUSSIAN:
        if x.den == GaussInt(1):
            return format_gauss(x.num)
        return f"{format_gauss(x.num)}/{x.den.re}"
    q = x.ff_field.q
    if x.is_ring_element():
        return f"{format_poly(x.num)}@{q}"
    return f"{format_poly(x.num)}/{format_poly(x.den)}@{q}"
