"""Finite fields F_q for prime powers q, built deterministically.

Elements of F_{p^k} are coefficient tuples over F_p with respect to the
power basis of a fixed modulus polynomial: the first monic irreducible of
degree k in (degree, integer-encoding) enumeration order.  For k = 1 the
element is just a residue mod p.  Every element has a canonical integer
encoding sum(c_i * p^i), which doubles as the deterministic ordering and
as the text form of extension-field coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import sympy


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient tuples, ascending degree)
# ---------------------------------------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _trim((
        ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
        for i in range(n)
    ))


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _pmod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for j in range(len(m)):
                a[shift + j] = (a[shift + j] - lead * m[j]) % p
        a.pop()
    return _trim(a)


def _ppowmod(a, e, m, p):
    result = (1,)
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    while b:
        a, b = b, _pmod_nonmonic(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = _trim(x * inv % p for x in a)
    return a


def _pmod_nonmonic(a, b, p):
    inv = pow(b[-1], p - 2, p)
    monic = _trim(x * inv % p for x in b)
    return _pmod(a, monic, p)


def _is_irreducible_fp(poly, p):
    """Rabin irreducibility test for a monic polynomial over F_p."""
    n = len(poly) - 1
    if n <= 0:
        return False
    x = (0, 1)
    if _ppowmod(x, p ** n, poly, p) != _pmod(x, poly, p):
        return False
    for r in sympy.primefactors(n):
        h = _padd(_ppowmod(x, p ** (n // r), poly, p),
                  _trim((0, p - 1)), p)
        if _pgcd(h, poly, p) != (1,):
            return False
    return True


@lru_cache(maxsize=None)
def _find_modulus(p, k):
    """First monic irreducible of degree k over F_p in encoding order."""
    for enc in range(p ** k):
        low = []
        e = enc
        for _ in range(k):
            low.append(e % p)
            e //= p
        poly = _trim(low + [1])
        if _is_irreducible_fp(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# the field
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def GF(q: int) -> "Fq":
    """Return the (cached, canonical) finite field with q elements."""
    return Fq(q)


class Fq:
    """The finite field with q = p**k elements.  Use GF(q) to construct."""

    def __init__(self, q: int):
        fac = sympy.factorint(q)
        if len(fac) != 1:
            raise ValueError(f"{q} is not a prime power")
        (p, k), = fac.items()
        self.q = q
        self.p = p
        self.k = k
        self.modulus = _find_modulus(p, k) if k > 1 else None

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, Fq) and self.q == other.q

    def __hash__(self):
        return hash(("Fq", self.q))

    # -- element construction -------------------------------------------------

    def __call__(self, value) -> "FqElem":
        """Coerce an integer (prime-subfield image n*1) or an FqElem."""
        if isinstance(value, FqElem):
            if value.field != self:
                raise ValueError("element of a different field")
            return value
        return FqElem(self, _trim((value % self.p,)))

    def from_encoding(self, enc: int) -> "FqElem":
        """Element whose base-p digit expansion is enc (0 <= enc < q)."""
        if not 0 <= enc < self.q:
            raise ValueError(f"encoding {enc} out of range for GF({self.q})")
        digits = []
        e = enc
        for _ in range(self.k):
            digits.append(e % self.p)
            e //= self.p
        return FqElem(self, _trim(digits))

    def from_coeffs(self, coeffs) -> "FqElem":
        return FqElem(self, _trim(c % self.p for c in coeffs))

    def zero(self) -> "FqElem":
        return FqElem(self, ())

    def one(self) -> "FqElem":
        return FqElem(self, (1,))

    def elements(self):
        """All elements in encoding order."""
        for enc in range(self.q):
            yield self.from_encoding(enc)

    def units(self):
        for enc in range(1, self.q):
            yield self.from_encoding(enc)

    # -- derived data ----------------------------------------------------------

    def sqrt_minus_one(self) -> "FqElem":
        """A fixed square root of -1; requires q = 1 mod 4."""
        if self.q % 4 != 1:
            raise ValueError(f"-1 is not a square in GF({self.q})")
        r = field_sqrt(self, -self.one())
        assert r is not None
        return r

    def first_nonsquare(self) -> "FqElem":
        """First quadratic non-residue in encoding order (q odd)."""
        for u in self.units():
            if not u.is_square():
                return u
        raise ValueError("no nonsquare: field of even order")


@dataclass(frozen=True)
class FqElem:
    """An element of Fq, stored as a coefficient tuple over F_p."""

    field: Fq
    coeffs: tuple

    def _check(self, other):
        if not isinstance(other, FqElem) or other.field != self.field:
            raise TypeError("mixed finite-field arithmetic")

    def __add__(self, other):
        self._check(other)
        return FqElem(self.field, _padd(self.coeffs, other.coeffs, self.field.p))

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, _trim((p - c) % p for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        self._check(other)
        prod = _pmul(self.coeffs, other.coeffs, self.field.p)
        if self.field.k > 1:
            prod = _pmod(prod, self.field.modulus, self.field.p)
        return FqElem(self.field, prod)

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # a^(q-2) = a^(-1); exponent is tiny at the field sizes we build
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_square(self) -> bool:
        if self.is_zero():
            return True
        return (self ** ((self.field.q - 1) // 2)) == self.field.one()

    @property
    def encoding(self) -> int:
        return sum(c * self.field.p ** i for i, c in enumerate(self.coeffs))

    def __str__(self):
        return str(self.encoding)

    def __repr__(self):
        return f"GF({self.field.q}).from_encoding({self.encoding})"


# ---------------------------------------------------------------------------
# square roots, generic over any finite-field-like object
# ---------------------------------------------------------------------------

def field_sqrt(field, a):
    """Square root in a finite field of odd order, or None.

    Tonelli-Shanks with a deterministic non-residue search; works for any
    object exposing order/one/zero/units() with element *, **, ==.
    """
    order = field.q if hasattr(field, "q") else field.order
    one = field.one()
    if a == field.zero():
        return field.zero()
    if a ** ((order - 1) // 2) != one:
        return None
    if order % 4 == 3:
        return a ** ((order + 1) // 4)
    # factor order-1 = m * 2^s
    m, s = order - 1, 0
    while m % 2 == 0:
        m //= 2
        s += 1
    z = None
    for u in field.units():
        if u ** ((order - 1) // 2) != one:
            z = u
            break
    c = z ** m
    t = a ** m
    r = a ** ((m + 1) // 2)
    while t != one:
        i = 0
        t2 = t
        while t2 != one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (s - i - 1))
        r = r * b
        c = b * b
        t = t * c
        s = i
    return r
