"""Finite places of Q(i) and F_q(t): valuations, residue fields, reductions.

A place is identified by its canonical prime: a Gaussian prime in the
closed-open first quadrant, a monic irreducible polynomial, or the
distinguished infinite place of F_q(t) with uniformizer 1/t.  The unique
archimedean (complex) place of Q(i) never ramifies a quaternion algebra and
is omitted throughout; F_q(t) has no archimedean places, so together with
the infinite place all local-global loops close up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .finitefield import GF, Fq, FqElem, field_sqrt
from .exact_arith import (
    FUNCTION_FIELD,
    FieldElem,
    FqPoly,
    GaussInt,
    GrammarError,
    InputError,
    canonical_associate,
    factor,
    gauss_mod,
    gauss_residues,
    gauss_xgcd,
    is_prime_element,
    make_elem,
    parse_elem,
    poly_xgcd,
    prime_sort_key,
)

GAUSS_PLACE = "gauss"
FF_PLACE = "ff"
FF_INF_PLACE = "ff-inf"


@dataclass(frozen=True)
class Place:
    """A finite place: canonical prime, residue cardinality, residue char."""

    kind: str
    prime: object  # canonical GaussInt | monic irreducible FqPoly | None
    q_v: int
    res_char: int
    dyadic: bool

    @property
    def ff_field(self) -> Fq | None:
        if self.kind == FF_PLACE:
            return self.prime.field
        if self.kind == FF_INF_PLACE:
            return GF(self.q_v)
        return None

    def sort_key(self):
        if self.kind == GAUSS_PLACE:
            return (0, prime_sort_key(self.prime))
        if self.kind == FF_PLACE:
            return (0, prime_sort_key(self.prime))
        return (1,)  # the infinite place sorts last

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return format_place(self)

    def __repr__(self):
        return f"Place({format_place(self)!r})"

    # -- basic local data ------------------------------------------------------

    def uniformizer(self) -> FieldElem:
        if self.kind == FF_INF_PLACE:
            f = GF(self.q_v)
            return make_elem(FqPoly.constant(f, 1), FqPoly.variable(f))
        return make_elem(self.prime)

    def valuation(self, x) -> int:
        """Exact additive valuation of a nonzero element (may be negative)."""
        if not isinstance(x, FieldElem):
            x = make_elem(x)
        if x.is_zero():
            raise InputError("valuation of zero")
        if self.kind == FF_INF_PLACE:
            num_deg = 0 if x.num.is_zero() else x.num.degree()
            return x.den.degree() - num_deg
        return (_ring_valuation(x.num, self.prime)
                - _ring_valuation(x.den, self.prime))

    def unit_part(self, x) -> FieldElem:
        """x * pi^(-v(x)), a v-adic unit."""
        if not isinstance(x, FieldElem):
            x = make_elem(x)
        v = self.valuation(x)
        return x * self.uniformizer() ** (-v)

    def residue_field(self):
        return _residue_field(self)

    def reduce(self, x) -> "ResidueElem":
        """Image in the residue field; requires valuation(x) = 0."""
        if not isinstance(x, FieldElem):
            x = make_elem(x)
        if x.is_zero() or self.valuation(x) != 0:
            raise InputError(f"reduce: {x} is not a unit at {self}")
        return ResidueElem(self, _reduce_unit(self, x))

    def lift(self, value) -> FieldElem:
        """A canonical preimage of a residue-field element."""
        return _lift_residue(self, value)


@dataclass(frozen=True)
class ResidueElem:
    """An element of the residue field of a place."""

    place: Place
    value: object  # FqElem | QuotElem

    def __mul__(self, other):
        if isinstance(other, ResidueElem):
            if other.place != self.place:
                raise InputError("mixed residue fields")
            other = other.value
        return ResidueElem(self.place, self.value * other)

    def __pow__(self, e: int):
        return ResidueElem(self.place, self.value ** e)

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"ResidueElem({self.place}, {self.value})"


# ---------------------------------------------------------------------------
# quotient residue fields F_q[t]/(pi)
# ---------------------------------------------------------------------------

class QuotField:
    """The residue field F_q[t]/(pi) of a finite function-field place."""

    def __init__(self, pi: FqPoly):
        self.pi = pi
        self.base = pi.field
        self.q = self.base.q ** pi.degree()

    def __eq__(self, other):
        return isinstance(other, QuotField) and self.pi == other.pi

    def __hash__(self):
        return hash(("QuotField", self.pi))

    def __repr__(self):
        return f"QuotField({self.pi})"

    def elem(self, poly: FqPoly) -> "QuotElem":
        return QuotElem(self, poly % self.pi)

    def zero(self):
        return self.elem(FqPoly(self.base, ()))

    def one(self):
        return self.elem(FqPoly.constant(self.base, 1))

    def elements(self):
        for enc in range(self.q):
            yield self.from_encoding(enc)

    def units(self):
        for enc in range(1, self.q):
            u = self.from_encoding(enc)
            if not u.is_zero():
                yield u

    def from_encoding(self, enc: int) -> "QuotElem":
        digits = []
        q = self.base.q
        for _ in range(self.pi.degree()):
            digits.append(self.base.from_encoding(enc % q))
            enc //= q
        return QuotElem(self, FqPoly.make(self.base, digits))


@dataclass(frozen=True)
class QuotElem:
    field: QuotField
    poly: FqPoly

    def _check(self, other):
        if isinstance(other, QuotElem):
            if other.field != self.field:
                raise InputError("mixed residue fields")
            return other
        if isinstance(other, int):
            return self.field.elem(FqPoly.constant(self.field.base, other))
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        other = self._check(other)
        return QuotElem(self.field, (self.poly + other.poly) % self.field.pi)

    def __neg__(self):
        return QuotElem(self.field, (-self.poly) % self.field.pi)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return QuotElem(self.field, (self.poly * other.poly) % self.field.pi)

    __rmul__ = __mul__

    def inverse(self) -> "QuotElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero residue")
        g, u, _ = poly_xgcd(self.poly, self.field.pi)
        if g.degree() != 0:
            raise InputError("non-invertible residue (modulus not prime?)")
        inv_scale = FqPoly.make(self.field.base, [g.leading().inverse()])
        return QuotElem(self.field, (u * inv_scale) % self.field.pi)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    @property
    def encoding(self) -> int:
        q = self.field.base.q
        return sum(c.encoding * q ** i for i, c in enumerate(self.poly.coeffs))

    def __str__(self):
        if self.field.pi.degree() == 1:
            return str(self.encoding)
        return str(self.poly)


# ---------------------------------------------------------------------------
# place construction
# ---------------------------------------------------------------------------

def place_of(prime) -> Place:
    """The place of a prime element (any associate is accepted)."""
    if isinstance(prime, GaussInt):
        if prime.is_zero() or prime.is_unit():
            raise InputError(f"not a prime: {prime}")
        if not is_prime_element(prime):
            raise InputError(f"not a Gaussian prime: {prime}")
        canon = canonical_associate(prime)[1]
        n = canon.norm()
        if n == 2:
            return Place(GAUSS_PLACE, canon, 2, 2, True)
        if sympy.isprime(n):
            return Place(GAUSS_PLACE, canon, n, n, False)
        return Place(GAUSS_PLACE, canon, n, math.isqrt(n), False)
    if isinstance(prime, FqPoly):
        if prime.is_zero() or prime.is_unit():
            raise InputError(f"not a prime: {prime}")
        if not is_prime_element(prime):
            raise InputError(f"not irreducible: {prime}")
        canon = prime.monic()
        q = prime.field.q
        return Place(FF_PLACE, canon, q ** prime.degree(), prime.field.p, False)
    raise TypeError(f"not a ring element: {prime!r}")


def infinite_place(field_or_q) -> Place:
    field = field_or_q if isinstance(field_or_q, Fq) else GF(field_or_q)
    return Place(FF_INF_PLACE, None, field.q, field.p, False)


def parse_place(text: str) -> Place:
    """Place text grammar: a prime in the element grammar, or inf@q."""
    if text.startswith("inf@"):
        qtxt = text[4:]
        if not qtxt.isdigit():
            raise GrammarError(f"bad place: {text!r}")
        return infinite_place(int(qtxt))
    e = parse_elem(text)
    if not e.is_ring_element():
        raise GrammarError(f"place must be a prime element: {text!r}")
    try:
        return place_of(e.num)
    except InputError as exc:
        raise GrammarError(str(exc)) from exc


def format_place(v: Place) -> str:
    if v.kind == FF_INF_PLACE:
        return f"inf@{v.q_v}"
    if v.kind == FF_PLACE:
        return f"{v.prime}@{v.prime.field.q}"
    return str(v.prime)


def _ring_valuation(x, prime) -> int:
    if x.is_zero():
        raise InputError("valuation of zero")
    v = 0
    while True:
        q, r = divmod(x, prime)
        if not r.is_zero():
            return v
        x = q
        v += 1


# ---------------------------------------------------------------------------
# residue fields and reduction maps
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _residue_field(v: Place):
    if v.kind == GAUSS_PLACE:
        return GF(v.q_v)
    if v.kind == FF_PLACE:
        return QuotField(v.prime)
    # infinite place: residue field of 1/t is the constant field
    return QuotField(FqPoly.variable(GF(v.q_v)))


@lru_cache(maxsize=None)
def _split_lift(v: Place) -> int:
    """For a split Gaussian place, the residue of i: an s with s^2 = -1 (p)."""
    a, b = v.prime.re, v.prime.im
    p = v.res_char
    return (-a * pow(b, -1, p)) % p


def _reduce_ring_gauss(v: Place, z: GaussInt):
    """Residue map Z[i] -> kappa_v on an arbitrary Gaussian integer."""
    kappa = _residue_field(v)
    p = v.res_char
    if v.dyadic:
        return kappa(z.re + z.im)  # i = 1 mod (1+i)
    if v.q_v == p:  # split: i maps to a rational square root of -1
        return kappa(z.re + z.im * _split_lift(v))
    assert p % 4 == 3  # inert: residue field is F_p[i], modulus t^2 + 1
    return kappa.from_coeffs([z.re % p, z.im % p])


def _reduce_unit(v: Place, x: FieldElem):
    """Residue-field image of a v-unit."""
    if v.kind == FF_INF_PLACE:
        model_place, y = _inf_model(v, x)
        return _reduce_unit(model_place, y)
    num, den = x.num, x.den
    # the canonical fraction can carry a common pi-power (Gaussian
    # denominators are rational); strip it before reducing
    k = _ring_valuation(den, v.prime)
    if k:
        pik = v.prime ** k
        num, den = num // pik, den // pik
    if v.kind == GAUSS_PLACE:
        return _reduce_ring_gauss(v, num) / _reduce_ring_gauss(v, den)
    kappa = _residue_field(v)
    return kappa.elem(num) / kappa.elem(den)


def _inf_model(v: Place, x: FieldElem):
    """Rewrite x(t) at the infinite place as y(s) at the place (s), s = 1/t."""
    field = GF(v.q_v)
    n_deg = x.num.degree()
    d_deg = x.den.degree()
    num_rev = x.num.reversed_coeffs(n_deg)
    den_rev = x.den.reversed_coeffs(d_deg)
    s = FqPoly.variable(field)
    w = d_deg - n_deg  # the valuation of x at infinity
    if w >= 0:
        y = make_elem(num_rev * s ** w, den_rev)
    else:
        y = make_elem(num_rev, den_rev * s ** (-w))
    return place_of(s), y


def transform_to_finite_model(v: Place, x: FieldElem) -> FieldElem:
    """Apply the substitution t -> 1/t; an automorphism of F_q(t) that
    carries the infinite place to the place (t)."""
    if v.kind != FF_INF_PLACE:
        return x
    return _inf_model(v, x)[1]


def finite_model_place(v: Place) -> Place:
    if v.kind != FF_INF_PLACE:
        return v
    return place_of(FqPoly.variable(GF(v.q_v)))


def _lift_residue(v: Place, value) -> FieldElem:
    if v.kind == GAUSS_PLACE:
        if v.q_v == v.res_char or v.dyadic:
            return make_elem(GaussInt(value.encoding))
        coeffs = list(value.coeffs) + [0] * (2 - len(value.coeffs))
        c0 = coeffs[0].encoding if hasattr(coeffs[0], "encoding") else coeffs[0]
        c1 = coeffs[1].encoding if hasattr(coeffs[1], "encoding") else coeffs[1]
        return make_elem(GaussInt(c0, c1))
    return make_elem(value.poly)


# ---------------------------------------------------------------------------
# residue symbols and local squares
# ---------------------------------------------------------------------------

def residue_symbol(x, v: Place) -> int:
    """+1 if x reduces to a nonzero square in the residue field, else -1.

    The quadratic residue character computed as reduce(x)^((q_v-1)/2);
    requires an odd place and a v-unit argument.
    """
    if v.dyadic:
        raise InputError("residue symbol at a dyadic place")
    if not isinstance(x, FieldElem):
        x = make_elem(x)
    if x.is_zero() or v.valuation(x) != 0:
        raise InputError(f"residue symbol of a non-unit at {v}")
    r = v.reduce(x)
    power = r ** ((v.q_v - 1) // 2)
    if power.value == _residue_field(v).one():
        return 1
    return -1


def residue_sqrt(x, v: Place):
    """A square root of reduce(x, v) in the residue field, or None."""
    r = v.reduce(x)
    kappa = _residue_field(v)
    return field_sqrt(kappa, r.value)


DYADIC_SQUARE_PRECISION = 5  # 2*e + 1 with e = v(2) = 2 at the place (1+i)


def _dyadic_unit_square(x: FieldElem, v: Place) -> bool:
    """Is the (1+i)-adic unit x a local square?  Squares of units are
    detected modulo pi^5 = pi^(2 v(2) + 1), the standard lifting bound for
    z^2 - u over a 2-adic field with e = 2."""
    pi = v.prime
    modulus = pi ** DYADIC_SQUARE_PRECISION
    target = _gauss_unit_mod(x, modulus)
    for c in gauss_residues(modulus):
        if (c % pi).is_zero():
            continue
        if gauss_mod(c * c - target, modulus).is_zero():
            return True
    return False


def dyadic_unit_square_root(x: FieldElem, v: Place):
    """A unit c with c^2 = x mod (1+i)^5, or None."""
    pi = v.prime
    modulus = pi ** DYADIC_SQUARE_PRECISION
    target = _gauss_unit_mod(x, modulus)
    for c in gauss_residues(modulus):
        if (c % pi).is_zero():
            continue
        if gauss_mod(c * c - target, modulus).is_zero():
            return c
    return None


def _gauss_unit_mod(x: FieldElem, modulus: GaussInt) -> GaussInt:
    """x = num/den with den odd; return num * den^(-1) mod modulus."""
    g, u, _ = gauss_xgcd(x.den, modulus)
    if not g.is_unit():
        raise InputError("denominator not invertible modulo the modulus")
    den_inv = u * (GaussInt(1) // g)
    return gauss_mod(x.num * den_inv, modulus)


def is_local_square(x, v: Place) -> bool:
    """Is x a square in the completion at v?"""
    if not isinstance(x, FieldElem):
        x = make_elem(x)
    if x.is_zero():
        raise InputError("local squareness of zero")
    val = v.valuation(x)
    if val % 2 != 0:
        return False
    u = v.unit_part(x)
    if v.dyadic:
        return _dyadic_unit_square(u, v)
    return residue_symbol(u, v) == 1


def hensel_sqrt_lift(x: FieldElem, v: Place, precision: int):
    """Independent oracle: lift a square root of the dyadic unit x to
    c^2 = x mod pi^precision, one digit at a time, or return None."""
    pi = v.prime
    e = 2  # v(2) at the place (1+i)
    start = 2 * e + 1
    if precision < start:
        raise InputError("precision below the dyadic lifting bound")
    c = dyadic_unit_square_root(x, v)
    if c is None:
        return None
    target_mod = pi ** precision
    u = _gauss_unit_mod(x, target_mod)
    for k in range(start, precision):
        mk = pi ** (k + 1)
        defect = gauss_mod(c * c - u, mk)
        if defect.is_zero():
            continue
        # c' = c + delta*pi^(k-e): (c')^2 - u = (c^2-u) + 2c delta pi^(k-e)
        step = pi ** (k - e)
        for digit in gauss_residues(pi):
            cand = c + step * digit
            if gauss_mod(cand * cand - u, mk).is_zero():
                c = cand
                break
        else:
            return None
    return gauss_mod(c, target_mod)


# ---------------------------------------------------------------------------
# support of an element
# ---------------------------------------------------------------------------

def places_dividing(x) -> tuple:
    """The finite places with nonzero valuation, in canonical order."""
    if not isinstance(x, FieldElem):
        x = make_elem(x)
    if x.is_zero():
        raise InputError("support of zero")
    exps: dict = {}
    for p, e in factor(x.num).factors:
        exps[p] = exps.get(p, 0) + e
    if not (isinstance(x.den, GaussInt) and x.den == GaussInt(1)) and \
            not (isinstance(x.den, FqPoly) and x.den.is_unit()):
        for p, e in factor(x.den).factors:
            exps[p] = exps.get(p, 0) - e
    primes = [p for p, e in exps.items() if e != 0]
    primes.sort(key=prime_sort_key)
    return tuple(place_of(p) for p in primes)


def support_places(*elems) -> tuple:
    """Union of places_dividing over several elements, canonical order."""
    seen = {}
    for e in elems:
        for v in places_dividing(e):
            seen[v.sort_key()] = v
    return tuple(seen[k] for k in sorted(seen))
