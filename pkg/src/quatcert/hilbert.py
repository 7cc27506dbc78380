"""Hilbert symbols, ramification sets, and presentations with prescribed
ramification.

At an odd place the symbol is the tame formula

    h_v(a, b) = (-1)^(v(a) v(b) (q_v - 1)/2) chi(a0)^v(b) chi(b0)^v(a),

with a0, b0 the unit parts and chi the quadratic residue character of the
residue field.  At the dyadic place (1+i) of Q(i) the symbol is computed by
reciprocity from the tame symbols at every odd place in the supports and
cross-checked against an exhaustive local isotropy search of
a x^2 + b y^2 = z^2, an independent oracle.  Over F_q(t) with q = 1 mod 4
every place, the infinite one included, is tame.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_arith import (
    ConsistencyError,
    FieldElem,
    GAUSSIAN,
    GaussInt,
    InputError,
    SearchExhausted,
    make_elem,
)
from .localsearch import isotropy_search
from .places import (
    FF_INF_PLACE,
    Place,
    infinite_place,
    place_of,
    residue_symbol,
    support_places,
)


@dataclass(frozen=True)
class QuatPresentation:
    """A symbol pair (a, b) presenting the quaternion algebra (a,b)_F.

    Structural equality only; two presentations related by swapping, by
    scaling an entry by a square, or by (x, y) -> (-xy, y) present
    isomorphic algebras and have equal ramification sets.
    """

    a: FieldElem
    b: FieldElem

    def __post_init__(self):
        if self.a.is_zero() or self.b.is_zero():
            raise InputError("presentation entries must be nonzero")
        self.a._check(self.b)

    @property
    def backend(self) -> str:
        return self.a.backend

    def __str__(self):
        return f"({self.a}, {self.b})"


@dataclass(frozen=True)
class RamificationSet:
    """An ordered set of places; ramification sets always have even size."""

    places: tuple

    @staticmethod
    def of(places) -> "RamificationSet":
        seen = {}
        for v in places:
            seen[v.sort_key()] = v
        return RamificationSet(tuple(seen[k] for k in sorted(seen)))

    def __len__(self):
        return len(self.places)

    def __iter__(self):
        return iter(self.places)

    def __contains__(self, v: Place):
        return v in self.places

    def __str__(self):
        return "{" + ", ".join(str(v) for v in self.places) + "}"


def tame_hilbert(a, b, v: Place) -> int:
    """The Hilbert symbol at an odd place, by the tame formula."""
    if v.dyadic:
        raise InputError("tame symbol at a dyadic place")
    a = a if isinstance(a, FieldElem) else make_elem(a)
    b = b if isinstance(b, FieldElem) else make_elem(b)
    if a.is_zero() or b.is_zero():
        raise InputError("Hilbert symbol of zero")
    va, vb = v.valuation(a), v.valuation(b)
    a0, b0 = v.unit_part(a), v.unit_part(b)
    sign = -1 if (va * vb * ((v.q_v - 1) // 2)) % 2 else 1
    chi_a = residue_symbol(a0, v) if vb % 2 else 1
    chi_b = residue_symbol(b0, v) if va % 2 else 1
    return sign * chi_a * chi_b


def dyadic_hilbert(a, b) -> int:
    """The Hilbert symbol at the place (1+i) of Q(i).

    Primary computation: Hilbert reciprocity (the product of the symbols at
    all odd places in the supports of a and b, inverted; the complex place
    contributes +1).  An exhaustive Hensel isotropy search of
    a x^2 + b y^2 = z^2 serves as an independent consistency oracle.
    """
    a = a if isinstance(a, FieldElem) else make_elem(a)
    b = b if isinstance(b, FieldElem) else make_elem(b)
    if a.backend != GAUSSIAN:
        raise InputError("the dyadic place exists only over Q(i)")
    if a.is_zero() or b.is_zero():
        raise InputError("Hilbert symbol of zero")
    product = 1
    for v in support_places(a, b):
        if not v.dyadic:
            product *= tame_hilbert(a, b, v)
    dyadic_place = place_of(GaussInt(1, 1))
    oracle = 1 if isotropy_search(a, b, dyadic_place) else -1
    if oracle != product:
        raise ConsistencyError(
            f"dyadic symbol of ({a}, {b}): reciprocity gives {product}, "
            f"isotropy search gives {oracle}")
    return product


def hilbert_symbol(a, b, v: Place) -> int:
    """The Hilbert symbol at any place."""
    if v.dyadic:
        return dyadic_hilbert(a, b)
    return tame_hilbert(a, b, v)


def ramification_set(p: QuatPresentation) -> RamificationSet:
    """The set of finite places where (a,b)_F is a division algebra.

    The support is contained in the places dividing a or b together with
    the dyadic place (Gaussian) or the infinite place (function field);
    everywhere else both arguments are units and the tame formula gives +1.
    """
    a, b = p.a, p.b
    candidates = list(support_places(a, b))
    if p.backend == GAUSSIAN:
        dyadic_place = place_of(GaussInt(1, 1))
        candidates = [v for v in candidates if not v.dyadic]
        ramified = [v for v in candidates if tame_hilbert(a, b, v) == -1]
        if dyadic_hilbert(a, b) == -1:
            ramified.append(dyadic_place)
    else:
        inf = infinite_place(a.ff_field)
        if not any(v.kind == FF_INF_PLACE for v in candidates):
            candidates.append(inf)
        ramified = [v for v in candidates if tame_hilbert(a, b, v) == -1]
        if len(ramified) % 2 != 0:
            raise ConsistencyError(
                f"odd ramification set for {p}: reciprocity violated")
    result = RamificationSet.of(ramified)
    assert len(result) % 2 == 0
    return result


# ---------------------------------------------------------------------------
# deterministic search for a presentation with prescribed ramification
# ---------------------------------------------------------------------------

def _shell_pairs(shell_fn, bound: int, start: int, skip_all_rational=False):
    """Pairs in shells of max height, shells materialized lazily.

    shell_fn(h) returns (primary, secondary) element lists of height
    exactly h; list order is (all primary elements, then all secondary
    ones), each sub-list by ascending height.
    """
    prim_le: list = []
    sec_le: list = []
    for h in range(start, bound + 1):
        prim_h, sec_h = shell_fn(h)
        prim_le = prim_le + prim_h
        sec_le = sec_le + sec_h
        le = prim_le + sec_le
        eq = prim_h + sec_h
        eq_set = set(id(e) for e in eq)
        for a in le:
            row = le if id(a) in eq_set else eq
            for b in row:
                if skip_all_rational and a.num.im == 0 and b.num.im == 0:
                    continue
                yield a, b


def _gauss_shell(h: int):
    rational = [make_elem(GaussInt(h)), make_elem(GaussInt(-h))]
    general = []
    for re in range(-h, h + 1):
        for im in range(-h, h + 1):
            if im != 0 and max(abs(re), abs(im)) == h:
                general.append(make_elem(GaussInt(re, im)))
    general.sort(key=lambda e: (e.num.re, e.num.im))
    return rational, general


def _ff_shell(field, h: int):
    from .exact_arith import FqPoly
    shell = []
    q = field.q
    for lead_enc in range(1, q):
        for low_enc in range(q ** h):
            digits = []
            e = low_enc
            for _ in range(h):
                digits.append(field.from_encoding(e % q))
                e //= q
            digits.append(field.from_encoding(lead_enc))
            shell.append(make_elem(FqPoly.make(field, digits)))
    shell.sort(key=lambda e: e.num.enc_key())
    return shell


def presentation_pairs(backend: str, field, height_bound: int):
    """Candidate pairs in deterministic order: shells of max height (degree),
    rational-integer pairs before pairs with a general Gaussian entry,
    lexicographic inside a block."""
    if backend == GAUSSIAN:
        # every rational-integer pair is tried before any pair with a
        # general Gaussian entry; both passes run in max-height shells
        yield from _shell_pairs(
            lambda h: ([make_elem(GaussInt(h)), make_elem(GaussInt(-h))],
                       []),
            height_bound, 1)
        yield from _shell_pairs(
            lambda h: _gauss_shell(h), height_bound, 1,
            skip_all_rational=True)
    else:
        yield from _shell_pairs(
            lambda h: (_ff_shell(field, h), []), height_bound, 0)


class _LocalDataCache:
    """Per-element (valuation, residue character of the unit part) at the
    odd places of sigma, memoized so the pair pre-screen is O(1)."""

    def __init__(self, places):
        self.places = [v for v in places if not v.dyadic]
        self.data: dict = {}

    def get(self, x: FieldElem):
        cached = self.data.get(x)
        if cached is None:
            cached = tuple(
                (v.valuation(x), residue_symbol(v.unit_part(x), v))
                for v in self.places)
            self.data[x] = cached
        return cached

    def all_ramified(self, a: FieldElem, b: FieldElem) -> bool:
        """Tame symbol -1 at every cached place?"""
        da, db = self.get(a), self.get(b)
        for v, (va, chia), (vb, chib) in zip(self.places, da, db):
            s = -1 if (va * vb * ((v.q_v - 1) // 2)) % 2 else 1
            if vb % 2:
                s *= chia
            if va % 2:
                s *= chib
            if s != -1:
                return False
        return True


def presentation_from_ramification(sigma, height_bound: int, *,
                                   backend: str = GAUSSIAN,
                                   field=None) -> QuatPresentation:
    """First presentation, in deterministic order, ramified exactly at the
    places of sigma; the result is certified by recomputing its full
    ramification set.  Requires |sigma| even (reciprocity parity)."""
    sigma = sigma if isinstance(sigma, RamificationSet) \
        else RamificationSet.of(sigma)
    if len(sigma) % 2 != 0:
        raise InputError("odd cardinality: no quaternion algebra is "
                         "ramified at an odd number of places")
    tags = {(GAUSSIAN, None) if v.kind == "gauss" else ("ff", v.ff_field)
            for v in sigma}
    if len(tags) > 1:
        raise InputError("sigma mixes backends")
    if tags:
        backend, tag_field = tags.pop()
        if tag_field is not None:
            field = tag_field
    if len(sigma) == 0:
        return split_presentation(backend, field)
    target = {v.sort_key() for v in sigma}
    screen = _LocalDataCache(sigma)
    for a, b in presentation_pairs(backend, field, height_bound):
        # pre-screen with the cheap tame symbols at the target places
        if not screen.all_ramified(a, b):
            continue
        cand = QuatPresentation(a, b)
        ram = ramification_set(cand)
        if {v.sort_key() for v in ram} == target:
            # certify by an independent recomputation from the raw pair
            recheck = ramification_set(QuatPresentation(a, b))
            if {v.sort_key() for v in recheck} != target:
                raise ConsistencyError("ramification recomputation differs")
            return cand
    raise SearchExhausted(
        f"no presentation with ramification {sigma} of height "
        f"<= {height_bound}")


def split_presentation(backend: str, field=None) -> QuatPresentation:
    """The split algebra (1, 1)."""
    if backend == GAUSSIAN:
        one = make_elem(GaussInt(1))
    else:
        from .exact_arith import FqPoly
        one = make_elem(FqPoly.constant(field, 1))
    return QuatPresentation(one, one)
