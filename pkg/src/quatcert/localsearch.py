"""Exhaustive primitive-solution search in residue rings O_v / pi^N.

This is the oracle side of every local decision: representability of d by a
diagonal form, and isotropy at the dyadic place, are settled by enumerating
all residue vectors with at least one unit coordinate at a precision high
enough that any solution of the congruence lifts (Hensel) and any exact
solution survives reduction.  Residue rings are handled through their
additive group structure, so the per-coordinate value sets combine by
group convolution instead of nested loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact_arith import (
    FieldElem,
    FqPoly,
    GaussInt,
    InputError,
    ConsistencyError,
    gauss_quotient_data,
    make_elem,
)
from .finitefield import GF
from .places import (
    FF_INF_PLACE,
    FF_PLACE,
    GAUSS_PLACE,
    Place,
    finite_model_place,
    transform_to_finite_model,
)

RING_SIZE_LIMIT = 1 << 21  # int64 safety margin for vectorized arithmetic


# ---------------------------------------------------------------------------
# residue rings
# ---------------------------------------------------------------------------

class GaussLocalRing:
    """Z[i] / (pi^N) with its additive group as Z/d1 x Z/d2."""

    def __init__(self, pi: GaussInt, precision: int):
        self.pi = pi
        self.precision = precision
        self.modulus = pi ** precision
        u, (d1, d2), uinv = gauss_quotient_data(self.modulus)
        self.u, self.d1, self.d2, self.uinv = u, d1, d2, uinv
        self.size = d1 * d2
        if self.size > RING_SIZE_LIMIT:
            raise InputError(
                f"residue ring of size {self.size} exceeds the search limit")
        self.shape = tuple(d for d in (d1, d2) if d > 1) or (1,)
        if max(abs(e) for row in u for e in row) * self.size >= 1 << 61:
            raise ConsistencyError("residue coordinates too large to vectorize")
        idx = np.arange(self.size, dtype=np.int64)
        alpha, beta = idx // d2, idx % d2
        # representatives, reduced modulo norm(modulus) = size (a multiple
        # of the modulus, so reduction stays in the residue class)
        self._X = (uinv[0][0] * alpha + uinv[0][1] * beta) % self.size
        self._Y = (uinv[1][0] * alpha + uinv[1][1] * beta) % self.size
        pa, pb = pi.conjugate().re, pi.conjugate().im
        p = pi.norm()
        self.unit_mask = (((self._X * pa - self._Y * pb) % p != 0)
                          | ((self._X * pb + self._Y * pa) % p != 0))

    def _coords_to_index(self, re, im):
        a = (self.u[0][0] * re + self.u[0][1] * im) % self.d1
        b = (self.u[1][0] * re + self.u[1][1] * im) % self.d2
        return a * self.d2 + b

    def index_of(self, z: GaussInt) -> int:
        return int(self._coords_to_index(z.re % self.size, z.im % self.size))

    def rep(self, idx: int) -> GaussInt:
        # nearest-remainder reduction keeps representatives small
        return GaussInt(int(self._X[idx]), int(self._Y[idx])) % self.modulus

    def value_indices(self, coeff: GaussInt):
        """Index array of coeff * z^2 over all residues z, vectorized."""
        cr, ci = coeff.re % self.size, coeff.im % self.size
        x, y = self._X, self._Y
        sq_re = (x * x - y * y) % self.size
        sq_im = (2 * x * y) % self.size
        re = (cr * sq_re - ci * sq_im) % self.size
        im = (cr * sq_im + ci * sq_re) % self.size
        return self._coords_to_index(re, im)

    def sub_index(self, a: int, b: int) -> int:
        a1, a2 = divmod(a, self.d2)
        b1, b2 = divmod(b, self.d2)
        return ((a1 - b1) % self.d1) * self.d2 + (a2 - b2) % self.d2

    def wrap(self, z: GaussInt) -> FieldElem:
        return make_elem(z)


class PolyLocalRing:
    """F_q[t] / (pi^N); residues are polynomials of degree < N deg(pi)."""

    def __init__(self, pi: FqPoly, precision: int):
        self.pi = pi
        self.field = pi.field
        self.precision = precision
        self.modulus = pi ** precision
        self.deg = self.modulus.degree()
        q = self.field.q
        self.size = q ** self.deg
        if self.size > RING_SIZE_LIMIT:
            raise InputError(
                f"residue ring of size {self.size} exceeds the search limit")
        # the additive group is an F_p vector space, whatever k is
        self.shape = (self.field.p,) * (self.deg * self.field.k)
        if self.field.k == 1:
            self._init_vectorized()
        else:
            self._init_generic()

    # -- prime-field fast path -------------------------------------------------

    def _init_vectorized(self):
        q, m = self.field.q, self.deg
        idx = np.arange(self.size, dtype=np.int64)
        digits = np.empty((self.size, m), dtype=np.int64)
        rest = idx.copy()
        for i in range(m):
            digits[:, i] = rest % q
            rest //= q
        self._digits = digits  # column i = coefficient of t^i
        self._powers = np.array([q ** i for i in range(m)], dtype=np.int64)
        self._mod_coeffs = [c.encoding for c in self.modulus.coeffs]
        self._pi_coeffs = [c.encoding for c in self.pi.coeffs]
        self.unit_mask = self._poly_rem_nonzero(digits, self._pi_coeffs)

    def _poly_rem_nonzero(self, digits, divisor):
        q = self.field.q
        dg = len(divisor) - 1
        w = digits.copy()
        inv_lead = pow(divisor[-1], -1, q)
        for top in range(w.shape[1] - 1, dg - 1, -1):
            f = (w[:, top] * inv_lead) % q
            for j in range(dg + 1):
                w[:, top - dg + j] = (w[:, top - dg + j] - f * divisor[j]) % q
        return (w[:, :dg] != 0).any(axis=1)

    def _reduce_columns(self, wide):
        """Reduce a (R, width) coefficient array modulo the monic modulus."""
        q, m = self.field.q, self.deg
        mod = self._mod_coeffs
        for top in range(wide.shape[1] - 1, m - 1, -1):
            f = wide[:, top] % q
            for j in range(m + 1):
                wide[:, top - m + j] = (wide[:, top - m + j] - f * mod[j]) % q
        return wide[:, :m] % q

    def value_indices(self, coeff: FqPoly):
        if self.field.k != 1:
            return self._value_indices_generic(coeff)
        q, m = self.field.q, self.deg
        d = self._digits
        wide = np.zeros((self.size, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            wide[:, 2 * i] += d[:, i] * d[:, i]
            for j in range(i + 1, m):
                wide[:, i + j] += 2 * d[:, i] * d[:, j]
        sq = self._reduce_columns(wide % q)
        c = (coeff % self.modulus).coeffs
        cvals = [x.encoding for x in c]
        width = m + len(cvals) - 1 if cvals else 1
        wide2 = np.zeros((self.size, max(width, m)), dtype=np.int64)
        for j, cv in enumerate(cvals):
            if cv:
                wide2[:, j:j + m] += cv * sq
        out = self._reduce_columns(wide2 % q) if wide2.shape[1] > m \
            else wide2 % q
        return out @ self._powers

    def index_of(self, z: FqPoly) -> int:
        r = z % self.modulus
        q = self.field.q
        return sum(c.encoding * q ** i for i, c in enumerate(r.coeffs))

    def rep(self, idx: int) -> FqPoly:
        q = self.field.q
        digits = []
        for _ in range(self.deg):
            digits.append(self.field.from_encoding(idx % q))
            idx //= q
        return FqPoly.make(self.field, digits)

    def sub_index(self, a: int, b: int) -> int:
        # index digits are base-p positional, so subtract digit-wise mod p
        p = self.field.p
        out = 0
        mult = 1
        for _ in range(self.deg * self.field.k):
            out += ((a % p - b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def wrap(self, z: FqPoly) -> FieldElem:
        return make_elem(z)

    # -- generic path for extension constant fields -----------------------------

    def _init_generic(self):
        self._elems = [self.rep(idx) for idx in range(self.size)]
        self.unit_mask = np.array(
            [not (e % self.pi).is_zero() for e in self._elems], dtype=bool)

    def _value_indices_generic(self, coeff: FqPoly):
        out = np.empty(self.size, dtype=np.int64)
        for i, z in enumerate(self._elems):
            out[i] = self.index_of(coeff * z * z)
        return out


@lru_cache(maxsize=16)
def local_ring(v: Place, precision: int):
    if v.kind == GAUSS_PLACE:
        return GaussLocalRing(v.prime, precision)
    if v.kind == FF_PLACE:
        return PolyLocalRing(v.prime, precision)
    raise InputError("build the ring at the finite model of the place")


# ---------------------------------------------------------------------------
# group convolution of value sets
# ---------------------------------------------------------------------------

def _group_conv(a: np.ndarray, b: np.ndarray, shape) -> np.ndarray:
    """Cyclic convolution over prod(Z/n_i): presence of sums of two sets."""
    fa = np.fft.fftn(a.reshape(shape).astype(np.float64))
    fb = np.fft.fftn(b.reshape(shape).astype(np.float64))
    out = np.fft.ifftn(fa * fb).real.ravel()
    return out > 0.5


@dataclass
class _CoordSet:
    present: np.ndarray       # bool, all residues z
    preimage: np.ndarray      # first residue index achieving each value
    present_unit: np.ndarray  # bool, unit residues only
    preimage_unit: np.ndarray


def _build_sets(ring, coeffs) -> list:
    sets = []
    r_indices = np.arange(ring.size, dtype=np.int64)
    for c in coeffs:
        values = ring.value_indices(c)
        present = np.zeros(ring.size, dtype=bool)
        present[values] = True
        preimage = np.full(ring.size, -1, dtype=np.int64)
        preimage[values[::-1]] = r_indices[::-1]  # first residue wins
        uvals = values[ring.unit_mask]
        uidx = r_indices[ring.unit_mask]
        present_u = np.zeros(ring.size, dtype=bool)
        present_u[uvals] = True
        preimage_u = np.full(ring.size, -1, dtype=np.int64)
        preimage_u[uvals[::-1]] = uidx[::-1]
        sets.append(_CoordSet(present, preimage, present_u, preimage_u))
    return sets


def _extract_rest(ring, sets, order, value_idx):
    """Deterministically split value_idx as a sum over sets[order]."""
    if len(order) == 1:
        s = sets[order[0]]
        assert s.present[value_idx] and s.preimage[value_idx] >= 0
        return [int(s.preimage[value_idx])]
    first = sets[order[0]]
    if len(order) == 2:
        tail_present = sets[order[1]].present
    else:
        tail_present = _group_conv(sets[order[1]].present,
                                   sets[order[2]].present, ring.shape)
    for val in np.nonzero(first.present)[0]:
        rem = ring.sub_index(int(value_idx), int(val))
        if tail_present[rem]:
            return ([int(first.preimage[val])]
                    + _extract_rest(ring, sets, order[1:], rem))
    raise ConsistencyError("convolution claimed a sum that does not exist")


def _decide(ring, coeffs, target_indices):
    """First (target_position, witness residue indices) hit, or None.

    A witness always has at least one unit coordinate (primitive vector).
    """
    m = len(coeffs)
    sets = _build_sets(ring, coeffs)
    rests = []
    for j in range(m):
        other = [i for i in range(m) if i != j]
        acc = sets[other[0]].present
        for i in other[1:]:
            acc = _group_conv(acc, sets[i].present, ring.shape)
        rests.append(acc)
    presence = []
    for j in range(m):
        presence.append(_group_conv(sets[j].present_unit, rests[j],
                                    ring.shape))
    for pos, t_idx in enumerate(target_indices):
        for j in range(m):
            if presence[j][t_idx]:
                # unit coordinate j first, remaining coordinates in order
                order = [i for i in range(m) if i != j]
                for uval in np.nonzero(sets[j].present_unit)[0]:
                    rem = ring.sub_index(int(t_idx), int(uval))
                    if (rests[j][rem] if m > 1 else rem == 0):
                        ures = int(sets[j].preimage_unit[uval])
                        rest = _extract_rest(ring, sets, order, rem)
                        vec = [None] * m
                        vec[j] = ures
                        for i, res in zip(order, rest):
                            vec[i] = res
                        return pos, vec
                raise ConsistencyError(
                    "presence convolution inconsistent with value sets")
    return None


# ---------------------------------------------------------------------------
# normalization and the public searches
# ---------------------------------------------------------------------------

def _ringify_and_strip(x: FieldElem, v: Place):
    """Multiply x by squares to obtain a ring element with v-valuation 0/1."""
    ring_elem = x.num * x.den  # x * den^2
    val = v.valuation(make_elem(ring_elem))
    if val >= 2:
        drop = v.prime ** (2 * (val // 2))
        ring_elem = ring_elem // drop
    return ring_elem


def hensel_precision_bound(coeffs, d, v: Place) -> int:
    """2 * v(4 * prod(c_i) * d) + 3 on the v-integral scaled inputs."""
    if v.kind == FF_INF_PLACE:
        model = finite_model_place(v)
        return hensel_precision_bound(
            [transform_to_finite_model(v, c) for c in coeffs],
            transform_to_finite_model(v, d), model)
    prod = _ringify_and_strip(d, v)
    for c in coeffs:
        prod = prod * _ringify_and_strip(c, v)
    if v.kind == GAUSS_PLACE:
        prod = prod * GaussInt(4)
    else:
        prod = prod * FqPoly.constant(prod.field, 4)
    return 2 * v.valuation(make_elem(prod)) + 3


def _working_precision(c_ring, v: Place) -> int:
    """The sharp exhaustive-search precision 2(e + max v(c_i)) + 1.

    Deciding modulo pi^work is equivalent to deciding at any higher
    precision: a primitive congruence solution has a unit coordinate j
    whose gradient valuation v(2 c_j x_j) is at most e + max v(c_i), so
    work makes it liftable, while absence persists upward trivially; found
    witnesses are Newton-lifted to the precision the caller asked for.
    """
    e = 2 if (v.kind == GAUSS_PLACE and v.dyadic) else 0
    maxv = max(v.valuation(make_elem(c)) for c in c_ring)
    return 2 * (e + maxv) + 1


@dataclass(frozen=True)
class HenselWitness:
    """A primitive residue vector with f(x) = d * pi^(2s) mod pi^precision.

    The recorded coefficients and target are the v-integral scalings of the
    inputs (each differs from the original by a square factor)."""

    place: Place
    precision: int
    coeffs: tuple  # tuple[FieldElem, ...], v-integral
    target_base: FieldElem  # v-integral d with valuation 0 or 1
    scaling_exp: int
    vector: tuple  # tuple[FieldElem, ...]

    def verify(self) -> bool:
        v = self.place
        pi = v.uniformizer()
        total = None
        has_unit = False
        for c, x in zip(self.coeffs, self.vector):
            term = c * x * x
            total = term if total is None else total + term
            if not x.is_zero() and v.valuation(x) == 0:
                has_unit = True
        target = self.target_base * pi ** (2 * self.scaling_exp)
        diff = total - target
        if not has_unit:
            return False
        if diff.is_zero():
            return True
        return v.valuation(diff) >= self.precision


def hensel_search(f_coeffs, d, v: Place, precision: int):
    """Search for a primitive solution of f(x) = d (pi^s)^2 mod pi^precision.

    Returns a HenselWitness, or None exactly when no primitive residue
    vector solves the congruence for any scaling exponent; at or above the
    stated precision bound this decides representability of d by the
    diagonal form over the completion.
    """
    coeffs = [c if isinstance(c, FieldElem) else make_elem(c) for c in f_coeffs]
    if not isinstance(d, FieldElem):
        d = make_elem(d)
    if d.is_zero():
        raise InputError("search target must be nonzero")
    if any(c.is_zero() for c in coeffs):
        raise InputError("form coefficients must be nonzero")
    bound = hensel_precision_bound(coeffs, d, v)
    if precision < bound:
        raise InputError(
            f"precision {precision} below the lifting bound {bound}")
    if v.kind == FF_INF_PLACE:
        model = finite_model_place(v)
        inner = hensel_search(
            [transform_to_finite_model(v, c) for c in coeffs],
            transform_to_finite_model(v, d), model, precision)
        if inner is None:
            return None
        back = tuple(_transform_back(v, x) for x in inner.vector)
        return HenselWitness(v, precision,
                             tuple(_transform_back(v, c) for c in inner.coeffs),
                             _transform_back(v, inner.target_base),
                             inner.scaling_exp, back)
    c_ring = [_ringify_and_strip(c, v) for c in coeffs]
    d_ring = _ringify_and_strip(d, v)
    # deciding at the sharp working precision is equivalent at any higher
    # one; a found witness is Newton-lifted to the precision requested
    work = min(precision, _working_precision(c_ring, v))
    ring = local_ring(v, work)
    d_val = v.valuation(make_elem(d_ring))
    pi_ring = v.prime
    targets = []
    seen = set()
    s = 0
    while True:
        t_elem = d_ring * pi_ring ** (2 * s)
        idx = ring.index_of(t_elem)
        if idx not in seen:
            seen.add(idx)
            targets.append((s, idx))
        if d_val + 2 * s >= work:
            break
        s += 1
    hit = _decide(ring, c_ring, [idx for _, idx in targets])
    if hit is None:
        return None
    pos, vec_indices = hit
    s_found = targets[pos][0]
    vec_ring = [ring.rep(i) for i in vec_indices]
    if precision > work:
        vec_ring = _newton_lift(v, c_ring, d_ring, s_found, vec_ring,
                                work, precision)
    vector = tuple(ring.wrap(z) for z in vec_ring)
    witness = HenselWitness(
        v, precision,
        tuple(make_elem(c) for c in c_ring),
        make_elem(d_ring), s_found, vector)
    if not witness.verify():
        raise ConsistencyError("extracted witness fails exact re-checking")
    return witness


def _newton_lift(v: Place, c_ring, d_ring, s, vec, start: int, stop: int):
    """Lift f(x) = d pi^(2s) from mod pi^start to mod pi^stop, one digit
    per step, adjusting a fixed unit coordinate of minimal gradient
    valuation.  Requires start >= 2g+1 (the lifting bound guarantees it).
    """
    pi = v.prime
    two = (GaussInt(2) if isinstance(pi, GaussInt)
           else FqPoly.constant(pi.field, 2))
    target = d_ring * pi ** (2 * s)
    x = list(vec)
    grads = []
    for j, (c, xj) in enumerate(zip(c_ring, x)):
        if not xj.is_zero() and v.valuation(make_elem(xj)) == 0:
            grads.append((v.valuation(make_elem(two * c * xj)), j))
    g, j = min(grads)
    # residue of (2 c_j x_j) / pi^g; constant through the lift since x_j
    # only changes by multiples of pi^(k-g) with k-g >= g+1 >= 1
    u_res = v.reduce(make_elem(two * c_ring[j] * x[j])
                     * v.uniformizer() ** (-g))
    u_inv = u_res.value ** (v.q_v - 2)
    for k in range(start, stop):
        fx = None
        for c, xi in zip(c_ring, x):
            term = c * xi * xi
            fx = term if fx is None else fx + term
        diff = fx - target
        if diff.is_zero():
            break
        diff_elem = make_elem(diff)
        if v.valuation(diff_elem) > k:
            continue
        defect = v.reduce(diff_elem * v.uniformizer() ** (-k))
        digit = v.lift(-(defect.value * u_inv))
        if not digit.is_ring_element():
            raise ConsistencyError("non-integral residue lift")
        x[j] = x[j] + digit.num * pi ** (k - g)
    return x


def _transform_back(v: Place, x: FieldElem) -> FieldElem:
    # t -> 1/t is an involution of F_q(t)
    return transform_to_finite_model(v, x)


def isotropy_search(a: FieldElem, b: FieldElem, v: Place,
                    precision: int | None = None) -> bool:
    """Does a x^2 + b y^2 = z^2 have a primitive local solution at v?

    Decided by exhaustive search modulo pi^precision; precision defaults to
    the lifting bound 2 v(4ab) + 3.
    """
    coeffs = [a, b, -_one_like(a)]
    bound = hensel_precision_bound(coeffs[:2], coeffs[2], v)
    if precision is not None and precision < bound:
        raise InputError(
            f"precision {precision} below the lifting bound {bound}")
    if v.kind == FF_INF_PLACE:
        model = finite_model_place(v)
        return isotropy_search(transform_to_finite_model(v, a),
                               transform_to_finite_model(v, b), model)
    # presence/absence at the sharp working precision decides isotropy
    c_ring = [_ringify_and_strip(c, v) for c in coeffs]
    ring = local_ring(v, _working_precision(c_ring, v))
    zero_idx = ring.index_of(c_ring[0] - c_ring[0])
    return _decide(ring, c_ring, [zero_idx]) is not None


def _one_like(x: FieldElem) -> FieldElem:
    if isinstance(x.num, GaussInt):
        return make_elem(GaussInt(1))
    return make_elem(FqPoly.constant(x.num.field, 1))
