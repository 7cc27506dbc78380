"""Diagonal quadratic forms: norm forms of quaternion presentations, local
representability, and bounded global representation search.

Local verdicts are computed twice, by independent routes that are
cross-tested against each other:

* the invariant route classifies the augmented form <c_1,...,c_k, -d> by
  dimension, discriminant square class and the product of pairwise Hilbert
  symbols (over a local field a form of dimension 5 or more is always
  isotropic; a quaternary form is anisotropic exactly when its discriminant
  is a square and that product is -1, since -1 is a square here),
* the search route (hensel_search) exhausts primitive residue vectors at
  the lifting precision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_arith import (
    ConsistencyError,
    FieldElem,
    FqPoly,
    GAUSSIAN,
    GaussInt,
    InputError,
    gauss_sqrt,
    make_elem,
    poly_sqrt,
)
from .hilbert import QuatPresentation, hilbert_symbol
from .localsearch import HenselWitness, hensel_precision_bound, hensel_search
from .places import Place, is_local_square


@dataclass(frozen=True)
class DiagForm:
    """A diagonal quadratic form sum(c_i x_i^2), 3 or 4 nonzero coefficients."""

    coeffs: tuple  # tuple[FieldElem, ...]

    @staticmethod
    def of(*coeffs) -> "DiagForm":
        out = tuple(c if isinstance(c, FieldElem) else make_elem(c)
                    for c in coeffs)
        if len(out) not in (3, 4):
            raise InputError("diagonal forms here are ternary or quaternary")
        if any(c.is_zero() for c in out):
            raise InputError("zero coefficient in a diagonal form")
        return DiagForm(out)

    def dim(self) -> int:
        return len(self.coeffs)

    def evaluate(self, vector) -> FieldElem:
        if len(vector) != len(self.coeffs):
            raise InputError("vector/form dimension mismatch")
        total = None
        for c, x in zip(self.coeffs, vector):
            x = x if isinstance(x, FieldElem) else make_elem(x)
            term = c * x * x
            total = term if total is None else total + term
        return total

    def __str__(self):
        return "<" + ", ".join(str(c) for c in self.coeffs) + ">"


def pure_norm_form(p: QuatPresentation) -> DiagForm:
    """Norms of pure quaternions of (a,b)_F: the ternary form <-a, -b, ab>."""
    return DiagForm.of(-p.a, -p.b, p.a * p.b)


def full_norm_form(p: QuatPresentation) -> DiagForm:
    """The reduced norm form of (a,b)_F: <1, -a, -b, ab>."""
    one = p.a / p.a
    return DiagForm.of(one, -p.a, -p.b, p.a * p.b)


# ---------------------------------------------------------------------------
# local representability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalSolvability:
    """Verdict of 'f represents d over F_v', with re-checkable evidence.

    evidence is a HenselWitness when the verdict is true, and a dict of the
    invariant facts used (discriminant square class and pairwise Hilbert
    symbols of the augmented form) when it is false.
    """

    place: Place
    verdict: bool
    evidence: object

    def recheck(self) -> bool:
        v = self.place
        if self.verdict:
            if isinstance(self.evidence, HenselWitness):
                return self.evidence.verify()
            # invariant-only positive evidence: recompute the verdict
            g = self.evidence["augmented_coeffs"]
            if len(g) >= 5 or not is_local_square(_product(g), v):
                return True
            eps = 1
            for i in range(len(g)):
                for j in range(i + 1, len(g)):
                    eps *= hilbert_symbol(g[i], g[j], v)
            return eps == 1
        facts = self.evidence
        g = facts["augmented_coeffs"]
        if not is_local_square(_product(g), v):
            return False
        eps = 1
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                eps *= hilbert_symbol(g[i], g[j], v)
        return eps == -1 and facts["hasse_product"] == -1


def _product(elems):
    total = None
    for e in elems:
        total = e if total is None else total * e
    return total


def local_represents(f: DiagForm, d, v: Place) -> LocalSolvability:
    """Does f represent d over the completion F_v?

    Decided by isotropy of the augmented form g = f + <-d> through the
    classical invariants; the positive verdict carries a Hensel witness,
    the negative one the symbol facts that force anisotropy.
    """
    d = d if isinstance(d, FieldElem) else make_elem(d)
    if d.is_zero():
        raise InputError("representability of zero is not decided here")
    g = f.coeffs + (-d,)
    if len(g) >= 5:
        verdict = True
    else:
        disc = _product(g)
        disc_square = is_local_square(disc, v)
        if not disc_square:
            verdict = True
        else:
            eps = 1
            symbols = []
            for i in range(len(g)):
                for j in range(i + 1, len(g)):
                    s = hilbert_symbol(g[i], g[j], v)
                    symbols.append(((i, j), s))
                    eps *= s
            # with -1 a square: quaternary anisotropic iff disc is a square
            # and the Hasse product is -1
            verdict = eps == 1
            if not verdict:
                evidence = {
                    "augmented_coeffs": g,
                    "discriminant": disc,
                    "discriminant_local_square": True,
                    "symbols": symbols,
                    "hasse_product": eps,
                }
                return LocalSolvability(v, False, evidence)
    try:
        witness = hensel_search(list(f.coeffs), d, v,
                                hensel_precision_bound(list(f.coeffs), d, v))
    except InputError:
        # residue ring beyond the exhaustive-search limit (very large
        # residue fields); the verdict stands on the invariants alone
        return LocalSolvability(v, True, {
            "augmented_coeffs": g,
            "reason": "isotropic by invariants; search ring too large",
        })
    if witness is None:
        raise ConsistencyError(
            f"invariants say {f} represents {d} at {v}, search disagrees")
    return LocalSolvability(v, True, witness)


# ---------------------------------------------------------------------------
# bounded global representation search
# ---------------------------------------------------------------------------

def _ring_sqrt(x):
    if isinstance(x, GaussInt):
        return gauss_sqrt(x)
    return poly_sqrt(x)


def _gauss_vectors(k: int, bound: int):
    """(k-1)-tuples over Z[i] by shells of max height, rational pass first."""
    def shell_tuples(elems, h, heights):
        idx = [0] * k
        # iterate tuples of entries from elems with max height exactly h
        def rec(pos, cur, seen_h):
            if pos == k:
                if seen_h:
                    yield tuple(cur)
                return
            for e, eh in zip(elems, heights):
                if eh > h:
                    break
                cur.append(e)
                yield from rec(pos + 1, cur, seen_h or eh == h)
                cur.pop()
        yield from rec(0, [], False)

    rationals = [GaussInt(0)]
    for m in range(1, bound + 1):
        rationals.append(GaussInt(m))
        rationals.append(GaussInt(-m))
    r_heights = [z.height() for z in rationals]
    for h in range(0, bound + 1):
        yield from shell_tuples(rationals, h, r_heights)
    generals = [GaussInt(re, im)
                for re in range(-bound, bound + 1)
                for im in range(-bound, bound + 1)]
    generals.sort(key=lambda z: (z.height(), z.re, z.im))
    g_heights = [z.height() for z in generals]
    for h in range(0, bound + 1):
        for tup in shell_tuples(generals, h, g_heights):
            if all(z.im == 0 for z in tup):
                continue  # already tried in the rational pass
            yield tup


def _ff_vectors(field, k: int, bound: int):
    """(k-1)-tuples over F_q[t] by shells of max degree, encoding order."""
    elems = [FqPoly(field, ())]
    q = field.q
    for deg in range(0, bound + 1):
        shell = []
        for lead in range(1, q):
            for low in range(q ** deg):
                digits = []
                e = low
                for _ in range(deg):
                    digits.append(field.from_encoding(e % q))
                    e //= q
                digits.append(field.from_encoding(lead))
                shell.append(FqPoly.make(field, digits))
        shell.sort(key=lambda z: z.enc_key())
        elems.extend(shell)
    heights = [0 if z.is_zero() else z.degree() for z in elems]

    def rec(pos, cur, seen_h, h):
        if pos == k:
            if seen_h:
                yield tuple(cur)
            return
        for e, eh in zip(elems, heights):
            if eh > h:
                break
            cur.append(e)
            yield from rec(pos + 1, cur, seen_h or eh == h, h)
            cur.pop()

    for h in range(0, bound + 1):
        yield from rec(0, [], False, h)


def _denominators(backend, field, bound: int):
    if backend == GAUSSIAN:
        for m in range(1, bound + 1):
            yield GaussInt(m)
    else:
        q = field.q
        yield FqPoly.constant(field, 1)
        for deg in range(1, bound + 1):
            for low in range(q ** deg):
                digits = []
                e = low
                for _ in range(deg):
                    digits.append(field.from_encoding(e % q))
                    e //= q
                digits.append(field.one())
                yield FqPoly.make(field, digits)


def global_search(f: DiagForm, d, height_bound: int):
    """Search for an exact vector with f(x) = d over the global field.

    Deterministic enumeration: denominators in canonical order; for each,
    shells of the first k-1 numerator coordinates by max height, with the
    last coordinate solved by an exact ring square root and kept within the
    height bound.  Absence of a find is not a proof of non-representability.
    """
    d = d if isinstance(d, FieldElem) else make_elem(d)
    if d.is_zero():
        raise InputError("representability of zero is not searched")
    backend = f.coeffs[0].backend
    field = f.coeffs[0].ff_field
    k = f.dim()
    c_last = f.coeffs[-1]
    for den in _denominators(backend, field, height_bound):
        den_elem = make_elem(den)
        target = d * den_elem * den_elem
        vec_iter = (_gauss_vectors(k - 1, height_bound) if backend == GAUSSIAN
                    else _ff_vectors(field, k - 1, height_bound))
        for front in vec_iter:
            partial = target
            for c, x in zip(f.coeffs, front):
                partial = partial - c * make_elem(x) * make_elem(x)
            rest = partial / c_last
            if not rest.is_ring_element():
                continue
            root = _ring_sqrt(rest.num)
            if root is None or root.height() > height_bound:
                continue
            vector = tuple(make_elem(x) / den_elem for x in front) \
                + (make_elem(root) / den_elem,)
            value = f.evaluate(vector)
            if value != d:
                raise ConsistencyError("global search produced a bad vector")
            return vector
    return None
