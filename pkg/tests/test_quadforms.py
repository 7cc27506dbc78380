import pytest

from quatcert import (
    DiagForm,
    GaussInt,
    InputError,
    QuatPresentation,
    full_norm_form,
    global_search,
    hensel_precision_bound,
    hensel_search,
    local_represents,
    make_elem,
    parse_elem,
    parse_place,
    pure_norm_form,
)

from conftest import rand_gauss_elem, rand_ff_elem

P5 = parse_place("2+i")
P5BAR = parse_place("2-i")
P2 = parse_place("1+i")
P3 = parse_place("3")
PT = parse_place("t@5")


def e(text):
    return parse_elem(text)


def form(*coeffs):
    return DiagForm.of(*(e(c) if isinstance(c, str) else c for c in coeffs))


PURE25 = form("-2", "-5", "10")
FULL25 = form("1", "-2", "-5", "10")


class TestNormForms:
    def test_pure(self):
        p = QuatPresentation(e("2"), e("5"))
        assert pure_norm_form(p) == PURE25

    def test_pure_swapped(self):
        p = QuatPresentation(e("5"), e("2"))
        assert pure_norm_form(p) == form("-5", "-2", "10")

    def test_pure_trivial(self):
        p = QuatPresentation(e("1"), e("1"))
        assert pure_norm_form(p) == form("-1", "-1", "1")

    def test_full(self):
        p = QuatPresentation(e("2"), e("5"))
        assert full_norm_form(p) == FULL25
        p2 = QuatPresentation(e("2"), e("125"))
        assert full_norm_form(p2) == form("1", "-2", "-125", "250")

    def test_dimension_guard(self):
        with pytest.raises(InputError):
            DiagForm.of(e("1"), e("2"))
        with pytest.raises(InputError):
            DiagForm.of(e("1"), e("0"), e("2"))


class TestLocalRepresents:
    def test_obstruction_case(self):
        solv = local_represents(PURE25, e("6"), P5)
        assert solv.verdict is False
        facts = solv.evidence
        assert facts["discriminant_local_square"] is True
        assert facts["hasse_product"] == -1
        assert solv.recheck()

    def test_represented_case(self):
        # exact witness: -2 - 5 + 10 = 3
        solv = local_represents(PURE25, e("3"), P5)
        assert solv.verdict is True
        assert solv.evidence.verify()
        assert solv.recheck()

    def test_one_one_c_always_represents(self, rng):
        # <1,1> is isotropic since -1 = i^2, so <1,1,c> is universal
        for _ in range(12):
            c = rand_gauss_elem(rng, 10)
            d = rand_gauss_elem(rng, 10)
            for v in (P5, P3):
                f = DiagForm.of(e("1"), e("1"), c)
                assert local_represents(f, d, v).verdict is True

    def test_quaternary_always_represents(self, rng):
        # five-dimensional augmented forms are isotropic over local fields
        for _ in range(8):
            d = rand_gauss_elem(rng, 12)
            assert local_represents(FULL25, d, P5).verdict is True
            assert local_represents(FULL25, d, P2).verdict is True

    def test_permutation_invariance(self, rng):
        import itertools
        coeffs = [e("-2"), e("-5"), e("10")]
        for d in (e("6"), e("3"), e("7"), e("2i")):
            verdicts = set()
            for perm in itertools.permutations(coeffs):
                verdicts.add(local_represents(DiagForm.of(*perm),
                                              d, P5).verdict)
            assert len(verdicts) == 1

    def test_scaling_covariance(self, rng):
        for _ in range(10):
            s = rand_gauss_elem(rng, 8)
            for d in (e("6"), e("3")):
                a = local_represents(PURE25, d, P5).verdict
                b = local_represents(PURE25, d * s * s, P5).verdict
                assert a == b

    def test_zero_d_rejected(self):
        with pytest.raises(InputError):
            local_represents(PURE25, e("0"), P5)


class TestHenselSearch:
    def test_absent_at_stated_precision(self):
        assert hensel_search(list(PURE25.coeffs), e("6"), P5, 7) is None

    def test_found_with_valid_witness(self):
        w = hensel_search(list(PURE25.coeffs), e("3"), P5, 7)
        assert w is not None
        assert w.precision == 7
        assert w.verify()
        # at least one coordinate is a unit (primitive solution)
        assert any(not x.is_zero() and P5.valuation(x) == 0
                   for x in w.vector)

    def test_precision_below_bound_rejected(self):
        bound = hensel_precision_bound(list(PURE25.coeffs), e("6"), P5)
        assert bound == 7
        with pytest.raises(InputError):
            hensel_search(list(PURE25.coeffs), e("6"), P5, 6)

    def test_isotropic_subform_always_finds(self, rng):
        for ctext, dtext in (("7", "3"), ("2", "6"), ("5", "11")):
            f = [e("1"), e("-1"), e(ctext)]
            w = hensel_search(f, e(dtext), P5,
                              hensel_precision_bound(f, e(dtext), P5))
            assert w is not None and w.verify()

    def test_agrees_with_invariants(self, rng):
        # compact version of the oracle-equivalence suite
        checked = 0
        while checked < 25:
            k = rng.choice([3, 4])
            coeffs = [rand_gauss_elem(rng, 15) for _ in range(k)]
            d = rand_gauss_elem(rng, 15)
            v = rng.choice([P5, P3, P5BAR])
            f = DiagForm.of(*coeffs)
            bound = hensel_precision_bound(coeffs, d, v)
            if v.q_v ** bound > 500_000:
                continue
            found = hensel_search(coeffs, d, v, bound)
            assert (found is not None) == local_represents(f, d, v).verdict
            checked += 1


class TestGlobalSearch:
    def test_minus_six_witness(self):
        vec = global_search(FULL25, e("-6"), 6)
        assert vec is not None
        assert FULL25.evaluate(vec) == e("-6")
        # deterministic first hit of the shell enumeration
        assert tuple(str(x) for x in vec) == ("1", "1", "1", "0")

    def test_rational_square_is_a_norm(self):
        vec = global_search(FULL25, e("9"), 3)
        assert vec is not None
        assert FULL25.evaluate(vec) == e("9")

    def test_pure_three(self):
        vec = global_search(PURE25, e("3"), 1)
        assert tuple(str(x) for x in vec) == ("1", "1", "1")

    def test_soundness_and_local_consistency(self, rng):
        from quatcert import places_dividing
        found = 0
        while found < 6:
            coeffs = [rand_gauss_elem(rng, 5) for _ in range(3)]
            d = rand_gauss_elem(rng, 8)
            f = DiagForm.of(*coeffs)
            vec = global_search(f, d, 3)
            if vec is None:
                continue
            assert f.evaluate(vec) == d
            support = set(places_dividing(d))
            for c in coeffs:
                support.update(places_dividing(c))
            for v in support:
                assert local_represents(f, d, v).verdict is True
            found += 1

    def test_ff_search(self):
        f = DiagForm.of(e("1@5"), e("t@5"), e("4t@5"))
        vec = global_search(f, e("1@5"), 1)
        assert vec is not None and f.evaluate(vec) == e("1@5")

    def test_absence_is_normal(self):
        # <1, 1, 1> cannot represent anything of odd valuation at 3... but
        # absence within a bound is simply reported as None
        f = form("3", "3", "3")
        assert global_search(f, e("5"), 1) is None
