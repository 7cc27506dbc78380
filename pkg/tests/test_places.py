import pytest

from quatcert import (
    GF,
    GaussInt,
    GrammarError,
    InputError,
    infinite_place,
    is_local_square,
    make_elem,
    parse_elem,
    parse_place,
    place_of,
    places_dividing,
    residue_symbol,
)
from quatcert.places import (
    format_place,
    hensel_sqrt_lift,
    residue_sqrt,
)

from conftest import rand_gauss, rand_gauss_elem, rand_ff_elem

P5 = parse_place("2+i")
P5BAR = parse_place("2-i")   # canonicalizes to 1+2i, the same place
P2 = parse_place("1+i")
P3 = parse_place("3")
PT = parse_place("t@5")
PT1 = parse_place("t-1@5")
PINF = parse_place("inf@5")
PQUAD = parse_place("t^2+t+1@5")


def e(text):
    return parse_elem(text)


class TestPlaceConstruction:
    def test_canonical_prime_representatives(self):
        assert str(P5BAR) == "1+2i"
        assert P5BAR == place_of(GaussInt(1, 2))
        assert P5 != P5BAR

    def test_residue_data(self):
        assert (P5.q_v, P5.res_char, P5.dyadic) == (5, 5, False)
        assert (P2.q_v, P2.res_char, P2.dyadic) == (2, 2, True)
        assert (P3.q_v, P3.res_char) == (9, 3)
        assert (PQUAD.q_v, PQUAD.res_char) == (25, 5)
        assert (PINF.q_v, PINF.res_char) == (5, 5)

    def test_non_primes_rejected(self):
        with pytest.raises((InputError, GrammarError)):
            parse_place("5")  # splits
        with pytest.raises((InputError, GrammarError)):
            parse_place("t^2+1@5")  # factors as (t+2)(t+3)
        with pytest.raises((InputError, GrammarError)):
            parse_place("1")

    def test_text_roundtrip(self):
        for v in (P5, P5BAR, P2, P3, PT, PINF, PQUAD):
            assert parse_place(format_place(v)) == v


class TestValuation:
    def test_spec_values(self):
        assert P5.valuation(e("5")) == 1
        assert P5.valuation(e("6")) == 0
        assert P2.valuation(e("2")) == 2

    def test_infinite_place(self):
        assert PINF.valuation(e("t@5")) == -1
        assert PINF.valuation(e("1/t@5")) == 1
        assert PINF.valuation(e("t^2+1/t^2@5")) == 0

    def test_negative_valuations(self):
        assert P5.valuation(e("2-i") / e("5")) == -1

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            P5.valuation(e("0"))

    def test_additivity(self, rng):
        places = [P5, P2, P3, P5BAR]
        for _ in range(200):
            x = rand_gauss_elem(rng, 60, den_height=8)
            y = rand_gauss_elem(rng, 60, den_height=8)
            for v in places:
                assert v.valuation(x * y) == v.valuation(x) + v.valuation(y)
        for _ in range(100):
            x = rand_ff_elem(rng, 5, 4, with_den=True)
            y = rand_ff_elem(rng, 5, 4, with_den=True)
            for v in (PT, PINF, PQUAD):
                assert v.valuation(x * y) == v.valuation(x) + v.valuation(y)


class TestReduce:
    def test_spec_values(self):
        assert str(P5.reduce(e("6"))) == "1"
        assert str(P5.reduce(e("i"))) == "3"  # i = -2 = 3 mod (2+i)
        for v in (P5, P3, PT, PINF):
            one = e("1") if v.kind == "gauss" else e("1@5")
            assert str(v.reduce(one)) == "1"

    def test_requires_unit(self):
        with pytest.raises(InputError):
            P5.reduce(e("5"))
        with pytest.raises(InputError):
            P5.reduce(e("1") / e("5"))

    def test_shared_denominator_valuation(self):
        # (2-i)/5 is a unit at 1+2i even though num and den both vanish there
        x = e("2-i") / e("5")
        assert P5BAR.valuation(x) == 0
        r = P5BAR.reduce(x)
        assert not r.is_zero()

    def test_ring_homomorphism(self, rng):
        for _ in range(120):
            x = rand_gauss_elem(rng, 30)
            y = rand_gauss_elem(rng, 30)
            for v in (P5, P3, P2):
                if v.valuation(x) != 0 or v.valuation(y) != 0:
                    continue
                prod = x * y
                if v.valuation(prod) != 0:
                    continue
                assert (v.reduce(prod).value
                        == (v.reduce(x) * v.reduce(y).value).value)
                s = x + y
                if not s.is_zero() and v.valuation(s) == 0:
                    left = v.reduce(s).value
                    right = v.reduce(x).value + v.reduce(y).value
                    assert left == right

    def test_inert_residue_field_is_literal(self):
        # kappa at 3 is F_3[i]; i maps to the generator (encoding 3)
        assert P3.reduce(e("i")).value.encoding == 3
        assert P3.reduce(e("1+i")).value.encoding == 4


class TestResidueSymbol:
    def test_spec_values(self):
        assert residue_symbol(e("2"), P5) == -1
        assert residue_symbol(e("6"), P5) == 1
        assert residue_symbol(e("4"), P5) == 1

    def test_rejects_dyadic_and_nonunits(self):
        with pytest.raises(InputError):
            residue_symbol(e("3"), P2)
        with pytest.raises(InputError):
            residue_symbol(e("5"), P5)

    def test_multiplicative(self, rng):
        cases = 0
        while cases < 200:
            x = rand_gauss_elem(rng, 40)
            y = rand_gauss_elem(rng, 40)
            for v in (P5, P3, P5BAR):
                if v.valuation(x) == 0 and v.valuation(y) == 0:
                    assert (residue_symbol(x * y, v)
                            == residue_symbol(x, v) * residue_symbol(y, v))
                    cases += 1
        cases = 0
        while cases < 100:
            x = rand_ff_elem(rng, 5, 3)
            y = rand_ff_elem(rng, 5, 3)
            for v in (PT, PINF, PQUAD):
                if v.valuation(x) == 0 and v.valuation(y) == 0:
                    assert (residue_symbol(x * y, v)
                            == residue_symbol(x, v) * residue_symbol(y, v))
                    cases += 1

    def test_matches_exhaustive_squares_small_fields(self):
        # every residue field here has q_v <= 49: compare the character
        # against literal squaring of all field elements
        for v in (P5, P3, PT, PINF, PQUAD, parse_place("7"),
                  parse_place("t@13")):
            kappa = v.residue_field()
            squares = {(u * u).encoding if hasattr(u * u, "encoding")
                       else (u * u) for u in kappa.units()}
            for u in kappa.units():
                lifted = v.lift(u)
                expected = 1 if u.encoding in squares else -1
                assert residue_symbol(lifted, v) == expected


class TestLocalSquare:
    def test_spec_values(self):
        assert is_local_square(e("6"), P5)       # d = 6 at a ramified place
        assert not is_local_square(e("5"), P5)   # odd valuation
        assert is_local_square(e("-1"), P2)      # -1 = i^2 globally
        assert is_local_square(e("6"), P5BAR)
        assert not is_local_square(e("2"), P2)
        assert is_local_square(e("2i"), P2)      # 2i = (1+i)^2

    def test_squares_always_pass(self, rng):
        for _ in range(80):
            x = rand_gauss_elem(rng, 40, den_height=6)
            for v in (P5, P2, P3):
                assert is_local_square(x * x, v)
        for _ in range(40):
            x = rand_ff_elem(rng, 5, 3, with_den=True)
            for v in (PT, PINF):
                assert is_local_square(x * x, v)

    def test_odd_places_match_exhaustive_squares(self):
        for v in (P5, P3, PT, PINF, PQUAD):
            kappa = v.residue_field()
            squares = {(u * u).encoding for u in kappa.units()}
            for u in kappa.units():
                lifted = v.lift(u)
                assert is_local_square(lifted, v) \
                    == (u.encoding in squares)
            pi = v.uniformizer()
            for u in kappa.units():
                assert not is_local_square(v.lift(u) * pi, v)

    def test_dyadic_agrees_with_sqrt_lift_oracle(self, rng):
        # precision 2 v(2) + 3 = 7 per the oracle contract
        checked = 0
        while checked < 100:
            x = rand_gauss_elem(rng, 60, den_height=9)
            if P2.valuation(x) != 0:
                continue
            claim = is_local_square(x, P2)
            lift = hensel_sqrt_lift(x, P2, 7)
            assert claim == (lift is not None)
            if lift is not None:
                diff = make_elem(lift) * make_elem(lift) - x
                assert diff.is_zero() or P2.valuation(diff) >= 7
            checked += 1

    def test_residue_sqrt_consistency(self):
        r = residue_sqrt(e("6"), P5)
        assert r is not None and (r * r).encoding \
            == P5.reduce(e("6")).value.encoding


class TestPlacesDividing:
    def test_spec_values(self):
        # the canonical representative of the conjugate place over 5 is 1+2i
        assert [str(v) for v in places_dividing(e("10"))] \
            == ["1+i", "1+2i", "2+i"]
        assert places_dividing(e("1")) == ()
        assert [str(v) for v in places_dividing(e("6"))] == ["1+i", "3"]

    def test_cancelling_valuations_are_dropped(self):
        x = e("2-i") / e("5")   # = 1/(2+i): only the place 2+i remains
        assert [str(v) for v in places_dividing(x)] == ["2+i"]

    def test_ff_support(self):
        x = e("t^2+4t@5") / e("t+1@5")
        names = [str(v) for v in places_dividing(x)]
        assert names == ["t@5", "t+1@5", "t+4@5"]

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            places_dividing(e("0"))


class TestInfinitePlace:
    def test_uniformizer(self):
        pi = PINF.uniformizer()
        assert PINF.valuation(pi) == 1

    def test_reduce_leading_ratio(self):
        x = e("3t^2+1/t^2+t@5")
        assert PINF.valuation(x) == 0
        assert str(PINF.reduce(x)) == "3"

    def test_construction(self):
        assert infinite_place(GF(5)) == PINF
