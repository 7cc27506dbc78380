import pytest

from quatcert import (
    GF,
    FqPoly,
    GaussInt,
    GrammarError,
    InputError,
    canonical_associate,
    factor,
    format_elem,
    gauss_elem,
    ff_elem,
    is_global_square,
    make_elem,
    parse_elem,
)
from quatcert.exact_arith import (
    gauss_mod,
    gauss_residues,
    gauss_sqrt,
    parse_gauss,
    poly_is_irreducible,
    poly_sqrt,
    prime_sort_key,
)

from conftest import rand_gauss, rand_poly


F5 = GF(5)


def poly(text):
    return parse_elem(text + "@5").num


class TestCanonicalAssociate:
    def test_unit_normalization(self):
        assert canonical_associate(GaussInt(-5)) == (GaussInt(-1), GaussInt(5))

    def test_imaginary(self):
        assert canonical_associate(GaussInt(0, 2)) == (GaussInt(0, 1),
                                                       GaussInt(2))

    def test_dyadic_class(self):
        assert canonical_associate(GaussInt(-1, -1)) == (GaussInt(-1),
                                                         GaussInt(1, 1))

    def test_monic(self):
        p = poly("3t^2+1")
        unit, canon = canonical_associate(p)
        assert canon.is_monic()
        assert canon * unit == p

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            canonical_associate(GaussInt(0))

    def test_idempotent_and_class_constant(self, rng):
        units = [GaussInt(1), GaussInt(-1), GaussInt(0, 1), GaussInt(0, -1)]
        for _ in range(200):
            x = rand_gauss(rng, 50)
            _, canon = canonical_associate(x)
            assert canonical_associate(canon) == (GaussInt(1), canon)
            for u in units:
                assert canonical_associate(x * u)[1] == canon
        for _ in range(100):
            x = rand_poly(rng, F5, 6)
            _, canon = canonical_associate(x)
            for c in range(1, 5):
                scaled = x * FqPoly.constant(F5, c)
                assert canonical_associate(scaled)[1] == canon


class TestFactor:
    # the oracle for every factorization is exact multiply-back

    def _roundtrip(self, x):
        f = factor(x)
        assert f.value() == x
        for p, e in f.factors:
            assert e > 0
            if isinstance(p, GaussInt):
                assert canonical_associate(p) == (GaussInt(1), p)
            else:
                assert p.is_monic()
        keys = [prime_sort_key(p) for p, _ in f.factors]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        return f

    def test_split_five(self):
        f = self._roundtrip(GaussInt(5))
        assert [(str(p), e) for p, e in f.factors] == [("1+2i", 1),
                                                       ("2+i", 1)]

    def test_two_is_ramified(self):
        f = self._roundtrip(GaussInt(2))
        assert f.unit == GaussInt(0, -1)
        assert [(str(p), e) for p, e in f.factors] == [("1+i", 2)]

    def test_six(self):
        f = self._roundtrip(GaussInt(6))
        assert f.unit == GaussInt(0, -1)
        assert [(str(p), e) for p, e in f.factors] == [("1+i", 2), ("3", 1)]

    def test_random_multiply_back(self, rng):
        # 500 random inputs across both rings, heights up to 10^4
        for _ in range(340):
            self._roundtrip(rand_gauss(rng, 10_000))
        for _ in range(160):
            self._roundtrip(rand_poly(rng, F5, 9))
        for _ in range(40):
            self._roundtrip(rand_poly(rng, GF(13), 5))
        for _ in range(20):
            self._roundtrip(rand_poly(rng, GF(9), 4))

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            factor(GaussInt(0))
        with pytest.raises(InputError):
            factor(FqPoly(F5, ()))


class TestGlobalSquare:
    def test_minus_one_is_square(self):
        assert is_global_square(gauss_elem(-1))  # -1 = i^2

    def test_six_is_not(self):
        assert not is_global_square(gauss_elem(6))  # inert 3 has exponent 1

    def test_two_i_is_square(self):
        assert is_global_square(gauss_elem(0, 2))  # 2i = (1+i)^2

    def test_ff_constants(self):
        assert is_global_square(ff_elem(5, [4]))
        assert not is_global_square(ff_elem(5, [2]))
        assert is_global_square(ff_elem(5, [0, 0, 1]))

    def test_square_and_prime_times_square(self, rng):
        primes = [GaussInt(1, 1), GaussInt(2, 1), GaussInt(3),
                  GaussInt(1, 2)]
        for _ in range(60):
            x = make_elem(rand_gauss(rng, 40), GaussInt(rng.randint(1, 9)))
            assert is_global_square(x * x)
            for p in primes:
                assert not is_global_square(x * x * make_elem(p))
        ppoly = [poly("t"), poly("t+1"), poly("t^2+2")]
        for _ in range(40):
            x = make_elem(rand_poly(rng, F5, 4), rand_poly(rng, F5, 2))
            assert is_global_square(x * x)
            for p in ppoly:
                assert not is_global_square(x * x * make_elem(p))

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            is_global_square(gauss_elem(0))


class TestGrammar:
    @pytest.mark.parametrize("text", [
        "-6+8i", "5/2", "2-i", "1+i", "i", "-i", "8i", "0", "-50",
        "2+5i/13", "1+2i",
        "2t^2+3t+4@5", "t@5", "4@5", "t^2+t+1@5", "1/t@5",
        "t^3+2t/t+1@5", "7@9",
    ])
    def test_roundtrip(self, text):
        e = parse_elem(text)
        assert parse_elem(format_elem(e)) == e

    @pytest.mark.parametrize("text", [
        "6+i i", "", "abc", "5/0", "2t+1", "t^2@x", "--4", "i5",
        "1+1i2", "@5", "6+i+", "t^@5",
    ])
    def test_rejected(self, text):
        with pytest.raises(GrammarError):
            parse_elem(text)

    def test_negative_ff_coefficients_normalize(self):
        assert parse_elem("2t^2-2t+4@5") == parse_elem("2t^2+3t+4@5")

    def test_gauss_atoms(self):
        assert parse_gauss("2-i") == GaussInt(2, -1)
        assert parse_gauss("-i") == GaussInt(0, -1)

    def test_canonical_fraction_reduction(self):
        # 3/(2+i) has least positive rational denominator 5
        e = parse_elem("3") / parse_elem("2+i")
        assert e.num == GaussInt(6, -3) and e.den == GaussInt(5)
        # function-field denominators are monic
        f = parse_elem("t@5") / parse_elem("2t+2@5")
        assert f.den.is_monic()


class TestRingHelpers:
    def test_gauss_sqrt(self):
        assert gauss_sqrt(GaussInt(0, 2)) == GaussInt(1, 1)
        assert gauss_sqrt(GaussInt(-9)) == GaussInt(0, 3)
        assert gauss_sqrt(GaussInt(3)) is None

    def test_gauss_sqrt_random(self, rng):
        for _ in range(100):
            z = rand_gauss(rng, 50)
            r = gauss_sqrt(z * z)
            assert r is not None and r * r == z * z

    def test_poly_sqrt(self, rng):
        for _ in range(60):
            p = rand_poly(rng, F5, 4)
            r = poly_sqrt(p * p)
            assert r is not None and r * r == p * p
        assert poly_sqrt(poly("t")) is None
        assert poly_sqrt(poly("2t^2")) is None  # 2 is not a square in F_5

    def test_poly_irreducibility(self):
        assert poly_is_irreducible(poly("t^2+t+1"))
        assert not poly_is_irreducible(poly("t^2+1"))  # splits: -1 = 2^2

    def test_residue_systems(self):
        m = GaussInt(1, 1) ** 5
        residues = gauss_residues(m)
        assert len(residues) == 32 == len(set(residues))
        z = GaussInt(7, 3)
        assert gauss_mod(z, m) == gauss_mod(z + m * GaussInt(2, -5), m)
