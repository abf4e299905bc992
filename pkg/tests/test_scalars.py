import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from selfaffine.scalars import (
    DyadicPow,
    QuadExt,
    dyadic_exponent,
    exact_sign,
    format_scalar,
    parse_scalar,
    sqrt_exact,
    squarefree_decompose,
)

F = Fraction

rationals = st.fractions(
    min_value=-100, max_value=100, max_denominator=64
)


def ulps_apart(x: float, y: float) -> float:
    if x == y:
        return 0.0
    return abs(x - y) / math.ulp(max(abs(x), abs(y), 1e-300))


class TestQuadExt:
    @given(rationals, rationals, rationals, rationals)
    def test_field_ops_close(self, a, b, c, d):
        x = QuadExt(a, b, 2)
        y = QuadExt(c, d, 2)
        assert (x + y) - y == x
        assert x * y == y * x
        if y.sign() != 0:
            assert (x / y) * y == x

    @given(rationals, rationals)
    def test_float_shadow_tight(self, a, b):
        x = QuadExt(a, b, 5)
        # reference: 256-bit rational approximation of the exact value
        s5 = F(math.isqrt(5 << 512), 1 << 256)
        ref = float(a + b * s5)
        if ref != 0 and abs(ref) > 1e-12:
            assert ulps_apart(float(x), ref) <= 4

    def test_float_shadow_cancellation(self):
        # a ~ -b sqrt(2): naive evaluation loses most bits, the 128-bit
        # rational path must not
        b = F(10**12)
        a = -F(1414213562373095048801688724209698078, 10**24)  # ~ b*sqrt(2)
        x = QuadExt(-a, -b, 2)  # tiny positive residue
        v = float(x)
        assert v != 0.0
        assert exact_sign(x) == (1 if v > 0 else -1)

    def test_sign_cases(self):
        assert QuadExt(1, 1, 2).sign() == 1
        assert QuadExt(-1, -1, 2).sign() == -1
        assert QuadExt(2, -1, 2).sign() == 1  # 2 > sqrt(2)
        assert QuadExt(1, -1, 2).sign() == -1  # 1 < sqrt(2)
        assert QuadExt(-1, 1, 2).sign() == 1
        assert QuadExt(0, 0, 2).sign() == 0
        assert QuadExt(F(3, 2), F(-21, 20), 2).sign() == 1  # 3/2 vs 1.4849...
        assert (QuadExt(3, 0, 5) + QuadExt(0, 5, 5)) > 0

    def test_comparisons_exact(self):
        s2 = QuadExt(0, 1, 2)
        assert s2 > F(7, 5)
        assert s2 < F(3, 2)
        assert s2 < QuadExt(0, 1, 2) + F(1, 10**12)

    def test_division_conjugate(self):
        x = QuadExt(1, 1, 2)
        inv = QuadExt(1, 0, 2) / x
        assert inv == QuadExt(-1, 1, 2)  # 1/(1+s2) = s2 - 1

    def test_pow(self):
        x = QuadExt(2, 1, 2)  # 2 + s2
        assert x**2 == QuadExt(6, 4, 2)
        assert x**6 == QuadExt(792, 560, 2)
        assert x**0 == 1


class TestDyadicPow:
    def test_from_rational(self):
        assert DyadicPow.from_rational(F(1, 16)).exp == -4
        assert DyadicPow.from_rational(8).exp == 3
        assert DyadicPow.from_rational(F(-1, 2)) == F(-1, 2)
        assert DyadicPow.from_rational(F(3, 4)) is None

    def test_mul_and_power(self):
        x = DyadicPow(F(-11, 12))
        assert (x * x).exp == F(-11, 6)
        assert x.rational_power(2).exp == F(-11, 6)
        assert float(x) == pytest.approx(2.0 ** (-11 / 12))

    def test_compare_with_rational(self):
        x = DyadicPow(F(1, 2))  # sqrt(2)
        assert x > F(7, 5)
        assert x < F(3, 2)
        assert DyadicPow(F(-4, 3)) < F(1, 2)
        assert DyadicPow(F(-4, 3)) > F(1, 3)

    def test_sixfive_det_arithmetic(self):
        # |det(2^(-11/12) A)| = 2^(-11/6) * sqrt(2) = 2^(-4/3); ^(3/4) = 1/2
        scale = DyadicPow(F(-11, 12))
        det_scale = scale * scale
        det = det_scale * DyadicPow(F(1, 2))
        assert det.exp == F(-4, 3)
        term = det.rational_power(F(3, 4))
        assert term.as_fraction() == F(1, 2)


class TestSqrtExact:
    def test_rational_square(self):
        assert sqrt_exact(F(9, 4)) == F(3, 2)
        assert sqrt_exact(F(2)) is None
        assert sqrt_exact(F(2), d=2) == QuadExt(0, 1, 2)
        assert sqrt_exact(F(8), d=2) == QuadExt(0, 2, 2)

    def test_quadratic_square(self):
        # (1 + sqrt(5))^2 / 100 = (6 + 2 sqrt(5)) / 100
        x = QuadExt(F(6, 100), F(2, 100), 5)
        r = sqrt_exact(x)
        assert r == QuadExt(F(1, 10), F(1, 10), 5)
        assert sqrt_exact(QuadExt(1, 1, 2)) is None

    def test_squarefree_decompose(self):
        assert squarefree_decompose(1025) == (5, 41)  # 1025 = 5^2 * 41
        assert squarefree_decompose(18) == (3, 2)
        assert squarefree_decompose(49) == (7, 1)


class TestLiterals:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("1/2", F(1, 2)),
            ("-3/4", F(-3, 4)),
            ("5", F(5)),
            ("2^-11/12", DyadicPow(F(-11, 12))),
            ("-2^3", DyadicPow(3, -1)),
        ],
    )
    def test_roundtrip_rational_dyadic(self, text, value):
        assert parse_scalar(text) == value

    def test_quadratic_literals(self):
        assert parse_scalar("1-1√", 2) == QuadExt(1, -1, 2)
        assert parse_scalar("0+2√", 2) == QuadExt(0, 2, 2)
        assert parse_scalar("1/2+3/4√", 5) == QuadExt(F(1, 2), F(3, 4), 5)
        with pytest.raises(ValueError):
            parse_scalar("1+1√")  # no field

    def test_format_roundtrip(self):
        vals = [F(3), F(-7, 8), QuadExt(F(1, 2), F(-3, 4), 2), DyadicPow(F(5, 6)), 0.25]
        for v in vals:
            d = v.d if isinstance(v, QuadExt) else None
            assert parse_scalar(format_scalar(v), d) == v

    def test_rejects_garbage(self):
        for bad in ["", "abc", "1/0x", "√", "2^^3", True]:
            with pytest.raises(ValueError):
                parse_scalar(bad, 2)


def test_dyadic_exponent():
    assert dyadic_exponent(F(1, 16)) == -4
    assert dyadic_exponent(F(3, 4)) is None
    assert dyadic_exponent(QuadExt(0, 1, 2)) == F(1, 2)
    assert dyadic_exponent(QuadExt(0, -2, 2)) == F(3, 2)
    assert dyadic_exponent(QuadExt(1, 1, 2)) is None
    assert dyadic_exponent(DyadicPow(F(-4, 3))) == F(-4, 3)
