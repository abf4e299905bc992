"""Exact scalar arithmetic underlying all matrix entries.

Three exact representations coexist with plain floats:

* ``fractions.Fraction`` for rationals,
* :class:`QuadExt` for elements ``a + b*sqrt(d)`` of a real quadratic field
  (one squarefree ``d`` per system),
* :class:`DyadicPow` for signed exact powers ``+-2**(p/q)`` (closed under
  multiplication only; used for scale factors and determinant arithmetic).

Every exact value has a float shadow (``to_float``) that is accurate to a few
ulps away from catastrophic cancellation; ``QuadExt`` converts through a
128-bit rational approximation of ``sqrt(d)`` so the shadow stays tight even
for mildly cancelling combinations.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Optional, Union

_SQRT_BITS = 128


def _sqrt_fraction_approx(d: int, bits: int = _SQRT_BITS) -> Fraction:
    """Rational approximation of sqrt(d) with absolute error < 2**-bits."""
    return Fraction(math.isqrt(d << (2 * bits)), 1 << bits)


_SQRT_CACHE: dict[int, Fraction] = {}


def _sqrt_approx_cached(d: int) -> Fraction:
    val = _SQRT_CACHE.get(d)
    if val is None:
        val = _sqrt_fraction_approx(d)
        _SQRT_CACHE[d] = val
    return val


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s*s*m with m squarefree (trial division up to 10**6).

    If a large unfactored cofactor remains it is kept in m, which is then
    only "squarefree as far as we could check"; fine for the small rational
    inputs this library targets.
    """
    if n <= 0:
        raise ValueError("need a positive integer")
    s, m = 1, 1
    p = 2
    while p * p <= n and p < 10**6:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            s *= p ** (k // 2)
            if k % 2:
                m *= p
        p += 1 if p == 2 else 2
    if n > 1:
        r = math.isqrt(n)
        if r * r == n:
            s *= r
        else:
            m *= n
    return s, m


class QuadExt:
    """Exact element a + b*sqrt(d) of Q(sqrt(d)), d > 1 squarefree."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)
        if self.d <= 1:
            raise ValueError("field discriminant must be an integer > 1")

    def _coerce(self, other) -> Optional["QuadExt"]:
        if isinstance(other, QuadExt):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError("mixed quadratic fields")
            d = self.d if self.b != 0 or other.b == 0 else other.d
            return QuadExt(other.a, other.b, d)
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.d)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(o.a - self.a, o.b - self.b, self.d)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        nrm = o.a * o.a - o.b * o.b * o.d
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        num = self * o.conjugate()
        return QuadExt(num.a / nrm, num.b / nrm, self.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (QuadExt(1, 0, self.d) / self) ** (-k)
        out = QuadExt(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order and equality -------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a**2 with b**2 * d
        t = a * a - b * b * self.d
        st = (t > 0) - (t < 0)
        return st if a > 0 else -st

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            if self.d != other.d:
                return self.b == 0 and other.b == 0 and self.a == other.a
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadExt with {type(other)!r}")
        return (self - o).sign()

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        return self._cmp(other) < 0

    def __le__(self, other):
        if isinstance(other, float):
            return float(self) <= other
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if isinstance(other, float):
            return float(self) > other
        return self._cmp(other) > 0

    def __ge__(self, other):
        if isinstance(other, float):
            return float(self) >= other
        return self._cmp(other) >= 0

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    def __float__(self) -> float:
        approx = self.a + self.b * _sqrt_approx_cached(self.d)
        return float(approx)

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, d={self.d})"


class DyadicPow:
    """Signed exact dyadic power sign * 2**exp with rational exponent.

    Closed under multiplication, division and rational powers of the
    positive part; there is deliberately no addition.
    """

    __slots__ = ("sign", "exp")

    def __init__(self, exp, sign: int = 1):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.exp = Fraction(exp)
        self.sign = sign

    @staticmethod
    def from_rational(q) -> Optional["DyadicPow"]:
        """Return q as a signed dyadic power, or None if q is not one."""
        q = Fraction(q)
        if q == 0:
            return None
        sign = 1 if q > 0 else -1
        q = abs(q)
        num, den = q.numerator, q.denominator
        if num & (num - 1) or den & (den - 1):
            return None
        return DyadicPow(num.bit_length() - den.bit_length(), sign)

    def __mul__(self, other):
        if isinstance(other, DyadicPow):
            return DyadicPow(self.exp + other.exp, self.sign * other.sign)
        if isinstance(other, (int, Fraction)):
            o = DyadicPow.from_rational(other)
            if o is None:
                return float(self) * float(Fraction(other))
            return self * o
        if isinstance(other, float):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DyadicPow):
            return DyadicPow(self.exp - other.exp, self.sign * other.sign)
        return NotImplemented

    def __neg__(self):
        return DyadicPow(self.exp, -self.sign)

    def __abs__(self):
        return DyadicPow(self.exp, 1)

    def rational_power(self, r) -> "DyadicPow":
        if self.sign < 0:
            raise ValueError("rational power of a negative dyadic")
        return DyadicPow(self.exp * Fraction(r), 1)

    def as_fraction(self) -> Optional[Fraction]:
        if self.exp.denominator != 1:
            return None
        e = self.exp.numerator
        mag = Fraction(1 << e) if e >= 0 else Fraction(1, 1 << (-e))
        return self.sign * mag

    def __eq__(self, other):
        if isinstance(other, DyadicPow):
            return self.sign == other.sign and self.exp == other.exp
        if isinstance(other, (int, Fraction)):
            f = self.as_fraction()
            return f is not None and f == other
        return NotImplemented

    def __hash__(self):
        f = self.as_fraction()
        if f is not None:
            return hash(f)
        return hash(("dyadic", self.sign, self.exp))

    def _cmp(self, other) -> int:
        # exact: sign*2**(s/t) vs p/q  <=>  2**s vs (p/q)**t on the same side
        if isinstance(other, DyadicPow):
            if self.sign != other.sign:
                return self.sign
            c = (self.exp > other.exp) - (self.exp < other.exp)
            return c * self.sign
        q = Fraction(other)
        if q == 0:
            return self.sign
        if self.sign != (1 if q > 0 else -1):
            return self.sign
        t = self.exp.denominator
        lhs = Fraction(2) ** self.exp.numerator
        rhs = abs(q) ** t
        c = (lhs > rhs) - (lhs < rhs)
        return c * self.sign

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        return self._cmp(other) < 0

    def __le__(self, other):
        if isinstance(other, float):
            return float(self) <= other
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if isinstance(other, float):
            return float(self) > other
        return self._cmp(other) > 0

    def __ge__(self, other):
        if isinstance(other, float):
            return float(self) >= other
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        return self.sign * math.pow(2.0, float(self.exp))

    def __repr__(self):
        s = "-" if self.sign < 0 else ""
        return f"DyadicPow({s}2^{self.exp})"


Scalar = Union[int, Fraction, QuadExt, DyadicPow, float]


def to_float(x: Scalar) -> float:
    return float(x)


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction, QuadExt, DyadicPow))


def exact_sign(x: Scalar) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    if isinstance(x, DyadicPow):
        return x.sign
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return (x > 0) - (x < 0)


def exact_abs(x: Scalar):
    return -x if exact_sign(x) < 0 else x


def as_fraction(x: Scalar) -> Optional[Fraction]:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, QuadExt) and x.b == 0:
        return x.a
    if isinstance(x, DyadicPow):
        return x.as_fraction()
    return None


def sqrt_exact(x: Scalar, d: Optional[int] = None):
    """Exact square root of x within Q or Q(sqrt(d)), or None.

    For a rational q: sqrt(q) is either rational or of the form y*sqrt(d).
    For a proper QuadExt a + b*sqrt(d): sqrt exists in the same field iff
    a**2 - b**2*d is the square of a rational and the induced x**2 candidate
    is a rational square.
    """
    f = as_fraction(x)
    if f is not None:
        if f < 0:
            return None
        if f == 0:
            return Fraction(0)
        rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return Fraction(rn, rd)
        if d is not None:
            g = f / d
            rn, rd = math.isqrt(g.numerator), math.isqrt(g.denominator)
            if rn * rn == g.numerator and rd * rd == g.denominator:
                return QuadExt(0, Fraction(rn, rd), d)
        return None
    if isinstance(x, QuadExt):
        if x.sign() < 0:
            return None
        if x.b == 0:
            return sqrt_exact(x.a, x.d)
        n = x.a * x.a - x.b * x.b * x.d
        if n < 0:
            return None
        sn = sqrt_exact(n)
        if not isinstance(sn, Fraction):
            return None
        for t in ((x.a + sn) / 2, (x.a - sn) / 2):
            if t <= 0:
                continue
            st = sqrt_exact(t)
            if isinstance(st, Fraction) and st != 0:
                y = x.b / (2 * st)
                cand = QuadExt(st, y, x.d)
                if cand.sign() < 0:
                    cand = -cand
                if cand * cand == x:
                    return cand
        return None
    return None


def dyadic_exponent(x: Scalar) -> Optional[Fraction]:
    """log2 |x| as an exact Fraction when |x| is an exact power of two.

    Recognizes rationals 2**k and quadratic elements b*sqrt(2) with |b| a
    power of two (|x| = 2**(k + 1/2)); returns None otherwise.
    """
    if isinstance(x, DyadicPow):
        return x.exp
    f = as_fraction(x)
    if f is not None:
        dp = DyadicPow.from_rational(f)
        return None if dp is None else dp.exp
    if isinstance(x, QuadExt) and x.a == 0 and x.d == 2:
        dp = DyadicPow.from_rational(x.b)
        return None if dp is None else dp.exp + Fraction(1, 2)
    return None


def scalar_mul(x: Scalar, y: Scalar) -> Scalar:
    """Product that stays exact whenever the representations permit."""
    if isinstance(x, DyadicPow) or isinstance(y, DyadicPow):
        if isinstance(x, DyadicPow):
            return x * y
        return y * x
    if isinstance(x, float) or isinstance(y, float):
        return to_float(x) * to_float(y)
    return x * y


# -- literal parsing / formatting (the JSON scalar grammar) -----------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_RE_RATIONAL = re.compile(rf"^({_RAT})$")
_RE_QUAD = re.compile(rf"^({_RAT})\s*([+-]\s*\d+(?:/\d+)?)(?:√|v)$")
_RE_QUAD_PURE = re.compile(rf"^({_RAT})(?:√|v)$")
_RE_DYADIC = re.compile(r"^(-?)2\^(-?\d+(?:/\d+)?)$")


def parse_scalar(text, d: Optional[int] = None) -> Scalar:
    """Parse a scalar literal: number, "p/q", "a/b+c/e√", "c/e√", "2^p/q".

    An ASCII "v" is accepted in place of the radical sign. Quadratic
    literals require the field discriminant d.
    """
    if isinstance(text, bool):
        raise ValueError("boolean is not a scalar literal")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return text
    if not isinstance(text, str):
        raise ValueError(f"unsupported scalar literal: {text!r}")
    s = text.strip().replace(" ", "")
    m = _RE_RATIONAL.match(s)
    if m:
        return Fraction(s)
    m = _RE_DYADIC.match(s)
    if m:
        return DyadicPow(Fraction(m.group(2)), -1 if m.group(1) else 1)
    m = _RE_QUAD.match(s)
    if m:
        if d is None:
            raise ValueError(f"quadratic literal {text!r} without a field_d")
        return QuadExt(Fraction(m.group(1)), Fraction(m.group(2)), d)
    m = _RE_QUAD_PURE.match(s)
    if m:
        if d is None:
            raise ValueError(f"quadratic literal {text!r} without a field_d")
        return QuadExt(0, Fraction(m.group(1)), d)
    raise ValueError(f"unsupported scalar literal: {text!r}")


def format_scalar(x: Scalar):
    """Canonical JSON form: exact values as strings, floats as numbers."""
    if isinstance(x, float):
        return x
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return _fmt_fraction(x)
    if isinstance(x, QuadExt):
        if x.b == 0:
            return _fmt_fraction(x.a)
        bs = _fmt_fraction(abs(x.b))
        sign = "+" if x.b > 0 else "-"
        return f"{_fmt_fraction(x.a)}{sign}{bs}√"
    if isinstance(x, DyadicPow):
        f = x.as_fraction()
        if f is not None:
            return _fmt_fraction(f)
        s = "-" if x.sign < 0 else ""
        return f"{s}2^{x.exp}"
    raise ValueError(f"cannot serialize scalar {x!r}")


def _fmt_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
