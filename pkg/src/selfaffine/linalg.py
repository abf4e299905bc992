"""Exact-and-float 2x2 linear algebra and projective-line geometry.

Singular values are always computed in float through a numerically stable
closed form; exact arithmetic is reserved for determinants, traces,
eigenvalue discriminants, norm-squares in Q(sqrt(d)), and all projective
membership tests used by certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .scalars import (
    QuadExt,
    Scalar,
    exact_abs,
    exact_sign,
    is_exact,
    sqrt_exact,
    squarefree_decompose,
    to_float,
)


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class Mat2:
    """2x2 invertible matrix [[a, b], [c, d]] over exact scalars or floats."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        if exact_sign(self.det()) == 0:
            raise SingularMatrixError(f"singular matrix {self!r}")

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @staticmethod
    def diag(x, y) -> "Mat2":
        return Mat2(x, Fraction(0), Fraction(0), y)

    @staticmethod
    def antidiag(x, y) -> "Mat2":
        """[[0, x], [y, 0]]."""
        return Mat2(Fraction(0), x, y, Fraction(0))

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Scalar:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def matvec(self, v: Sequence[Scalar]) -> tuple[Scalar, Scalar]:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def inverse(self) -> "Mat2":
        dt = self.det()
        return Mat2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def scaled(self, r: Scalar) -> "Mat2":
        return Mat2(r * self.a, r * self.b, r * self.c, r * self.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def entries(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def to_floats(self) -> tuple[float, float, float, float]:
        return (to_float(self.a), to_float(self.b), to_float(self.c), to_float(self.d))

    def is_exact(self) -> bool:
        return all(is_exact(x) for x in self.entries())

    def is_diagonal(self) -> bool:
        return exact_sign(self.b) == 0 and exact_sign(self.c) == 0

    def is_antidiagonal(self) -> bool:
        return exact_sign(self.a) == 0 and exact_sign(self.d) == 0

    def is_similarity(self) -> bool:
        """Exact test for A^T A proportional to the identity."""
        g11 = self.a * self.a + self.c * self.c
        g22 = self.b * self.b + self.d * self.d
        g12 = self.a * self.b + self.c * self.d
        return exact_sign(g11 - g22) == 0 and exact_sign(g12) == 0

    def is_scalar_multiple_of_identity(self) -> bool:
        return (
            exact_sign(self.b) == 0
            and exact_sign(self.c) == 0
            and exact_sign(self.a - self.d) == 0
        )

    def norm_squared_exact(self) -> Optional[Scalar]:
        """Largest eigenvalue of A^T A, exact when its square root stays in
        the base field (or, for rational matrices, in the quadratic
        extension by the discriminant's squarefree part); None otherwise."""
        g11 = self.a * self.a + self.c * self.c
        g22 = self.b * self.b + self.d * self.d
        tr = g11 + g22
        disc = tr * tr - 4 * (self.det() * self.det())
        root = _eigen_sqrt(disc, self._field_d())
        if root is None:
            return None
        return (tr + root) / 2

    def _field_d(self) -> Optional[int]:
        for x in self.entries():
            if isinstance(x, QuadExt):
                return x.d
        return None

    def singular_values(self) -> tuple[float, float]:
        """(alpha1, alpha2) in float via the stable 2x2 closed form.

        alpha2 is recovered from |det|/alpha1 so alpha1*alpha2 = |det| holds
        to rounding even for highly eccentric matrices.
        """
        a, b, c, d = self.to_floats()
        e, f = (a + d) / 2.0, (a - d) / 2.0
        g, h = (c + b) / 2.0, (c - b) / 2.0
        q, r = math.hypot(e, h), math.hypot(f, g)
        s1 = q + r
        if s1 == 0.0:
            raise SingularMatrixError("zero matrix")
        s2 = abs(a * d - b * c) / s1
        return s1, s2

    def norm(self) -> float:
        return self.singular_values()[0]


def singular_values(m: Mat2) -> tuple[float, float]:
    """Singular values alpha1 >= alpha2 > 0 of an invertible matrix."""
    return m.singular_values()


def svf(m: Mat2, s) -> float:
    """Singular value function: alpha1**s, alpha1*alpha2**(s-1), |det|**(s/2)
    on s in [0,1), [1,2), [2,inf) respectively."""
    s = float(s)
    if s < 0:
        raise ValueError("svf exponent must be nonnegative")
    a1, a2 = m.singular_values()
    if s < 1.0:
        return a1**s
    if s < 2.0:
        return a1 * a2 ** (s - 1.0)
    return abs(to_float(m.det())) ** (s / 2.0)


def svf_from_pair(a1: float, a2: float, s: float) -> float:
    if s < 0:
        raise ValueError("svf exponent must be nonnegative")
    if s < 1.0:
        return a1**s
    if s < 2.0:
        return a1 * a2 ** (s - 1.0)
    return (a1 * a2) ** (s / 2.0)


@dataclass(frozen=True)
class Hyperbolicity:
    """Eigenvalue classification of an invertible 2x2 matrix."""

    kind: str  # "hyperbolic" | "elliptic" | "parabolic-or-equal-moduli"
    eigenvalues: Optional[tuple[Scalar, Scalar]] = None  # |l1| > |l2| if hyperbolic
    eigenvectors: Optional[tuple["ProjPoint", "ProjPoint"]] = None
    exact: bool = False

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


def _eigen_sqrt(disc: Scalar, field_d: Optional[int]):
    """Exact sqrt of a positive discriminant if attainable: within the field,
    or over Q by adjoining the squarefree part."""
    root = sqrt_exact(disc, field_d)
    if root is not None:
        return root
    f = None
    if isinstance(disc, (int, Fraction)):
        f = Fraction(disc)
    elif isinstance(disc, QuadExt) and disc.b == 0:
        f = disc.a
    if f is not None and f > 0:
        n = f.numerator * f.denominator
        s, m = squarefree_decompose(n)
        if m > 1:
            return QuadExt(0, Fraction(s, f.denominator), m)
    return None


def is_hyperbolic(m: Mat2) -> Hyperbolicity:
    """Classify eigenvalues: hyperbolic means two real eigenvalues of
    distinct moduli. Exact whenever the discriminant has an exact root."""
    if not m.is_exact():
        return _is_hyperbolic_float(m)
    tr = m.trace()
    dt = m.det()
    disc = tr * tr - 4 * dt
    sd = exact_sign(disc)
    if sd < 0:
        return Hyperbolicity("elliptic", exact=True)
    if sd == 0 or exact_sign(tr) == 0:
        # equal eigenvalues, or a real pair +-sqrt(-det) of equal moduli
        return Hyperbolicity("parabolic-or-equal-moduli", exact=True)
    root = _eigen_sqrt(disc, m._field_d())
    if root is None:
        return _is_hyperbolic_float(m, exact_kind=True)
    l1 = (tr + root) / 2
    l2 = (tr - root) / 2
    if exact_sign(exact_abs(l1) - exact_abs(l2)) < 0:
        l1, l2 = l2, l1
    vecs = (_eigvec(m, l1), _eigvec(m, l2))
    return Hyperbolicity("hyperbolic", (l1, l2), vecs, exact=True)


def _is_hyperbolic_float(m: Mat2, exact_kind: bool = False) -> Hyperbolicity:
    a, b, c, d = m.to_floats()
    tr, dt = a + d, a * d - b * c
    disc = tr * tr - 4 * dt
    if disc < 0:
        return Hyperbolicity("elliptic", exact=False)
    if disc == 0 or tr == 0:
        return Hyperbolicity("parabolic-or-equal-moduli", exact=False)
    root = math.sqrt(disc)
    l1, l2 = (tr + root) / 2, (tr - root) / 2
    if abs(l1) < abs(l2):
        l1, l2 = l2, l1
    fm = Mat2(a, b, c, d)
    return Hyperbolicity(
        "hyperbolic", (l1, l2), (_eigvec(fm, l1), _eigvec(fm, l2)), exact=False
    )


def _eigvec(m: Mat2, lam: Scalar) -> "ProjPoint":
    # kernel direction of (A - lam I); rows are (a-lam, b) and (c, d-lam)
    v1 = (m.b, lam - m.a)
    if exact_sign(v1[0]) == 0 and exact_sign(v1[1]) == 0:
        v1 = (lam - m.d, m.c)
    if exact_sign(v1[0]) == 0 and exact_sign(v1[1]) == 0:
        # scalar matrix: every direction works
        v1 = (Fraction(1), Fraction(0))
    return ProjPoint(v1[0], v1[1])


class ProjPoint:
    """Point of the real projective line: a direction up to sign and scale.

    Canonical representative: first nonzero coordinate positive; exact
    coordinates are additionally rescaled so that coordinate to be 1.
    """

    __slots__ = ("x", "y")

    def __init__(self, x: Scalar, y: Scalar):
        sx, sy = exact_sign(x), exact_sign(y)
        if sx == 0 and sy == 0:
            raise ValueError("zero vector does not define a projective point")
        if sx < 0 or (sx == 0 and sy < 0):
            x, y = -x, -y
            sx, sy = -sx, -sy
        if is_exact(x) and is_exact(y):
            if sx != 0:
                x, y = Fraction(1), _exact_div(y, x)
            else:
                x, y = Fraction(0), Fraction(1)
        self.x = x
        self.y = y

    def is_exact(self) -> bool:
        return is_exact(self.x) and is_exact(self.y)

    def cross(self, other: "ProjPoint") -> Scalar:
        return self.x * other.y - self.y * other.x

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.is_exact() and other.is_exact():
            return exact_sign(self.cross(other)) == 0
        return self.angle() == other.angle()

    def __hash__(self):
        if self.is_exact():
            return hash((self.x, self.y))
        return hash(self.angle())

    def angle(self) -> float:
        """Representative angle in [0, pi)."""
        a = math.atan2(to_float(self.y), to_float(self.x)) % math.pi
        if a >= math.pi:  # guard against rounding at the seam
            a -= math.pi
        return a

    def vector(self) -> tuple[float, float]:
        return (to_float(self.x), to_float(self.y))

    def apply(self, m: Mat2) -> "ProjPoint":
        vx, vy = m.matvec((self.x, self.y))
        return ProjPoint(vx, vy)

    def __repr__(self):
        return f"ProjPoint({self.x}, {self.y})"


def _exact_div(y, x):
    if isinstance(y, int):
        y = Fraction(y)
    if isinstance(x, int):
        x = Fraction(x)
    return y / x


def proj_distance(u: ProjPoint, v: ProjPoint) -> float:
    """Sine of the angle between two lines: |u ^ v| / (|u| |v|), in [0, 1]."""
    ux, uy = u.vector()
    vx, vy = v.vector()
    num = abs(ux * vy - uy * vx)
    den = math.hypot(ux, uy) * math.hypot(vx, vy)
    val = num / den
    return min(val, 1.0)


def _cyclic_sign(a: ProjPoint, b: ProjPoint, c: ProjPoint) -> int:
    """Orientation of an ordered triple on RP^1.

    sign(cross(a,b) * cross(b,c) * cross(c,a)) is invariant under flipping
    the sign of any representative vector, hence well-defined projectively.
    Zero iff two of the points coincide.
    """
    if a.is_exact() and b.is_exact() and c.is_exact():
        return exact_sign(a.cross(b)) * exact_sign(b.cross(c)) * exact_sign(c.cross(a))
    va, vb, vc = a.vector(), b.vector(), c.vector()

    def cr(p, q):
        return p[0] * q[1] - p[1] * q[0]

    val = cr(va, vb) * cr(vb, vc) * cr(vc, va)
    return (val > 0) - (val < 0)


class ProjInterval:
    """Proper arc of RP^1 given by two endpoints plus an interior witness.

    The witness picks one of the two arcs between the endpoints, removing
    the orientation ambiguity. `closed` controls endpoint membership.
    """

    __slots__ = ("p", "q", "w", "closed")

    def __init__(self, p: ProjPoint, q: ProjPoint, witness: ProjPoint, closed: bool = True):
        if p == q:
            raise ValueError("arc endpoints must be distinct")
        if witness == p or witness == q:
            raise ValueError("witness must lie strictly between the endpoints")
        self.p = p
        self.q = q
        self.w = witness
        self.closed = closed

    @staticmethod
    def from_angles(theta1: float, theta2: float, closed: bool = True) -> "ProjInterval":
        """Arc swept from theta1 to theta2 counterclockwise (angles mod pi)."""
        t1 = theta1 % math.pi
        t2 = theta2 % math.pi
        span = (t2 - t1) % math.pi
        if span == 0:
            raise ValueError("empty or full arc")
        tm = t1 + span / 2.0
        mk = lambda t: ProjPoint(math.cos(t), math.sin(t))
        return ProjInterval(mk(t1), mk(t2), mk(tm), closed)

    def is_exact(self) -> bool:
        return self.p.is_exact() and self.q.is_exact() and self.w.is_exact()

    def contains(self, x: ProjPoint, closed: Optional[bool] = None) -> bool:
        if closed is None:
            closed = self.closed
        if x == self.p or x == self.q:
            return closed
        return _cyclic_sign(self.p, x, self.q) == _cyclic_sign(self.p, self.w, self.q)

    def contains_strict(self, x: ProjPoint) -> bool:
        return self.contains(x, closed=False)

    def apply(self, m: Mat2) -> "ProjInterval":
        """Image arc: a projective map is a circle homeomorphism, so the arc
        through the witness maps to the arc through the witness image."""
        return ProjInterval(self.p.apply(m), self.q.apply(m), self.w.apply(m), self.closed)

    def angles(self) -> tuple[float, float]:
        """(theta_start, ccw_span) with the arc = [start, start+span] mod pi."""
        tp, tq, tw = self.p.angle(), self.q.angle(), self.w.angle()
        span_pq = (tq - tp) % math.pi
        w_off = (tw - tp) % math.pi
        if 0 < w_off < span_pq:
            return tp, span_pq
        return tq, (tp - tq) % math.pi

    def midpoint(self) -> ProjPoint:
        return self.w

    def component_basis(self) -> tuple[tuple[Scalar, Scalar], tuple[Scalar, Scalar]]:
        """Vector representatives (v1, v2) of the endpoints whose nonnegative
        span is the cone component containing the witness representative."""
        v1 = (self.p.x, self.p.y)
        v2 = (self.q.x, self.q.y)
        w = (self.w.x, self.w.y)
        al, be = _solve2(v1, v2, w)
        if exact_sign(al) < 0:
            v1 = (-v1[0], -v1[1])
        if exact_sign(be) < 0:
            v2 = (-v2[0], -v2[1])
        return v1, v2

    def __repr__(self):
        k = "closed" if self.closed else "open"
        return f"ProjInterval({self.p}, {self.q}, w={self.w}, {k})"


def _solve2(v1, v2, w):
    """Coefficients (al, be) with w = al*v1 + be*v2 (v1, v2 independent)."""
    det = v1[0] * v2[1] - v1[1] * v2[0]
    if exact_sign(det) == 0:
        raise ValueError("degenerate basis")
    al = (w[0] * v2[1] - w[1] * v2[0]) / det
    be = (v1[0] * w[1] - v1[1] * w[0]) / det
    return al, be


def interval_image(m: Mat2, k: ProjInterval) -> ProjInterval:
    return k.apply(m)


def strictly_inside(m: Mat2, k: ProjInterval) -> bool:
    """True iff the closure of A(K) lies in the interior of K.

    Equivalent test: both image endpoints are interior to K and neither
    boundary point of K lies on the closed image arc (a connected arc that
    escaped the interior would have to cross the boundary).
    """
    img = k.apply(m)
    if not (k.contains_strict(img.p) and k.contains_strict(img.q)):
        return False
    if img.contains(k.p, closed=True) or img.contains(k.q, closed=True):
        return False
    return True


def maps_arc_into(m: Mat2, k: ProjInterval) -> bool:
    """Non-strict invariance: A(K) subset of K, endpoints allowed to touch."""
    img = k.apply(m)
    if not (k.contains(img.p, closed=True) and k.contains(img.q, closed=True)):
        return False
    # reject wrap-around: the image may touch the boundary but must not
    # properly contain either boundary point in its interior
    if img.contains(k.p, closed=False) or img.contains(k.q, closed=False):
        return False
    return True


def preserves_component(m: Mat2, k: ProjInterval) -> Optional[bool]:
    """For A with A(K) inside K: True if A maps the witness component of the
    cone over K into itself, False if it swaps the two components, None if
    the image witness escapes the cone (no invariance)."""
    v1, v2 = k.component_basis()
    w = (k.w.x, k.w.y)
    iw = m.matvec(w)
    al, be = _solve2(v1, v2, iw)
    sa, sb = exact_sign(al), exact_sign(be)
    if sa >= 0 and sb >= 0 and (sa or sb):
        return True
    if sa <= 0 and sb <= 0 and (sa or sb):
        return False
    return None
