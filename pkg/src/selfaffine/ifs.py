"""IFS data model: affine maps, word algebra, coding map, covers, JSON I/O.

Two composition orders coexist and are never mixed:

* products of linear parts follow ``matrix_of_word(w) = A_{w_n} ... A_{w_1}``
  (last symbol applied last), and ``compose_word`` builds the matching
  affine composite ``T_{w_n} o ... o T_{w_1}``;
* the coding map composes forward, ``coding_point(w) = T_{w_1} o ... o
  T_{w_n}(0)``.

All sums over complete word sets are order-insensitive, so dimension
results do not depend on the convention; the two entry points are kept
separate precisely so that no caller ever has to guess.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .linalg import Mat2
from .scalars import (
    DyadicPow,
    Scalar,
    as_fraction,
    dyadic_exponent,
    exact_sign,
    format_scalar,
    is_exact,
    parse_scalar,
    scalar_mul,
    to_float,
)

Word = tuple[int, ...]


class IFSError(ValueError):
    pass


class ParseError(IFSError):
    pass


class NotContractiveError(IFSError):
    pass


@dataclass(frozen=True)
class AffineMap:
    """x -> scale * A x + v.

    The positive scalar prefactor is kept separate from A so that systems
    like 2**(-11/12) * (matrix over Q(sqrt(2))) retain exact determinant and
    norm arithmetic; scale == 1 for plain systems.
    """

    A: Mat2
    v: tuple[Scalar, Scalar]
    scale: Scalar = Fraction(1)

    def __post_init__(self):
        if exact_sign(self.scale) <= 0:
            raise IFSError("map scale must be positive")

    def linear_floats(self) -> np.ndarray:
        s = to_float(self.scale)
        a, b, c, d = self.A.to_floats()
        return np.array([[a * s, b * s], [c * s, d * s]])

    def translation_floats(self) -> np.ndarray:
        return np.array([to_float(self.v[0]), to_float(self.v[1])])

    def has_unit_scale(self) -> bool:
        return is_exact(self.scale) and self.scale == 1

    def rational_scale(self) -> Optional[Fraction]:
        return as_fraction(self.scale)

    def singular_values(self) -> tuple[float, float]:
        s = to_float(self.scale)
        a1, a2 = self.A.singular_values()
        return s * a1, s * a2

    def norm(self) -> float:
        return self.singular_values()[0]

    def det_abs_float(self) -> float:
        return to_float(self.scale) ** 2 * abs(to_float(self.A.det()))

    def det_abs_log2(self) -> Optional[Fraction]:
        """log2 |det(scale*A)| exactly, when it is a dyadic power."""
        es = dyadic_exponent(self.scale)
        ea = dyadic_exponent(self.A.det())
        if es is None or ea is None:
            return None
        return 2 * es + ea

    def apply(self, pt: Sequence[float]) -> tuple[float, float]:
        m = self.linear_floats()
        t = self.translation_floats()
        return (
            m[0, 0] * pt[0] + m[0, 1] * pt[1] + t[0],
            m[1, 0] * pt[0] + m[1, 1] * pt[1] + t[1],
        )

    def apply_exact(self, pt: Sequence[Scalar]) -> tuple[Scalar, Scalar]:
        r = self.rational_scale()
        if r is None:
            raise IFSError("exact evaluation needs a rational scale")
        x, y = self.A.matvec(pt)
        return (r * x + self.v[0], r * y + self.v[1])

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: x -> self(other(x))."""
        mat = self.A @ other.A
        scale = scalar_mul(self.scale, other.scale)
        r = self.rational_scale()
        if r is not None:
            wx, wy = self.A.matvec(other.v)
            v = (r * wx + self.v[0], r * wy + self.v[1])
        else:
            m = self.linear_floats()
            ov = [to_float(other.v[0]), to_float(other.v[1])]
            v = (
                m[0, 0] * ov[0] + m[0, 1] * ov[1] + to_float(self.v[0]),
                m[1, 0] * ov[0] + m[1, 1] * ov[1] + to_float(self.v[1]),
            )
        return AffineMap(mat, v, scale)

    def fixed_point_exact(self) -> tuple[Scalar, Scalar]:
        """Solve (I - scale*A) x = v exactly (requires rational scale)."""
        r = self.rational_scale()
        if r is None:
            raise IFSError("exact fixed point needs a rational scale")
        a, b, c, d = self.A.entries()
        m11, m12 = 1 - r * a, -r * b
        m21, m22 = -r * c, 1 - r * d
        det = m11 * m22 - m12 * m21
        if exact_sign(det) == 0:
            raise IFSError("map has eigenvalue 1; no unique fixed point")
        x = (self.v[0] * m22 - m12 * self.v[1]) / det
        y = (m11 * self.v[1] - self.v[0] * m21) / det
        return (x, y)


def identity_map() -> AffineMap:
    return AffineMap(Mat2.identity(), (Fraction(0), Fraction(0)))


@dataclass(frozen=True)
class IFSystem:
    """Ordered tuple of invertible affine maps with optional probabilities."""

    maps: tuple[AffineMap, ...]
    p: Optional[tuple[Scalar, ...]] = None
    field_d: Optional[int] = None

    def __post_init__(self):
        if len(self.maps) < 1:
            raise IFSError("need at least one map")
        if self.p is not None:
            if len(self.p) != len(self.maps):
                raise IFSError("probability vector length mismatch")
            for q in self.p:
                if exact_sign(q) <= 0:
                    raise IFSError("probabilities must be positive")
            total = sum((Fraction(q) if is_exact(q) else q) for q in self.p)
            if is_exact(total):
                if total != 1:
                    raise IFSError(f"probabilities sum to {total}, not 1")
            elif abs(total - 1.0) > 1e-12:
                raise IFSError(f"probabilities sum to {total}, not 1")

    @property
    def M(self) -> int:
        return len(self.maps)

    def probabilities(self) -> tuple[Fraction, ...]:
        if self.p is None:
            return tuple(Fraction(1, self.M) for _ in self.maps)
        return self.p

    def prob_floats(self) -> np.ndarray:
        return np.array([to_float(q) for q in self.probabilities()])

    def linear_parts(self) -> list[Mat2]:
        return [m.A for m in self.maps]

    def max_contraction(self) -> float:
        return max(m.norm() for m in self.maps)

    def is_contractive(self) -> bool:
        return all(_norm_below_one(m) for m in self.maps)

    def require_contractive(self):
        if not self.is_contractive():
            raise NotContractiveError("system has a map with operator norm >= 1")

    def is_exact(self) -> bool:
        return all(
            m.A.is_exact() and all(is_exact(c) for c in m.v) and is_exact(m.scale)
            for m in self.maps
        )

    def bounding_radius(self) -> float:
        """Radius of the master disc B0 about 0: sup|T_i(0)| / (1 - max a1)."""
        self.require_contractive()
        r = self.max_contraction()
        c = max(math.hypot(*m.translation_floats()) for m in self.maps)
        return c / (1.0 - r)


def _norm_below_one(m: AffineMap) -> bool:
    """Contractivity test, exact when the norm-square stays in the field."""
    ns = m.A.norm_squared_exact()
    es = dyadic_exponent(m.scale)
    if ns is not None and es is not None:
        # scale**2 * ns < 1  <=>  ns < 2**(-2 es); compare exactly via powers
        e = -2 * es
        lhs = ns**e.denominator
        rhs = Fraction(2) ** e.numerator
        return exact_sign(lhs - rhs) < 0
    if ns is not None:
        r = as_fraction(m.scale)
        if r is not None:
            return exact_sign(ns * r * r - 1) < 0
    return m.norm() < 1.0


# -- word algebra ------------------------------------------------------------


def check_word(ifs: IFSystem, word: Sequence[int]):
    for s in word:
        if not 1 <= s <= ifs.M:
            raise IFSError(f"symbol {s} out of range 1..{ifs.M}")


def matrix_of_word(ifs: IFSystem, word: Sequence[int]) -> Mat2:
    """Field part of A_w = A_{w_n} ... A_{w_1} (scales excluded)."""
    check_word(ifs, word)
    acc = Mat2.identity()
    for s in word:
        acc = ifs.maps[s - 1].A @ acc
    return acc


def word_scale(ifs: IFSystem, word: Sequence[int]) -> Scalar:
    acc: Scalar = Fraction(1)
    for s in word:
        acc = scalar_mul(acc, ifs.maps[s - 1].scale)
    return acc


def compose_word(ifs: IFSystem, word: Sequence[int]) -> AffineMap:
    """T_{w_n} o ... o T_{w_1}; its linear part matches matrix_of_word."""
    check_word(ifs, word)
    acc = identity_map()
    for s in word:
        acc = ifs.maps[s - 1].compose(acc)
    return acc


def coding_point(
    ifs: IFSystem, prefix: Sequence[int]
) -> tuple[tuple[float, float], float]:
    """T_{x_1} o ... o T_{x_n}(0) with a rigorous tail radius.

    Note the forward order here, opposite to matrix_of_word.
    """
    check_word(ifs, prefix)
    ifs.require_contractive()
    x = (0.0, 0.0)
    for s in reversed(prefix):
        x = ifs.maps[s - 1].apply(x)
    r = ifs.max_contraction()
    radius = ifs.bounding_radius() * r ** len(prefix)
    return x, radius


def words_of_length(m: int, n: int) -> Iterator[Word]:
    """All words over {1..m} of length n in lexicographic order."""
    return itertools.product(range(1, m + 1), repeat=n)


def word_at_index(m: int, n: int, idx: int) -> Word:
    """idx-th word (0-based) in lexicographic order; mixed-radix decode."""
    if not 0 <= idx < m**n:
        raise IndexError("word index out of range")
    out = []
    for _ in range(n):
        idx, r = divmod(idx, m)
        out.append(r + 1)
    return tuple(reversed(out))


def lex_blocks(m: int, n: int, nblocks: int) -> list[tuple[int, int]]:
    """Deterministic partition of the depth-n word space into contiguous
    lexicographic index ranges [start, stop); callers may process blocks in
    parallel and merge in block order."""
    total = m**n
    nblocks = max(1, min(nblocks, total))
    step, extra = divmod(total, nblocks)
    ranges = []
    start = 0
    for i in range(nblocks):
        stop = start + step + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def contains_subword(word: Sequence[int], sub: Sequence[int]) -> bool:
    n, k = len(word), len(sub)
    if k == 0:
        return True
    tw, ts = tuple(word), tuple(sub)
    return any(tw[i : i + k] == ts for i in range(n - k + 1))


# -- attractor covers --------------------------------------------------------


@dataclass(frozen=True)
class AttractorCover:
    """Axis-aligned boxes, one per depth-n word, jointly enclosing E."""

    depth: int
    boxes: np.ndarray  # (N, 4): xmin, xmax, ymin, ymax
    radius0: float
    words: Optional[tuple[Word, ...]] = None

    def bounding_box(self) -> tuple[float, float, float, float]:
        b = self.boxes
        return (
            float(b[:, 0].min()),
            float(b[:, 1].max()),
            float(b[:, 2].min()),
            float(b[:, 3].max()),
        )


def attractor_cover(
    ifs: IFSystem,
    depth: int,
    keep_words: bool = False,
    budget: int = 2_000_000,
    radius: Optional[float] = None,
) -> AttractorCover:
    """Cover E by the boxes of T_{w_1} o ... o T_{w_n}(B0) over all words.

    B0 defaults to the disc about 0 of radius sup|T_i(0)| / (1 - max a1),
    which also makes successive covers nest; any radius with E inside
    B(0, radius) gives a valid (possibly non-nesting) cover.

    The image of the disc B0 under x -> Mx + t is an ellipse whose bounding
    box has half-extents radius0 * (|row1(M)|, |row2(M)|) about t.
    """
    ifs.require_contractive()
    if ifs.M**depth > budget:
        raise IFSError(f"cover budget exceeded: {ifs.M}**{depth} > {budget}")
    r0 = ifs.bounding_radius() if radius is None else float(radius)
    mats = [m.linear_floats() for m in ifs.maps]
    vs = [m.translation_floats() for m in ifs.maps]

    boxes: list[tuple[float, float, float, float]] = []
    words: list[Word] = []

    def rec(mat: np.ndarray, t: np.ndarray, word: tuple[int, ...], k: int):
        if k == 0:
            hx = r0 * math.hypot(mat[0, 0], mat[0, 1])
            hy = r0 * math.hypot(mat[1, 0], mat[1, 1])
            boxes.append((t[0] - hx, t[0] + hx, t[1] - hy, t[1] + hy))
            if keep_words:
                words.append(word)
            return
        for i in range(ifs.M):
            # compose forward: current o T_i
            rec(mat @ mats[i], mat @ vs[i] + t, word + (i + 1,), k - 1)

    rec(np.eye(2), np.zeros(2), (), depth)
    return AttractorCover(
        depth, np.array(boxes), r0, tuple(words) if keep_words else None
    )


def refined_enclosure_radius(
    ifs: IFSystem, rounds: int = 8, probe_depth: int = 5
) -> float:
    """Tight radius R with E inside B(0, R), by re-enclosing shallow covers.

    Starts from the sound a-priori constant and repeatedly replaces it with
    the corner radius of a shallow cover (any enclosing disc stays sound).
    """
    r = ifs.bounding_radius()
    if r == 0.0:
        return 0.0
    depth = probe_depth
    while ifs.M**depth > 4096 and depth > 1:
        depth -= 1
    for _ in range(rounds):
        cov = attractor_cover(ifs, depth, radius=r)
        b = cov.boxes
        corner = math.sqrt(
            float(np.max(np.maximum(b[:, 0] ** 2, b[:, 1] ** 2)
                         + np.maximum(b[:, 2] ** 2, b[:, 3] ** 2)))
        )
        if corner >= r * (1 - 1e-9):
            break
        r = corner
    return r


# -- JSON schema -------------------------------------------------------------


def _parse_scalar(obj, d, what: str) -> Scalar:
    try:
        return parse_scalar(obj, d)
    except ValueError as e:
        raise ParseError(f"{what}: {e}") from e


def _parse_vec(obj, d, what: str) -> tuple[Scalar, Scalar]:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ParseError(f"{what} must be a 2-element list")
    return (_parse_scalar(obj[0], d, what), _parse_scalar(obj[1], d, what))


def parse_ifs(text: str) -> IFSystem:
    """Parse the JSON schema:

    {"field_d": int?, "maps": [{"A": [[s,s],[s,s]], "v": [s,s],
    "scale": s?}, ...], "p": [s, ...]?}

    where a scalar literal s is "p/q", "a/b+c/e√", "2^p/q" or a float.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from e
    if not isinstance(obj, dict) or "maps" not in obj:
        raise ParseError('top level must be an object with a "maps" list')
    d = obj.get("field_d")
    if d is not None and (not isinstance(d, int) or d <= 1):
        raise ParseError("field_d must be an integer > 1")
    maps = []
    if not isinstance(obj["maps"], list) or not obj["maps"]:
        raise ParseError('"maps" must be a nonempty list')
    for k, mo in enumerate(obj["maps"]):
        if not isinstance(mo, dict) or "A" not in mo or "v" not in mo:
            raise ParseError(f'map {k}: need "A" and "v"')
        rows = mo["A"]
        if not isinstance(rows, list) or len(rows) != 2:
            raise ParseError(f"map {k}: A must be a 2x2 matrix")
        r1 = _parse_vec(rows[0], d, f"map {k} row 0")
        r2 = _parse_vec(rows[1], d, f"map {k} row 1")
        try:
            mat = Mat2(r1[0], r1[1], r2[0], r2[1])
        except ValueError as e:
            raise ParseError(f"map {k}: {e}") from e
        v = _parse_vec(mo["v"], d, f"map {k} translation")
        scale: Scalar = Fraction(1)
        if "scale" in mo:
            scale = _parse_scalar(mo["scale"], d, f"map {k} scale")
            sgn = exact_sign(scale)
            if sgn < 0:
                mat, scale = -mat, -scale if is_exact(scale) else -scale
            elif sgn == 0:
                raise ParseError(f"map {k}: zero scale")
        try:
            maps.append(AffineMap(mat, v, scale))
        except IFSError as e:
            raise ParseError(f"map {k}: {e}") from e
    p = None
    if obj.get("p") is not None:
        if not isinstance(obj["p"], list):
            raise ParseError('"p" must be a list')
        p = tuple(_parse_scalar(q, d, "p entry") for q in obj["p"])
    try:
        return IFSystem(tuple(maps), p, d)
    except IFSError as e:
        raise ParseError(str(e)) from e


def serialize_ifs(ifs: IFSystem) -> str:
    """Byte-deterministic canonical form (sorted keys, canonical scalars)."""
    obj: dict = {
        "maps": [
            {
                "A": [
                    [format_scalar(m.A.a), format_scalar(m.A.b)],
                    [format_scalar(m.A.c), format_scalar(m.A.d)],
                ],
                "v": [format_scalar(m.v[0]), format_scalar(m.v[1])],
                **(
                    {}
                    if m.has_unit_scale()
                    else {"scale": format_scalar(m.scale)}
                ),
            }
            for m in ifs.maps
        ]
    }
    if ifs.field_d is not None:
        obj["field_d"] = ifs.field_d
    if ifs.p is not None:
        obj["p"] = [format_scalar(q) for q in ifs.p]
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_ifs(path: str) -> IFSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ifs(fh.read())
