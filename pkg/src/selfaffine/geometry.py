"""Exact convex-polygon geometry for open set / separation conditions.

All decisions are made in exact arithmetic (rationals or Q(sqrt(d)) via
exact sign evaluation); open/closed semantics are explicit everywhere.
Only convex polygons are supported: affine images of convex polygons are
again convex polygons, and separating-axis tests are exact and complete
for them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ifs import (
    AffineMap,
    IFSError,
    IFSystem,
    attractor_cover,
    compose_word,
    refined_enclosure_radius,
    words_of_length,
)
from .scalars import Scalar, exact_sign, is_exact, to_float

Point = tuple[Scalar, Scalar]


class GeometryError(ValueError):
    pass


def _sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def _cross(o: Point, a: Point, b: Point) -> Scalar:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices in counterclockwise order."""

    vertices: tuple[Point, ...]
    open: bool = True

    def __post_init__(self):
        v = self.vertices
        if len(v) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        for i in range(len(v)):
            o, a, b = v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]
            if exact_sign(_cross(o, a, b)) <= 0:
                raise GeometryError(
                    "vertices must be strictly convex in counterclockwise order"
                )

    @staticmethod
    def from_points(pts: Sequence[Point], open: bool = True) -> "ConvexPolygon":
        """Fix orientation (reverses clockwise input) and build."""
        pts = list(pts)
        area2 = sum(
            _cross(pts[0], pts[i], pts[i + 1]) for i in range(1, len(pts) - 1)
        )
        if exact_sign(area2) < 0:
            pts.reverse()
        return ConvexPolygon(tuple(pts), open)

    @staticmethod
    def box(x0, y0, x1, y1, open: bool = True) -> "ConvexPolygon":
        return ConvexPolygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), open)

    @staticmethod
    def unit_square(open: bool = True) -> "ConvexPolygon":
        z, o = Fraction(0), Fraction(1)
        return ConvexPolygon.box(z, z, o, o, open)

    def is_exact(self) -> bool:
        return all(is_exact(x) and is_exact(y) for x, y in self.vertices)

    def edges(self):
        v = self.vertices
        for i in range(len(v)):
            yield v[i], v[(i + 1) % len(v)]

    def contains_point(self, p: Point, closed: Optional[bool] = None) -> bool:
        allow_boundary = not self.open if closed is None else closed
        for a, b in self.edges():
            s = exact_sign(_cross(a, b, p))
            if s < 0:
                return False
            if s == 0 and not allow_boundary:
                return False
        return True

    def area(self) -> Scalar:
        v = self.vertices
        twice = sum(_cross(v[0], v[i], v[i + 1]) for i in range(1, len(v) - 1))
        return twice / 2

    def bounding_box_floats(self) -> tuple[float, float, float, float]:
        xs = [to_float(x) for x, _ in self.vertices]
        ys = [to_float(y) for _, y in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)


def polygon_image(t: AffineMap, p: ConvexPolygon) -> ConvexPolygon:
    """Exact affine image; vertex order is flipped back to counterclockwise
    when the map reverses orientation (det < 0)."""
    pts = [t.apply_exact(v) for v in p.vertices]
    det_sign = exact_sign(t.A.det())
    if det_sign < 0:
        pts.reverse()
    return ConvexPolygon(tuple(pts), p.open)


def _axis_gap_sign(p: ConvexPolygon, q: ConvexPolygon, axis: Point) -> int:
    """Sign of the separation along the axis: +1 if strictly separated,
    0 if touching (closures meet in a point/segment), -1 if overlapping."""
    dots_p = [axis[0] * x + axis[1] * y for x, y in p.vertices]
    dots_q = [axis[0] * x + axis[1] * y for x, y in q.vertices]
    gap1 = min(dots_q) - max(dots_p)
    gap2 = min(dots_p) - max(dots_q)
    best = max(exact_sign(gap1), exact_sign(gap2))
    return best


def polygons_disjoint(p: ConvexPolygon, q: ConvexPolygon, open_semantics: Optional[bool] = None) -> bool:
    """Exact separating-axis decision.

    With open semantics (default when both polygons are open) a shared
    boundary is allowed: the interiors are disjoint iff some edge normal
    gives a non-strict separation. Closed semantics require a strict gap.
    """
    if open_semantics is None:
        open_semantics = p.open and q.open
    best = -1
    for poly in (p, q):
        for a, b in poly.edges():
            axis = (-(b[1] - a[1]), b[0] - a[0])  # inward normal of CCW edge
            best = max(best, _axis_gap_sign(p, q, axis))
            if best == 1 or (best == 0 and open_semantics):
                return True
    return best == 1 or (best == 0 and open_semantics)


def polygon_inside(p: ConvexPolygon, q: ConvexPolygon, strict: Optional[bool] = None) -> bool:
    """p subset of q, decided on vertices (sufficient by convexity).

    strict=True demands the closure of p inside the interior of q; the
    default infers it when a closed set must fit in an open one.
    """
    if strict is None:
        strict = q.open and not p.open
    return all(q.contains_point(v, closed=not strict) for v in p.vertices)


# -- separation conditions ----------------------------------------------------


@dataclass
class OSCReport:
    holds: bool
    violations: list[str]

    def to_json(self) -> dict:
        return {"holds": self.holds, "violations": self.violations}


def _require_exact(ifs: IFSystem, what: str):
    if not ifs.is_exact():
        raise GeometryError(f"{what} needs exact map coefficients")
    for m in ifs.maps:
        if m.rational_scale() is None:
            raise GeometryError(
                f"{what} needs rational map scales (exact polygon arithmetic)"
            )


def check_osc(ifs: IFSystem, u: ConvexPolygon) -> OSCReport:
    """Open set condition for U: T_i(U) inside U and pairwise open-disjoint,
    all decided exactly; the report lists every violation."""
    _require_exact(ifs, "open set condition check")
    if not u.open:
        raise GeometryError("the OSC open set must be open")
    images = [polygon_image(m, u) for m in ifs.maps]
    violations = []
    for i, img in enumerate(images):
        if not polygon_inside(img, u, strict=False):
            violations.append(f"T_{i + 1}(U) is not contained in U")
    for i, j in itertools.combinations(range(len(images)), 2):
        if not polygons_disjoint(images[i], images[j], open_semantics=True):
            violations.append(f"T_{i + 1}(U) and T_{j + 1}(U) overlap")
    return OSCReport(not violations, violations)


def common_fixed_point(ifs: IFSystem) -> Optional[Point]:
    """Exact common fixed point of all maps, if one exists."""
    try:
        fp = ifs.maps[0].fixed_point_exact()
    except IFSError:
        return None
    for m in ifs.maps[1:]:
        x, y = m.apply_exact(fp)
        if exact_sign(x - fp[0]) != 0 or exact_sign(y - fp[1]) != 0:
            return None
    return fp


@dataclass
class SOSCResult:
    status: str  # "witness" | "refuted" | "inconclusive"
    word: Optional[tuple[int, ...]] = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "word": list(self.word) if self.word else None,
            "reason": self.reason,
        }


def sosc_witness(ifs: IFSystem, u: ConvexPolygon, depth: int = 4) -> SOSCResult:
    """Search for a word w with T_w(closure U) inside U (strong OSC witness).

    Definitive refutation when all maps share a fixed point: any open set
    meeting the attractor contains it, and then no two images can be
    disjoint. Otherwise the search is honest: witness or inconclusive.
    """
    rep = check_osc(ifs, u)
    if not rep.holds:
        raise GeometryError("establish the OSC for U before the SOSC search")
    fp = common_fixed_point(ifs)
    if fp is not None:
        return SOSCResult(
            "refuted",
            None,
            "all maps share a fixed point; no open set containing it can have"
            " disjoint images",
        )
    closure = ConvexPolygon(u.vertices, open=False)
    for n in range(1, depth + 1):
        for w in words_of_length(ifs.M, n):
            t = compose_word(ifs, w)
            img = polygon_image(t, closure)
            if polygon_inside(img, u, strict=True):
                return SOSCResult("witness", w, f"T_w(closure U) in U at depth {n}")
    return SOSCResult("inconclusive", None, f"no witness found up to depth {depth}")


@dataclass
class SSCResult:
    status: str  # "certified-holds" | "certified-fails" | "unknown"
    depth: int
    detail: str = ""
    min_gap: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "depth": self.depth,
            "detail": self.detail,
            "min_gap": self.min_gap,
        }


def _boxes_disjoint_gap(b1: np.ndarray, b2: np.ndarray) -> float:
    """Smallest coordinate gap between two box families (negative if some
    pair of boxes overlaps in both coordinates)."""
    gx1 = b2[None, :, 0] - b1[:, None, 1]
    gx2 = b1[:, None, 0] - b2[None, :, 1]
    gy1 = b2[None, :, 2] - b1[:, None, 3]
    gy2 = b1[:, None, 2] - b2[None, :, 3]
    sep = np.maximum(np.maximum(gx1, gx2), np.maximum(gy1, gy2))
    return float(sep.min())


def check_ssc(ifs: IFSystem, depth: int = 8, budget: int = 2_000_000) -> SSCResult:
    """Tri-state strong separation check.

    Pairwise-disjoint depth-k covers of the pieces T_i(E) certify that the
    SSC holds; an exact coincidence of cylinder fixed points under two
    different top-level maps certifies failure; otherwise unknown, with the
    minimal observed gap. The tri-state is fundamental: touching pieces can
    never be resolved from finite covers.
    """
    ifs.require_contractive()
    exact_ok = ifs.is_exact() and all(m.rational_scale() is not None for m in ifs.maps)
    if exact_ok:
        # exact coincidences of cylinder fixed points across different
        # top-level pieces certify failure; these show up at shallow depth
        # (deep touching points are not cylinder-periodic), so the exact
        # scan is capped tightly
        seen: dict = {}
        from .ifs import identity_map

        level = [((), identity_map())]
        n = 1
        while n <= depth and ifs.M**n <= 512:
            level = [
                (w + (s,), ifs.maps[s - 1].compose(t))
                for (w, t) in level
                for s in range(1, ifs.M + 1)
            ]
            for w, t in level:
                fp = t.fixed_point_exact()
                if not is_exact(fp[0]):
                    continue
                top = w[-1]  # w grows inward: T_w = T_{w_n} o ... o T_{w_1}
                prev = seen.get((fp[0], fp[1]))
                if prev is not None and prev != top:
                    return SSCResult(
                        "certified-fails",
                        n,
                        f"pieces {prev} and {top} share the point "
                        f"({fp[0]}, {fp[1]})",
                    )
                seen.setdefault((fp[0], fp[1]), top)
            n += 1
    # pairwise box-gap work grows like M^(2d); keep it within a fixed budget
    use_depth = depth
    m = ifs.M
    while use_depth > 1 and (
        m**use_depth > budget
        or m ** (2 * use_depth - 2) * m * (m - 1) / 2 > 6e7
    ):
        use_depth -= 1
    radius = refined_enclosure_radius(ifs)
    cov = attractor_cover(ifs, use_depth, keep_words=True, budget=budget, radius=radius)
    boxes = cov.boxes
    words = cov.words
    by_piece = {}
    for idx, w in enumerate(words):
        by_piece.setdefault(w[0], []).append(idx)
    pieces = sorted(by_piece)
    min_gap = math.inf
    for i, j in itertools.combinations(pieces, 2):
        gap = _boxes_disjoint_gap(boxes[by_piece[i]], boxes[by_piece[j]])
        min_gap = min(min_gap, gap)
    if min_gap > 0:
        return SSCResult(
            "certified-holds", use_depth,
            f"piece covers disjoint with gap {min_gap:.3g}", min_gap,
        )
    return SSCResult(
        "unknown", use_depth,
        "covers touch or overlap at this depth", min_gap,
    )
