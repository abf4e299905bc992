import math
from fractions import Fraction

import pytest

from selfaffine.geometry import (
    ConvexPolygon,
    GeometryError,
    check_osc,
    check_ssc,
    common_fixed_point,
    polygon_image,
    polygon_inside,
    polygons_disjoint,
    sosc_witness,
)
from selfaffine.ifs import AffineMap, IFSystem, compose_word
from selfaffine.linalg import Mat2
from selfaffine.scalars import QuadExt

F = Fraction

UNIT_SQ = ConvexPolygon.unit_square()


class TestPolygonBasics:
    def test_rejects_degenerate(self):
        with pytest.raises(GeometryError):
            ConvexPolygon(((F(0), F(0)), (F(1), F(0))))
        with pytest.raises(GeometryError):  # collinear
            ConvexPolygon(((F(0), F(0)), (F(1), F(0)), (F(2), F(0))))

    def test_orientation_fixup(self):
        cw = [(F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(0))]
        poly = ConvexPolygon.from_points(cw)
        assert poly.area() == 1

    def test_identity_image(self, similarity_pair):
        ident = AffineMap(Mat2.identity(), (F(0), F(0)))
        img = polygon_image(ident, UNIT_SQ)
        assert img.vertices == UNIT_SQ.vertices

    def test_edgar_first_map_image(self, edgar8):
        img = polygon_image(edgar8.maps[0], ConvexPolygon.unit_square(open=False))
        # hand-multiplied corners of the unit square under [[1/8,0],[1/2,1/2]]
        want = ((F(0), F(0)), (F(1, 8), F(1, 2)), (F(1, 8), F(1)), (F(0), F(1, 2)))
        assert img.vertices == want
        assert img.area() == F(1, 16)

    def test_reflection_restores_ccw(self):
        refl = AffineMap(Mat2.diag(F(-1, 2), F(1, 2)), (F(0), F(0)))
        img = polygon_image(refl, UNIT_SQ)
        assert img.area() > 0  # CCW restored

    def test_image_respects_composition(self, positive_pair):
        t12 = compose_word(positive_pair, (1, 2))
        lhs = polygon_image(t12, UNIT_SQ)
        rhs = polygon_image(
            positive_pair.maps[1], polygon_image(positive_pair.maps[0], UNIT_SQ)
        )
        assert lhs.vertices == rhs.vertices


class TestDisjointInside:
    def test_shared_edge_open_disjoint(self):
        left = ConvexPolygon.box(F(0), F(0), F(1, 2), F(1))
        right = ConvexPolygon.box(F(1, 2), F(0), F(1), F(1))
        assert polygons_disjoint(left, right, open_semantics=True)
        assert not polygons_disjoint(left, right, open_semantics=False)

    def test_identical_not_disjoint(self):
        assert not polygons_disjoint(UNIT_SQ, UNIT_SQ, open_semantics=True)

    def test_overlap_not_disjoint(self):
        a = ConvexPolygon.box(F(0), F(0), F(2, 3), F(1))
        b = ConvexPolygon.box(F(1, 3), F(0), F(1), F(1))
        assert not polygons_disjoint(a, b, open_semantics=True)

    def test_box_inside(self):
        big = ConvexPolygon.box(F(-1, 10), F(-1, 10), F(11, 10), F(11, 10))
        assert polygon_inside(ConvexPolygon.unit_square(open=False), big, strict=True)
        assert not polygon_inside(big, UNIT_SQ)

    def test_quadext_sign_decision(self):
        # square rotated by sqrt(2)-coordinates still decided exactly
        s2 = QuadExt(0, 1, 2)
        tri1 = ConvexPolygon(((F(0), F(0)), (s2, F(0)), (F(0), s2)), open=False)
        tri2 = ConvexPolygon(
            ((s2, s2), (QuadExt(0, 1, 2) + 1, s2), (s2, QuadExt(0, 1, 2) + 1)),
            open=False,
        )
        assert polygons_disjoint(tri1, tri2, open_semantics=False)
        # touching along the anti-diagonal through (s2/2, s2/2): not strict
        tri3 = ConvexPolygon(((s2, F(0)), (s2, s2), (F(0), s2)), open=False)
        assert not polygons_disjoint(tri1, tri3, open_semantics=False)
        assert polygons_disjoint(tri1, tri3, open_semantics=True)


class TestOSC:
    def test_edgar_osc_holds(self, edgar8):
        rep = check_osc(edgar8, UNIT_SQ)
        assert rep.holds, rep.violations

    def test_edgar_rhombi_tile_half_area(self, edgar8):
        total = sum(
            polygon_image(m, ConvexPolygon.unit_square(open=False)).area()
            for m in edgar8.maps
        )
        assert total == F(1, 2)
        assert sum(F(1, 16) for _ in edgar8.maps) == F(1, 2)

    def test_duplicate_map_fails(self, similarity_pair):
        dup = IFSystem((similarity_pair.maps[0], similarity_pair.maps[0]))
        rep = check_osc(dup, UNIT_SQ)
        assert not rep.holds
        assert any("overlap" in v for v in rep.violations)

    def test_similarity_pair_osc(self, similarity_pair):
        assert check_osc(similarity_pair, UNIT_SQ).holds

    def test_square4_osc(self, square4):
        assert check_osc(square4, UNIT_SQ).holds


class TestSOSC:
    def test_edgar_refuted_via_fixed_point(self, edgar8):
        assert common_fixed_point(edgar8) == (F(0), F(0))
        res = sosc_witness(edgar8, UNIT_SQ, depth=3)
        assert res.status == "refuted"

    def test_similarity_pair_witness(self, similarity_pair):
        res = sosc_witness(similarity_pair, UNIT_SQ, depth=3)
        assert res.status == "witness"
        # spec-level check: T_(1,2) maps the closed square to [1/2,3/4]^2
        t = compose_word(similarity_pair, (1, 2))
        img = polygon_image(t, ConvexPolygon.unit_square(open=False))
        assert img.vertices[0] == (F(1, 2), F(1, 2))
        assert img.vertices[2] == (F(3, 4), F(3, 4))

    def test_requires_osc_first(self, similarity_pair):
        dup = IFSystem((similarity_pair.maps[0], similarity_pair.maps[0]))
        with pytest.raises(GeometryError):
            sosc_witness(dup, UNIT_SQ)

    def test_ssc_hull_witness_depth1(self):
        # two maps sending the square well inside itself, no overlap
        a = AffineMap(Mat2.diag(F(1, 4), F(1, 4)), (F(1, 8), F(1, 8)))
        b = AffineMap(Mat2.diag(F(1, 4), F(1, 4)), (F(5, 8), F(5, 8)))
        sysm = IFSystem((a, b))
        res = sosc_witness(sysm, UNIT_SQ, depth=1)
        assert res.status == "witness" and len(res.word) == 1


class TestSSC:
    def test_edgar_certified_fails(self, edgar8):
        res = check_ssc(edgar8, depth=4)
        assert res.status == "certified-fails"

    def test_sqrt2_certified_holds(self, sqrt2pair):
        res = check_ssc(sqrt2pair, depth=12)
        assert res.status == "certified-holds"

    def test_touching_similarities_unknown(self):
        # {x/2, x/2 + 1/2} embedded on the x-axis: pieces touch at 1/2
        a = AffineMap(Mat2.diag(F(1, 2), F(1, 2)), (F(0), F(0)))
        b = AffineMap(Mat2.diag(F(1, 2), F(1, 2)), (F(1, 2), F(0)))
        sysm = IFSystem((a, b))
        for depth in (3, 6):
            res = check_ssc(sysm, depth=depth)
            assert res.status == "unknown"

    def test_separated_similarities_hold(self):
        a = AffineMap(Mat2.diag(F(1, 4), F(1, 4)), (F(0), F(0)))
        b = AffineMap(Mat2.diag(F(1, 4), F(1, 4)), (F(3, 4), F(3, 4)))
        sysm = IFSystem((a, b))
        res = check_ssc(sysm, depth=6)
        assert res.status == "certified-holds"
        assert res.min_gap > 0
