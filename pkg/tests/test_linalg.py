import math
import random
from fractions import Fraction

import pytest

from selfaffine.linalg import (
    Mat2,
    ProjInterval,
    ProjPoint,
    SingularMatrixError,
    interval_image,
    is_hyperbolic,
    maps_arc_into,
    preserves_component,
    proj_distance,
    singular_values,
    strictly_inside,
    svf,
)
from selfaffine.scalars import QuadExt

from conftest import sqrt2_unscaled_mats

F = Fraction

EDGAR_A1 = Mat2(F(1, 8), F(0), F(1, 2), F(1, 2))
ROT90 = Mat2(F(0), F(-1), F(1), F(0))
# rational rotation from the 3-4-5 triangle
ROT_RAT = Mat2(F(3, 5), F(-4, 5), F(4, 5), F(3, 5))


def rand_invertible(rng: random.Random, den: int = 8) -> Mat2:
    while True:
        e = [F(rng.randint(-8, 8), rng.randint(1, den)) for _ in range(4)]
        if e[0] * e[3] - e[1] * e[2] != 0:
            return Mat2(*e)


class TestSingularValues:
    def test_diagonal(self):
        assert singular_values(Mat2.diag(F(1, 2), F(1, 3))) == (0.5, pytest.approx(1 / 3))

    def test_edgar_map(self):
        # eigenvalues of A^T A are (33 +- sqrt(1025)) / 128
        r = math.sqrt(1025)
        want1 = math.sqrt((33 + r) / 128)
        want2 = math.sqrt((33 - r) / 128)
        a1, a2 = singular_values(EDGAR_A1)
        assert a1 == pytest.approx(want1, rel=1e-12)
        assert a2 == pytest.approx(want2, rel=1e-12)
        assert a1 == pytest.approx(0.712695, abs=1e-6)

    def test_rotation(self):
        for m in (ROT90, ROT_RAT):
            a1, a2 = singular_values(m)
            assert a1 == pytest.approx(1.0)
            assert a2 == pytest.approx(1.0)

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            Mat2(F(1), F(2), F(2), F(4))

    def test_product_identity_random(self):
        rng = random.Random(7)
        for _ in range(300):
            m = rand_invertible(rng)
            a1, a2 = singular_values(m)
            assert a1 >= a2 > 0
            det = abs(float(m.det()))
            assert a1 * a2 == pytest.approx(det, rel=1e-12)

    def test_norm_squared_exact_sqrt2(self):
        a1m, a2m = sqrt2_unscaled_mats()
        want = QuadExt(2, 1, 2)
        assert a1m.norm_squared_exact() == want
        assert a2m.norm_squared_exact() == want

    def test_norm_squared_exact_adjoins_squarefree_part(self):
        # eigenvalues of A^T A are (33 +- sqrt(1025))/128, sqrt(1025) = 5 sqrt(41)
        ns = EDGAR_A1.norm_squared_exact()
        assert ns == QuadExt(F(33, 128), F(5, 128), 41)


class TestSVF:
    def test_zeroth_power(self):
        rng = random.Random(3)
        for _ in range(5):
            assert svf(rand_invertible(rng), 0) == 1.0

    def test_middle_branch(self):
        val = svf(Mat2.diag(F(1, 2), F(1, 3)), 1.5)
        assert val == pytest.approx(0.5 * (1 / 3) ** 0.5, rel=1e-12)
        assert val == pytest.approx(0.2886751, abs=1e-7)

    def test_det_branch(self):
        assert svf(EDGAR_A1, 3) == pytest.approx((1 / 16) ** 1.5, rel=1e-12)
        assert svf(EDGAR_A1, 3) == 0.015625  # |det|^(3/2) = 16^(-3/2) = 1/64

    def test_negative_s_rejected(self):
        with pytest.raises(ValueError):
            svf(EDGAR_A1, -0.1)

    def test_continuity_at_branch_points(self):
        rng = random.Random(11)
        for _ in range(20):
            m = rand_invertible(rng)
            for s0 in (1.0, 2.0):
                lo = svf(m, s0 - 1e-9)
                hi = svf(m, s0 + 1e-9)
                assert lo == pytest.approx(hi, rel=1e-6)

    def test_submultiplicative_random(self):
        rng = random.Random(42)
        for _ in range(1000):
            a = rand_invertible(rng)
            b = rand_invertible(rng)
            ab = a @ b
            for s in (0.3, 1.0, 1.5, 2.0, 2.7):
                lhs = svf(ab, s)
                rhs = svf(a, s) * svf(b, s)
                assert lhs <= rhs * (1 + 1e-9)


class TestHyperbolicity:
    def test_sqrt2_product_exact(self):
        a1m, a2m = sqrt2_unscaled_mats()
        prod = a1m @ a2m  # [[2, 1-sqrt2], [0, 1]]
        assert prod.a == 2 and prod.d == 1
        assert prod.b == QuadExt(1, -1, 2)
        h = is_hyperbolic(prod)
        assert h.is_hyperbolic and h.exact
        l1, l2 = h.eigenvalues
        assert l1 == 2 and l2 == 1

    def test_sqrt2_generators_elliptic(self):
        for m in sqrt2_unscaled_mats():
            h = is_hyperbolic(m)
            assert h.kind == "elliptic" and h.exact

    def test_equal_moduli(self):
        h = is_hyperbolic(Mat2.diag(F(1, 2), F(-1, 2)))
        assert h.kind == "parabolic-or-equal-moduli"

    def test_triangular_exact_eigenvectors(self):
        h = is_hyperbolic(EDGAR_A1)
        assert h.is_hyperbolic
        l1, l2 = h.eigenvalues
        assert (l1, l2) == (F(1, 2), F(1, 8))
        v1, v2 = h.eigenvectors
        assert v1 == ProjPoint(F(0), F(1))
        assert v2 == ProjPoint(F(3), F(-4))

    def test_rational_matrix_gets_exact_quadext_eigenvalues(self):
        m = Mat2(F(2), F(1), F(1), F(1))
        h = is_hyperbolic(m)
        assert h.exact
        l1 = h.eigenvalues[0]
        assert isinstance(l1, QuadExt) and l1.d == 5

    def test_conjugation_invariant(self):
        rng = random.Random(5)
        for _ in range(50):
            m = rand_invertible(rng)
            p = rand_invertible(rng)
            conj = p @ m @ p.inverse()
            assert is_hyperbolic(conj).kind == is_hyperbolic(m).kind


class TestProjPoint:
    def test_canonical_sign(self):
        assert ProjPoint(F(-1), F(2)) == ProjPoint(F(1), F(-2))
        assert ProjPoint(F(0), F(-3)) == ProjPoint(F(0), F(1))
        assert ProjPoint(F(2), F(4)) == ProjPoint(F(1), F(2))

    def test_distance_examples(self):
        e1, e2 = ProjPoint(F(1), F(0)), ProjPoint(F(0), F(1))
        diag = ProjPoint(F(1), F(1))
        assert proj_distance(e1, e2) == 1.0
        assert proj_distance(e1, diag) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert proj_distance(diag, diag) == 0.0

    def test_triangle_inequality_random(self):
        rng = random.Random(19)
        for _ in range(500):
            coords = [(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(3)]
            if any(c == (0, 0) for c in coords):
                continue
            u, v, w = (ProjPoint(F(a), F(b)) for a, b in coords)
            duv = proj_distance(u, v)
            duw = proj_distance(u, w)
            dwv = proj_distance(w, v)
            assert duv <= duw + dwv + 1e-12


def quadrant_arc(closed=True) -> ProjInterval:
    return ProjInterval(
        ProjPoint(F(1), F(0)), ProjPoint(F(0), F(1)), ProjPoint(F(1), F(1)), closed
    )


class TestProjInterval:
    def test_membership(self):
        k = quadrant_arc()
        assert k.contains(ProjPoint(F(2), F(1)))
        assert k.contains(ProjPoint(F(1), F(5)))
        assert not k.contains(ProjPoint(F(1), F(-1)))
        assert k.contains(ProjPoint(F(1), F(0)))  # closed endpoint
        assert not k.contains_strict(ProjPoint(F(1), F(0)))
        open_k = quadrant_arc(closed=False)
        assert not open_k.contains(ProjPoint(F(1), F(0)))

    def test_positive_matrix_strictly_inside(self):
        m = Mat2(F(1), F(1), F(1), F(2))
        assert strictly_inside(m, quadrant_arc())

    def test_rotation_moves_small_arc(self):
        k = ProjInterval.from_angles(-0.2, 0.2)
        img = interval_image(ROT90, k)
        # image straddles the vertical direction, far from K
        assert img.contains(ProjPoint(F(0), F(1)))
        assert not strictly_inside(ROT90, k)

    def test_diag_contracts_symmetric_arc(self):
        k = ProjInterval(
            ProjPoint(F(1), F(-1)), ProjPoint(F(1), F(1)), ProjPoint(F(1), F(0))
        )
        m = Mat2.diag(F(2), F(1))
        assert strictly_inside(m, k)
        img = interval_image(m, k)
        # endpoint slopes tan(theta)/2 = +-1/2
        assert img.p == ProjPoint(F(2), F(-1)) or img.p == ProjPoint(F(2), F(1))

    def test_image_respects_composition(self):
        rng = random.Random(23)
        k = quadrant_arc()
        for _ in range(50):
            a = rand_invertible(rng)
            b = rand_invertible(rng)
            lhs = interval_image(a @ b, k)
            rhs = interval_image(a, interval_image(b, k))
            assert lhs.p == rhs.p and lhs.q == rhs.q and lhs.w == rhs.w

    def test_identity_not_strictly_inside(self):
        assert not strictly_inside(Mat2.identity(), quadrant_arc())
        assert maps_arc_into(Mat2.identity(), quadrant_arc())

    def test_antidiagonal_swaps_component(self):
        k = quadrant_arc()
        swap = Mat2.antidiag(F(1, 3), F(1, 3))
        assert maps_arc_into(swap, k)
        assert preserves_component(swap, k) is True  # (1,1) -> (1/3,1/3), same cone
        neg = Mat2.antidiag(F(-1, 3), F(-1, 3))
        assert preserves_component(neg, k) is False

    def test_from_angles_roundtrip(self):
        k = ProjInterval.from_angles(0.3, 1.1)
        t0, span = k.angles()
        assert t0 == pytest.approx(0.3, abs=1e-12)
        assert span == pytest.approx(0.8, abs=1e-12)
