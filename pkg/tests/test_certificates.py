import math
import random
from fractions import Fraction

import pytest

from selfaffine.certificates import (
    Certificate,
    bunching_check,
    check_projection_injectivity,
    common_invariant_line,
    exp_separation_stat,
    find_common_cone,
    find_hyperbolic,
    galois_conjugate_matrix,
    hypothesis_report,
    matrix_of_word_from,
    pingpong_free_certificate,
    recheck_certificate,
    strong_irreducibility_check,
)
from selfaffine.ifs import AffineMap, IFSystem
from selfaffine.linalg import Mat2, ProjInterval, ProjPoint, is_hyperbolic
from selfaffine.scalars import QuadExt

from conftest import sqrt2_positive_mats, sqrt2_unscaled_mats

F = Fraction

ROT_RAT = Mat2(F(3, 5), F(-4, 5), F(4, 5), F(3, 5))  # no real eigenline


def open_quadrant() -> ProjInterval:
    return ProjInterval(
        ProjPoint(F(1), F(0)), ProjPoint(F(0), F(1)), ProjPoint(F(1), F(1)),
        closed=False,
    )


class TestCommonInvariantLine:
    def test_all_diagonal_has_axis_witness(self):
        mats = [Mat2.diag(F(1, 2), F(1, 3)), Mat2.diag(F(1, 5), F(1, 7))]
        cert = common_invariant_line(mats)
        assert cert.kind == "invariant-line"
        assert recheck_certificate(mats, cert)
        assert cert.lines[0] in (ProjPoint(F(1), F(0)), ProjPoint(F(0), F(1)))

    def test_edgar_endpoints_irreducible(self, edgar8):
        mats = [edgar8.maps[0].A, edgar8.maps[7].A]
        assert common_invariant_line(mats).kind == "irreducible"

    def test_rotation_makes_irreducible(self):
        mats = [Mat2.diag(F(1, 2), F(1, 3)), ROT_RAT]
        assert common_invariant_line(mats).kind == "irreducible"

    def test_scalar_family(self):
        mats = [Mat2.diag(F(1, 2), F(1, 2)), Mat2.diag(F(1, 3), F(1, 3))]
        cert = common_invariant_line(mats)
        assert cert.kind == "invariant-line"
        assert "every line" in cert.notes

    def test_shared_triangular_line(self):
        mats = [Mat2(F(1, 2), F(1, 4), F(0), F(1, 3)),
                Mat2(F(1, 5), F(1, 7), F(0), F(1, 2))]
        cert = common_invariant_line(mats)
        assert cert.kind == "invariant-line"
        # e1 is invariant for upper-triangular matrices
        assert cert.lines[0] == ProjPoint(F(1), F(0))
        assert recheck_certificate(mats, cert)

    def test_conjugation_equivariance(self):
        rng = random.Random(12)
        base = [Mat2(F(1, 2), F(1, 4), F(0), F(1, 3)),
                Mat2(F(1, 5), F(1, 7), F(0), F(1, 2))]
        for _ in range(10):
            while True:
                e = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
                if e[0] * e[3] - e[1] * e[2] != 0:
                    break
            p = Mat2(*e)
            conj = [p @ m @ p.inverse() for m in base]
            cert = common_invariant_line(conj)
            assert cert.kind == "invariant-line"
            want = ProjPoint(F(1), F(0)).apply(p)
            assert cert.lines[0] == want


class TestFindHyperbolic:
    def test_sqrt2_depth_two(self):
        mats = list(sqrt2_unscaled_mats())
        cert = find_hyperbolic(mats, depth=3)
        assert cert.kind == "hyperbolic-word"
        assert len(cert.word) == 2
        assert recheck_certificate(mats, cert)
        # both generators themselves are elliptic
        assert find_hyperbolic(mats, depth=1).kind == "none-up-to-depth"

    def test_edgar_depth_one(self, edgar8):
        cert = find_hyperbolic([m.A for m in edgar8.maps], depth=2)
        assert cert.kind == "hyperbolic-word"
        assert cert.word == (1,)

    def test_rotation_family_refuted(self):
        scaled_rot = ROT_RAT.scaled(F(1, 2))
        cert = find_hyperbolic([scaled_rot, ROT_RAT], depth=5)
        assert cert.kind == "none-up-to-depth"
        assert cert.extra.get("refuted")


class TestStrongIrreducibility:
    def test_mixture_pair_has_invariant_pair(self, mixture_pair):
        mats = [m.A for m in mixture_pair.maps]
        cert = strong_irreducibility_check(mats)
        assert cert.kind == "invariant-line-pair"
        assert set(cert.lines) == {ProjPoint(F(1), F(0)), ProjPoint(F(0), F(1))}
        assert recheck_certificate(mats, cert)

    def test_sqrt2_strongly_irreducible(self):
        mats = list(sqrt2_unscaled_mats())
        cert = strong_irreducibility_check(mats)
        assert cert.kind == "strongly-irreducible"
        assert recheck_certificate(mats, cert)

    def test_single_diagonal_short_circuits(self):
        cert = strong_irreducibility_check([Mat2.diag(F(1, 2), F(1, 3))])
        assert cert.kind == "invariant-line"

    def test_edgar_strongly_irreducible(self, edgar8):
        cert = strong_irreducibility_check([m.A for m in edgar8.maps])
        assert cert.kind == "strongly-irreducible"

    def test_rotation_only_inconclusive(self):
        cert = strong_irreducibility_check([ROT_RAT.scaled(F(1, 2))], depth=3)
        assert cert.kind == "none-up-to-depth"


class TestFindCommonCone:
    def test_positive_pair_quadrant(self, positive_pair):
        mats = [m.A for m in positive_pair.maps]
        cert = find_common_cone(mats, resolution=24)
        assert cert.kind == "common-cone"
        assert recheck_certificate(mats, cert)

    def test_rotation_has_none(self):
        assert find_common_cone([ROT_RAT], resolution=24).kind == "none-up-to-depth"

    def test_edgar_full_system_cone_verifies(self, edgar8):
        # a strictly preserved arc exists (through e2, avoiding the two
        # repelling directions of slopes -4/3 and -3/4)
        mats = [m.A for m in edgar8.maps]
        cert = find_common_cone(mats, resolution=48)
        assert cert.kind == "common-cone"
        assert recheck_certificate(mats, cert)

    def test_cone_implies_products_hyperbolic(self, positive_pair):
        mats = [m.A for m in positive_pair.maps]
        cert = find_common_cone(mats, resolution=24)
        assert cert.kind == "common-cone"
        rng = random.Random(3)
        for _ in range(100):
            w = tuple(rng.randint(1, 2) for _ in range(rng.randint(1, 6)))
            h = is_hyperbolic(matrix_of_word_from(mats, w))
            assert h.is_hyperbolic

    def test_tampered_cone_rejected(self, positive_pair):
        mats = [m.A for m in positive_pair.maps]
        cert = find_common_cone(mats, resolution=24)
        bad = Certificate(
            "common-cone",
            arc=ProjInterval(
                ProjPoint(F(1), F(1, 100)),
                ProjPoint(F(1), F(1, 10)),
                ProjPoint(F(1), F(1, 20)),
            ),
        )
        assert not recheck_certificate(mats, bad)


class TestPingPong:
    def test_sqrt2_positive_quadrant(self):
        mats = list(sqrt2_positive_mats())
        cert = pingpong_free_certificate(mats, open_quadrant())
        assert cert.kind == "pingpong-free"
        assert cert.extra["galois_conjugate_also_free"]
        # image arcs are (0deg, 45deg) and (45deg, 90deg)
        diag = ProjPoint(QuadExt(1, 0, 2), QuadExt(1, 0, 2))
        img1 = open_quadrant().apply(mats[0])
        img2 = open_quadrant().apply(mats[1])
        assert {img1.p, img1.q} == {ProjPoint(F(1), F(0)), diag}
        assert {img2.p, img2.q} == {diag, ProjPoint(F(0), F(1))}
        assert recheck_certificate(mats, cert)

    def test_duplicate_fails(self):
        m = Mat2(F(1, 2), F(1, 4), F(1, 4), F(1, 4))
        cert = pingpong_free_certificate([m, m], open_quadrant())
        assert cert.kind == "none-up-to-depth"
        assert "overlap" in cert.notes

    def test_commuting_diagonals_fail(self):
        mats = [Mat2.diag(F(1, 2), F(1, 3)), Mat2.diag(F(1, 3), F(1, 2))]
        cert = pingpong_free_certificate(mats, open_quadrant())
        assert cert.kind == "none-up-to-depth"
        # consistent with the exact depth-2 collision A1 A2 = A2 A1
        stat = exp_separation_stat(mats, 2)
        assert stat.exact_collision and stat.c_n == 0.0

    def test_edgar_images_tile_quadrant(self, edgar8):
        cert = pingpong_free_certificate([m.A for m in edgar8.maps], open_quadrant())
        assert cert.kind == "pingpong-free"

    def test_galois_conjugate(self):
        mats = list(sqrt2_unscaled_mats())
        conj = [galois_conjugate_matrix(m) for m in mats]
        cert = pingpong_free_certificate(conj, open_quadrant())
        assert cert.kind == "pingpong-free"


class TestExpSeparation:
    def test_base_case_min_pairwise(self):
        mats = [Mat2.diag(F(1, 2), F(1, 3)), Mat2.diag(F(1, 3), F(1, 2))]
        stat = exp_separation_stat(mats, 1)
        # distance between the two generators: diag difference (1/6, -1/6)
        assert stat.c_n == pytest.approx(1 / 6, rel=1e-12)

    def test_commuting_collision(self):
        mats = [Mat2.diag(F(1, 2), F(1, 3)), Mat2.diag(F(1, 3), F(1, 2))]
        stat = exp_separation_stat(mats, 2)
        assert stat.c_n == 0.0
        assert stat.exact_collision
        assert set(stat.pair) == {(1, 2), (2, 1)}

    def test_sqrt2_separated_up_to_8(self):
        mats = list(sqrt2_unscaled_mats())
        for n in (2, 4, 6, 8):
            stat = exp_separation_stat(mats, n)
            assert stat.c_n > 0.05
            assert not stat.exact_collision

    def test_normalized_variant(self):
        mats = list(sqrt2_unscaled_mats())
        stat = exp_separation_stat(mats, 4, normalize=True)
        assert stat.normalized and stat.c_n > 0.0

    def test_normalized_detects_proportional(self):
        m = Mat2(F(1, 2), F(1, 4), F(1, 4), F(1, 4))
        mats = [m, m.scaled(F(1, 2))]
        stat = exp_separation_stat(mats, 1, normalize=True)
        assert stat.exact_collision and stat.c_n == 0.0

    def test_single_matrix_rejected(self):
        with pytest.raises(ValueError):
            exp_separation_stat([ROT_RAT], 2)


class TestBunching:
    def test_edgar_variant_passes_exactly(self):
        m = Mat2(F(1, 5), F(1, 5), F(0), F(1, 5))
        a1, a2 = m.singular_values()
        assert a1 == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 50), rel=1e-12)
        assert a1 == pytest.approx(0.323607, abs=1e-6)
        assert a2 == pytest.approx(0.123607, abs=1e-6)
        entry = bunching_check([m], F(1, 2))[0]
        assert entry.passes and entry.exact

    def test_similarity_passes_every_t(self):
        m = ROT_RAT.scaled(F(1, 2))
        for t in (F(0), F(1, 4), F(1, 2), F(1)):
            assert bunching_check([m], t)[0].passes

    def test_strong_anisotropy_fails(self):
        entry = bunching_check([Mat2.diag(F(1, 2), F(1, 8))], F(1, 2))[0]
        assert not entry.passes and entry.exact

    def test_exact_matches_float_recomputation(self):
        rng = random.Random(21)
        for _ in range(50):
            while True:
                e = [F(rng.randint(-4, 4), rng.randint(2, 9)) for _ in range(4)]
                if e[0] * e[3] - e[1] * e[2] != 0:
                    break
            m = Mat2(*e)
            for t in (F(1, 4), F(1, 2), F(3, 4)):
                entry = bunching_check([m], t)[0]
                a1, a2 = m.singular_values()
                float_pass = a1 <= a2 ** float(t) + 1e-12
                if entry.exact and abs(a2 ** float(t) - a1) > 1e-10:
                    assert entry.passes == float_pass


class TestProjectionInjectivity:
    def embed(self, *shifts):
        half = Mat2.diag(F(1, 2), F(1, 2))
        return IFSystem(
            tuple(AffineMap(half, (s, s)) for s in shifts)
        )

    def test_generic_translations_pass(self):
        sysm = self.embed(F(0), F(1, 3))
        rep = check_projection_injectivity(sysm, 6)
        assert rep.passed

    def test_zero_translations_collide(self):
        sysm = self.embed(F(0), F(0))
        rep = check_projection_injectivity(sysm, 3)
        assert not rep.passed

    def test_quarter_shift_against_bruteforce(self):
        # independent oracle: enumerate forward compositions directly
        sysm = self.embed(F(0), F(1, 4))
        rep = check_projection_injectivity(sysm, 5)
        vals = {}
        collision = None
        level = [((), (F(0), F(0)))]

        def apply(sym, pt):
            t = F(1, 4) if sym == 2 else F(0)
            return (pt[0] / 2 + t, pt[1] / 2 + t)

        for depth in range(1, 6):
            nxt = []
            for w, pt in level:
                for sym in (1, 2):
                    nxt.append((w + (sym,), apply(sym, pt)))
            level = nxt
            seen = {}
            for w, pt in level:
                if pt[0] in seen:
                    collision = depth
                    break
                seen[pt[0]] = w
            if collision:
                break
        assert rep.passed == (collision is None)
        if collision is not None:
            assert rep.depth <= 5

    def test_shape_rejected(self, positive_pair):
        with pytest.raises(ValueError):
            check_projection_injectivity(positive_pair, 3)


class TestHypothesisReports:
    def test_edgar_thm12_unmet_via_sosc(self, edgar8):
        rep = hypothesis_report(edgar8, "thm1.2", depth=4, n_max=4)
        assert rep.overall == "unmet"
        sosc = rep.condition("strong-open-set-condition")
        assert sosc.status == "refuted"
        assert "fixed point" in sosc.detail
        assert rep.condition("strong-irreducibility").status == "verified"
        assert rep.condition("affinity>=3/2").status == "verified"

    def test_sqrt2_cor67_met(self, sqrt2pair):
        rep = hypothesis_report(sqrt2pair, "cor6.7", depth=6, n_max=8)
        assert rep.overall == "met"
        for c in rep.conditions:
            assert c.status == "verified", (c.name, c.status, c.detail)
        assert rep.condition("exponential-separation").route == "algebraic-freeness"

    def test_similarity_pair_thm13_bunching_but_no_hyperbolic(self, similarity_pair):
        rep = hypothesis_report(similarity_pair, "thm1.3", depth=3, n_max=4)
        assert rep.condition("bunching(t=0.5)").status == "verified"
        assert rep.condition("hyperbolic-element").status == "refuted"
        assert rep.overall == "unmet"

    def test_thm66_parameter_validation(self, positive_pair):
        with pytest.raises(ValueError):
            hypothesis_report(positive_pair, "thm6.6")
        with pytest.raises(ValueError):
            hypothesis_report(positive_pair, "thm6.6", t=0.7)
        rep = hypothesis_report(positive_pair, "thm6.6", t=0.25, depth=3, n_max=6)
        assert any(c.name.startswith("affinity>=") for c in rep.conditions)

    def test_unknown_bundle(self, positive_pair):
        with pytest.raises(ValueError):
            hypothesis_report(positive_pair, "thm9.9")
