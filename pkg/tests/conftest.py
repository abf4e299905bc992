import pathlib
from fractions import Fraction

import pytest

from selfaffine.ifs import AffineMap, IFSystem, load_ifs
from selfaffine.linalg import Mat2
from selfaffine.scalars import QuadExt

SYSTEMS_DIR = pathlib.Path(__file__).resolve().parents[1] / "systems"

F = Fraction


def systems_path(name: str) -> pathlib.Path:
    return SYSTEMS_DIR / name


@pytest.fixture(scope="session")
def edgar8() -> IFSystem:
    """Eight area-1/16 maps fixing the origin; OSC holds on the unit square
    but the attractor is the single point 0."""
    return load_ifs(str(systems_path("edgar8.json")))


@pytest.fixture(scope="session")
def sqrt2pair() -> IFSystem:
    """Two elliptic generators over Q(sqrt(2)), scaled by 2^(-11/12)."""
    return load_ifs(str(systems_path("sqrt2pair.json")))


@pytest.fixture(scope="session")
def carpet2() -> IFSystem:
    """Diagonal two-map carpet with reciprocal axis ratios 7/9 and 13/27."""
    return load_ifs(str(systems_path("carpet2.json")))


@pytest.fixture(scope="session")
def square4() -> IFSystem:
    """Four half-scale similarities tiling the unit square (attractor = square)."""
    return load_ifs(str(systems_path("square4.json")))


def make_similarity_pair() -> IFSystem:
    """{x/2, x/2 + (1/2, 1/2)}: SSC-like diagonal dust in the unit square."""
    half = Mat2.diag(F(1, 2), F(1, 2))
    return IFSystem(
        (
            AffineMap(half, (F(0), F(0))),
            AffineMap(half, (F(1, 2), F(1, 2))),
        )
    )


@pytest.fixture(scope="session")
def similarity_pair() -> IFSystem:
    return make_similarity_pair()


def make_positive_pair() -> IFSystem:
    """Strictly positive pair {[[2,1],[1,1]]/4, [[1,1],[1,2]]/4}."""
    a = Mat2(F(1, 2), F(1, 4), F(1, 4), F(1, 4))
    b = Mat2(F(1, 4), F(1, 4), F(1, 4), F(1, 2))
    return IFSystem(
        (
            AffineMap(a, (F(0), F(0))),
            AffineMap(b, (F(1, 2), F(1, 4))),
        )
    )


@pytest.fixture(scope="session")
def positive_pair() -> IFSystem:
    return make_positive_pair()


def make_mixture_pair() -> IFSystem:
    """Diagonal/anti-diagonal mixture {diag(1/2,1/4), antidiag(1/3,1/3)}."""
    return IFSystem(
        (
            AffineMap(Mat2.diag(F(1, 2), F(1, 4)), (F(0), F(0))),
            AffineMap(Mat2.antidiag(F(1, 3), F(1, 3)), (F(1, 2), F(0))),
        )
    )


@pytest.fixture(scope="session")
def mixture_pair() -> IFSystem:
    return make_mixture_pair()


def sqrt2_unscaled_mats() -> tuple[Mat2, Mat2]:
    """The unscaled generators [[1,-s2],[1,0]], [[0,1],[-s2,1]]."""
    s2 = QuadExt(0, 1, 2)
    return (
        Mat2(QuadExt(1, 0, 2), -s2, QuadExt(1, 0, 2), QuadExt(0, 0, 2)),
        Mat2(QuadExt(0, 0, 2), QuadExt(1, 0, 2), -s2, QuadExt(1, 0, 2)),
    )


def sqrt2_positive_mats() -> tuple[Mat2, Mat2]:
    """Galois-conjugate positive generators [[1,s2],[1,0]], [[0,1],[s2,1]]."""
    s2 = QuadExt(0, 1, 2)
    one = QuadExt(1, 0, 2)
    zero = QuadExt(0, 0, 2)
    return (Mat2(one, s2, one, zero), Mat2(zero, one, s2, one))
