"""Analysis toolkit for planar affine iterated function systems.

Computes affinity and Lyapunov dimension brackets, emits machine-checkable
structural certificates (cones, freeness, irreducibility, separation),
extracts well-behaved subsystems, and renders attractors.
"""

from .scalars import DyadicPow, QuadExt, Scalar
from .linalg import (
    Mat2,
    ProjInterval,
    ProjPoint,
    interval_image,
    is_hyperbolic,
    proj_distance,
    singular_values,
    strictly_inside,
    svf,
)
from .ifs import (
    AffineMap,
    AttractorCover,
    IFSystem,
    attractor_cover,
    coding_point,
    compose_word,
    load_ifs,
    matrix_of_word,
    parse_ifs,
    serialize_ifs,
)

__all__ = [
    "AffineMap",
    "AttractorCover",
    "DyadicPow",
    "IFSystem",
    "Mat2",
    "ProjInterval",
    "ProjPoint",
    "QuadExt",
    "Scalar",
    "attractor_cover",
    "coding_point",
    "compose_word",
    "interval_image",
    "is_hyperbolic",
    "load_ifs",
    "matrix_of_word",
    "parse_ifs",
    "proj_distance",
    "serialize_ifs",
    "singular_values",
    "strictly_inside",
    "svf",
]

__version__ = "0.1.0"
