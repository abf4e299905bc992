"""Empirical stationary measures on the projective line.

Random products applied to a direction converge (under distinct Lyapunov
exponents) to the stationary measure of the unstable direction; the sampler
here is a diagnostic companion to the exact formula `hoso_dimension`, never
a rigorous estimator, so consumers use generous tolerances or exact atoms.
Directions are parameterized by angle mod pi; distances are sines of angle
differences, matching the projective metric used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Optional

import numpy as np

from .ifs import IFSError, IFSystem
from .measures import lyapunov_exponents, rng_stream
from .pressure import float_generators


@dataclass(frozen=True)
class ProjectiveSample:
    """Sampled directions (angles in [0, pi)) plus generation metadata."""

    angles: np.ndarray
    seed: int
    burn_in: int
    n: int
    probabilities: tuple
    stable: bool = False

    def to_json(self) -> dict:
        return {
            "count": int(self.angles.size),
            "seed": self.seed,
            "burn_in": self.burn_in,
            "probabilities": [float(p) for p in self.probabilities],
            "stable": self.stable,
            "mean_angle": float(np.mean(self.angles)) if self.angles.size else None,
        }


def _check_distinct_exponents(ifs: IFSystem, probs) -> None:
    if all(m.A.is_similarity() for m in ifs.maps):
        raise IFSError(
            "all maps are similarities: Lyapunov exponents coincide and the"
            " stationary direction measure is undefined"
        )
    est = lyapunov_exponents(
        ifs, probs, method="auto", n=48, samples=4000, seed=101
    )
    slack = max(3 * (est.half_width1 + est.half_width2), 1e-9)
    if est.lambda1 - est.lambda2 <= slack:
        raise IFSError(
            f"Lyapunov exponents look equal (l1={est.lambda1:.6g},"
            f" l2={est.lambda2:.6g}); the stationary direction measure is"
            " undefined"
        )


def empirical_furstenberg(
    ifs: IFSystem,
    p=None,
    n: int = 10_000,
    burn_in: int = 1_000,
    seed: int = 7,
    stable: bool = False,
) -> ProjectiveSample:
    """Sample directions of the stationary measure by iterated random
    products; bit-deterministic for a fixed seed.

    stable=True drives the inverse-transpose cocycle instead, which samples
    the stable rather than the unstable direction.
    """
    probs = ifs.prob_floats() if p is None else np.array([float(q) for q in p])
    if len(probs) != ifs.M or abs(probs.sum() - 1.0) > 1e-9 or (probs <= 0).any():
        raise IFSError("invalid probability vector")
    _check_distinct_exponents(ifs, probs)
    gens = float_generators(ifs)
    if stable:
        inv = np.linalg.inv(gens)
        gens = np.transpose(inv, (0, 2, 1))
    rng = rng_stream(seed)
    total = burn_in + n
    idx = rng.choice(ifs.M, size=total, p=probs)
    u = np.array([math.cos(0.5), math.sin(0.5)])
    angles = np.empty(n)
    for k in range(total):
        u = gens[idx[k]] @ u
        nrm = math.hypot(u[0], u[1])
        u /= nrm
        if k >= burn_in:
            angles[k - burn_in] = math.atan2(u[1], u[0]) % math.pi
    return ProjectiveSample(angles, seed, burn_in, n, tuple(probs), stable)


def dimension_estimate(
    sample: ProjectiveSample,
    scale_range: tuple[int, int] = (3, 9),
    bootstrap: int = 20,
) -> tuple[float, float]:
    """Correlation-integral slope of the sampled direction distribution.

    Counts pairs within circular distance 2^-k for dyadic scales k in the
    given range (two-pointer pass over sorted angles, O(N log N)), fits the
    log-log slope by least squares, and reports a bootstrap standard error.
    Diagnostic only: there is no error guarantee.
    """
    angles = np.sort(sample.angles)
    n = angles.size
    if n < 1000:
        raise IFSError("dimension estimate needs at least 1000 samples")
    if float(angles[-1] - angles[0]) < 1e-12:
        return 0.0, 0.0

    def slope_of(sorted_angles: np.ndarray) -> float:
        xs, ys = [], []
        nn = sorted_angles.size
        for k in range(scale_range[0], scale_range[1] + 1):
            r = 2.0**-k
            cnt = _pairs_within(sorted_angles, r)
            if cnt <= nn:  # almost no pairs left: stop before log(0)
                break
            xs.append(math.log(r))
            ys.append(math.log(cnt / (nn * (nn - 1))))
        if len(xs) < 2:
            return 0.0
        xs_a, ys_a = np.array(xs), np.array(ys)
        return float(np.polyfit(xs_a, ys_a, 1)[0])

    est = slope_of(angles)
    rng = rng_stream(sample.seed, stream=997)
    boots = []
    for _ in range(bootstrap):
        take = np.sort(angles[rng.integers(0, n, size=n)])
        boots.append(slope_of(take))
    stderr = float(np.std(boots)) if boots else 0.0
    return est, stderr


def _pairs_within(sorted_angles: np.ndarray, r: float) -> int:
    """Ordered pairs (i != j) with circular distance (mod pi) <= r."""
    n = sorted_angles.size
    ext = np.concatenate([sorted_angles, sorted_angles + math.pi])
    right = np.searchsorted(ext, sorted_angles + r, side="right")
    count = int(np.sum(right - np.arange(1, n + 1)))
    return 2 * count


def hoso_dimension(h: float, l1: float, l2: float) -> float:
    """min(1, h / (lambda1 - lambda2)): the similarity dimension of the
    stationary direction measure under separation hypotheses."""
    if l1 <= l2:
        raise ValueError("need lambda1 > lambda2")
    if h < 0:
        raise ValueError("entropy must be nonnegative")
    return min(1.0, h / (l1 - l2))
