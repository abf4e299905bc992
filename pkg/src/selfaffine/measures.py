"""Bernoulli measures, Lyapunov exponents and dimension, Gibbs diagnostics.

All logarithms are natural; exponents are nats per symbol. The determinant
identity lambda1 + lambda2 = sum_i p_i log|det A_i| is exact for Bernoulli
measures, so estimators enforce it by construction: lambda2 is always
recovered from the exact determinant drift (a control variate for the
Monte Carlo path, an identity for the exact path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ifs import IFSError, IFSystem, words_of_length
from .linalg import Mat2, svf
from .pressure import BudgetExceededError, DEFAULT_BUDGET, float_generators, phi_values
from .scalars import exact_abs, exact_sign, to_float


@dataclass(frozen=True)
class BernoulliSpec:
    """Probability vector over an alphabet of symbols or of n-cylinders."""

    alphabet: tuple
    probs: tuple
    block_length: int = 1

    def __post_init__(self):
        if len(self.alphabet) != len(self.probs) or not self.alphabet:
            raise IFSError("alphabet/probability length mismatch")
        total = math.fsum(to_float(q) for q in self.probs)
        if abs(total - 1.0) > 1e-9:
            raise IFSError(f"probabilities sum to {total}, not 1")
        if any(to_float(q) < 0 for q in self.probs):
            raise IFSError("negative probability")

    def prob_floats(self) -> np.ndarray:
        return np.array([to_float(q) for q in self.probs])


def uniform_spec(alphabet: Sequence, block_length: int = 1) -> BernoulliSpec:
    m = len(alphabet)
    return BernoulliSpec(tuple(alphabet), tuple(Fraction(1, m) for _ in alphabet), block_length)


def entropy(spec: BernoulliSpec) -> float:
    """Shannon entropy -sum p log p with 0 log 0 = 0, in nats."""
    return -math.fsum(
        to_float(q) * math.log(to_float(q)) for q in spec.probs if to_float(q) > 0
    )


def entropy_rate(spec: BernoulliSpec) -> float:
    """Entropy per original symbol for block (sigma^n-Bernoulli) measures."""
    return entropy(spec) / spec.block_length


@dataclass(frozen=True)
class ExponentEstimate:
    lambda1: float
    lambda2: float
    half_width1: float
    half_width2: float
    method: str
    meta: dict = dfield(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "half_width1": self.half_width1,
            "half_width2": self.half_width2,
            "method": self.method,
            "meta": {k: v for k, v in self.meta.items()},
        }


def det_drift(ifs: IFSystem, probs: np.ndarray) -> float:
    """sum_i p_i log |det (scale_i A_i)|; exact identity for lambda1+lambda2."""
    logs = np.array([math.log(m.det_abs_float()) for m in ifs.maps])
    return float(probs @ logs)


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator: deterministic per (seed, stream) pair
    independent of how work is split across threads."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + int(stream)))


def _probs_from(ifs: IFSystem, p) -> np.ndarray:
    if p is None:
        return ifs.prob_floats()
    if isinstance(p, BernoulliSpec):
        return p.prob_floats()
    arr = np.array([to_float(q) for q in p], dtype=float)
    if len(arr) != ifs.M or abs(arr.sum() - 1.0) > 1e-9 or (arr <= 0).any():
        raise IFSError("invalid probability vector")
    return arr


def _diagonal_closed_form(ifs: IFSystem, probs: np.ndarray) -> Optional[ExponentEstimate]:
    if not all(m.A.is_diagonal() for m in ifs.maps):
        return None
    la = np.array(
        [math.log(abs(to_float(m.A.a)) * to_float(m.scale)) for m in ifs.maps]
    )
    lb = np.array(
        [math.log(abs(to_float(m.A.d)) * to_float(m.scale)) for m in ifs.maps]
    )
    chi_a = float(probs @ la)
    chi_b = float(probs @ lb)
    l1, l2 = max(chi_a, chi_b), min(chi_a, chi_b)
    return ExponentEstimate(l1, l2, 0.0, 0.0, "diagonal-closed-form", {})


def _exact_depth(
    ifs: IFSystem, probs: np.ndarray, n: int, budget: int
) -> ExponentEstimate:
    total = ifs.M**n
    if total > budget:
        raise BudgetExceededError(f"exact depth-{n} expectation needs {total} words")
    gens = float_generators(ifs)
    logp = np.log(probs)
    mats = gens.copy()
    lw = logp.copy()
    for _ in range(n - 1):
        mats = np.matmul(gens[None, :], mats[:, None]).reshape(-1, 2, 2)
        lw = (lw[:, None] + logp[None, :]).reshape(-1)
    a1 = _alpha1(mats)
    w = np.exp(lw)
    l1 = float(w @ np.log(a1)) / n
    drift = det_drift(ifs, probs)
    l2 = drift - l1
    if l1 < l2:  # conformal edge case: force the ordering
        l1 = l2 = drift / 2.0
    return ExponentEstimate(
        l1, l2, 0.0, 0.0, f"exact-depth-{n}", {"n": n}
    )


def _alpha1(mats: np.ndarray) -> np.ndarray:
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    q = np.hypot((a + d) / 2.0, (c - b) / 2.0)
    r = np.hypot((a - d) / 2.0, (c + b) / 2.0)
    return q + r


def _monte_carlo(
    ifs: IFSystem, probs: np.ndarray, n: int, samples: int, seed: int
) -> ExponentEstimate:
    if seed is None:
        raise IFSError("monte-carlo estimation needs a seed")
    rng = rng_stream(seed)
    idx = rng.choice(ifs.M, size=(samples, n), p=probs)
    if all(m.A.is_diagonal() for m in ifs.maps):
        la = np.array(
            [math.log(abs(to_float(m.A.a)) * to_float(m.scale)) for m in ifs.maps]
        )
        lb = np.array(
            [math.log(abs(to_float(m.A.d)) * to_float(m.scale)) for m in ifs.maps]
        )
        xa = la[idx].sum(axis=1)
        xb = lb[idx].sum(axis=1)
        log_a1 = np.maximum(xa, xb)
    else:
        gens = float_generators(ifs)
        cur = np.broadcast_to(np.eye(2), (samples, 2, 2)).copy()
        logacc = np.zeros(samples)
        for k in range(n):
            cur = np.matmul(gens[idx[:, k]], cur)
            if (k + 1) % 16 == 0:
                scale = np.abs(cur).max(axis=(1, 2))
                cur /= scale[:, None, None]
                logacc += np.log(scale)
        log_a1 = np.log(_alpha1(cur)) + logacc
    vals = log_a1 / n
    l1 = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    drift = det_drift(ifs, probs)
    l2 = drift - l1
    if l1 < l2:
        l1 = l2 = drift / 2.0
    return ExponentEstimate(
        l1, l2, stderr, stderr,
        "monte-carlo", {"seed": seed, "samples": samples, "n": n},
    )


def lyapunov_exponents(
    ifs: IFSystem,
    p=None,
    method: str = "auto",
    n: int = 64,
    samples: int = 10_000,
    seed: Optional[int] = 7,
    budget: int = DEFAULT_BUDGET,
) -> ExponentEstimate:
    """Estimate (lambda1, lambda2) for the Bernoulli measure with vector p.

    Methods: "diagonal" closed form (exact), "exact" depth-n expectation
    (upper bound for lambda1 by subadditivity), "monte-carlo", or "auto"
    (closed form when diagonal, else Monte Carlo).
    """
    probs = _probs_from(ifs, p)
    if method in ("auto", "diagonal"):
        closed = _diagonal_closed_form(ifs, probs)
        if closed is not None:
            return closed
        if method == "diagonal":
            raise IFSError("diagonal closed form needs a diagonal system")
    if method == "exact":
        return _exact_depth(ifs, probs, n, budget)
    if method in ("auto", "monte-carlo", "mc"):
        return _monte_carlo(ifs, probs, n, samples, seed)
    raise IFSError(f"unknown method {method!r}")


def lyapunov_dimension(h: float, l1: float, l2: float) -> float:
    """Piecewise entropy-over-exponents formula, deliberately uncapped.

    Branches meet continuously at h = -l1 (value 1) and at h = -(l1+l2)
    (value 2); the middle branch runs up to the latter seam.
    """
    if l1 < l2:
        raise ValueError("need lambda1 >= lambda2")
    if h < 0:
        raise ValueError("entropy must be nonnegative")
    if l1 >= 0 and h > 0:
        raise ValueError("Lyapunov dimension needs contracting exponents")
    if h == 0:
        return 0.0
    if h < -l1:
        return h / (-l1)
    if h < -(l1 + l2):
        return 1.0 + (h + l1) / (-l2)
    return 2.0 * h / (-l1 - l2)


def kaenmaki_approx(
    ifs: IFSystem, s: float, n: int, budget: int = DEFAULT_BUDGET
) -> BernoulliSpec:
    """Finite-level Gibbs surrogate: weights proportional to phi^s(A_w) over
    depth-n cylinders.

    This approximates the equilibrium state; the Gibbs constant is not
    effective, so downstream consumers treat it as a diagnostic measure,
    never as a proof.
    """
    total = ifs.M**n
    if total > budget:
        raise BudgetExceededError(f"kaenmaki weights need {total} words")
    gens = float_generators(ifs)
    mats = gens.copy()
    for _ in range(n - 1):
        mats = np.matmul(gens[None, :], mats[:, None]).reshape(-1, 2, 2)
    vals = phi_values(mats, float(s))
    norm = math.fsum(vals.tolist())
    probs = tuple(float(v) / norm for v in vals)
    words = tuple(words_of_length(ifs.M, n))
    return BernoulliSpec(words, probs, n)


def cylinder_exponents(ifs: IFSystem, spec: BernoulliSpec) -> ExponentEstimate:
    """Per-original-symbol exponents of a block Bernoulli measure whose
    alphabet entries are words of the base system."""
    from .ifs import matrix_of_word, word_scale

    n = spec.block_length
    l1_terms = []
    drift_terms = []
    for w, q in zip(spec.alphabet, spec.probs):
        qf = to_float(q)
        if qf == 0:
            continue
        mat = matrix_of_word(ifs, w)
        sc = to_float(word_scale(ifs, w))
        a1 = sc * mat.singular_values()[0]
        l1_terms.append(qf * math.log(a1))
        drift_terms.append(qf * math.log(sc * sc * abs(to_float(mat.det()))))
    l1 = math.fsum(l1_terms) / n
    drift = math.fsum(drift_terms) / n
    l2 = drift - l1
    if l1 < l2:
        l1 = l2 = drift / 2.0
    return ExponentEstimate(l1, l2, 0.0, 0.0, f"cylinder-depth-{n}", {"n": n})


def gibbs_divergence_test(
    ifs: IFSystem, i: int, j: int, s: float, n_list: Sequence[int]
) -> list[float]:
    """Ratios phi^s(A_i^(2n) A_j) / phi^s(A_i^n A_j A_i^n) for n in n_list.

    A growing sequence certifies that no Bernoulli measure can satisfy the
    Gibbs property for phi^s: the two words are permutations of each other,
    so a Bernoulli Gibbs measure would force the ratio to stay bounded.
    Requires A_i diagonal hyperbolic and A_j anti-diagonal.
    """
    ai = ifs.maps[i - 1].A
    aj = ifs.maps[j - 1].A
    if not ai.is_diagonal():
        raise IFSError("first index must name a diagonal map")
    if exact_sign(exact_abs(ai.a) - exact_abs(ai.d)) == 0:
        raise IFSError("diagonal map must be hyperbolic (unequal moduli)")
    if not aj.is_antidiagonal():
        raise IFSError("second index must name an anti-diagonal map")
    out = []
    for n in n_list:
        ain = _mat_pow(ai, n)
        ai2n = ain @ ain
        num = svf(ai2n @ aj, s)
        den = svf(ain @ aj @ ain, s)
        out.append(num / den)
    return out


def _mat_pow(m: Mat2, k: int) -> Mat2:
    out = Mat2.identity()
    base = m
    while k:
        if k & 1:
            out = base @ out
        base = base @ base
        k >>= 1
    return out
