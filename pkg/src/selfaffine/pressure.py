"""Topological pressure brackets, affinity dimension, determinant pressure.

Upper bounds come from finite-level sums (valid for every level by
subadditivity of the singular value function). Lower bounds are honest and
carry a provenance tag:

* "diagonal-exact": for diagonal systems the pressure has a closed form,
  log max(sum a_i b_i^(s-1), sum b_i a_i^(s-1)) on the middle branch (and
  the obvious analogues on the outer branches), because the level sums are
  sandwiched between max(S_a, S_b)^n and S_a^n + S_b^n.
* "cone": when every map provably maps a projective arc K into itself, the
  minimum growth g(A) = min_{u in K} |Au| is supermultiplicative, so
  level sums of the surrogate psi (g in place of alpha_1) give rigorous
  lower bounds via superadditive Fekete.
* "diagonal-subsystem": for diagonal/anti-diagonal mixtures, the diagonal
  words of a fixed block length form a diagonal system whose exact pressure
  divided by the block length is a rigorous lower bound.
* "eigenvalue-sum-heuristic": spectral radii in place of singular values;
  not proven to be a lower bound in general, reported as a diagnostic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .ifs import IFSError, IFSystem, words_of_length
from .linalg import ProjInterval, maps_arc_into
from .scalars import Fraction as _F  # noqa: F401  (re-export convenience)
from .scalars import as_fraction, to_float

DEFAULT_BUDGET = 20_000_000


class BudgetExceededError(IFSError):
    pass


# -- vectorized singular value machinery -------------------------------------


def float_generators(ifs: IFSystem) -> np.ndarray:
    """(M, 2, 2) float array of the effective linear parts (scales folded)."""
    return np.stack([m.linear_floats() for m in ifs.maps])


def _sv_arrays(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    e, f = (a + d) / 2.0, (a - d) / 2.0
    g, h = (c + b) / 2.0, (c - b) / 2.0
    q = np.hypot(e, h)
    r = np.hypot(f, g)
    s1 = q + r
    s2 = np.abs(a * d - b * c) / s1
    return s1, s2


def phi_values(mats: np.ndarray, s: float) -> np.ndarray:
    """Vectorized singular value function over an (N, 2, 2) array."""
    s1, s2 = _sv_arrays(mats)
    if s < 1.0:
        return s1**s
    if s < 2.0:
        return s1 * s2 ** (s - 1.0)
    return (s1 * s2) ** (s / 2.0)


def phi_star_values(mats: np.ndarray, s: float) -> np.ndarray:
    """Eigenvalue-moduli variant of the SVF (spectral radii for alpha's)."""
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4.0 * det
    real = disc >= 0
    rho1 = np.where(real, (np.abs(tr) + np.sqrt(np.abs(disc))) / 2.0, np.sqrt(np.abs(det)))
    rho1 = np.maximum(rho1, 1e-300)
    rho2 = np.abs(det) / rho1
    if s < 1.0:
        return rho1**s
    if s < 2.0:
        return rho1 * rho2 ** (s - 1.0)
    return np.abs(det) ** (s / 2.0)


def arc_min_norm(mats: np.ndarray, arc: ProjInterval) -> np.ndarray:
    """min over directions u in the arc of |A u| / |u|, vectorized.

    The squared norm along u(theta) is a sinusoid in 2*theta; the minimum
    over the arc is attained at an endpoint or at the interior critical
    direction of A^T A.
    """
    t0, span = arc.angles()
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    g11 = a * a + c * c
    g12 = a * b + c * d
    g22 = b * b + d * d
    mid = (g11 + g22) / 2.0
    cosc = (g11 - g22) / 2.0
    amp = np.hypot(cosc, g12)

    def value_at(theta):
        return mid + cosc * np.cos(2 * theta) + g12 * np.sin(2 * theta)

    vals = np.minimum(value_at(t0), value_at(t0 + span))
    # direction of the global minimum of the sinusoid: 2 theta = phi + pi
    phi = np.arctan2(g12, cosc)
    tmin = ((phi + math.pi) / 2.0 - t0) % math.pi
    inside = tmin <= span
    crit = mid - amp
    vals = np.where(inside, np.minimum(vals, crit), vals)
    return np.sqrt(np.maximum(vals, 0.0))


def psi_cone_values(mats: np.ndarray, s: float, arc: ProjInterval) -> np.ndarray:
    """Supermultiplicative lower surrogate of the SVF on a preserved arc."""
    g = arc_min_norm(mats, arc)
    if s < 1.0:
        return g**s
    det = np.abs(mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0])
    if s < 2.0:
        return g ** (2.0 - s) * det ** (s - 1.0)
    return det ** (s / 2.0)


# -- product enumeration ------------------------------------------------------


def iter_product_chunks(
    gens: np.ndarray, n: int, budget: int = DEFAULT_BUDGET, chunk_pow: int = 16
) -> Iterator[np.ndarray]:
    """Yield all A_w = A_{w_n} ... A_{w_1}, |w| = n, in lexicographic chunks.

    Memory stays O(M**ceil(n/2)); raises on budget overrun.
    """
    m = gens.shape[0]
    total = m**n
    if total > budget:
        raise BudgetExceededError(
            f"level sum needs {total} products, budget is {budget}; "
            "reduce the depth or use the bracket at smaller n"
        )
    if n == 0:
        yield np.eye(2)[None]
        return

    def build(k: int) -> np.ndarray:
        arr = gens.copy()
        for _ in range(k - 1):
            # append symbol j: A_{w j} = A_j @ A_w; lexicographic order kept
            arr = np.matmul(gens[None, :], arr[:, None]).reshape(-1, 2, 2)
        return arr

    half = min(n, max(1, chunk_pow // max(1, int(math.log2(max(m, 2))))))
    if n <= half:
        yield build(n)
        return
    g1 = n // 2
    prefixes = build(g1)  # products of the first g1 symbols
    suffixes = build(n - g1)  # products of the last n - g1 symbols
    # w = (u, v), A_w = A_v-part @ A_u-part; iterate the prefix index (slow
    # index in lexicographic order), vectorize over suffixes
    for i in range(prefixes.shape[0]):
        yield np.matmul(suffixes, prefixes[i][None])


def _fsum_chunks(chunks: Iterable[np.ndarray]) -> float:
    # compensated: exact fsum across chunk totals, pairwise np.sum within
    return math.fsum(float(np.sum(c, dtype=np.float64)) for c in chunks)


# -- diagonal closed forms ----------------------------------------------------


def _diag_entries(ifs: IFSystem) -> Optional[tuple[np.ndarray, np.ndarray]]:
    if not all(m.A.is_diagonal() for m in ifs.maps):
        return None
    a = np.array([abs(to_float(m.scale) * to_float(m.A.a)) for m in ifs.maps])
    b = np.array([abs(to_float(m.scale) * to_float(m.A.d)) for m in ifs.maps])
    return a, b


def is_diagonal_system(ifs: IFSystem) -> bool:
    return _diag_entries(ifs) is not None


def is_diag_antidiag_system(ifs: IFSystem) -> bool:
    return all(m.A.is_diagonal() or m.A.is_antidiagonal() for m in ifs.maps)


def _logsumexp(vals: np.ndarray) -> float:
    mx = float(np.max(vals))
    if not math.isfinite(mx):
        return mx
    return mx + math.log(float(np.sum(np.exp(vals - mx))))


def _diag_level_sum(a: np.ndarray, b: np.ndarray, s: float, n: int) -> float:
    """log sum of phi^s over all words, collapsed by letter counts."""
    m = len(a)
    la, lb = np.log(a), np.log(b)
    terms = []
    for counts in _compositions(n, m):
        k = np.array(counts, dtype=float)
        logmult = math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)
        pa = float(k @ la)
        pb = float(k @ lb)
        hi, lo = max(pa, pb), min(pa, pb)
        if s < 1.0:
            lphi = s * hi
        elif s < 2.0:
            lphi = hi + (s - 1.0) * lo
        else:
            lphi = (s / 2.0) * (hi + lo)
        terms.append(logmult + lphi)
    return _logsumexp(np.array(terms))


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All m-tuples of nonnegative ints summing to n."""
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def diagonal_pressure(ifs: IFSystem, s: float) -> float:
    """Exact pressure of a diagonal system (closed form, all branches)."""
    ent = _diag_entries(ifs)
    if ent is None:
        raise IFSError("closed form needs a diagonal system")
    a, b = ent
    s = float(s)
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s < 1.0:
        return math.log(max(float(np.sum(a**s)), float(np.sum(b**s))))
    if s < 2.0:
        sa = float(np.sum(a * b ** (s - 1.0)))
        sb = float(np.sum(b * a ** (s - 1.0)))
        return math.log(max(sa, sb))
    return math.log(float(np.sum((a * b) ** (s / 2.0))))


def carpet_pressure(ifs: IFSystem, s: float) -> float:
    """Exact pressure of a diagonal/anti-diagonal system.

    Products of such matrices are again diagonal or anti-diagonal, and the
    entry magnitudes (|x|, |y|) obey a two-channel recursion: a diagonal map
    sends (|x|, |y|) -> (a|x|, b|y|) and an anti-diagonal one sends it to
    (c|y|, d|x|). Channel sums therefore evolve by a nonnegative 2x2
    transfer matrix T(s), and the level sums of phi^s are sandwiched
    between rho(T)^n and 2 rho(T)^n, so P = log rho(T(s)) exactly.
    """
    s = float(s)
    if s < 0:
        raise ValueError("s must be nonnegative")
    t = np.zeros((2, 2))
    for m in ifs.maps:
        sc = abs(to_float(m.scale))
        if m.A.is_diagonal():
            a = abs(to_float(m.A.a)) * sc
            b = abs(to_float(m.A.d)) * sc
            if s < 1.0:
                t[0, 0] += a**s
                t[1, 1] += b**s
            elif s < 2.0:
                t[0, 0] += a * b ** (s - 1.0)
                t[1, 1] += b * a ** (s - 1.0)
            else:
                t[0, 0] += (a * b) ** (s / 2.0)
                t[1, 1] += (a * b) ** (s / 2.0)
        elif m.A.is_antidiagonal():
            c = abs(to_float(m.A.b)) * sc
            d = abs(to_float(m.A.c)) * sc
            if s < 1.0:
                t[0, 1] += c**s
                t[1, 0] += d**s
            elif s < 2.0:
                t[0, 1] += c * d ** (s - 1.0)
                t[1, 0] += d * c ** (s - 1.0)
            else:
                t[0, 1] += (c * d) ** (s / 2.0)
                t[1, 0] += (c * d) ** (s / 2.0)
        else:
            raise IFSError("carpet closed form needs diagonal/anti-diagonal maps")
    tr = t[0, 0] + t[1, 1]
    det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    rho = (tr + math.sqrt(max(tr * tr - 4.0 * det, 0.0))) / 2.0
    return math.log(rho)


# -- level sums ---------------------------------------------------------------


def level_sum(
    ifs: IFSystem, s: float, n: int, budget: int = DEFAULT_BUDGET
) -> float:
    """log of sum over |w| = n of phi^s(A_w), exact enumeration in float.

    Diagonal systems collapse by letter counts, which admits depths in the
    hundreds; otherwise products are enumerated in lexicographic chunks
    with compensated summation.
    """
    if n < 1:
        raise ValueError("level sum needs n >= 1")
    s = float(s)
    if s < 0:
        raise ValueError("s must be nonnegative")
    ent = _diag_entries(ifs)
    if ent is not None:
        a, b = ent
        ncomp = math.comb(n + ifs.M - 1, ifs.M - 1)
        if ncomp > budget:
            raise BudgetExceededError("too many letter-count classes")
        return _diag_level_sum(a, b, s, n)
    gens = float_generators(ifs)
    total = _fsum_chunks(
        phi_values(c, s) for c in iter_product_chunks(gens, n, budget)
    )
    return math.log(total)


def level_sum_brute(ifs: IFSystem, s: float, n: int) -> float:
    """Independent reference: plain python loop over all words."""
    from .ifs import matrix_of_word, word_scale
    from .linalg import svf

    vals = []
    for w in words_of_length(ifs.M, n):
        sc = to_float(word_scale(ifs, w))
        vals.append((sc ** float(s)) * svf(matrix_of_word(ifs, w), s))
    return math.log(math.fsum(vals))


# -- determinant pressure -----------------------------------------------------


def det_level_sum_exact(ifs: IFSystem, s: Fraction) -> Optional[Fraction]:
    """Sum |det T_i'|**(s/2) as an exact Fraction when representable.

    Handles dyadic-power determinants (including b*sqrt(2) ones via the
    2**(k + 1/2) form) with s/2 * log2|det| integral, and plain rational
    determinants with integer s/2.
    """
    s = Fraction(s)
    total = Fraction(0)
    for m in ifs.maps:
        e = m.det_abs_log2()
        if e is not None:
            ee = e * s / 2
            if ee.denominator == 1:
                k = ee.numerator
                total += Fraction(1 << k) if k >= 0 else Fraction(1, 1 << (-k))
                continue
        if (s / 2).denominator == 1:
            f = as_fraction(m.A.det())
            rs = as_fraction(m.scale)
            if f is not None and rs is not None:
                total += (abs(f) * rs * rs) ** int(s / 2)
                continue
        return None
    return total


def det_pressure(ifs: IFSystem, s) -> float:
    """P1(A, s) = log sum |det A_i|^(s/2); exact fast path when possible."""
    sf = Fraction(s) if not isinstance(s, float) else None
    if sf is not None:
        exact = det_level_sum_exact(ifs, sf)
        if exact is not None:
            if exact == 1:
                return 0.0
            return math.log(exact)
    total = math.fsum(m.det_abs_float() ** (float(s) / 2.0) for m in ifs.maps)
    return math.log(total)


# -- brackets -----------------------------------------------------------------


@dataclass
class PressureBracket:
    s: float
    lower: float
    upper: float
    n: int
    upper_method: str
    lower_method: str
    table: dict[int, float] = dfield(default_factory=dict)  # per-depth uppers

    def width(self) -> float:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "lower": self.lower,
            "upper": self.upper,
            "n": self.n,
            "upper_method": self.upper_method,
            "lower_method": self.lower_method,
            "per_depth_upper": {str(k): v for k, v in sorted(self.table.items())},
        }


def _upper_depths(ifs: IFSystem, n_max: int, budget: int) -> list[int]:
    ent = _diag_entries(ifs)
    out = []
    for n in range(1, n_max + 1):
        if ent is not None:
            if math.comb(n + ifs.M - 1, ifs.M - 1) <= budget:
                out.append(n)
        elif ifs.M**n <= budget:
            out.append(n)
    if not out:
        raise BudgetExceededError("no depth fits the budget")
    return out


def _cone_lower(
    ifs: IFSystem, s: float, depths: Sequence[int], arc: ProjInterval, budget: int
) -> float:
    gens = float_generators(ifs)
    best = -math.inf
    for n in depths:
        if ifs.M**n > budget:
            continue
        tot = _fsum_chunks(
            psi_cone_values(c, s, arc) for c in iter_product_chunks(gens, n, budget)
        )
        if tot > 0:
            best = max(best, math.log(tot) / n)
    return best


def _heuristic_lower(
    ifs: IFSystem, s: float, depths: Sequence[int], budget: int
) -> float:
    gens = float_generators(ifs)
    best = -math.inf
    for n in depths:
        if ifs.M**n > budget:
            continue
        tot = _fsum_chunks(
            phi_star_values(c, s) for c in iter_product_chunks(gens, n, budget)
        )
        best = max(best, math.log(tot) / n)
    return best


def pressure_bracket(
    ifs: IFSystem,
    s,
    n_max: int = 8,
    budget: int = DEFAULT_BUDGET,
    arc: Optional[ProjInterval] = None,
) -> PressureBracket:
    """Bracket for P(phi^s). The upper bound is the best finite-level bound
    (every level is valid by Fekete); for diagonal systems the closed form
    pins the value exactly. Lower-bound provenance is tagged."""
    s = float(s)
    depths = _upper_depths(ifs, n_max, budget)
    table = {n: level_sum(ifs, s, n, budget) / n for n in depths}
    n_best = min(table, key=lambda n: table[n])
    upper = table[n_best]
    upper_method = f"level-sum(n={n_best})"

    if is_diag_antidiag_system(ifs):
        # the closed form is the pressure itself; level sums stay in the
        # table as diagnostics
        exact = carpet_pressure(ifs, s)
        tag = "diagonal-exact" if is_diagonal_system(ifs) else "carpet-exact"
        return PressureBracket(s, exact, exact, n_best, tag, tag, table)

    if s >= 2.0:
        # phi^s is multiplicative: pressure equals the determinant pressure
        exact = det_pressure(ifs, s)
        return PressureBracket(
            s, exact, exact, n_best, "determinant-exact", "determinant-exact", table
        )

    if arc is not None and all(maps_arc_into(m.A, arc) for m in ifs.maps):
        lower = _cone_lower(ifs, s, depths, arc, budget)
        method = "cone"
    else:
        lower = -math.inf
        method = "none"
    heur = _heuristic_lower(ifs, s, depths[-1:], budget)
    if heur > lower and method in ("none",):
        lower, method = heur, "eigenvalue-sum-heuristic"
    lower = min(lower, upper)
    return PressureBracket(s, lower, upper, n_best, upper_method, method, table)


# -- affinity dimension -------------------------------------------------------


@dataclass
class DimensionReport:
    s_lo: float
    s_hi: float
    s_estimate: float
    lower_method: str
    upper_method: str
    is_ge_2: bool
    det_sum_at_3_4: float
    det_sum_at_3_4_exact: Optional[Fraction]
    affinity_ge_three_halves: bool
    tol: float
    tol_achieved: bool
    notes: list[str] = dfield(default_factory=list)
    pressure_table: dict[str, dict] = dfield(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "s_lo": self.s_lo,
            "s_hi": self.s_hi,
            "s_estimate": self.s_estimate,
            "lower_method": self.lower_method,
            "upper_method": self.upper_method,
            "is_ge_2": self.is_ge_2,
            "det_sum_at_3_4": self.det_sum_at_3_4,
            "det_sum_at_3_4_exact": (
                str(self.det_sum_at_3_4_exact)
                if self.det_sum_at_3_4_exact is not None
                else None
            ),
            "affinity_ge_three_halves": self.affinity_ge_three_halves,
            "tol": self.tol,
            "tol_achieved": self.tol_achieved,
            "notes": self.notes,
            "pressure_table": self.pressure_table,
        }


def _bisect_root(f, lo: float, hi: float, tol: float, maxit: int = 200) -> float:
    """Root of a decreasing function with f(lo) >= 0 >= f(hi)."""
    flo, fhi = f(lo), f(hi)
    if flo < 0:
        return lo
    if fhi > 0:
        return hi
    for _ in range(maxit):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2.0
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def det_pressure_root(ifs: IFSystem, tol: float = 1e-12) -> float:
    return _bisect_root(lambda s: det_pressure(ifs, s), 0.0, 8.0, tol)


def affinity_dimension(
    ifs: IFSystem,
    tol: float = 1e-4,
    n_max: int = 8,
    budget: int = DEFAULT_BUDGET,
    arc: Optional[ProjInterval] = None,
    auto_cone: bool = False,
) -> DimensionReport:
    """Bracket [s_lo, s_hi] for the unique root of s -> P(phi^s).

    Single-map degenerate cases follow inf{s : P(s) <= 0}. When the root is
    >= 2 the pressure is the determinant pressure in closed form.
    """
    ifs.require_contractive()
    notes: list[str] = []

    s34_exact = det_level_sum_exact(ifs, Fraction(3, 2))
    s34 = (
        float(s34_exact)
        if s34_exact is not None
        else math.fsum(m.det_abs_float() ** 0.75 for m in ifs.maps)
    )
    ge32 = s34_exact >= 1 if s34_exact is not None else s34 >= 1.0
    if ge32:
        notes.append(
            "sum |det|^(3/4) >= 1, so the affinity dimension is at least 3/2"
        )

    if det_pressure(ifs, 2) >= 0.0:
        root = det_pressure_root(ifs, min(tol, 1e-12))
        is2 = True
        if root > 2.0 + 1e-12:
            notes.append(
                "affinity dimension exceeds 2: the open set condition cannot hold"
            )
        else:
            notes.append(
                "affinity dimension is 2: under the OSC the attractor has"
                " non-empty interior"
            )
        return DimensionReport(
            root, root, root, "determinant-exact", "determinant-exact",
            is2, s34, s34_exact, ge32, tol, True, notes,
        )

    if auto_cone and arc is None:
        from .certificates import find_common_cone

        cert = find_common_cone([m.A for m in ifs.maps], resolution=48)
        if cert.kind == "common-cone":
            arc = cert.arc

    if is_diag_antidiag_system(ifs):
        root = _bisect_root(
            lambda s: carpet_pressure(ifs, s), 0.0, 4.0, min(tol, 1e-12) / 4
        )
        half = min(tol, 1e-9)
        tag = "diagonal-exact" if is_diagonal_system(ifs) else "carpet-exact"
        return DimensionReport(
            max(root - half, 0.0), root + half, root, tag, tag,
            False, s34, s34_exact, ge32, tol, True, notes,
        )

    depth_cap = n_max
    upper_f = lambda s: pressure_bracket(ifs, s, depth_cap, budget, None).upper

    s_hi = _bisect_root(upper_f, 0.0, 4.0, tol / 4)

    def lower_f(s: float) -> tuple[float, str]:
        br = pressure_bracket(ifs, s, depth_cap, budget, arc)
        return br.lower, br.lower_method

    l0, lower_method = lower_f(max(s_hi - 1.0, 0.0))
    if math.isinf(l0) and l0 < 0:
        s_lo, lower_method = 0.0, "none"
    else:
        s_lo = _bisect_root(lambda s: lower_f(s)[0], 0.0, 4.0, tol / 4)
    s_lo = min(s_lo, s_hi)

    bracket_here = pressure_bracket(ifs, s_hi, depth_cap, budget, arc)
    table = {f"{s_hi:.6f}": bracket_here.to_json()}
    achieved = (s_hi - s_lo) <= tol
    if not achieved:
        notes.append(
            "bracket wider than tol within the depth/budget limits; "
            f"lower bound provenance: {lower_method}"
        )
    return DimensionReport(
        s_lo, s_hi, s_hi, lower_method, bracket_here.upper_method,
        False, s34, s34_exact, ge32, tol, achieved, notes, table,
    )


# -- diag/anti-diag pressure gap ---------------------------------------------


def pressure_gap(
    ifs: IFSystem, s, n: int = 12, budget: int = DEFAULT_BUDGET
) -> tuple[float, PressureBracket]:
    """(P1, P2 bracket) for a diagonal/anti-diagonal mixture; the reported
    gap P2.lower - P1 is strictly positive exactly when no Bernoulli measure
    can be the phi^s equilibrium state."""
    if not is_diag_antidiag_system(ifs):
        raise IFSError("pressure gap is defined for diagonal/anti-diagonal systems")
    p1 = det_pressure(ifs, s)
    br = pressure_bracket(ifs, s, n_max=n, budget=budget)
    return p1, br


# -- profile / carpet dimension ----------------------------------------------


def profile_dimension(pairs: Sequence[tuple], tol: float = 1e-13) -> float:
    """Root of the closed-form carpet equation for per-map coordinate
    contraction pairs (a_i, b_i).

    Solves max(sum a_i^s, sum b_i^s) = 1 for s < 1,
    max(sum a_i b_i^(s-1), sum b_i a_i^(s-1)) = 1 for s in [1, 2), and the
    determinant equation beyond; monotone bisection on [0, 4].
    """
    a = np.array([float(p[0]) for p in pairs])
    b = np.array([float(p[1]) for p in pairs])
    if np.any(a <= 0) or np.any(b <= 0) or np.any(a >= 1) or np.any(b >= 1):
        raise ValueError("profile entries must lie in (0, 1)")

    def g(s: float) -> float:
        if s < 1.0:
            return max(float(np.sum(a**s)), float(np.sum(b**s))) - 1.0
        if s < 2.0:
            sa = float(np.sum(a * b ** (s - 1.0)))
            sb = float(np.sum(b * a ** (s - 1.0)))
            return max(sa, sb) - 1.0
        return float(np.sum((a * b) ** (s / 2.0))) - 1.0

    if g(0.0) <= 0.0:
        return 0.0
    if g(4.0) > 0.0:
        raise ValueError("no root in [0, 4]: profile is not contractive enough")
    lo, hi = 0.0, 4.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0
