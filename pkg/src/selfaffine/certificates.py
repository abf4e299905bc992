"""Algebraic and geometric structure certificates.

Irreducibility and strong irreducibility are decided exactly through
invariant quadratics (a line pair is the zero set of a quadratic form, and
preservation of the pair is a polynomial proportionality test, so no field
extensions are ever needed). Searches (hyperbolic elements, cones,
separation statistics) are deterministic and return re-verifiable witness
certificates; every certificate can be re-checked from scratch with
`recheck_certificate`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .ifs import (
    IFSError,
    IFSystem,
    compose_word,
    matrix_of_word,
    words_of_length,
)
from .linalg import (
    Mat2,
    ProjInterval,
    ProjPoint,
    interval_image,
    is_hyperbolic,
    strictly_inside,
)
from .scalars import QuadExt, Scalar, exact_sign, is_exact, sqrt_exact, to_float

Word = tuple[int, ...]


@dataclass
class Certificate:
    """Witness package for a structural property.

    kind is one of: invariant-line, invariant-line-pair, hyperbolic-word,
    common-cone, pingpong-free, strongly-irreducible, irreducible,
    none-up-to-depth.
    """

    kind: str
    lines: tuple[ProjPoint, ...] = ()
    word: Optional[Word] = None
    arc: Optional[ProjInterval] = None
    depth: int = 0
    notes: str = ""
    extra: dict = dfield(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lines": [[str(p.x), str(p.y)] for p in self.lines],
            "word": list(self.word) if self.word else None,
            "arc": _arc_json(self.arc),
            "depth": self.depth,
            "notes": self.notes,
            "extra": {k: str(v) for k, v in self.extra.items()},
        }


def _arc_json(arc: Optional[ProjInterval]):
    if arc is None:
        return None
    return {
        "p": [str(arc.p.x), str(arc.p.y)],
        "q": [str(arc.q.x), str(arc.q.y)],
        "witness": [str(arc.w.x), str(arc.w.y)],
        "closed": arc.closed,
    }


def _as_mats(matrices: Union[IFSystem, Sequence[Mat2]]) -> list[Mat2]:
    if isinstance(matrices, IFSystem):
        return [m.A for m in matrices.maps]
    return list(matrices)


# -- invariant lines (irreducibility) -----------------------------------------


def invariant_quadratic(m: Mat2) -> tuple[Scalar, Scalar, Scalar]:
    """Coefficients (al, be, ga) of q(x, y) = al x^2 + be xy + ga y^2 whose
    zero lines are exactly the invariant lines of m: the cross product of
    (x, y) with m(x, y)."""
    return (m.c, m.d - m.a, -m.b)


def _poly_trim(p: list) -> list:
    while p and exact_sign(p[-1]) == 0:
        p.pop()
    return p


def _poly_mod(a: list, b: list) -> list:
    # remainder of a by b over the field; coefficients ascending
    a = a[:]
    while len(a) >= len(b) and a:
        coef = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - coef * c
        a = _poly_trim(a)
    return a


def _poly_gcd(polys: list[list]) -> list:
    polys = [p for p in (_poly_trim(list(q)) for q in polys) if p]
    if not polys:
        return []
    g = polys[0]
    for p in polys[1:]:
        a, b = g, p
        while b:
            a, b = b, _poly_mod(a, b)
        g = a
        if len(g) == 1:
            break
    return g


def common_invariant_line(matrices) -> Certificate:
    """Exact decision: a common invariant line, or "irreducible".

    The invariant lines of each matrix are the roots of its invariant
    quadratic; a common line is a common root, found by polynomial gcd over
    the base field (the direction (0, 1) is the t = infinity root, handled
    separately via the x^2-free coefficient).
    """
    mats = _as_mats(matrices)
    if not mats:
        raise IFSError("need at least one matrix")
    quads = [invariant_quadratic(m) for m in mats]
    nonzero = [q for q in quads if any(exact_sign(c) != 0 for c in q)]
    if not nonzero:
        return Certificate(
            "invariant-line",
            (ProjPoint(Fraction(1), Fraction(0)),),
            notes="all matrices are scalar multiples of the identity;"
            " every line is invariant",
        )
    if all(exact_sign(q[2]) == 0 for q in quads):
        # q(0, 1) = ga = -b: the vertical line e2 is invariant for all
        return Certificate(
            "invariant-line",
            (ProjPoint(Fraction(0), Fraction(1)),),
            notes="common invariant line",
        )
    # finite-slope roots: p(t) = al + be t + ga t^2 per matrix
    g = _poly_gcd([[q[0], q[1], q[2]] for q in quads])
    if len(g) <= 1:
        return Certificate("irreducible", notes="no common invariant line")
    if len(g) == 2:
        t = -g[0] / g[1]
        return Certificate(
            "invariant-line", (ProjPoint(Fraction(1), t),), notes="common invariant line"
        )
    # all quadratics proportional: both roots (if real) are common lines
    al, be, ga = g[0], g[1], g[2]
    disc = be * be - 4 * al * ga
    sd = exact_sign(disc)
    if sd < 0:
        return Certificate(
            "irreducible", notes="shared invariant quadratic has no real roots"
        )
    root = sqrt_exact(disc, _field_of(mats))
    if sd == 0:
        t = -be / (2 * ga)
        return Certificate(
            "invariant-line", (ProjPoint(Fraction(1), t),), notes="double common line"
        )
    if root is not None:
        t1 = (-be + root) / (2 * ga)
        t2 = (-be - root) / (2 * ga)
        lines = (ProjPoint(Fraction(1), t1), ProjPoint(Fraction(1), t2))
    else:
        d = math.sqrt(to_float(disc))
        lines = (
            ProjPoint(1.0, (-to_float(be) + d) / (2 * to_float(ga))),
            ProjPoint(1.0, (-to_float(be) - d) / (2 * to_float(ga))),
        )
    return Certificate(
        "invariant-line", lines, notes="two common invariant lines (float"
        " representatives unless exact)" if root is None else "two common lines"
    )


def _field_of(mats: Sequence[Mat2]) -> Optional[int]:
    for m in mats:
        for x in m.entries():
            if isinstance(x, QuadExt):
                return x.d
    return None


# -- hyperbolic search ---------------------------------------------------------


def all_similarities(matrices) -> bool:
    return all(m.is_similarity() for m in _as_mats(matrices))


def find_hyperbolic(matrices, depth: int = 6) -> Certificate:
    """Breadth-first search (by length, then lexicographically) for a word
    whose product is hyperbolic; exact classification."""
    mats = _as_mats(matrices)
    if all_similarities(mats):
        return Certificate(
            "none-up-to-depth", depth=depth,
            notes="all generators are similarities; every product is one too,"
            " so no hyperbolic element exists",
            extra={"refuted": True},
        )
    m = len(mats)
    for n in range(1, depth + 1):
        for w in words_of_length(m, n):
            prod = Mat2.identity()
            for s in w:
                prod = mats[s - 1] @ prod
            h = is_hyperbolic(prod)
            if h.is_hyperbolic:
                extra = {}
                if h.eigenvalues is not None:
                    extra = {"eig1": h.eigenvalues[0], "eig2": h.eigenvalues[1]}
                lines = h.eigenvectors or ()
                return Certificate(
                    "hyperbolic-word", tuple(lines), w, depth=n, extra=extra
                )
    return Certificate("none-up-to-depth", depth=depth,
                       notes=f"no hyperbolic product up to length {depth}")


# -- strong irreducibility ------------------------------------------------------


def _quad_compose(q: tuple, b: Mat2) -> tuple:
    """Coefficients of q(B(x, y))."""
    al, be, ga = q
    b11, b12, b21, b22 = b.a, b.b, b.c, b.d
    return (
        al * b11 * b11 + be * b11 * b21 + ga * b21 * b21,
        2 * al * b11 * b12 + be * (b11 * b22 + b12 * b21) + 2 * ga * b21 * b22,
        al * b12 * b12 + be * b12 * b22 + ga * b22 * b22,
    )


def _proportional3(p: tuple, q: tuple) -> bool:
    for i, j in itertools.combinations(range(3), 2):
        if exact_sign(p[i] * q[j] - p[j] * q[i]) != 0:
            return False
    return True


def strong_irreducibility_check(matrices, depth: int = 6) -> Certificate:
    """Decide strong irreducibility through a hyperbolic element's eigenline
    pair: any invariant finite union of lines must equal that pair, and
    preserving the pair is an exact proportionality test on the invariant
    quadratic. Complete whenever a hyperbolic element is found; otherwise
    honestly inconclusive."""
    mats = _as_mats(matrices)
    first = common_invariant_line(mats)
    if first.kind != "irreducible":
        first.notes = "reducible: " + first.notes
        return first
    hyp = find_hyperbolic(mats, depth)
    if hyp.kind != "hyperbolic-word":
        return Certificate(
            "none-up-to-depth", depth=depth,
            notes="irreducible, but no hyperbolic element found to this depth;"
            " strong irreducibility undecided",
        )
    hmat = matrix_of_word_from(mats, hyp.word)
    q = invariant_quadratic(hmat)
    for idx, b in enumerate(mats):
        if not _proportional3(_quad_compose(q, b), q):
            return Certificate(
                "strongly-irreducible", word=hyp.word, depth=depth,
                notes=f"generator {idx + 1} moves the eigenline pair of the"
                " hyperbolic witness",
                extra={"moved_by": idx + 1},
            )
    return Certificate(
        "invariant-line-pair", tuple(hyp.lines), hyp.word, depth=depth,
        notes="every generator preserves or swaps the eigenline pair of the"
        " hyperbolic witness; irreducible but not strongly irreducible",
    )


def matrix_of_word_from(mats: Sequence[Mat2], w: Sequence[int]) -> Mat2:
    prod = Mat2.identity()
    for s in w:
        prod = mats[s - 1] @ prod
    return prod


# -- cones ----------------------------------------------------------------------


def _candidate_points(mats: Sequence[Mat2], resolution: int) -> list[ProjPoint]:
    pts: dict = {}

    def add(p: ProjPoint):
        if p.is_exact():
            pts.setdefault((p.x, p.y), p)

    for k in range(resolution):
        theta = math.pi * k / resolution
        c, s = math.cos(theta), math.sin(theta)
        if abs(c) < 1e-12:
            add(ProjPoint(Fraction(0), Fraction(1)))
            continue
        slope = Fraction(s / c).limit_denominator(64)
        add(ProjPoint(Fraction(1), slope))
    for m in mats:
        h = is_hyperbolic(m)
        if h.is_hyperbolic and h.exact and h.eigenvectors:
            for p in h.eigenvectors:
                if p.is_exact():
                    add(p)
    for m1, m2 in itertools.product(mats, repeat=2):
        h = is_hyperbolic(m1 @ m2)
        if h.is_hyperbolic and h.exact and h.eigenvectors:
            for p in h.eigenvectors:
                if p.is_exact():
                    add(p)
    return sorted(pts.values(), key=lambda p: p.angle())


def _mediant_witness(p: ProjPoint, q: ProjPoint) -> ProjPoint:
    """Exact point strictly inside the counterclockwise arc from p to q."""
    u = (p.x, p.y)
    v = (q.x, q.y)
    for cand in ((u[0] + v[0], u[1] + v[1]), (u[0] - v[0], u[1] - v[1])):
        if exact_sign(cand[0]) == 0 and exact_sign(cand[1]) == 0:
            continue
        w = ProjPoint(cand[0], cand[1])
        if w == p or w == q:
            continue
        arc = ProjInterval(p, q, w)
        t0, span = arc.angles()
        if abs((t0 - p.angle()) % math.pi) < 1e-9:
            return w
    raise IFSError("could not synthesize an arc witness")


def find_common_cone(matrices, resolution: int = 48) -> Certificate:
    """Search projective arcs with endpoints on a rational grid (plus exact
    eigenline endpoints) for one strictly preserved by every matrix.

    Float prefilter, exact verification; deterministic order (shortest arcs
    first), so the reported witness is run-independent.
    """
    mats = _as_mats(matrices)
    pts = _candidate_points(mats, resolution)
    if len(pts) < 2:
        return Certificate("none-up-to-depth", notes="no usable grid points")
    angles = np.array([p.angle() for p in pts])
    fl = np.array([m.to_floats() for m in mats]).reshape(-1, 2, 2)
    vecs = np.array([[math.cos(a), math.sin(a)] for a in angles])
    imgs = np.einsum("mij,pj->mpi", fl, vecs)
    img_angles = np.arctan2(imgs[..., 1], imgs[..., 0]) % math.pi

    npts = len(pts)
    arcs = []
    for i in range(npts):
        for j in range(npts):
            if i == j:
                continue
            span = (angles[j] - angles[i]) % math.pi
            arcs.append((span, i, j))
    arcs.sort()

    for span, i, j in arcs:
        t0 = angles[i]
        # prefilter: every image of both endpoints strictly inside (float)
        ok = True
        for mi in range(len(mats)):
            for pidx in (i, j):
                off = (img_angles[mi, pidx] - t0) % math.pi
                if not (1e-12 < off < span - 1e-12):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        try:
            witness = _mediant_witness(pts[i], pts[j])
            arc = ProjInterval(pts[i], pts[j], witness)
        except (IFSError, ValueError):
            continue
        if all(strictly_inside(m, arc) for m in mats):
            return Certificate("common-cone", arc=arc, depth=resolution)
    return Certificate(
        "none-up-to-depth", depth=resolution,
        notes=f"no strictly preserved arc on a grid of {resolution} directions",
    )


# -- ping-pong freeness -----------------------------------------------------------


def _open_arcs_intersect(a: ProjInterval, b: ProjInterval) -> bool:
    if b.contains_strict(a.p) or b.contains_strict(a.q):
        return True
    if a.contains_strict(b.p) or a.contains_strict(b.q):
        return True
    return a.contains(b.w, closed=False) and b.contains(a.w, closed=False)


def galois_conjugate_matrix(m: Mat2) -> Mat2:
    def conj(x):
        return x.conjugate() if isinstance(x, QuadExt) else x

    return Mat2(conj(m.a), conj(m.b), conj(m.c), conj(m.d))


def pingpong_free_certificate(matrices, k: ProjInterval) -> Certificate:
    """Free-generation certificate: every A_i maps the open arc K into
    itself and the images are pairwise disjoint open arcs (shared single
    endpoints allowed). Distinct words then act differently on K, so the
    semigroup is free.

    When the entries are exact algebraic numbers the certificate also
    attests freeness of the Galois-conjugate family (the difference of two
    products is a polynomial in the generator entries that cannot vanish at
    a conjugate without vanishing at the original).
    """
    mats = _as_mats(matrices)
    images = []
    for idx, m in enumerate(mats):
        img = interval_image(m, k)
        inside = (
            k.contains(img.p, closed=True)
            and k.contains(img.q, closed=True)
            and not img.contains(k.p, closed=False)
            and not img.contains(k.q, closed=False)
        )
        if not inside:
            return Certificate(
                "none-up-to-depth",
                notes=f"matrix {idx + 1} does not map the arc into itself",
            )
        images.append(img)
    for i, j in itertools.combinations(range(len(mats)), 2):
        if _open_arcs_intersect(images[i], images[j]):
            return Certificate(
                "none-up-to-depth",
                notes=f"images of matrices {i + 1} and {j + 1} overlap",
            )
    exact = all(m.is_exact() for m in mats)
    return Certificate(
        "pingpong-free", arc=k,
        notes="free semigroup via disjoint arc images",
        extra={
            "algebraic_entries": exact,
            "galois_conjugate_also_free": exact,
        },
    )


# -- exponential separation --------------------------------------------------------


@dataclass
class SeparationStat:
    n: int
    c_n: float
    pair: Optional[tuple[Word, Word]]
    normalized: bool
    min_distance: float
    exact_collision: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "c_n": self.c_n,
            "pair": [list(w) for w in self.pair] if self.pair else None,
            "normalized": self.normalized,
            "min_distance": self.min_distance,
            "exact_collision": self.exact_collision,
        }


def _proportional_positive(a: Mat2, b: Mat2) -> bool:
    ea, eb = a.entries(), b.entries()
    for i, j in itertools.combinations(range(4), 2):
        if exact_sign(ea[i] * eb[j] - ea[j] * eb[i]) != 0:
            return False
    for x, y in zip(ea, eb):
        sx, sy = exact_sign(x), exact_sign(y)
        if sx and sy:
            return sx == sy
    return False


def exp_separation_stat(
    matrices, n: int, normalize: bool = False, budget: int = 200_000
) -> SeparationStat:
    """c_n = (min over distinct length-n words of |A_w - A_w'|)^(1/n).

    The quadratic scan runs on floats (operator norms of differences);
    near-zero candidates found by 1e-9-quantized hashing are confirmed or
    refuted in exact arithmetic. The normalized variant divides each
    product by |det|^(1/2) first.
    """
    mats = _as_mats(matrices)
    scales = None
    if isinstance(matrices, IFSystem):
        scales = [to_float(mp.scale) for mp in matrices.maps]
    m = len(mats)
    if m < 2:
        raise IFSError("separation statistic needs at least two matrices")
    if m**n > budget:
        raise IFSError(f"separation scan budget exceeded: {m}**{n}")
    words = list(words_of_length(m, n))
    exact_ok = all(mat.is_exact() for mat in mats)
    prods = [matrix_of_word_from(mats, w) for w in words]
    arr = np.array([p.to_floats() for p in prods]).reshape(-1, 2, 2)
    if scales is not None:
        fac = np.array([math.prod(scales[s - 1] for s in w) for w in words])
        arr = arr * fac[:, None, None]
    if normalize:
        dets = np.abs(arr[:, 0, 0] * arr[:, 1, 1] - arr[:, 0, 1] * arr[:, 1, 0])
        arr = arr / np.sqrt(dets)[:, None, None]

    nwords = len(words)
    best = math.inf
    best_pair = None
    chunk = max(1, int(2e6) // max(nwords, 1))
    for start in range(0, nwords, chunk):
        stop = min(start + chunk, nwords)
        diff = arr[start:stop, None] - arr[None, :]
        a = diff[..., 0, 0]
        b = diff[..., 0, 1]
        c = diff[..., 1, 0]
        d = diff[..., 1, 1]
        q = np.hypot((a + d) / 2.0, (c - b) / 2.0)
        r = np.hypot((a - d) / 2.0, (c + b) / 2.0)
        dist = q + r
        for ii in range(stop - start):
            dist[ii, start + ii] = math.inf
        k = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[k] < best:
            best = float(dist[k])
            best_pair = (words[start + k[0]], words[k[1]])

    exact_collision = False
    if exact_ok and best < 1e-9:
        i1 = words.index(best_pair[0])
        i2 = words.index(best_pair[1])
        p1, p2 = prods[i1], prods[i2]
        if normalize:
            exact_collision = _proportional_positive(p1, p2)
        else:
            exact_collision = all(
                exact_sign(x - y) == 0 for x, y in zip(p1.entries(), p2.entries())
            )
        if exact_collision and isinstance(matrices, IFSystem):
            from .ifs import word_scale

            exact_collision = word_scale(matrices, best_pair[0]) == word_scale(
                matrices, best_pair[1]
            )
    c_n = 0.0 if exact_collision else best ** (1.0 / n)
    return SeparationStat(n, c_n, best_pair, normalize, best, exact_collision)


# -- bunching -----------------------------------------------------------------------


@dataclass
class BunchingEntry:
    index: int
    passes: bool
    margin: float
    exact: bool

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "passes": self.passes,
            "margin": self.margin,
            "exact": self.exact,
        }


def bunching_check(matrices, t) -> list[BunchingEntry]:
    """Check alpha1(A_i) <= alpha2(A_i)**t per matrix (t in [0, 1]).

    Exact decision when the norm-square stays in the field and t is
    rational; otherwise float with a 1e-12 guard band.
    """
    tf = float(t)
    if not 0.0 <= tf <= 1.0:
        raise ValueError("bunching exponent must lie in [0, 1]")
    out = []
    if isinstance(matrices, IFSystem):
        pairs = [(m.A, to_float(m.scale)) for m in matrices.maps]
    else:
        pairs = [(m, 1.0) for m in matrices]
    frac_t = Fraction(t) if not isinstance(t, float) else None
    for idx, (mat, scale) in enumerate(pairs):
        a1, a2 = mat.singular_values()
        a1 *= scale
        a2 *= scale
        margin = a2**tf - a1
        decided_exact = False
        passes = a1 <= a2**tf + 1e-12
        if frac_t is not None and scale == 1.0:
            ns = mat.norm_squared_exact()
            if ns is not None and frac_t > 0:
                # alpha1 <= alpha2^t  <=>  (alpha1^2)^q <= (alpha2^2)^p,
                # with alpha2^2 = det^2 / alpha1^2 and t = p/q
                p, q = frac_t.numerator, frac_t.denominator
                det2 = mat.det() * mat.det()
                lhs = ns ** (q + p)
                rhs = det2**p
                passes = exact_sign(lhs - rhs) <= 0
                decided_exact = True
            elif frac_t == 0:
                ns = mat.norm_squared_exact()
                if ns is not None:
                    passes = exact_sign(ns - 1) <= 0
                    decided_exact = True
        out.append(BunchingEntry(idx + 1, bool(passes), float(margin), decided_exact))
    return out


# -- projection injectivity -----------------------------------------------------------


@dataclass
class ProjectionReport:
    passed: bool
    depth: int
    violation: Optional[dict] = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "depth": self.depth, "violation": self.violation}


def check_projection_injectivity(
    ifs: IFSystem, n: int, budget: int = 100_000
) -> ProjectionReport:
    """Exact check that same-orientation words have distinct coordinate
    projections of T_w(0), for all word lengths up to n.

    Orientation means the product's diagonal/anti-diagonal type; both the
    x and y projections must separate points within each class.
    """
    if not all(m.A.is_diagonal() or m.A.is_antidiagonal() for m in ifs.maps):
        raise IFSError("projection check needs a diagonal/anti-diagonal system")
    if not ifs.is_exact() or any(m.rational_scale() is None for m in ifs.maps):
        raise IFSError("projection check needs exact coefficients")
    total = sum(ifs.M**k for k in range(1, n + 1))
    if total > budget:
        raise IFSError("projection scan budget exceeded")
    from .ifs import identity_map

    level = [((), identity_map())]
    for depth in range(1, n + 1):
        nxt = []
        for w, t in level:
            for s in range(1, ifs.M + 1):
                nxt.append((w + (s,), ifs.maps[s - 1].compose(t)))
        level = nxt
        groups: dict = {}
        for w, t in level:
            key = "diag" if t.A.is_diagonal() else "anti"
            groups.setdefault(key, []).append((w, t.v))
        for key, entries in groups.items():
            for coord in (0, 1):
                seen: dict = {}
                for w, v in entries:
                    val = v[coord]
                    prev = seen.get(val)
                    if prev is not None:
                        return ProjectionReport(
                            False, depth,
                            {
                                "words": [list(prev), list(w)],
                                "coordinate": "xy"[coord],
                                "value": str(val),
                                "orientation": key,
                            },
                        )
                    seen[val] = w
    return ProjectionReport(True, n)


# -- hypothesis bundles ------------------------------------------------------------------


@dataclass
class ConditionStatus:
    name: str
    status: str  # verified | refuted | finite-depth-evidence | inconclusive
    detail: str = ""
    route: str = ""
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "detail": self.detail,
            "route": self.route,
            "witness": self.witness,
        }


@dataclass
class HypothesisReport:
    theorem: str
    conditions: list[ConditionStatus]
    overall: str  # met | unmet | inconclusive
    diagnostics: dict = dfield(default_factory=dict)

    def condition(self, name: str) -> ConditionStatus:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "overall": self.overall,
            "conditions": [c.to_json() for c in self.conditions],
            "diagnostics": self.diagnostics,
        }


def _cond_strong_irreducibility(mats, depth) -> ConditionStatus:
    cert = strong_irreducibility_check(mats, depth)
    if cert.kind == "strongly-irreducible":
        return ConditionStatus(
            "strong-irreducibility", "verified", cert.notes, witness=cert.to_json()
        )
    if cert.kind in ("invariant-line", "invariant-line-pair"):
        return ConditionStatus(
            "strong-irreducibility", "refuted", cert.notes, witness=cert.to_json()
        )
    return ConditionStatus("strong-irreducibility", "inconclusive", cert.notes)


def _cond_hyperbolic(mats, depth) -> ConditionStatus:
    cert = find_hyperbolic(mats, depth)
    if cert.kind == "hyperbolic-word":
        return ConditionStatus(
            "hyperbolic-element", "verified",
            f"word {list(cert.word)} is hyperbolic", witness=cert.to_json(),
        )
    if cert.extra.get("refuted"):
        return ConditionStatus("hyperbolic-element", "refuted", cert.notes)
    return ConditionStatus("hyperbolic-element", "inconclusive", cert.notes)


def _cond_elliptic(mats, depth: int = 2) -> ConditionStatus:
    m = len(mats)
    for n in range(1, depth + 1):
        for w in words_of_length(m, n):
            h = is_hyperbolic(matrix_of_word_from(mats, w))
            if h.kind == "elliptic":
                return ConditionStatus(
                    "elliptic-element", "verified",
                    f"word {list(w)} has non-real eigenvalues",
                )
    return ConditionStatus(
        "elliptic-element", "inconclusive",
        f"no elliptic product up to length {depth}",
    )


def _cond_separation(ifs: IFSystem, open_set, depth) -> ConditionStatus:
    from .geometry import GeometryError, check_osc, check_ssc, common_fixed_point, sosc_witness

    ssc = check_ssc(ifs, depth=max(depth, 12))
    if ssc.status == "certified-holds":
        return ConditionStatus(
            "strong-open-set-condition", "verified",
            "strong separation certified, which implies the SOSC",
            route="strong-separation", witness=ssc.to_json(),
        )
    try:
        fp = common_fixed_point(ifs)
    except IFSError:
        fp = None
    if fp is not None and ifs.M >= 2:
        return ConditionStatus(
            "strong-open-set-condition", "refuted",
            "all maps share a fixed point, so no open set meeting the"
            " attractor has disjoint images",
        )
    try:
        from .geometry import ConvexPolygon

        u = open_set if open_set is not None else ConvexPolygon.unit_square()
        rep = check_osc(ifs, u)
        if rep.holds:
            res = sosc_witness(ifs, u, depth=min(depth, 4))
            if res.status == "witness":
                return ConditionStatus(
                    "strong-open-set-condition", "verified",
                    f"witness word {list(res.word)}", witness=res.to_json(),
                )
            if res.status == "refuted":
                return ConditionStatus(
                    "strong-open-set-condition", "refuted", res.reason
                )
        return ConditionStatus(
            "strong-open-set-condition", "inconclusive",
            "no witness for the candidate open set",
        )
    except GeometryError as e:
        return ConditionStatus("strong-open-set-condition", "inconclusive", str(e))


def _try_pingpong(mats) -> Optional[Certificate]:
    quadrant = ProjInterval(
        ProjPoint(Fraction(1), Fraction(0)),
        ProjPoint(Fraction(0), Fraction(1)),
        ProjPoint(Fraction(1), Fraction(1)),
        closed=False,
    )
    candidates = [quadrant]
    cone = find_common_cone(mats, resolution=24)
    if cone.kind == "common-cone":
        candidates.append(cone.arc)
    for arc in candidates:
        cert = pingpong_free_certificate(mats, arc)
        if cert.kind == "pingpong-free":
            return cert
    return None


def _cond_exponential_separation(mats, depth) -> ConditionStatus:
    cert = _try_pingpong(mats)
    route = "pingpong-direct"
    if cert is None and all(m.is_exact() for m in mats):
        conj = [galois_conjugate_matrix(m) for m in mats]
        cert = _try_pingpong(conj)
        route = "pingpong-galois-conjugate"
    if cert is not None and cert.extra.get("algebraic_entries"):
        return ConditionStatus(
            "exponential-separation", "verified",
            "free semigroup with algebraic entries; separation follows",
            route="algebraic-freeness", witness=cert.to_json(),
        )
    n = min(depth, 8)
    while len(mats) ** n > 100_000 and n > 1:
        n -= 1
    stat = exp_separation_stat(mats, n)
    if stat.exact_collision:
        return ConditionStatus(
            "exponential-separation", "refuted",
            f"exact product collision at depth {n}", witness=stat.to_json(),
        )
    return ConditionStatus(
        "exponential-separation", "finite-depth-evidence",
        f"c_{n} = {stat.c_n:.6g} > 0", witness=stat.to_json(),
    )


def _cond_affinity_threshold(report, thresh: float, label: str) -> ConditionStatus:
    detail = f"bracket [{report.s_lo:.6g}, {report.s_hi:.6g}]"
    if thresh == 1.5 and report.affinity_ge_three_halves and (
        report.det_sum_at_3_4_exact is not None
    ):
        return ConditionStatus(
            label, "verified",
            f"sum |det|^(3/4) = {report.det_sum_at_3_4_exact} >= 1 exactly",
            route="determinant-sum",
        )
    if report.s_lo >= thresh:
        return ConditionStatus(label, "verified", detail)
    if report.s_hi < thresh:
        return ConditionStatus(label, "refuted", detail)
    return ConditionStatus(label, "inconclusive", detail)


def _cond_bunching(ifs_or_mats, t, scaled: bool = False) -> ConditionStatus:
    if scaled and isinstance(ifs_or_mats, IFSystem):
        entries = []
        ok = True
        for idx, m in enumerate(ifs_or_mats.maps):
            a1, a2 = m.A.singular_values()
            r = to_float(m.scale)
            passes = r * a1 * a1 <= a2 + 1e-12
            ok = ok and passes
            entries.append({"index": idx + 1, "passes": passes})
        status = "verified" if ok else "refuted"
        return ConditionStatus(
            "scaled-bunching", status, "checks |r| alpha1^2 <= alpha2 per map",
            witness={"entries": entries},
        )
    entries = bunching_check(ifs_or_mats, t)
    ok = all(e.passes for e in entries)
    status = "verified" if ok else "refuted"
    exact = all(e.exact for e in entries)
    return ConditionStatus(
        f"bunching(t={float(t):g})", status,
        "decided exactly" if exact else "decided in float with 1e-12 guard",
        witness={"entries": [e.to_json() for e in entries]},
    )


def hypothesis_report(
    ifs: IFSystem,
    theorem: str,
    t=None,
    depth: int = 6,
    open_set=None,
    tol: float = 1e-3,
    n_max: int = 8,
) -> HypothesisReport:
    """Per-condition status report for the named criteria bundle.

    Bundles: "thm1.2" (strong irreducibility + hyperbolic element, SOSC,
    exponential separation, affinity >= 3/2); "thm1.3" (same with the
    bunching condition alpha1^2 <= alpha2 instead of the threshold);
    "thm6.6" (bunching exponent t with threshold 3(1-t)/(2-t));
    "cor6.7" (algebraic entries, freeness with elliptic and hyperbolic
    elements, separation, and a determinant/bunching alternative).
    """
    from .measures import cylinder_exponents, kaenmaki_approx
    from .pressure import affinity_dimension, det_pressure

    if theorem not in ("thm1.2", "thm1.3", "thm6.6", "cor6.7"):
        raise IFSError(f"unknown criteria bundle {theorem!r}")
    if theorem == "thm6.6":
        if t is None:
            raise IFSError("thm6.6 needs the bunching exponent t")
        if not 0.0 <= float(t) < 0.5:
            raise IFSError("thm6.6 exponent must lie in [0, 1/2)")
    ifs.require_contractive()
    mats = [m.A for m in ifs.maps]
    scaled_mats = _scaled_mats(ifs)
    dim_report = affinity_dimension(ifs, tol=tol, n_max=n_max, auto_cone=True)

    conditions: list[ConditionStatus] = [
        _cond_strong_irreducibility(scaled_mats, depth),
        _cond_hyperbolic(scaled_mats, depth),
        _cond_separation(ifs, open_set, depth),
        _cond_exponential_separation(mats, depth),
    ]
    if theorem == "thm1.2":
        conditions.append(_cond_affinity_threshold(dim_report, 1.5, "affinity>=3/2"))
    elif theorem == "thm1.3":
        conditions.append(_cond_bunching(ifs, Fraction(1, 2)))
    elif theorem == "thm6.6":
        tf = float(t)
        conditions.append(_cond_bunching(ifs, t))
        thresh = 3.0 * (1.0 - tf) / (2.0 - tf)
        conditions.append(
            _cond_affinity_threshold(dim_report, thresh, f"affinity>={thresh:.6g}")
        )
    elif theorem == "cor6.7":
        algebraic = all(m.is_exact() for m in mats)
        conditions.append(
            ConditionStatus(
                "algebraic-coefficients",
                "verified" if algebraic else "inconclusive",
                "entries are exact algebraic numbers" if algebraic
                else "entries are floats",
            )
        )
        conditions.append(_cond_elliptic(mats))
        dim_ok = _cond_affinity_threshold(dim_report, 1.5, "affinity-in-[3/2,2]")
        if dim_ok.status == "verified" and det_pressure(ifs, 2) > 1e-12:
            dim_ok = ConditionStatus(
                "affinity-in-[3/2,2]", "refuted", "affinity dimension exceeds 2"
            )
        bunch = _cond_bunching(ifs, None, scaled=True)
        if dim_ok.status == "verified":
            conditions.append(dim_ok)
        elif bunch.status == "verified":
            conditions.append(bunch)
        else:
            conditions.append(dim_ok)

    diagnostics = {"affinity": dim_report.to_json()}
    tau = _bunching_tau(scaled_mats)
    if tau is not None and tau > 1.0:
        try:
            spec = kaenmaki_approx(ifs, dim_report.s_estimate, min(6, n_max))
            est = cylinder_exponents(ifs, spec)
            diagnostics["tau_exponent_bound"] = {
                "tau": tau,
                "lambda1": est.lambda1,
                "lambda2": est.lambda2,
                "tau_lambda1_less_than_lambda2": tau * est.lambda1 < est.lambda2,
            }
        except IFSError:
            pass

    if any(c.status == "refuted" for c in conditions):
        overall = "unmet"
    elif all(c.status == "verified" for c in conditions):
        overall = "met"
    else:
        overall = "inconclusive"
    return HypothesisReport(theorem, conditions, overall, diagnostics)


def _scaled_mats(ifs: IFSystem) -> list[Mat2]:
    """Linear parts with scales folded in when rational; otherwise the field
    part alone (projective statements are scale-invariant)."""
    out = []
    for m in ifs.maps:
        r = m.rational_scale()
        if r is not None and r != 1:
            out.append(m.A.scaled(r))
        else:
            out.append(m.A)
    return out


def _bunching_tau(mats: Sequence[Mat2]) -> Optional[float]:
    """Largest tau with alpha1^tau <= alpha2 for every matrix (contractions:
    tau = max_i log alpha2 / log alpha1)."""
    taus = []
    for m in mats:
        a1, a2 = m.singular_values()
        if a1 >= 1.0:
            return None
        taus.append(math.log(a2) / math.log(a1))
    return max(taus)


# -- certificate re-verification -------------------------------------------------------


def recheck_certificate(matrices, cert: Certificate) -> bool:
    """Independent re-verification of a positive certificate."""
    mats = _as_mats(matrices)
    if cert.kind == "invariant-line":
        if not cert.lines:
            return False
        p = cert.lines[0]
        return all(p.apply(m) == p for m in mats)
    if cert.kind == "invariant-line-pair":
        if len(cert.lines) != 2:
            return False
        pair = set()
        for m in mats:
            imgs = {cert.lines[0].apply(m), cert.lines[1].apply(m)}
            if imgs != {cert.lines[0], cert.lines[1]}:
                return False
        return True
    if cert.kind == "hyperbolic-word":
        if cert.word is None:
            return False
        return is_hyperbolic(matrix_of_word_from(mats, cert.word)).is_hyperbolic
    if cert.kind == "common-cone":
        if cert.arc is None:
            return False
        return all(strictly_inside(m, cert.arc) for m in mats)
    if cert.kind == "pingpong-free":
        if cert.arc is None:
            return False
        again = pingpong_free_certificate(mats, cert.arc)
        return again.kind == "pingpong-free"
    if cert.kind == "strongly-irreducible":
        return strong_irreducibility_check(mats).kind == "strongly-irreducible"
    if cert.kind == "irreducible":
        return common_invariant_line(mats).kind == "irreducible"
    return False
