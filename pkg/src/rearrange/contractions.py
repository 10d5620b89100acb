"""Contraction calculus for set maps: the maps phi on the line, psi on R^n.

Every 1-D set map here sends intervals [t-r, t+r] to intervals of the same
length, so it induces a 1-Lipschitz map t -> phi(t) on interval centers.
``PLContraction`` represents these maps exactly as piecewise-linear
functions with rational breakpoints and segment slopes in [-1, 1], closed
under exact composition.  In R^n the corresponding maps psi act on ball
centers; ``Fold`` is the paper-folding contraction of a polarization and
``FoldChain`` a finite composition of folds.

Folds store an integer normal vector v and a rational offset c, with the
hyperplane {x : <x, v> = c}; the unit normal is v/|v|.  Writing q = <v, v>
and d = c - <x, v>, the fold with favored side in direction +v is

    psi(x) = x + ((|d| + d) / q) * v,

which is exact rational arithmetic for rational points even when v is a
diagonal direction, since only q = |v|^2 enters.

The class-membership decision ``class_i_decide`` looks for a pair (a, b)
with the function mapping (a, b) strictly inside the open interval between
its endpoint values while |phi(b) - phi(a)| differs from b - a.  Witnesses
are re-verified exactly; absence of a witness is certified only over the
candidate family (breakpoints, value preimages, midpoints, domain endpoints,
segment screening, and seeded random rational pairs), which is a documented
heuristic for completeness.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .intervals import IntervalUnion, RationalLike, iu, measure, rat, rat_str
from .setmaps import SetMap1D, apply_setmap

Number = Union[Fraction, int, float]
Point = tuple


class NotABall(ValueError):
    """The set-map image of an interval was not a single interval of the
    same length."""


class InvalidDimension(ValueError):
    """Ball geometry formulas need dimension >= 2."""


class DisjointImages(ValueError):
    """The two image balls do not intersect, so the distance bound does not
    apply."""


# ---------------------------------------------------------------------------
# piecewise-linear contractions on the line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PLContraction:
    """Continuous piecewise-linear 1-Lipschitz map R -> R.

    xs are strictly ascending rational breakpoints (at least one), ys the
    values there; beyond the extreme breakpoints the map continues with the
    tail slopes.  Every slope, tails included, must lie in [-1, 1].
    """

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    left_slope: Fraction
    right_slope: Fraction

    def __post_init__(self):
        xs = tuple(rat(x) for x in self.xs)
        ys = tuple(rat(y) for y in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "left_slope", rat(self.left_slope))
        object.__setattr__(self, "right_slope", rat(self.right_slope))
        if not xs or len(xs) != len(ys):
            raise ValueError("need matching, nonempty breakpoints and values")
        if any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly ascending")
        for s in self.segment_slopes():
            if not -1 <= s <= 1:
                raise ValueError(f"slope {s} breaks the 1-Lipschitz bound")

    def segment_slopes(self) -> list[Fraction]:
        """All slopes, in order: left tail, interior segments, right tail."""
        slopes = [self.left_slope]
        for (x1, y1), (x2, y2) in zip(zip(self.xs, self.ys),
                                      zip(self.xs[1:], self.ys[1:])):
            slopes.append((y2 - y1) / (x2 - x1))
        slopes.append(self.right_slope)
        return slopes

    def __call__(self, t: Number) -> Number:
        if not isinstance(t, (Fraction, int)):
            return self._eval_float(float(t))
        t = rat(t)
        xs, ys = self.xs, self.ys
        if t <= xs[0]:
            return ys[0] + self.left_slope * (t - xs[0])
        if t >= xs[-1]:
            return ys[-1] + self.right_slope * (t - xs[-1])
        i = bisect.bisect_right(xs, t) - 1
        x1, x2 = xs[i], xs[i + 1]
        return ys[i] + (ys[i + 1] - ys[i]) * (t - x1) / (x2 - x1)

    def _eval_float(self, t: float) -> float:
        xs = [float(x) for x in self.xs]
        ys = [float(y) for y in self.ys]
        if t <= xs[0]:
            return ys[0] + float(self.left_slope) * (t - xs[0])
        if t >= xs[-1]:
            return ys[-1] + float(self.right_slope) * (t - xs[-1])
        i = bisect.bisect_right(xs, t) - 1
        return ys[i] + (ys[i + 1] - ys[i]) * (t - xs[i]) / (xs[i + 1] - xs[i])

    def simplified(self) -> "PLContraction":
        """Drop breakpoints where the incoming and outgoing slopes agree."""
        slopes = self.segment_slopes()
        keep_x, keep_y = [], []
        for i, (x, y) in enumerate(zip(self.xs, self.ys)):
            if slopes[i] == slopes[i + 1]:
                continue
            keep_x.append(x)
            keep_y.append(y)
        if not keep_x:  # globally affine: keep one anchor
            keep_x, keep_y = [self.xs[0]], [self.ys[0]]
        return PLContraction(tuple(keep_x), tuple(keep_y),
                             self.left_slope, self.right_slope)

    @staticmethod
    def identity() -> "PLContraction":
        return PLContraction((Fraction(0),), (Fraction(0),), Fraction(1), Fraction(1))


def phi_of(m) -> PLContraction:
    """Exact closed-form contraction of a structured map.

    Accepts a ``SetMap1D`` or a ``StructuredMapND`` with a unit axis normal
    (so the breakpoint stays rational).  Reflection: 2 t0 - t; polarization:
    a fold at t0; steiner: constant t0; solynin: one-sided fold at t0;
    brock: slope-b affine map through t0.
    """
    if isinstance(m, StructuredMapND):
        if _norm_sq_int(m.v) != 1:
            raise ValueError("phi is rational only for unit axis normals")
        t0, kind, orient, b = rat(m.c), m.kind, m.orient, m.b
        if kind == "fold":
            kind = "polarization"
    elif isinstance(m, SetMap1D):
        t0, kind, orient, b = m.center, m.kind, m.orient, m.b
    else:
        raise TypeError(f"cannot derive phi from {type(m).__name__}")

    one = Fraction(1)
    if kind == "reflection":
        return PLContraction((t0,), (t0,), -one, -one)
    if kind == "polarization":
        if orient == "+":
            return PLContraction((t0,), (t0,), -one, one)
        return PLContraction((t0,), (t0,), one, -one)
    if kind == "steiner":
        return PLContraction((t0,), (t0,), Fraction(0), Fraction(0))
    if kind == "solynin":
        if orient == "+":
            return PLContraction((t0,), (t0,), Fraction(0), one)
        return PLContraction((t0,), (t0,), one, Fraction(0))
    if kind == "brock":
        bb = rat(b)
        return PLContraction((t0,), (t0,), bb, bb)
    raise ValueError(f"unknown map kind {kind!r}")


def compose(f: PLContraction, g: PLContraction) -> PLContraction:
    """Exact composition f o g, again a PLContraction.

    Breakpoints are g's plus every preimage under g of a breakpoint of f,
    so each segment of the result lies inside one affine piece of both maps.
    """
    knots = set(g.xs)
    for v in f.xs:
        knots.update(_preimages(g, rat(v)))
    xs = tuple(sorted(knots))
    ys = tuple(f(g(x)) for x in xs)

    # toward t -> -inf, g heads to -inf iff its left slope is positive;
    # toward t -> +inf, g heads to +inf iff its right slope is positive
    if g.left_slope > 0:
        left = f.left_slope * g.left_slope
    elif g.left_slope < 0:
        left = f.right_slope * g.left_slope
    else:
        left = Fraction(0)
    if g.right_slope > 0:
        right = f.right_slope * g.right_slope
    elif g.right_slope < 0:
        right = f.left_slope * g.right_slope
    else:
        right = Fraction(0)
    return PLContraction(xs, ys, left, right).simplified()


def _preimages(g: PLContraction, v: Fraction) -> list[Fraction]:
    """All t with g(t) = v, one per strictly-monotone crossing."""
    out = []
    xs, ys = g.xs, g.ys
    if g.left_slope != 0:
        t = xs[0] + (v - ys[0]) / g.left_slope
        if t <= xs[0]:
            out.append(t)
    for i in range(len(xs) - 1):
        y1, y2 = ys[i], ys[i + 1]
        if y1 == y2:
            continue
        if min(y1, y2) <= v <= max(y1, y2):
            t = xs[i] + (v - y1) * (xs[i + 1] - xs[i]) / (y2 - y1)
            out.append(t)
    if g.right_slope != 0:
        t = xs[-1] + (v - ys[-1]) / g.right_slope
        if t >= xs[-1]:
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# class membership: affine-with-slope-±1 on every strictly-inside interval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassIDecision:
    member: bool
    witness: Optional[tuple[Fraction, Fraction]]
    pairs_checked: int


def maps_strictly_inside(f: PLContraction, a: Fraction, b: Fraction) -> bool:
    """True iff f((a,b)) lies strictly between f(a) and f(b)."""
    a, b = rat(a), rat(b)
    if not a < b:
        return False
    va, vb = f(a), f(b)
    if va == vb:
        return False
    lo, hi = min(va, vb), max(va, vb)
    for x in f.xs:
        if a < x < b and not lo < f(x) < hi:
            return False
    return True


def is_witness(f: PLContraction, a: RationalLike, b: RationalLike) -> bool:
    """Exact check that (a, b) violates membership: the image of (a, b) is
    strictly inside the endpoint-value interval yet |f(b)-f(a)| != b-a."""
    a, b = rat(a), rat(b)
    if not maps_strictly_inside(f, a, b):
        return False
    return abs(f(b) - f(a)) != b - a


def class_i_decide(f: PLContraction,
                   domain: tuple[RationalLike, RationalLike],
                   n_random: int = 1000,
                   seed: int = 0) -> ClassIDecision:
    """Search for a violating pair over a structured candidate family.

    Returns a verified witness if one is found; otherwise certifies
    membership over the candidates (screened segments, breakpoint/preimage
    pool with midpoints, and seeded random rational pairs).
    """
    import random

    d0, d1 = rat(domain[0]), rat(domain[1])
    if not d0 < d1:
        raise ValueError("domain must be a nondegenerate interval")
    checked = 0

    # screening: an affine stretch with slope outside {-1, 0, 1} is already
    # a violation, witnessed by any pair strictly inside it
    segments = _affine_segments(f, d0, d1)
    for lo, hi, slope in segments:
        checked += 1
        if slope != 0 and abs(slope) != 1 and hi - lo > 0:
            a = lo + (hi - lo) / 4
            b = hi - (hi - lo) / 4
            if is_witness(f, a, b):
                return ClassIDecision(False, (a, b), checked)

    pool = {d0, d1}
    for x in f.xs:
        if d0 <= x <= d1:
            pool.add(x)
    for v in f.ys:
        for t in _preimages(f, v):
            if d0 <= t <= d1:
                pool.add(t)
    pts = sorted(pool)
    enriched = list(pts)
    for p, q in zip(pts, pts[1:]):
        enriched.append((p + q) / 2)
    enriched = sorted(set(enriched))

    for i in range(len(enriched)):
        for j in range(i + 1, len(enriched)):
            checked += 1
            if is_witness(f, enriched[i], enriched[j]):
                return ClassIDecision(False, (enriched[i], enriched[j]), checked)

    rng = random.Random(seed)
    span = d1 - d0
    for _ in range(n_random):
        a = d0 + span * Fraction(rng.randrange(0, 2048), 2048)
        b = d0 + span * Fraction(rng.randrange(0, 2048), 2048)
        if a > b:
            a, b = b, a
        checked += 1
        if a < b and is_witness(f, a, b):
            return ClassIDecision(False, (a, b), checked)
    return ClassIDecision(True, None, checked)


def _affine_segments(f: PLContraction, d0: Fraction, d1: Fraction):
    """Maximal affine stretches of f clipped to [d0, d1], with slopes."""
    slopes = f.segment_slopes()
    cuts = [d0] + [x for x in f.xs if d0 < x < d1] + [d1]
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        # locate the segment containing mid
        if mid <= f.xs[0]:
            s = slopes[0]
        elif mid >= f.xs[-1]:
            s = slopes[-1]
        else:
            i = bisect.bisect_right(f.xs, mid) - 1
            s = slopes[i + 1]
        out.append((lo, hi, s))
    return out


# ---------------------------------------------------------------------------
# n-D contractions: structured maps, folds, chains
# ---------------------------------------------------------------------------

def _norm_sq_int(v: Sequence[int]) -> int:
    return sum(int(x) * int(x) for x in v)


@dataclass(frozen=True)
class Fold:
    """Polarization contraction for the hyperplane {x : <x, v> = c}.

    v is a nonzero integer normal (axis vectors and lattice diagonals stay
    exact); c is the offset in <., v> coordinates, so for a unit axis normal
    it is the usual hyperplane position t0.  Orientation "+" favors +v.
    """

    v: tuple[int, ...]
    c: Fraction
    orient: str = "+"

    def __post_init__(self):
        v = tuple(int(x) for x in self.v)
        if all(x == 0 for x in v):
            raise ValueError("normal vector must be nonzero")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c", rat(self.c))
        if self.orient not in ("+", "-"):
            raise ValueError("orientation must be '+' or '-'")

    @property
    def norm_sq(self) -> int:
        return _norm_sq_int(self.v)

    @property
    def unit(self) -> tuple[float, ...]:
        n = math.sqrt(self.norm_sq)
        return tuple(x / n for x in self.v)

    @property
    def t0(self) -> float:
        """Hyperplane position along the unit normal."""
        return float(self.c) / math.sqrt(self.norm_sq)

    def reflect_point(self, x: Point) -> Point:
        q = self.norm_sq
        d = self.c - sum(xi * vi for xi, vi in zip(x, self.v))
        return tuple(xi + 2 * d * vi / q for xi, vi in zip(x, self.v))

    def side(self, x: Point):
        """Sign of the favored-side coordinate: > 0 strictly favored."""
        d = sum(xi * vi for xi, vi in zip(x, self.v)) - self.c
        return d if self.orient == "+" else -d

    def __call__(self, x: Point) -> Point:
        q = self.norm_sq
        d = self.c - sum(xi * vi for xi, vi in zip(x, self.v))
        if self.orient == "+":
            shift = (abs(d) + d) / q
        else:
            shift = (d - abs(d)) / q
        if shift == 0:
            return tuple(x)
        return tuple(xi + shift * vi for xi, vi in zip(x, self.v))

    def apply_np(self, pts: np.ndarray) -> np.ndarray:
        v = np.asarray(self.v, dtype=float)
        q = float(self.norm_sq)
        d = float(self.c) - pts @ v
        if self.orient == "+":
            shift = (np.abs(d) + d) / q
        else:
            shift = (d - np.abs(d)) / q
        return pts + shift[:, None] * v[None, :]


@dataclass(frozen=True)
class FoldChain:
    """Finite composition of folds, applied left to right; 1-Lipschitz."""

    folds: tuple[Fold, ...] = ()

    def __call__(self, x: Point) -> Point:
        for f in self.folds:
            x = f(x)
        return x

    def apply_np(self, pts: np.ndarray) -> np.ndarray:
        for f in self.folds:
            pts = f.apply_np(pts)
        return pts

    def __len__(self) -> int:
        return len(self.folds)


@dataclass(frozen=True)
class StructuredMapND:
    """n-D contraction of a structured set map with normal v and offset c.

    kind in {"reflection", "fold", "steiner", "solynin", "brock"}; the
    hyperplane is {x : <x, v> = c} exactly as for ``Fold``.
    """

    kind: str
    v: tuple[int, ...]
    c: Fraction
    orient: str = "+"
    b: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in ("reflection", "fold", "steiner", "solynin", "brock"):
            raise ValueError(f"unknown kind {self.kind!r}")
        v = tuple(int(x) for x in self.v)
        if all(x == 0 for x in v):
            raise ValueError("normal vector must be nonzero")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c", rat(self.c))
        if self.kind == "brock":
            if self.b is None:
                raise ValueError("brock requires b")
            b = rat(self.b)
            if not 0 <= b <= 1:
                raise ValueError("brock parameter must lie in [0, 1]")
            object.__setattr__(self, "b", b)

    @property
    def norm_sq(self) -> int:
        return _norm_sq_int(self.v)

    def __call__(self, x: Point) -> Point:
        q = self.norm_sq
        d = self.c - sum(xi * vi for xi, vi in zip(x, self.v))
        k = self.kind
        if k == "reflection":
            shift = 2 * d / q
        elif k == "fold":
            shift = ((abs(d) + d) if self.orient == "+" else (d - abs(d))) / q
        elif k == "steiner":
            shift = d / q
        elif k == "solynin":
            shift = (max(0, d) if self.orient == "+" else min(0, d)) / q
        elif k == "brock":
            shift = (1 - self.b) * d / q
        else:  # pragma: no cover
            raise AssertionError(k)
        if shift == 0:
            return tuple(x)
        return tuple(xi + shift * vi for xi, vi in zip(x, self.v))


PsiLike = Union[Fold, FoldChain, StructuredMapND, Callable]


def eval_psi(m: PsiLike, x: Point) -> Point:
    """Evaluate any of the n-D contraction objects (or a raw callable)."""
    if callable(m):
        return tuple(m(tuple(x)))
    raise TypeError(f"cannot evaluate {type(m).__name__}")


# ---------------------------------------------------------------------------
# recovering phi from a set map through interval images
# ---------------------------------------------------------------------------

def phi_from_setmap(m, t: RationalLike, r: RationalLike) -> Fraction:
    """Apply the 1-D map to [t-r, t+r] and read off the image midpoint.

    Raises NotABall when the image is not a single interval of length 2r,
    i.e. when the map fails to send this interval to an interval.
    """
    t, r = rat(t), rat(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    apply = m if callable(m) and not isinstance(m, SetMap1D) else (
        lambda a: apply_setmap(m, a))
    img = apply(iu((t - r, t + r)))
    if len(img.components) != 1 or measure(img) != 2 * r:
        raise NotABall(
            f"image of [{rat_str(t - r)}, {rat_str(t + r)}] is not an interval "
            f"of length {rat_str(2 * r)}")
    return img.components[0].midpoint


# ---------------------------------------------------------------------------
# quantitative inequality checks
# ---------------------------------------------------------------------------

def _dist(x: Point, y: Point) -> float:
    return math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(x, y)))


def pseudo_contraction_check(m: PsiLike,
                             samples,
                             tol: float = 1e-9) -> bool:
    """For pairs ((x, r), (x', r')): the image-center displacement never
    exceeds max(|x - x'|, |r - r'|).  The implemented maps have psi
    independent of the radius, so the radii enter only through the bound."""
    for (x, r), (x2, r2) in samples:
        lhs = _dist(eval_psi(m, x), eval_psi(m, x2))
        rhs = max(_dist(x, x2), abs(float(r) - float(r2)))
        if lhs > rhs + tol:
            return False
    return True


def kappa(n: int) -> float:
    """Volume of the n-dimensional unit ball."""
    if n < 1:
        raise InvalidDimension("dimension must be >= 1")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def lens_volume(n: int, r: float, t: float) -> float:
    """Volume of the intersection of two balls of radius r at center
    distance t: closed forms for n = 2, 3, a cap quadrature for n >= 4."""
    if n < 2:
        raise InvalidDimension("dimension must be >= 2")
    r, t = float(r), float(t)
    if r <= 0:
        raise ValueError("radius must be positive")
    if t < 0:
        raise ValueError("center distance must be nonnegative")
    if t >= 2 * r:
        return 0.0
    if t == 0:
        return kappa(n) * r ** n
    if n == 2:
        return 2 * r * r * math.acos(t / (2 * r)) - (t / 2) * math.sqrt(4 * r * r - t * t)
    if n == 3:
        return math.pi * (2 * r - t) ** 2 * (4 * r + t) / 12
    from scipy.integrate import quad
    cap, _ = quad(lambda x: (r * r - x * x) ** ((n - 1) / 2), t / 2, r)
    return 2 * kappa(n - 1) * cap


def ball_symdiff_volume(n: int, r: float, t: float) -> float:
    """Volume of B(0, r) symmetric-difference B(t*u, r)."""
    if n < 2:
        raise InvalidDimension("dimension must be >= 2")
    r, t = float(r), float(t)
    if t >= 2 * r:
        return 2 * kappa(n) * r ** n
    return 2 * (kappa(n) * r ** n - lens_volume(n, r, t))


def center_distance_bound_check(psi1: PsiLike, psi2: PsiLike,
                                x: Point, r: float,
                                tol: float = 1e-9) -> bool:
    """Center displacement against the symmetric-difference volume bound:

        |psi1(x) - psi2(x)|  <=  n / (2 r^(n-1) kappa_{n-1}) * vol(B1 Δ B2)

    valid whenever the image balls intersect (raises DisjointImages else).
    """
    n = len(x)
    y1, y2 = eval_psi(psi1, x), eval_psi(psi2, x)
    t = _dist(y1, y2)
    if t > 2 * float(r):
        raise DisjointImages(f"image balls at distance {t} > 2r = {2 * float(r)}")
    bound = n / (2 * float(r) ** (n - 1) * kappa(n - 1)) * ball_symdiff_volume(n, r, t)
    return t <= bound + tol


def almost_affine_check(psi: PsiLike, x: Point, x2: Point, t: float,
                        tol: float = 1e-9) -> bool:
    """Near-isometric pairs stay near the chord:

        |psi((1-t)x + t x') - ((1-t)psi(x) + t psi(x'))| <= sqrt(eps(2L + eps))

    with L the image distance and eps the distance defect max(0, |x-x'| - L).
    """
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    y1, y2 = eval_psi(psi, x), eval_psi(psi, x2)
    L = _dist(y1, y2)
    eps = max(0.0, _dist(x, x2) - L)
    w = tuple((1 - t) * float(a) + t * float(b) for a, b in zip(x, x2))
    yw = eval_psi(psi, w)
    chord = tuple((1 - t) * float(a) + t * float(b) for a, b in zip(y1, y2))
    lhs = _dist(yw, chord)
    return lhs <= math.sqrt(eps * (2 * L + eps)) + tol


# ---------------------------------------------------------------------------
# convergence modes of contraction sequences
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    sup_gaps: list[float]
    l1_gaps: list[float]
    point_gaps: list[float]
    grid_points: int
    volume: float
    agree: bool


def convergence_mode_check(maps: Sequence[PsiLike], limit: PsiLike,
                           body, grid_h: float = 0.125) -> ConvergenceReport:
    """Estimate pointwise, uniform, and mean (L1) gaps to the limit map over
    a grid on the body, and check the three modes stay mutually bounded.

    body: a ``Ball``-like object with .center/.radius, or a box given as a
    sequence of (lo, hi) pairs.  The gap function of two contractions is
    2-Lipschitz, which yields the grid slack; the uniform-vs-mean comparison
    uses the cone lower bound for the integral of a 2-Lipschitz bump.
    """
    pts, volume, n = _body_grid(body, grid_h)
    if not pts:
        raise ValueError("grid too coarse: no sample points in the body")
    lim_vals = [eval_psi(limit, p) for p in pts]
    sup_gaps, l1_gaps, point_gaps = [], [], []
    for m in maps:
        gaps = [_dist(eval_psi(m, p), lv) for p, lv in zip(pts, lim_vals)]
        sup_gaps.append(max(gaps))
        l1_gaps.append(sum(gaps) / len(gaps) * volume)
        point_gaps.append(gaps[0])
    slack = 2 * grid_h * math.sqrt(n)
    agree = True
    # integral of a 2-Lipschitz bump of height s is >= cone * s^(n+1), with a
    # 2^-n safety share for bumps peaking at the boundary of the body
    cone = kappa(n) / (2 ** (2 * n) * (n + 1))
    for s, l1, pg in zip(sup_gaps, l1_gaps, point_gaps):
        if pg > s + 1e-12:
            agree = False
        if l1 > (s + slack) * volume + 1e-12:
            agree = False
        if s > (l1 / cone) ** (1 / (n + 1)) + slack + 1e-12:
            agree = False
    return ConvergenceReport(sup_gaps, l1_gaps, point_gaps, len(pts), volume, agree)


def _body_grid(body, grid_h: float):
    if hasattr(body, "center") and hasattr(body, "radius"):
        center = tuple(float(c) for c in body.center)
        r = float(body.radius)
        n = len(center)
        axes = [np.arange(c - r, c + r + grid_h / 2, grid_h) for c in center]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        inside = ((pts - np.asarray(center)) ** 2).sum(axis=1) <= r * r
        return [tuple(p) for p in pts[inside]], kappa(n) * r ** n, n
    box = [(float(lo), float(hi)) for lo, hi in body]
    n = len(box)
    axes = [np.arange(lo, hi + grid_h / 2, grid_h) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    volume = float(np.prod([hi - lo for lo, hi in box]))
    return [tuple(p) for p in pts], volume, n


# ---------------------------------------------------------------------------
# image volumes
# ---------------------------------------------------------------------------

def image_volume(m: StructuredMapND, region) -> float:
    """Exact image volume of a ball under the brock contraction: the image
    is an ellipsoid with one semiaxis scaled by b, hence volume b * kappa_n r^n."""
    if not isinstance(m, StructuredMapND) or m.kind != "brock":
        raise ValueError("closed-form image volume is only available for brock")
    n = len(region.center)
    r = float(region.radius)
    return float(m.b) * kappa(n) * r ** n


@dataclass
class VoxelVolume:
    h: float
    volume: float
    samples: int
    refined_h: Optional[float] = None
    refined_volume: Optional[float] = None


def image_volume_voxel(chain: FoldChain, region, h: float,
                       samples_per_voxel: int = 64, seed: int = 0,
                       refine: bool = False) -> VoxelVolume:
    """Voxel-counting image volume for a fold chain on a ball.

    Quasi-random points fill the ball at >= samples_per_voxel per voxel of
    image volume; occupied voxels of the mapped cloud are counted.  With
    ``refine`` the count is repeated at h/2 to expose the boundary bias.
    """
    n = len(region.center)
    r = float(region.radius)
    center = np.asarray([float(c) for c in region.center])
    est = _voxel_count(chain, center, r, n, float(h), samples_per_voxel, seed)
    out = VoxelVolume(float(h), est[0], est[1])
    if refine:
        est2 = _voxel_count(chain, center, r, n, float(h) / 2, samples_per_voxel, seed + 1)
        out.refined_h = float(h) / 2
        out.refined_volume = est2[0]
    return out


def _voxel_count(chain, center, r, n, h, spv, seed):
    from scipy.stats import qmc

    total = int(math.ceil(spv * kappa(n) * (r / h) ** n))
    if n != 2:
        # cube-rejection keeps a kappa_n / 2^n share; inflate to compensate
        total = int(math.ceil(total * (2 ** n / kappa(n))))
    sob = qmc.Sobol(d=n, scramble=True, seed=seed)
    occupied = set()
    batch = 1 << 18
    done = 0
    import warnings
    while done < total:
        take = min(batch, total - done)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            u = sob.random(take)
        if n == 2:
            rad = r * np.sqrt(u[:, 0])
            ang = 2 * math.pi * u[:, 1]
            pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1) + center
        else:
            pts = center + r * (2 * u - 1)
            pts = pts[((pts - center) ** 2).sum(axis=1) <= r * r]
        done += take
        if len(pts) == 0:
            continue
        img = chain.apply_np(pts)
        idx = np.floor(img / h).astype(np.int64)
        key = idx[:, 0].copy()
        for j in range(1, n):
            key *= 1 << 21
            key += idx[:, j]
        occupied.update(np.unique(key).tolist())
    return len(occupied) * h ** n, total


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------

def fold_to_json(f: Fold) -> dict:
    return {"kind": "fold", "u": list(f.v), "t0": rat_str(f.c), "orient": f.orient}


def fold_from_json(d: dict) -> Fold:
    return Fold(tuple(d["u"]), rat(d["t0"]), d.get("orient", "+"))


def chain_to_json(c: FoldChain) -> list:
    return [fold_to_json(f) for f in c.folds]


def chain_from_json(items: list) -> FoldChain:
    return FoldChain(tuple(fold_from_json(d) for d in items))
