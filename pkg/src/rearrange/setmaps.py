"""The 1-D set maps: reflection, polarization, Steiner, Solynin, Brock.

Each map sends a canonical interval union to a canonical interval union,
preserving measure exactly.  Polarization about a point c with orientation
"+" keeps the union of the set and its mirror image on [c, +inf) and the
intersection on (-inf, c]; the other maps follow their usual fiber
descriptions.  The dyadic chain iterates polarizations at centers
-2^m, -2^m + 1/2^m, ..., k/2^m; its k = 0 endpoint converges in measure to
the ``solynin_1d`` image about the origin, which ``solynin_distance``
quantifies exactly.

Everything here is exact rational arithmetic; there are no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .intervals import (
    EMPTY,
    IntervalUnion,
    RationalLike,
    dilate,
    intersect,
    iu,
    measure,
    rat,
    rat_str,
    reflect,
    restrict_ge,
    restrict_le,
    subset,
    symdiff_measure,
    translate,
    union,
)

KINDS = ("reflection", "polarization", "steiner", "solynin", "brock")


class MultiComponentInput(ValueError):
    """Brock's chord map is only defined on single intervals here."""


class IndexOutOfRange(IndexError):
    """Dyadic chain index outside [-2^(2m), 0]."""


@dataclass(frozen=True)
class SetMap1D:
    """Descriptor for a 1-D set map.

    kind:   one of {"reflection", "polarization", "steiner", "solynin", "brock"}
    center: the hyperplane position t0
    orient: "+" or "-" (used by polarization and solynin; ignored otherwise)
    b:      interpolation parameter in [0, 1] (brock only)
    """

    kind: str
    center: Fraction
    orient: str = "+"
    b: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        object.__setattr__(self, "center", rat(self.center))
        if self.orient not in ("+", "-"):
            raise ValueError("orientation must be '+' or '-'")
        if self.kind == "brock":
            if self.b is None:
                raise ValueError("brock requires the parameter b")
            b = rat(self.b)
            if not 0 <= b <= 1:
                raise ValueError("brock parameter must lie in [0, 1]")
            object.__setattr__(self, "b", b)
        elif self.b is not None:
            raise ValueError("b is only meaningful for brock")


def polarize(a: IntervalUnion, c: RationalLike, orient: str = "+") -> IntervalUnion:
    """Two-point symmetrization about c.

    With orientation "+" the favored half-line is [c, +inf).  Measure
    preserving, idempotent, and monotonic; sets symmetric about c are fixed.
    """
    c = rat(c)
    if a.is_empty:
        return a
    if orient == "+":
        if a.inf >= c:
            return a
        if a.sup <= c:
            return reflect(a, c)
        mirror = reflect(a, c)
        favored = restrict_ge(union(a, mirror), c)
        other = restrict_le(intersect(a, mirror), c)
        return union(favored, other)
    if orient == "-":
        if a.sup <= c:
            return a
        if a.inf >= c:
            return reflect(a, c)
        mirror = reflect(a, c)
        favored = restrict_le(union(a, mirror), c)
        other = restrict_ge(intersect(a, mirror), c)
        return union(favored, other)
    raise ValueError("orientation must be '+' or '-'")


def steiner_1d(a: IntervalUnion, t0: RationalLike) -> IntervalUnion:
    """Single interval of the same measure centered at t0."""
    t0 = rat(t0)
    m = measure(a)
    if m == 0:
        return EMPTY
    return iu((t0 - m / 2, t0 + m / 2))


def solynin_1d(a: IntervalUnion, t: RationalLike, orient: str = "+") -> IntervalUnion:
    """Keep the part beyond t, replace the rest by a centered interval.

    With orientation "+" the image is [t - r, t + r] together with the part
    of a in [t, +inf), where r >= 0 is the unique radius making the image
    measure equal measure(a).  r is a root of a piecewise-linear function
    with rational breakpoints, so it is found exactly.
    """
    t = rat(t)
    if orient == "-":
        return reflect(solynin_1d(reflect(a, t), t, "+"), t)
    if orient != "+":
        raise ValueError("orientation must be '+' or '-'")
    if a.is_empty:
        return a
    kept = restrict_ge(a, t)
    relocate = measure(a) - measure(kept)
    if relocate == 0:
        return kept
    r = _solynin_radius(kept, t, relocate)
    return union(iu((t - r, t + r)), kept)


def _solynin_radius(kept: IntervalUnion, t: Fraction, relocate: Fraction) -> Fraction:
    # Solve g(r) = 2r - |kept ∩ [t, t+r]| = relocate; g is piecewise linear,
    # increasing with slope 1 on covered stretches and 2 on gaps.
    breakpoints = sorted({comp.lo - t for comp in kept.components}
                         | {comp.hi - t for comp in kept.components}
                         | {Fraction(0)})
    breakpoints = [b for b in breakpoints if b >= 0]
    cur_r = Fraction(0)
    cur_g = Fraction(0)
    for nxt in breakpoints[1:] + [None]:
        covered = kept.contains_point(t + cur_r + (nxt - cur_r) / 2) if nxt is not None \
            else kept.contains_point(t + cur_r + 1)
        slope = 1 if covered else 2
        if nxt is None or cur_g + slope * (nxt - cur_r) >= relocate:
            return cur_r + (relocate - cur_g) / slope
        cur_g += slope * (nxt - cur_r)
        cur_r = nxt
    raise AssertionError("unreachable: g(r) grows without bound")


def brock_convex_1d(a: IntervalUnion, t0: RationalLike, b: RationalLike) -> IntervalUnion:
    """Chord map: keep the length, move the midpoint from t to (1-b)t0 + b t.

    b = 1 is the identity and b = 0 recenters the chord at t0.  Only single
    intervals are accepted; the general union case is deliberately rejected.
    """
    t0, b = rat(t0), rat(b)
    if not 0 <= b <= 1:
        raise ValueError("brock parameter must lie in [0, 1]")
    if a.is_empty:
        return a
    if len(a.components) != 1:
        raise MultiComponentInput(
            "brock chord map is only defined for single intervals")
    comp = a.components[0]
    mid = (1 - b) * t0 + b * comp.midpoint
    half = comp.length / 2
    return iu((mid - half, mid + half))


def apply_setmap(m: SetMap1D, a: IntervalUnion) -> IntervalUnion:
    if m.kind == "reflection":
        return reflect(a, m.center)
    if m.kind == "polarization":
        return polarize(a, m.center, m.orient)
    if m.kind == "steiner":
        return steiner_1d(a, m.center)
    if m.kind == "solynin":
        return solynin_1d(a, m.center, m.orient)
    if m.kind == "brock":
        return brock_convex_1d(a, m.center, m.b)
    raise ValueError(f"unknown map kind {m.kind!r}")


def dyadic_chain(a: IntervalUnion, m: int, k: int) -> IntervalUnion:
    """Composite of polarizations at centers -2^m, ..., k/2^m (step 1/2^m).

    k must lie in [-2^(2m), 0]; the full chain to k performs
    k + 2^(2m) + 1 polarization steps, all with orientation "+".
    Centers at or below the running minimum act as the identity and are
    skipped without changing the result.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    n_steps = 4 ** m
    if not -n_steps <= k <= 0:
        raise IndexOutOfRange(f"k={k} outside [-{n_steps}, 0]")
    if a.is_empty:
        return a
    denom = 2 ** m
    # First center that can act: the smallest j with j/2^m > inf(a).
    lo = a.inf
    j_first = max(-n_steps, (lo.numerator * denom) // lo.denominator + 1)
    cur = a
    n0 = len(a.components)
    for j in range(j_first, k + 1):
        c = Fraction(j, denom)
        if c <= cur.inf:
            continue
        cur = polarize(cur, c, "+")
        # sanity bound on fragmentation: at most two new components per step
        assert len(cur.components) <= n0 + 2 * (j + n_steps + 1)
        if cur.is_empty:
            break
    return cur


def check_smoothing(m: SetMap1D, a: IntervalUnion, d: RationalLike) -> bool:
    """Exact test of (image + [-d,d]) ⊂ image(input + [-d,d])."""
    d = rat(d)
    lhs = dilate(apply_setmap(m, a), d)
    rhs = apply_setmap(m, dilate(a, d))
    return subset(lhs, rhs)


def check_welldistributed(a: IntervalUnion, m: int) -> bool:
    """Shift inclusions satisfied by the endpoint of the dyadic chain.

    For A0 the chain endpoint at level m, every even k in (-2^(2m), -2]
    and every even shift s in {2, ..., -(k+2)} must satisfy, exactly,

        A0 ⊃ (A0 ∩ (k/2^m, (k+2)/2^m]) + s/2^m
        A0 ⊃ -(A0 ∩ (k/2^m, (k+2)/2^m]) - s/2^m.

    Requires a ⊂ [-2^m, 2^m].
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    bound = Fraction(2 ** m)
    if not a.is_empty and (a.inf < -bound or a.sup > bound):
        raise ValueError("set must be contained in [-2^m, 2^m]")
    a0 = dyadic_chain(a, m, 0)
    denom = 2 ** m
    for k in range(-(4 ** m) + 2, -1, 2):
        cell = intersect(a0, iu((Fraction(k, denom), Fraction(k + 2, denom))))
        if cell.is_empty:
            continue
        cell_neg = reflect(cell, 0)
        for s in range(2, -(k + 2) + 1, 2):
            shift = Fraction(s, denom)
            if not subset(translate(cell, shift), a0):
                return False
            if not subset(translate(cell_neg, -shift), a0):
                return False
    return True


def solynin_distance(a: IntervalUnion, m: int) -> Fraction:
    """Exact symmetric-difference measure between the dyadic chain endpoint
    at level m and the solynin image about the origin."""
    return symdiff_measure(dyadic_chain(a, m, 0), solynin_1d(a, 0))


def setmap_to_json(m: SetMap1D) -> dict:
    d = {"kind": m.kind, "t0": rat_str(m.center), "orient": m.orient}
    if m.kind == "brock":
        d["b"] = rat_str(m.b)
    return d


def setmap_from_json(d: dict) -> SetMap1D:
    return SetMap1D(
        kind=d["kind"],
        center=rat(d.get("t0", d.get("center", 0))),
        orient=d.get("orient", "+"),
        b=rat(d["b"]) if "b" in d else None,
    )
