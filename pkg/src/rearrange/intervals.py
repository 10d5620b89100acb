"""Exact algebra of finite unions of closed intervals with rational endpoints.

This is the 1-D set model everything else builds on.  A set is a canonical,
sorted tuple of closed intervals with ``fractions.Fraction`` endpoints;
degenerate (single-point) intervals are dropped and touching components are
merged, so two values represent the same set up to Lebesgue-null differences
exactly when they are equal.  All set operations are exact; floats never
enter unless the caller supplies them, in which case they are converted to
their exact binary rational value.

The empty set is a first-class value (``EMPTY``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, float, str]


def rat(x: RationalLike) -> Fraction:
    """Convert to an exact Fraction.

    Accepts Fractions, ints, "p/q" strings, decimal strings like "0.25"
    (parsed exactly), and floats (converted to their exact binary value).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rat_str(x: Fraction) -> str:
    """Render a Fraction as "p/q" (or "p" when the denominator is 1)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with lo < hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class IntervalUnion:
    """Canonical finite union of disjoint, non-touching closed intervals."""

    components: tuple[Interval, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        for a, b in zip(comps, comps[1:]):
            if not a.hi < b.lo:
                raise ValueError("components must be sorted with strict gaps")
        object.__setattr__(self, "components", comps)

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def inf(self) -> Fraction:
        if self.is_empty:
            raise ValueError("empty set has no lower bound")
        return self.components[0].lo

    @property
    def sup(self) -> Fraction:
        if self.is_empty:
            raise ValueError("empty set has no upper bound")
        return self.components[-1].hi

    def contains_point(self, x: RationalLike) -> bool:
        x = rat(x)
        return any(c.lo <= x <= c.hi for c in self.components)

    def __repr__(self) -> str:
        if self.is_empty:
            return "IntervalUnion(∅)"
        body = " ∪ ".join(f"[{rat_str(c.lo)}, {rat_str(c.hi)}]" for c in self.components)
        return f"IntervalUnion({body})"


EMPTY = IntervalUnion(())


def iu(*pairs: Sequence[RationalLike]) -> IntervalUnion:
    """Build a canonical union from (lo, hi) pairs in any order."""
    return _canon((rat(lo), rat(hi)) for lo, hi in pairs)


def _canon(pairs: Iterable[tuple[Fraction, Fraction]]) -> IntervalUnion:
    """Sort, drop degenerate pieces, merge overlapping/touching ones."""
    items = sorted((lo, hi) for lo, hi in pairs if lo < hi)
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return IntervalUnion(tuple(Interval(lo, hi) for lo, hi in merged))


def measure(a: IntervalUnion) -> Fraction:
    """Total length, exactly."""
    return sum((c.length for c in a.components), Fraction(0))


def union(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    return _canon([(c.lo, c.hi) for c in a.components] + [(c.lo, c.hi) for c in b.components])


def intersect(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    out: list[tuple[Fraction, Fraction]] = []
    i = j = 0
    ca, cb = a.components, b.components
    while i < len(ca) and j < len(cb):
        lo = max(ca[i].lo, cb[j].lo)
        hi = min(ca[i].hi, cb[j].hi)
        if lo < hi:
            out.append((lo, hi))
        if ca[i].hi < cb[j].hi:
            i += 1
        else:
            j += 1
    return _canon(out)


def subtract(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    """a minus b, up to the (null) boundary: removed endpoints stay closed."""
    out: list[tuple[Fraction, Fraction]] = []
    cb = b.components
    j = 0
    for comp in a.components:
        cur = comp.lo
        while j < len(cb) and cb[j].hi <= cur:
            j += 1
        k = j
        while k < len(cb) and cb[k].lo < comp.hi:
            if cb[k].lo > cur:
                out.append((cur, cb[k].lo))
            if cb[k].hi > cur:
                cur = cb[k].hi
            if cur >= comp.hi:
                break
            k += 1
        if cur < comp.hi:
            out.append((cur, comp.hi))
    return _canon(out)


def combine(a: IntervalUnion, b: IntervalUnion, mode: str) -> IntervalUnion:
    """Set combination with mode in {"union", "intersect", "subtract"}."""
    if mode == "union":
        return union(a, b)
    if mode == "intersect":
        return intersect(a, b)
    if mode == "subtract":
        return subtract(a, b)
    raise ValueError(f"unknown mode {mode!r}")


def symdiff_measure(a: IntervalUnion, b: IntervalUnion) -> Fraction:
    """Measure of the symmetric difference; zero iff a and b are essentially equal."""
    return measure(a) + measure(b) - 2 * measure(intersect(a, b))


def reflect(a: IntervalUnion, c: RationalLike) -> IntervalUnion:
    """Mirror image about the point c.  An exact involution."""
    c = rat(c)
    return _canon((2 * c - comp.hi, 2 * c - comp.lo) for comp in a.components)


def translate(a: IntervalUnion, s: RationalLike) -> IntervalUnion:
    s = rat(s)
    return IntervalUnion(tuple(Interval(c.lo + s, c.hi + s) for c in a.components))


def dilate(a: IntervalUnion, d: RationalLike) -> IntervalUnion:
    """Minkowski sum with [-d, d]; gaps narrower than 2d close up."""
    d = rat(d)
    if d <= 0:
        raise ValueError("dilation radius must be positive")
    return _canon((c.lo - d, c.hi + d) for c in a.components)


def essential_interior(a: IntervalUnion) -> IntervalUnion:
    """Density-one core of a canonical union.

    Boundary points are null and already ignored by the representation, so
    this is the identity; it exists so density-point arguments can be written
    down explicitly where they matter.
    """
    return a


def restrict_ge(a: IntervalUnion, c: RationalLike) -> IntervalUnion:
    """Intersection with the half-line [c, +inf)."""
    c = rat(c)
    out = []
    for comp in a.components:
        if comp.hi <= c:
            continue
        out.append((max(comp.lo, c), comp.hi))
    return _canon(out)


def restrict_le(a: IntervalUnion, c: RationalLike) -> IntervalUnion:
    """Intersection with the half-line (-inf, c]."""
    c = rat(c)
    out = []
    for comp in a.components:
        if comp.lo >= c:
            continue
        out.append((comp.lo, min(comp.hi, c)))
    return _canon(out)


def subset(a: IntervalUnion, b: IntervalUnion) -> bool:
    """True iff a is contained in b up to a null set (exact test)."""
    return subtract(a, b).is_empty


def essentially_equal(a: IntervalUnion, b: IntervalUnion) -> bool:
    return symdiff_measure(a, b) == 0


def to_json(a: IntervalUnion) -> dict:
    return {
        "type": "interval_union",
        "components": [[rat_str(c.lo), rat_str(c.hi)] for c in a.components],
    }


def from_json(d: dict) -> IntervalUnion:
    if d.get("type") != "interval_union":
        raise ValueError("not an interval_union descriptor")
    return iu(*[(rat(lo), rat(hi)) for lo, hi in d["components"]])
