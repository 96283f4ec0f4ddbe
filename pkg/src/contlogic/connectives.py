"""Piecewise-linear nondecreasing unary connectives with rational breakpoints."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .values import ONE, ZERO, fmt, value


def _collinear(p, q, r) -> bool:
    return (q[1] - p[1]) * (r[0] - p[0]) == (r[1] - p[1]) * (q[0] - p[0])


@dataclass(frozen=True)
class MonotoneConnective:
    """A continuous nondecreasing map [0,1] -> [0,1].

    ``points`` is the breakpoint list ``((x0, y0), ..., (xn, yn))`` with
    ``x0 = 0``, ``xn = 1``, x strictly increasing and y nondecreasing. Interior
    collinear breakpoints are dropped so that two connectives are equal iff
    they agree pointwise.
    """

    points: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pts = tuple((value(x), value(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError("a connective needs at least two breakpoints")
        if pts[0][0] != 0 or pts[-1][0] != 1:
            raise ValueError("breakpoints must start at x=0 and end at x=1")
        for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
            if not x1 < x2:
                raise ValueError("breakpoint x coordinates must be strictly increasing")
            if y2 < y1:
                raise ValueError("connective is not nondecreasing")
        simplified = [pts[0]]
        for i in range(1, len(pts) - 1):
            if not _collinear(simplified[-1], pts[i], pts[i + 1]):
                simplified.append(pts[i])
        simplified.append(pts[-1])
        object.__setattr__(self, "points", tuple(simplified))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "MonotoneConnective":
        return cls(tuple((Fraction(x), Fraction(y)) for x, y in pairs))

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(p[0] for p in self.points)

    def __call__(self, x: Fraction) -> Fraction:
        return eval_connective(self, x)

    def is_identity(self) -> bool:
        return self.points == ((ZERO, ZERO), (ONE, ONE))

    def is_constant(self) -> bool:
        return self.points[0][1] == self.points[-1][1]

    def zero_threshold(self) -> Fraction | None:
        """Largest z with c(z) = 0, or None when c(0) > 0."""
        if self.points[0][1] != 0:
            return None
        z = ZERO
        for x, y in self.points:
            if y == 0:
                z = x
            else:
                break
        return z

    def __str__(self) -> str:
        return "C[" + ",".join(f"({fmt(x)},{fmt(y)})" for x, y in self.points) + "]"


def eval_connective(c: MonotoneConnective, x: Fraction) -> Fraction:
    pts = c.points
    if x <= 0:
        return pts[0][1]
    if x >= 1:
        return pts[-1][1]
    i = bisect_right(c.xs, x) - 1
    (x1, y1), (x2, y2) = pts[i], pts[i + 1]
    if x == x1:
        return y1
    return y1 + (y2 - y1) * (x - x1) / (x2 - x1)


def _preimages(c: MonotoneConnective, y: Fraction) -> list[Fraction]:
    out = []
    for (x1, y1), (x2, y2) in zip(c.points, c.points[1:]):
        if y1 < y < y2:
            out.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
    return out


def compose_connectives(b: MonotoneConnective, c: MonotoneConnective) -> MonotoneConnective:
    """The connective x -> b(c(x))."""
    xs = set(c.xs)
    for bx in b.xs:
        xs.update(_preimages(c, bx))
    return MonotoneConnective(tuple((x, b(c(x))) for x in sorted(xs)))


def compose_all(cs: Sequence[MonotoneConnective]) -> MonotoneConnective:
    """Compose outermost first: compose_all([a, b, c])(x) == a(b(c(x)))."""
    out = identity()
    for c in cs:
        out = compose_connectives(out, c)
    return out


def identity() -> MonotoneConnective:
    return MonotoneConnective(((ZERO, ZERO), (ONE, ONE)))


def constant(q) -> MonotoneConnective:
    q = value(q)
    return MonotoneConnective(((ZERO, q), (ONE, q)))


def minus_const(t) -> MonotoneConnective:
    """u -> max(u - t, 0)."""
    t = value(t)
    if t == 0:
        return identity()
    if t == 1:
        return constant(0)
    return MonotoneConnective(((ZERO, ZERO), (t, ZERO), (ONE, ONE - t)))


def plus_const(t) -> MonotoneConnective:
    """u -> min(u + t, 1)."""
    t = value(t)
    if t == 0:
        return identity()
    if t == 1:
        return constant(1)
    return MonotoneConnective(((ZERO, t), (ONE - t, ONE), (ONE, ONE)))


def halve() -> MonotoneConnective:
    return MonotoneConnective(((ZERO, ZERO), (ONE, Fraction(1, 2))))


def cap(q) -> MonotoneConnective:
    """u -> min(u, q)."""
    q = value(q)
    if q == 0:
        return constant(0)
    if q == 1:
        return identity()
    return MonotoneConnective(((ZERO, ZERO), (q, q), (ONE, q)))


def floor_at(q) -> MonotoneConnective:
    """u -> max(u, q)."""
    q = value(q)
    if q == 0:
        return identity()
    if q == 1:
        return constant(1)
    return MonotoneConnective(((ZERO, q), (q, q), (ONE, ONE)))
