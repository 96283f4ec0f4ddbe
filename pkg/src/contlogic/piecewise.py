"""Exact piecewise-linear functions [0, 1] -> [0, 1] of one variable.

Used to evaluate one-variable templates (formulas whose only atom is a
0-ary hole) symbolically: every restricted operation maps piecewise-linear
functions to piecewise-linear functions, and the kinks of the result are
among the kinks of the operands plus the points where the operation switches
branch. Shared subterms are evaluated once, which matters for templates built
by repeated self-addition.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .connectives import MonotoneConnective, eval_connective
from .syntax import Apply, Atomic, Const, Half, Max, Min, TruncAdd, TruncSub
from .values import ONE, ZERO


@dataclass(frozen=True)
class PiecewiseLinear:
    points: tuple[tuple[Fraction, Fraction], ...]

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(p[0] for p in self.points)

    def __call__(self, x: Fraction) -> Fraction:
        pts = self.points
        i = bisect_right(self.xs, x) - 1
        if i >= len(pts) - 1:
            return pts[-1][1]
        (x0, y0), (x1, y1) = pts[i], pts[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def constant_fn(q: Fraction) -> PiecewiseLinear:
    return PiecewiseLinear(((ZERO, q), (ONE, q)))


def identity_fn() -> PiecewiseLinear:
    return PiecewiseLinear(((ZERO, ZERO), (ONE, ONE)))


def _build(xs, fn: Callable[[Fraction], Fraction]) -> PiecewiseLinear:
    pts = [(x, fn(x)) for x in sorted(set(xs))]
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        (x0, y0), (x1, y1), (x2, y2) = out[-1], pts[i], pts[i + 1]
        if (y1 - y0) * (x2 - x0) != (y2 - y0) * (x1 - x0):
            out.append(pts[i])
    out.append(pts[-1])
    return PiecewiseLinear(tuple(out))


def _zeros(xs, h: Callable[[Fraction], Fraction]) -> list[Fraction]:
    """Points strictly inside consecutive xs where the linear function h changes sign."""
    out = []
    for a, b in zip(xs, xs[1:]):
        ha, hb = h(a), h(b)
        if ha * hb < 0:
            out.append(a + (b - a) * ha / (ha - hb))
    return out


def _binary(f: PiecewiseLinear, g: PiecewiseLinear, switch, op) -> PiecewiseLinear:
    xs = sorted(set(f.xs) | set(g.xs))
    xs = sorted(set(xs) | set(_zeros(xs, lambda x: switch(f(x), g(x)))))
    return _build(xs, lambda x: op(f(x), g(x)))


def pl_min(f, g):
    return _binary(f, g, lambda a, b: a - b, min)


def pl_max(f, g):
    return _binary(f, g, lambda a, b: a - b, max)


def pl_tsub(f, g):
    return _binary(f, g, lambda a, b: a - b, lambda a, b: max(a - b, ZERO))


def pl_tadd(f, g):
    return _binary(f, g, lambda a, b: a + b - 1, lambda a, b: min(a + b, ONE))


def pl_half(f):
    return PiecewiseLinear(tuple((x, y / 2) for x, y in f.points))


def pl_apply(c: MonotoneConnective, f: PiecewiseLinear) -> PiecewiseLinear:
    xs = list(f.xs)
    extra = []
    for bx in c.xs:
        extra += _zeros(xs, lambda x: f(x) - bx)
        extra += [x for x in xs if f(x) == bx]
    return _build(set(xs) | set(extra), lambda x: eval_connective(c, f(x)))


def template_function(template, hole: str = "u") -> PiecewiseLinear:
    """The function u -> template(u) for a formula whose only atom is ``hole``."""
    memo: dict[int, PiecewiseLinear] = {}

    def go(f):
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, Atomic):
            if f.pred != hole or f.args:
                raise ValueError(f"template may only mention the 0-ary atom {hole!r}, found {f.pred!r}")
            out = identity_fn()
        elif isinstance(f, Const):
            out = constant_fn(f.value)
        elif isinstance(f, (Min, Max)):
            op = pl_min if isinstance(f, Min) else pl_max
            out = go(f.children[0])
            for c in f.children[1:]:
                out = op(out, go(c))
        elif isinstance(f, TruncSub):
            out = pl_tsub(go(f.left), go(f.right))
        elif isinstance(f, TruncAdd):
            out = pl_tadd(go(f.left), go(f.right))
        elif isinstance(f, Half):
            out = pl_half(go(f.child))
        elif isinstance(f, Apply):
            out = pl_apply(f.conn, go(f.child))
        else:
            raise ValueError(f"quantifiers cannot occur in a template: {type(f).__name__}")
        memo[key] = out
        return out

    return go(template)


__all__ = ["PiecewiseLinear", "template_function", "constant_fn", "identity_fn"]
