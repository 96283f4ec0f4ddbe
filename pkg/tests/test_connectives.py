from fractions import Fraction as F

import pytest
from hypothesis import given

from contlogic.connectives import (
    MonotoneConnective, cap, compose_all, compose_connectives, constant, eval_connective, floor_at,
    halve, identity, minus_const, plus_const,
)
from contlogic.values import tadd, tsub

from conftest import connectives, grid

C = MonotoneConnective.from_pairs


def test_spec_evaluations():
    assert eval_connective(C([(0, 0), (1, 1)]), F(1, 2)) == F(1, 2)
    assert eval_connective(C([(0, 0), (F(1, 4), 0), (1, F(3, 4))]), F(1, 2)) == F(1, 4)
    steep = C([(0, 0), (F(1, 2), 1), (1, 1)])
    assert eval_connective(steep, F(1, 3)) == F(2, 3)
    # cross-check: the same map is u +. u
    for x in grid(48):
        assert steep(x) == tadd(x, x)


def test_named_constructors_match_their_formulas():
    for x in grid(32):
        assert minus_const(F(1, 4))(x) == tsub(x, F(1, 4))
        assert plus_const(F(3, 8))(x) == tadd(x, F(3, 8))
        assert halve()(x) == x / 2
        assert cap(F(5, 8))(x) == min(x, F(5, 8))
        assert floor_at(F(5, 8))(x) == max(x, F(5, 8))
        assert constant(F(1, 8))(x) == F(1, 8)
        assert identity()(x) == x


@pytest.mark.parametrize("pts", [
    [(F(1, 4), 0), (1, 1)],           # does not start at 0
    [(0, 0), (F(1, 2), 1), (F(1, 2), 1), (1, 1)],  # x not strictly increasing
    [(0, F(1, 2)), (1, F(1, 4))],      # decreasing
])
def test_invalid_breakpoints_rejected(pts):
    with pytest.raises(ValueError):
        C(pts)


def test_collinear_points_are_dropped_so_equality_is_pointwise():
    assert C([(0, 0), (F(1, 2), F(1, 2)), (1, 1)]) == identity()


def test_zero_threshold():
    assert minus_const(F(3, 8)).zero_threshold() == F(3, 8)
    assert constant(F(1, 8)).zero_threshold() is None
    assert identity().zero_threshold() == 0


@given(connectives())
def test_nondecreasing_on_denominator_32_grid(c):
    vals = [c(x) for x in grid(32)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert all(0 <= v <= 1 for v in vals)


def test_compose_examples():
    c = C([(0, F(1, 8)), (F(1, 2), F(3, 4)), (1, 1)])
    assert compose_connectives(identity(), c) == c
    m = minus_const(F(1, 4))
    assert compose_connectives(m, m)(F(3, 4)) == F(1, 4)
    for x in grid(8):
        assert compose_connectives(m, m)(x) == tsub(tsub(x, F(1, 4)), F(1, 4))


@given(connectives(), connectives())
def test_compose_is_pointwise_composition_on_denominator_16_grid(b, c):
    bc = compose_connectives(b, c)
    for x in grid(16):
        assert bc(x) == b(c(x))


@given(connectives(), connectives())
def test_compose_is_exact_between_breakpoints(b, c):
    # midpoints of the composite's pieces are where a missing breakpoint would show
    bc = compose_connectives(b, c)
    xs = bc.xs
    for lo, hi in zip(xs, xs[1:]):
        for t in (F(1, 3), F(1, 2), F(5, 7)):
            x = lo + (hi - lo) * t
            assert bc(x) == b(c(x))


@given(connectives(), connectives(), connectives())
def test_compose_is_associative(a, b, c):
    left = compose_connectives(compose_connectives(a, b), c)
    right = compose_connectives(a, compose_connectives(b, c))
    assert left == right
    assert compose_all([a, b, c]) == left
