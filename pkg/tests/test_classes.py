from fractions import Fraction as F

import pytest

from contlogic.classes import (
    ClassError, approx_restricted, approximation_error, classify_cont, classify_horn, eval_template,
    fo_to_cont, is_conditional, match_primitive, push_unary,
)
from contlogic.connectives import MonotoneConnective, compose_connectives, identity, minus_const
from contlogic.downup import Grid
from contlogic.grammar import parse_cont_formula, parse_fo_formula, parse_with_vocabulary, render_formula
from contlogic.harness.generators import (
    InstanceSpec, gen_connective, gen_formula, gen_structure, gen_vocabulary, rng_for, trial_seed,
)
from contlogic.structures import eval_formula
from contlogic.structures import GeneralStructure
from contlogic.syntax import Apply, Atomic, Const, Vocabulary, subformulas

from conftest import grid

C = MonotoneConnective.from_pairs


def cont(text):
    return parse_with_vocabulary(text, "cont")[0]


def fo(text):
    return parse_with_vocabulary(text, "fo")[0]


def test_constant_offset_of_atomic_is_primitive():
    r = classify_cont(cont("P -. 1/2"))
    assert r.primitive_conditional and r.conditional and r.restricted


def test_closure_under_sup_and_max():
    r = classify_cont(cont("sup x . max( (P(x) -. 1/2), C[(0,0),(1,1)](1 -. Q(x)) )"))
    assert r.conditional and not r.primitive_conditional


def test_truncated_addition_is_restricted_but_not_conditional():
    r = classify_cont(cont("P +. Q"))
    assert r.restricted and not r.conditional
    assert r.violations["conditional"] == "$"


def test_min_of_primitives_merges_into_one_primitive():
    assert classify_cont(cont("min(P -. 1/2, min(1 -. Q, half(1 -. R)))")).primitive_conditional
    # two positive atoms never fit the pattern
    r = classify_cont(cont("min(P, Q)"))
    assert not r.conditional


def test_all_negated_variant_accepted():
    assert classify_cont(cont("min(1 -. P, 1 -. Q)")).primitive_conditional


def test_metric_axiom_shape_is_not_special_cased():
    f = cont("(1/2 -. D(x, y)) -. (1/2 -. D(y, x))")
    assert not classify_cont(f).primitive_conditional


def test_violation_paths_point_at_offending_subformula():
    r = classify_cont(cont("sup x . max(P(x), Q(x) +. R(x))"))
    assert not r.conditional
    assert r.violations["conditional"].startswith("$.body")
    assert r.to_dict()["flags"]["conditional"] is False


def test_monotone_classes():
    r = classify_cont(cont("inf x . min(P(x), 1 -. Q(x))"))
    assert r.existential and not r.universal and not r.positive
    r = classify_cont(cont("sup x . inf y . max(P(x), half(Q(y)))"))
    assert r.positive and not r.existential and not r.universal
    r = classify_cont(cont("sup x . (1 -. P(x))"))
    assert r.universal and not r.existential


# -------------------------------------------------------------------- Horn


def test_horn_examples():
    assert classify_horn(fo("~P(x) | Q(x)")).basic_horn
    assert not classify_horn(fo("P | Q")).horn
    assert classify_horn(fo("forall x . (P(x) & (~Q(x) | R(x)))")).horn
    assert not classify_horn(fo("~(P & Q)")).horn


def test_translation_examples():
    assert render_formula(fo_to_cont(fo("P | Q | ~(P | Q)"))) == "min(P, Q, 1 -. min(P, Q))"
    t = fo_to_cont(fo("~P(x) | Q(x)"))
    assert render_formula(t) == "min(1 -. P(x), Q(x))"
    assert classify_cont(t).primitive_conditional
    assert render_formula(fo_to_cont(fo("forall x . P(x)"))) == "sup x . P(x)"
    assert render_formula(fo_to_cont(fo("exists x . P(x) & Q(x)"))) == "inf x . max(P(x), Q(x))"


def test_translation_rejects_equality():
    with pytest.raises(ClassError):
        fo_to_cont(fo("forall x . F(x) = x"))


def test_horn_implies_conditional():
    spec = InstanceSpec(n_preds=3, n_consts=1)
    for n in range(500):
        rng = rng_for(trial_seed(20, "horn", n))
        v = gen_vocabulary(rng, spec)
        theta = gen_formula(rng, v, spec, "horn")
        assert classify_horn(theta).horn
        assert classify_cont(fo_to_cont(theta)).conditional


# ------------------------------------------------------------------- push


def test_push_identity_returns_formula():
    f = cont("sup x . max(P(x) -. 1/2, 1 -. Q(x))")
    assert push_unary(identity(), f) == f


def _nullary(name, x):
    return GeneralStructure(Vocabulary(((name, 0),)), 1, {name: {(): x}}, {}, {})


def test_push_composes_into_leaf():
    f = cont("P -. 1/2")
    g = push_unary(minus_const(F(1, 4)), f)
    assert classify_cont(g).primitive_conditional
    assert g == Apply(compose_connectives(minus_const(F(1, 4)), minus_const(F(1, 2))), Atomic("P"))
    target = cont("P -. 3/4")
    for x in grid(16):
        assert eval_formula(_nullary("P", x), g) == eval_formula(_nullary("P", x), target)


def test_push_rejects_non_conditional():
    with pytest.raises(ClassError):
        push_unary(minus_const(F(1, 4)), cont("P +. Q"))


def test_push_value_equality_on_seeded_instances():
    spec = InstanceSpec(n_preds=2, n_funcs=1, n_consts=1)
    for n in range(500):
        rng = rng_for(trial_seed(21, "push", n))
        v = gen_vocabulary(rng, spec)
        f = gen_formula(rng, v, spec, "conditional")
        b = gen_connective(rng, Grid(3))
        m = gen_structure(rng, v, rng.randint(1, 3), Grid(3))
        g = push_unary(b, f)
        assert is_conditional(g)
        assert eval_formula(m, g) == b(eval_formula(m, f))


# ------------------------------------------------------------ approximation


def test_exact_templates():
    assert render_formula(approx_restricted(identity(), F(1, 8))) == "u"
    t = approx_restricted(minus_const(F(1, 4)), F(1, 8))
    assert render_formula(t) == "u -. 1/4"
    assert approximation_error(t, minus_const(F(1, 4))) == 0


def test_steep_connective_within_tolerance_on_64_grid():
    c = C([(0, 0), (F(1, 2), 1), (1, 1)])
    t = approx_restricted(c, F(1, 8))
    assert classify_cont(t).restricted
    # oracle: ordinary formula evaluation with u interpreted as a 0-ary predicate
    worst = max(abs(eval_formula(_nullary("u", x), t) - c(x)) for x in grid(64))
    assert worst <= F(1, 8)
    assert approximation_error(t, c, grid_denominator=64) == worst
    assert approximation_error(t, c) <= F(1, 8)


def _construction_denominator(t):
    return max((g.value.denominator for g in subformulas(t) if isinstance(g, Const)), default=1)


def test_approximation_on_seeded_connectives():
    for n in range(60):
        rng = rng_for(trial_seed(22, "approx", n))
        c = gen_connective(rng, Grid(rng.choice([2, 3, 4])))
        eps = rng.choice([F(1, 4), F(1, 8), F(1, 16)])
        t = approx_restricted(c, eps)
        assert classify_cont(t).restricted
        assert approximation_error(t, c) <= eps
        den = 8 * _construction_denominator(t)
        assert approximation_error(t, c, grid_denominator=den) <= eps


def test_template_evaluator_matches_formula_evaluation():
    for n in range(20):
        rng = rng_for(trial_seed(23, "template", n))
        c = gen_connective(rng, Grid(2))
        t = approx_restricted(c, F(1, 4))
        for x in grid(16):
            assert eval_template(t, x) == eval_formula(_nullary("u", x), t)


def test_approximation_rejects_nonpositive_eps():
    with pytest.raises(ClassError):
        approx_restricted(identity(), 0)


def test_primitive_matcher_returns_leaves():
    leaves, bad = match_primitive(cont("min(C[(0,0),(1,1/2)](P), 1 -. Q)"))
    assert bad is None and [l.negated for l in leaves] == [False, True]
