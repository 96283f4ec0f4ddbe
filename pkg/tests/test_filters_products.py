from fractions import Fraction as F
from itertools import product as cartesian

import pytest
from hypothesis import given, strategies as st

from contlogic.classes import fo_to_cont
from contlogic.downup import Grid
from contlogic.filters import (
    Filter, FilterError, all_filters, filter_from_subbasis, full_filter, limit_along, limsup,
    limsup_by_definition, parse_filter, principal_ultrafilter, ultrafilters_extending,
)
from contlogic.fo import FOStructure, fo_as_general, holds
from contlogic.grammar import parse_fo_formula
from contlogic.harness.generators import (
    InstanceSpec, gen_family, gen_filter, gen_formula, gen_structure, gen_vocabulary, rng_for, trial_seed,
)
from contlogic.products import (
    ProductTooLarge, direct_product, fo_reduced_product, pre_reduced_product, product_index, reduced_product,
)
from contlogic.structures import eval_formula, isomorphic, reduce_structure, vocabulary_part
from contlogic.syntax import parse_vocabulary

from conftest import structure


def test_subbasis_examples():
    assert filter_from_subbasis([1, 2, 3], [{1, 2}, {2, 3}]).kernel == {2}
    assert filter_from_subbasis([1, 2], []).kernel == {1, 2}
    with pytest.raises(FilterError):
        filter_from_subbasis([1, 2], [{1}, {2}])


def test_filter_membership_is_upward_closed():
    f = Filter((1, 2, 3), frozenset({1, 3}))
    assert {1, 3} in f and {1, 2, 3} in f
    assert {1} not in f and set() not in f
    assert sorted(map(sorted, f.members())) == [[1, 2, 3], [1, 3]]


def test_improper_filters_rejected():
    with pytest.raises(FilterError):
        Filter((1, 2), frozenset())
    with pytest.raises(FilterError):
        Filter((1, 2), frozenset({3}))


def test_limsup_examples():
    assert limsup(full_filter([1, 2]), [F(1, 4), F(1, 2)]) == F(1, 2)
    k2 = Filter((1, 2), frozenset({2}))
    assert limsup(k2, [F(3, 4), F(1, 2)], check=True) == F(1, 2)
    assert limsup_by_definition(k2, [F(3, 4), F(1, 2)]) == F(1, 2)
    assert limsup(principal_ultrafilter([1, 2], 1), [F(3, 4), F(1, 2)]) == F(3, 4)


def test_ultrafilters_extending_examples():
    f = Filter((1, 2, 3), frozenset({1, 3}))
    assert [u.kernel for u in ultrafilters_extending(f)] == [{1}, {3}]
    assert len(ultrafilters_extending(full_filter([1, 2, 3]))) == 3
    u = principal_ultrafilter([1, 2], 2)
    assert ultrafilters_extending(u) == [u]
    # an ultrafilter extends f exactly when it contains every member of f
    for g in all_filters([1, 2, 3]):
        for i in (1, 2, 3):
            u = principal_ultrafilter([1, 2, 3], i)
            contains = all(J in u for J in g.members())
            assert contains == (u in ultrafilters_extending(g))


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.integers(1, n), min_size=1),
    st.lists(st.fractions(0, 1, max_denominator=16), min_size=n, max_size=n))))
def test_limsup_identity_property(args):
    n, kernel, g = args
    f = Filter(tuple(range(1, n + 1)), frozenset(kernel))
    via_ultra = max(limit_along(u, g) for u in ultrafilters_extending(f))
    assert via_ultra == limsup_by_definition(f, g) == limsup(f, g, check=True)


def test_parse_filter_forms():
    assert parse_filter("full", [1, 2]).kernel == {1, 2}
    assert parse_filter("kernel=1,3", [1, 2, 3]).kernel == {1, 3}
    assert parse_filter("subbasis='{1,2};{2,3}'", [1, 2, 3]).kernel == {2}
    with pytest.raises(FilterError):
        parse_filter("nonsense", [1])


# ----------------------------------------------------------------- products


def test_pre_reduced_product_atomic_value_is_limsup():
    m1 = structure("P/0", 1, {"P": F(1, 4)})
    m2 = structure("P/0", 1, {"P": F(3, 4)})
    p = pre_reduced_product([m1, m2], full_filter([1, 2]))
    assert p.preds["P"][()] == F(3, 4)


def test_atomic_values_follow_limsup_coordinatewise():
    spec = InstanceSpec(n_preds=2, n_funcs=1, n_consts=1)
    for n in range(60):
        rng = rng_for(trial_seed(10, "atomic", n))
        v = gen_vocabulary(rng, spec)
        fam = gen_family(rng, v, spec)
        f = gen_filter(rng, len(fam))
        pre = pre_reduced_product(fam, f)
        red, q = reduce_structure(pre)
        for p, arity in v.predicates:
            for coords in cartesian(*(cartesian(*(range(m.size) for m in fam)) for _ in range(arity))):
                t = tuple(product_index(fam, c) for c in coords)
                expect = limsup(f, [m.preds[p][tuple(c[i] for c in coords)] for i, m in enumerate(fam)])
                assert pre.preds[p][t] == expect
                assert red.preds[p][tuple(q(a) for a in t)] == expect


def test_identical_factors_under_ultrafilter():
    m = structure("P/1,func:F/1", 2, {"P": [F(1, 8), 1]}, {"F": [1, 0]})
    u = principal_ultrafilter([1, 2, 3], 2)
    prod, _ = reduced_product([m, m, m], u)
    assert isomorphic(prod, m)


def test_principal_collapse_and_single_factor():
    spec = InstanceSpec(n_preds=2, n_funcs=1, n_consts=1)
    for n in range(100):
        rng = rng_for(trial_seed(11, "collapse", n))
        v = gen_vocabulary(rng, spec)
        fam = gen_family(rng, v, spec)
        i = rng.randrange(len(fam))
        prod, _ = reduced_product(fam, principal_ultrafilter(range(1, len(fam) + 1), i + 1))
        assert isomorphic(prod, reduce_structure(fam[i])[0])
        single, _ = reduced_product(fam[:1], full_filter([1]))
        assert isomorphic(single, fam[0])


def test_kernel_locality():
    spec = InstanceSpec(n_preds=2, n_funcs=1, n_consts=1)
    for n in range(100):
        rng = rng_for(trial_seed(12, "locality", n))
        v = gen_vocabulary(rng, spec)
        fam = gen_family(rng, v, spec)
        f = gen_filter(rng, len(fam))
        prod, _ = reduced_product(fam, f)
        kept = [m for i, m in zip(f.index, fam) if i in f.kernel]
        assert isomorphic(prod, direct_product(kept))


def test_parts_commute_with_products():
    spec = InstanceSpec(n_preds=3, n_funcs=1, n_consts=1)
    for n in range(60):
        rng = rng_for(trial_seed(13, "parts", n))
        v = gen_vocabulary(rng, spec)
        fam = gen_family(rng, v, spec)
        f = gen_filter(rng, len(fam))
        v0 = type(v)(tuple(rng.sample(list(v.predicates), 1)), v.functions, v.constants)
        whole, _ = reduced_product(fam, f)
        parts, _ = reduced_product([vocabulary_part(m, v0) for m in fam], f)
        assert isomorphic(vocabulary_part(whole, v0), parts)


def test_size_cap():
    m = structure("P/0", 3, {"P": 0})
    with pytest.raises(ProductTooLarge):
        pre_reduced_product([m, m, m], full_filter([1, 2, 3]), max_size=26)


# ------------------------------------------------------- first-order products


def _fo(vocab_text, size, preds):
    v = parse_vocabulary(vocab_text)
    return FOStructure(v, size, preds, {}, {})


def test_fo_direct_product_atomic():
    k1 = _fo("P/0,Q/0", 1, {"P": {(): True}, "Q": {(): True}})
    k2 = _fo("P/0,Q/0", 1, {"P": {(): True}, "Q": {(): False}})
    prod = fo_reduced_product([k1, k2], full_filter([1, 2]))
    assert prod.preds["P"][()] is True and prod.preds["Q"][()] is False


def test_fo_product_does_not_preserve_disjunction():
    k1 = _fo("P/0,Q/0", 1, {"P": {(): True}, "Q": {(): False}})
    k2 = _fo("P/0,Q/0", 1, {"P": {(): False}, "Q": {(): True}})
    theta = parse_fo_formula("P | Q", k1.vocab)
    assert holds(k1, theta) and holds(k2, theta)
    assert not holds(fo_reduced_product([k1, k2], full_filter([1, 2])), theta)


def test_fo_product_quotients_by_agreement():
    k = FOStructure(parse_vocabulary("P/1"), 2, {"P": {(0,): True, (1,): False}}, {}, {})
    f = Filter((1, 2), frozenset({1}))
    prod = fo_reduced_product([k, k], f)
    assert prod.size == 2  # the second coordinate is ignored


def test_theta_holds_iff_translation_is_zero():
    spec = InstanceSpec(n_preds=3)
    for n in range(300):
        rng = rng_for(trial_seed(14, "fidelity", n))
        v = gen_vocabulary(rng, spec)
        theta = gen_formula(rng, v, spec, "fo")
        m = gen_structure(rng, v, rng.randint(1, 3), Grid(1))
        bools = {p: {t: x == 0 for t, x in tab.items()} for p, tab in m.preds.items()}
        k = FOStructure(v, m.size, bools, {}, {})
        assert holds(k, theta) == (eval_formula(fo_as_general(k), fo_to_cont(theta)) == 0)


def test_fo_products_agree_with_general_products_on_boolean_values():
    spec = InstanceSpec(n_preds=2)
    for n in range(60):
        rng = rng_for(trial_seed(15, "bool-products", n))
        v = gen_vocabulary(rng, spec)
        fam = [gen_structure(rng, v, rng.randint(1, 3), Grid(1)) for _ in range(rng.randint(1, 3))]
        ks = [FOStructure(v, m.size, {p: {t: x == 0 for t, x in tab.items()} for p, tab in m.preds.items()}, {}, {})
              for m in fam]
        f = gen_filter(rng, len(ks))
        theta = gen_formula(rng, v, spec, "fo")
        classical = holds(fo_reduced_product(ks, f), theta)
        general, _ = reduced_product([fo_as_general(k) for k in ks], f)
        assert classical == (eval_formula(general, fo_to_cont(theta)) == 0)
