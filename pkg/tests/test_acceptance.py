"""Acceptance criteria, one test each, with their runtime limits.

Each test records a PASS/FAIL line that the terminal summary prints (see
conftest.py); the assertions below decide the outcome.
"""

import itertools
import time
from fractions import Fraction as F

from contlogic.classes import fo_to_cont
from contlogic.connectives import eval_connective
from contlogic.downup import Grid
from contlogic.filters import all_filters
from contlogic.grammar import parse_fo_formula
from contlogic.harness.generators import (
    InstanceSpec, gen_connective, gen_formula, gen_vocabulary, rng_for, trial_seed,
)
from contlogic.harness.preservation import VIOLATED, check_preservation, search_counterexample
from contlogic.harness.suites import (
    EXAMPLE_SENTENCE, example_structures, lemma_connectives, lemma_instance_holds, run_suite,
)
from contlogic.products import reduced_product
from contlogic.structures import eval_formula
from contlogic.syntax import Vocabulary


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def _record(log, n, ok, detail):
    log[n] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")


def _suite(log, n, name, limit, expect_trials, **overrides):
    with Timer() as t:
        status, report = run_suite(name, overrides or None, timestamp="fixed")
    c = report["counts"]
    ok = status == 0 and c["failed"] == 0 and c["trials"] == expect_trials and t.seconds < limit
    _record(log, n, ok, f"{c['passed']}/{c['trials']} trials passed in {t.seconds:.1f}s (limit {limit}s)")
    assert status == 0, report["first_violation"]
    assert c["trials"] == expect_trials
    assert t.seconds < limit
    return report


def test_criterion_01_example_reproduction(acceptance_log):
    theta_c = fo_to_cont(parse_fo_formula(EXAMPLE_SENTENCE, Vocabulary((("P", 0), ("Q", 0)), (), ())))
    seen = []
    with Timer() as t:
        for r in (F(1, 4), F(1, 2)):
            fam, f = example_structures(r)
            assert f.kernel == frozenset(f.index) == {1, 2}
            factors = [eval_formula(m, theta_c) for m in fam]
            prod, _ = reduced_product(fam, f)
            pv = eval_formula(prod, theta_c)
            rec = check_preservation(fam, f, theta_c, 0)
            seen.append((r, factors, pv, rec.verdict))
    ok = all(fs == [0, 0] and pv == r and v == VIOLATED for r, fs, pv, v in seen) and t.seconds < 1
    _record(acceptance_log, 1, ok, ", ".join(f"r={r}: factors {fs[0]},{fs[1]} product {pv}" for r, fs, pv, _ in seen)
            + f" in {t.seconds:.2f}s")
    for r, fs, pv, v in seen:
        assert fs == [0, 0]
        assert pv == r
        assert v == VIOLATED
    assert t.seconds < 1


def test_criterion_02_conditional_preservation(acceptance_log):
    report = _suite(acceptance_log, 2, "conditional-preservation", 120, 1000)
    spec = report["spec"]
    assert spec["grid_k"] == 3 and spec["index_size"][1] <= 3 and spec["universe"][1] <= 3
    assert spec["formula_class"] == "conditional"


def test_criterion_03_limsup_identity(acceptance_log):
    # filters on an n-set correspond to nonempty kernels: 2^n - 1 of them
    expected = sum(2 ** n - 1 for n in range(1, 6)) * 200
    report = _suite(acceptance_log, 3, "limsup-identity", 30, expected)
    assert report["spec"]["index_size"][1] == 5


def test_criterion_04_los(acceptance_log):
    report = _suite(acceptance_log, 4, "los", 60, 500)
    assert report["spec"]["filter"] == "ultra"


def test_criterion_05_leibniz_oracle(acceptance_log):
    report = _suite(acceptance_log, 5, "leibniz-oracle", 60, 200)
    spec = report["spec"]
    assert spec["universe"][1] <= 4 and spec["n_funcs"] <= 2 and spec["max_func_arity"] == 1
    assert any(t["size"] == 4 for t in report["trials"])


def test_criterion_06_downup_round_trip(acceptance_log):
    _suite(acceptance_log, 6, "downup-roundtrip", 30, 200)


def test_criterion_07_product_commutation(acceptance_log):
    report = _suite(acceptance_log, 7, "product-commutation", 60, 100)
    assert report["spec"]["index_size"][1] <= 3
    assert all(t["commutes"] for t in report["trials"])


def _lemma_brute_force(den, max_index, max_conn):
    """Every instance over a small grid, checked one by one."""
    g = Grid(den.bit_length() - 1)
    conns = [c for _, c in lemma_connectives(g)]
    failures = 0
    for size in range(1, max_index + 1):
        for f in all_filters(range(1, size + 1)):
            for n_conn in range(1, max_conn + 1):
                for combo in itertools.product(conns, repeat=n_conn):
                    for ys in itertools.product(itertools.product(g.values, repeat=size), repeat=n_conn):
                        failures += not lemma_instance_holds(list(combo), [list(y) for y in ys], f)
    return failures


def test_criterion_08_basic_lemma(acceptance_log):
    with Timer() as t:
        status, report = run_suite("basic-lemma", timestamp="fixed")
        # the representative family covers every zero pattern a nondecreasing connective can have
        g = Grid(3)
        masks = {m for m, _ in lemma_connectives(g)}
        for n in range(500):
            c = gen_connective(rng_for(trial_seed(0, "lemma-masks", n)), g)
            assert tuple(eval_connective(c, v) == 0 for v in g.values) in masks
        brute = _lemma_brute_force(4, 2, 2)
    c = report["counts"]
    ok = (status == 0 and c["exhaustive_failures"] == 0 and c["exhaustive_cases"] > 0 and brute == 0
          and t.seconds < 120)
    _record(acceptance_log, 8, ok, f"{c['exhaustive_cases']} exhaustive cases on the 1/8 grid and "
            f"{c['trials']} random instances; {brute} failures by direct enumeration on the 1/4 grid; "
            f"{t.seconds:.1f}s (limit 120s)")
    assert report["spec"]["grid_k"] == 3 and report["spec"]["index_size"][1] == 3
    assert c["exhaustive_failures"] == 0 and c["failed"] == 0
    assert brute == 0
    assert t.seconds < 120


def test_criterion_09_morphism_monotonicity(acceptance_log):
    report = _suite(acceptance_log, 9, "morphism-monotonicity", 120, 500)
    per_case = {}
    for t in report["trials"]:
        for label, case in t["cases"].items():
            per_case[label] = per_case.get(label, 0) + case["ok"]
    assert per_case == {
        "embedding-existential": 500, "embedding-quantifier-free": 500,
        "embedding-universal": 500, "homomorphism-positive": 500,
    }


def test_criterion_10_horn_conditional(acceptance_log):
    _suite(acceptance_log, 10, "horn-conditional", 10, 500)


def test_criterion_11_counterexample_search(acceptance_log):
    theta_c = fo_to_cont(parse_fo_formula(EXAMPLE_SENTENCE, Vocabulary((("P", 0), ("Q", 0)), (), ())))
    budget = InstanceSpec(n_preds=2, max_pred_arity=0, trials=1000)
    spec = InstanceSpec()
    with Timer() as t:
        witness = search_counterexample(theta_c, budget)
        clean = 0
        for n in range(50):
            rng = rng_for(trial_seed(0, "acceptance-conditional", n))
            phi = gen_formula(rng, gen_vocabulary(rng, spec), spec, "conditional")
            clean += search_counterexample(phi, spec.with_overrides(seed=n, trials=1000)) is None
    ok = witness is not None and clean == 50 and t.seconds < 120
    found = f"witness at trial {witness.trial}" if witness else "no witness"
    _record(acceptance_log, 11, ok, f"example sentence: {found}; conditional sentences without witness: "
            f"{clean}/50, {t.seconds:.1f}s")
    assert witness is not None and witness.record.verdict == VIOLATED
    assert clean == 50
    assert t.seconds < 120
