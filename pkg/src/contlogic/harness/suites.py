"""Named invariant suites with deterministic JSON reports.

Each suite is a loop over independent trials. A trial is a function of the
suite's :class:`InstanceSpec` and a single integer seed, so the seed recorded
in the report replays it exactly (see :func:`replay_trial`).
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import asdict
from fractions import Fraction
from typing import Callable

import numpy as np

from ..classes import classify_cont, classify_horn, fo_to_cont
from ..connectives import constant, eval_connective, minus_const
from ..downup import Grid, is_increasing, structure_down, structure_up
from ..filters import (
    Filter, all_filters, limit_along, limsup, limsup_by_definition, principal_ultrafilter,
    ultrafilters_extending,
)
from ..fo import FOStructure
from ..grammar import parse_fo_formula, render_fo, render_formula
from ..products import fo_reduced_product, product_index, reduced_product
from ..structures import (
    GeneralStructure, eval_formula, isomorphic, leibniz_partition, leibniz_partition_bruteforce,
    reduce_structure,
)
from ..syntax import Vocabulary
from ..values import ONE, ZERO, fmt
from .generators import (
    InstanceSpec, gen_connective, gen_embedding, gen_family, gen_filter, gen_formula,
    gen_homomorphism, gen_increasing_fo, gen_structure, gen_vocabulary, rng_for, trial_seed,
)
from .preservation import VIOLATED, check_all_epsilons, check_limsup_bound

EXIT_PASS, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UnknownSuite(KeyError):
    pass


def _vocab_for(rng, spec: InstanceSpec, min_preds: int = 1) -> Vocabulary:
    """Random symbol counts up to the InstanceSpec's; at least ``min_preds`` predicates."""
    s = spec.with_overrides(
        n_preds=rng.randint(min(min_preds, spec.n_preds), spec.n_preds),
        n_funcs=rng.randint(0, spec.n_funcs),
        n_consts=rng.randint(0, spec.n_consts),
    )
    return gen_vocabulary(rng, s)


def _assignment(rng, free, size):
    return {v: rng.randrange(size) for v in free}


# --------------------------------------------------------------------- trials


def trial_los(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec)
    free = ("x", "y")[: rng.randint(0, 2)]
    phi = gen_formula(rng, vocab, spec, "any", free)
    fam = gen_family(rng, vocab, spec)
    index = tuple(range(1, len(fam) + 1))
    point = rng.choice(index)
    d = principal_ultrafilter(index, point)
    prod, q = reduced_product(fam, d, spec.max_product_size)
    coords = {v: tuple(rng.randrange(m.size) for m in fam) for v in free}
    env_prod = {v: q(product_index(fam, c)) for v, c in coords.items()}
    pos = d.position(point)
    env_factor = {v: c[pos] for v, c in coords.items()}
    lhs = eval_formula(prod, phi, env_prod)
    rhs = eval_formula(fam[pos], phi, env_factor)
    return {"ok": lhs == rhs, "product_value": fmt(lhs), "factor_value": fmt(rhs), "point": point,
            "formula": render_formula(phi)}


def trial_leibniz(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec)
    g = Grid(rng.choice([1, spec.grid_k]))
    m = gen_structure(rng, vocab, rng.randint(*spec.universe), g)
    fast = leibniz_partition(m)
    slow = leibniz_partition_bruteforce(m, term_depth=3)
    return {"ok": fast == slow, "size": m.size, "blocks": fast, "oracle_blocks": slow}


def trial_conditional(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec)
    phi = gen_formula(rng, vocab, spec, "conditional")
    fam = gen_family(rng, vocab, spec)
    f = gen_filter(rng, len(fam), spec.filter)
    rec = check_all_epsilons(fam, f, phi, spec.grid, seed, spec.max_product_size)
    bound = check_limsup_bound(fam, f, phi, spec.max_product_size)
    out = rec.to_dict()
    out.update(ok=rec.verdict != VIOLATED and bool(bound), limsup_bound=fmt(bound.bound),
               formula=render_formula(phi))
    return out


def trial_downup(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec, min_preds=0)
    m, _ = reduce_structure(gen_structure(rng, vocab, rng.randint(*spec.universe), spec.grid))
    k = structure_down(m, spec.grid)
    inc = is_increasing(k)
    back = structure_up(k, spec.grid)
    return {"ok": bool(inc) and isomorphic(back, m), "size": m.size, "increasing": bool(inc)}


def trial_commutation(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec, min_preds=0)
    g = spec.grid
    n = rng.randint(*spec.index_size)
    ks = [gen_increasing_fo(rng, vocab, rng.randint(*spec.universe), g) for _ in range(n)]
    f = gen_filter(rng, n, spec.filter)
    lhs, _ = reduced_product([structure_up(k, g) for k in ks], f, spec.max_product_size)
    rhs = structure_up(fo_reduced_product(ks, f, spec.max_product_size), g)
    # the corollary: reduced products of grid-valued reduced structures survive the round trip
    ms = [reduce_structure(m)[0] for m in gen_family(rng, vocab, spec, n)]
    direct, _ = reduced_product(ms, f, spec.max_product_size)
    via = structure_up(fo_reduced_product([structure_down(m, g) for m in ms], f, spec.max_product_size), g)
    ok1, ok2 = isomorphic(lhs, rhs), isomorphic(direct, via)
    return {"ok": ok1 and ok2, "kernel": sorted(f.kernel), "index_size": n,
            "commutes": ok1, "round_trip_product": ok2}


_MORPHISM_CASES = (
    # (label, morphism, formula class, relation that must hold between phi^M(a) and phi^N(h a))
    ("embedding-existential", "embedding", "existential", ">="),
    ("embedding-quantifier-free", "embedding", "quantifier-free", "=="),
    ("embedding-universal", "embedding", "universal", "<="),
    ("homomorphism-positive", "homomorphism", "positive", ">="),
)


def _morphism_case(spec: InstanceSpec, seed: int, case) -> dict:
    label, kind, cls, rel = case
    rng = rng_for(trial_seed(seed, label, 0))
    vocab = _vocab_for(rng, spec)
    m, n, h = (gen_embedding if kind == "embedding" else gen_homomorphism)(rng, vocab, spec)
    # a quantifier-free formula needs a variable when no constant or 0-ary predicate exists
    free = ("x", "y")[: rng.randint(1 if cls == "quantifier-free" else 0, 2)]
    phi = gen_formula(rng, vocab, spec, cls, free)
    a = _assignment(rng, free, m.size)
    lhs = eval_formula(m, phi, a)
    rhs = eval_formula(n, phi, {v: h[x] for v, x in a.items()})
    ok = {">=": lhs >= rhs, "<=": lhs <= rhs, "==": lhs == rhs}[rel]
    return {"ok": ok, "source_value": fmt(lhs), "target_value": fmt(rhs), "formula": render_formula(phi)}


def trial_morphism(spec: InstanceSpec, seed: int) -> dict:
    """All four morphism cases, each from its own stream derived from ``seed``."""
    cases = {case[0]: _morphism_case(spec, seed, case) for case in _MORPHISM_CASES}
    return {"ok": all(c["ok"] for c in cases.values()), "cases": cases}


def trial_horn(spec: InstanceSpec, seed: int) -> dict:
    rng = rng_for(seed)
    vocab = _vocab_for(rng, spec)
    theta = gen_formula(rng, vocab, spec, "horn")
    horn = classify_horn(theta).horn
    cond = classify_cont(fo_to_cont(theta)).conditional
    return {"ok": bool(horn and cond), "formula": render_fo(theta)}


# ------------------------------------------------------------ seeded suites


_TRIAL_SUITES: dict[str, tuple[Callable[[InstanceSpec, int], dict], dict]] = {
    "los": (trial_los, dict(trials=500, filter="ultra", formula_class="any", n_funcs=1, n_consts=1)),
    "leibniz-oracle": (trial_leibniz, dict(trials=200, universe=(1, 4), n_preds=2, n_funcs=2, n_consts=1,
                                           max_func_arity=1, index_size=(1, 1))),
    "conditional-preservation": (trial_conditional, dict(trials=1000)),
    "downup-roundtrip": (trial_downup, dict(trials=200, n_preds=3, n_funcs=1, n_consts=1)),
    "product-commutation": (trial_commutation, dict(trials=100, n_preds=2, n_funcs=1, n_consts=1)),
    "morphism-monotonicity": (trial_morphism, dict(trials=500, n_funcs=1, n_consts=1)),
    "horn-conditional": (trial_horn, dict(trials=500, n_preds=3, n_consts=1)),
}


def suite_spec(name: str, overrides: dict | None = None) -> InstanceSpec:
    base = dict(_TRIAL_SUITES[name][1]) if name in _TRIAL_SUITES else dict(_OTHER_DEFAULTS.get(name, {}))
    base.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return InstanceSpec(**base)


def replay_trial(name: str, seed: int, overrides: dict | None = None) -> dict:
    """Re-run one recorded trial of a seeded suite from its seed."""
    if name not in _TRIAL_SUITES:
        raise UnknownSuite(name)
    return _TRIAL_SUITES[name][0](suite_spec(name, overrides), seed)


def _run_trials(name: str, spec: InstanceSpec) -> dict:
    fn = _TRIAL_SUITES[name][0]
    trials, failures = [], 0
    for n in range(spec.trials):
        seed = trial_seed(spec.seed, name, n)
        rec = fn(spec, seed)
        failures += not rec["ok"]
        trials.append({"trial": n, "seed": seed, **rec})
    return {"counts": {"trials": len(trials), "passed": len(trials) - failures, "failed": failures},
            "trials": trials}


# ------------------------------------------------------------- other suites


def _suite_limsup(spec: InstanceSpec) -> dict:
    """Every filter on every index set of size <= the InstanceSpec's bound, seeded sequences."""
    trials, failures = [], 0
    g = spec.grid
    for size in range(1, spec.index_size[1] + 1):
        index = tuple(range(1, size + 1))
        for f in all_filters(index):
            for n in range(spec.trials):
                seed = trial_seed(spec.seed, f"limsup-identity:{size}:{f}", n)
                rng = rng_for(seed)
                seq = [rng.choice(g.values) for _ in index]
                via_ultra = max(limit_along(u, seq) for u in ultrafilters_extending(f))
                by_def = limsup_by_definition(f, seq)
                ok = via_ultra == by_def == limsup(f, seq)
                failures += not ok
                trials.append({"index_size": size, "kernel": sorted(f.kernel), "trial": n, "seed": seed,
                               "ok": ok, "value": fmt(by_def)})
    return {"counts": {"trials": len(trials), "passed": len(trials) - failures, "failed": failures},
            "trials": trials}


def lemma_connectives(g: Grid):
    """A family of connectives realizing every zero set on the grid.

    A nondecreasing connective vanishes on an initial segment, so on the grid
    only the number of grid values it sends to 0 matters; the family has one
    connective per possible count.
    """
    fam = [constant(Fraction(1, 2 ** g.k))] + [minus_const(t) for t in g.points] + [constant(ZERO)]
    masks = {}
    for c in fam:
        mask = tuple(eval_connective(c, v) == 0 for v in g.values)
        masks.setdefault(mask, c)
    return list(masks.items())


def _achievable_maxima(ok: np.ndarray, steps: int) -> np.ndarray:
    """Componentwise maxima of ``steps`` vectors drawn from the boolean set ``ok``.

    Counts pairs with max <= w by products of prefix sums, then recovers the
    pairs with max exactly w by finite differences along each axis.
    """
    def prefix(a):
        out = a.astype(np.int64)
        for ax in range(out.ndim):
            out = np.cumsum(out, axis=ax)
        return out

    def exact(cum):
        out = cum
        for ax in range(out.ndim):
            out = np.diff(out, axis=ax, prepend=0)
        return out

    cur = ok.copy()
    n_ok = prefix(ok)
    for _ in range(steps - 1):
        cur = exact(prefix(cur) * n_ok) > 0
    return cur


def _lemma_exhaustive(g: Grid, max_index: int, max_conn: int):
    """Check the lemma for every filter over |I| <= max_index and every choice of
    up to ``max_conn`` connectives from :func:`lemma_connectives`.

    Both the hypothesis and the conclusion only see coordinates in the kernel,
    so each filter reduces to its kernel size.
    """
    import itertools

    conns = lemma_connectives(g)
    top = len(g.values) - 1
    checked = failures = 0
    first = None
    for n_conn in range(1, max_conn + 1):
        for combo in itertools.product(range(len(conns)), repeat=n_conn):
            masks = [np.array(conns[c][0]) for c in combo]
            axes = np.indices((len(g.values),) * n_conn)
            # term k is zero at coordinate value index v: C_0(y) for k = 0, C_k(1 - y) otherwise
            zero_terms = [masks[0][axes[0]]] + [masks[k][top - axes[k]] for k in range(1, n_conn)]
            hyp = np.logical_or.reduce(zero_terms)
            concl = hyp  # the conclusion is the same test applied to the vector of limsups
            for kernel_size in range(1, max_index + 1):
                reach = _achievable_maxima(hyp, kernel_size)
                bad = reach & ~concl
                filters = sum(
                    1 for size in range(kernel_size, max_index + 1) for f in all_filters(range(size))
                    if len(f.kernel) == kernel_size
                )
                checked += filters
                if bad.any():
                    failures += filters
                    if first is None:
                        w = [g.values[i] for i in np.argwhere(bad)[0]]
                        first = {"connectives": [str(conns[c][1]) for c in combo],
                                 "limsups": [fmt(v) for v in w], "kernel_size": kernel_size}
    return checked, failures, first


def lemma_instance_holds(conns, ys, f: Filter) -> bool:
    """Direct check of one instance: conns[k] applied to ys[k] (sequences over f.index)."""
    def term(k, y):
        return eval_connective(conns[k], y if k == 0 else ONE - y)

    at = {i: min(term(k, ys[k][p]) for k in range(len(conns))) for p, i in enumerate(f.index)}
    if {i for i, v in at.items() if v == 0} not in f:
        return True
    sups = [limsup(f, y) for y in ys]
    return min(term(k, sups[k]) for k in range(len(conns))) == 0


def _suite_basic_lemma(spec: InstanceSpec) -> dict:
    g = spec.grid
    checked, failures, first = _lemma_exhaustive(g, spec.index_size[1], 3)
    trials, rfail = [], 0
    for n in range(spec.trials):
        seed = trial_seed(spec.seed, "basic-lemma", n)
        rng = rng_for(seed)
        size = rng.randint(*spec.index_size)
        f = gen_filter(rng, size, spec.filter)
        conns = [gen_connective(rng, g) for _ in range(rng.randint(1, 3))]
        ys = [[rng.choice(g.values) for _ in range(size)] for _ in conns]
        ok = lemma_instance_holds(conns, ys, f)
        rfail += not ok
        trials.append({"trial": n, "seed": seed, "ok": ok})
    return {"counts": {"exhaustive_cases": checked, "exhaustive_failures": failures, "trials": len(trials),
                       "passed": len(trials) - rfail, "failed": failures + rfail},
            "first_exhaustive_failure": first, "trials": trials}


def example_structures(r: Fraction):
    vocab = Vocabulary((("P", 0), ("Q", 0)), (), ())
    m1 = GeneralStructure(vocab, 1, {"P": {(): r}, "Q": {(): ZERO}}, {}, {})
    m2 = GeneralStructure(vocab, 1, {"P": {(): ZERO}, "Q": {(): r}}, {}, {})
    return [m1, m2], Filter((1, 2), frozenset({1, 2}))


EXAMPLE_SENTENCE = "P | Q | ~(P | Q)"


def _suite_example(spec: InstanceSpec) -> dict:
    theta = parse_fo_formula(EXAMPLE_SENTENCE, Vocabulary((("P", 0), ("Q", 0)), (), ()))
    phi = fo_to_cont(theta)
    trials, failures = [], 0
    rs = [Fraction(1, 4), Fraction(1, 2)] + [r for r in spec.grid.points if 0 < r <= Fraction(1, 2)]
    for r in sorted(set(rs)):
        fam, f = example_structures(r)
        factors = [eval_formula(m, phi) for m in fam]
        prod, _ = reduced_product(fam, f)
        pv = eval_formula(prod, phi)
        rec = check_all_epsilons(fam, f, phi, spec.grid)
        ok = factors == [ZERO, ZERO] and pv == r and rec.verdict == VIOLATED and rec.epsilon == 0
        failures += not ok
        trials.append({"r": fmt(r), "factor_values": [fmt(v) for v in factors], "product_value": fmt(pv),
                       "verdict": rec.verdict, "epsilon": fmt(rec.epsilon), "ok": ok})
    return {"formula": render_formula(phi), "counts": {"trials": len(trials), "passed": len(trials) - failures,
                                                      "failed": failures}, "trials": trials}


_OTHER = {
    "limsup-identity": _suite_limsup,
    "basic-lemma": _suite_basic_lemma,
    "example-reproduction": _suite_example,
}
_OTHER_DEFAULTS = {
    "limsup-identity": dict(trials=200, index_size=(1, 5)),
    "basic-lemma": dict(trials=2000),
    "example-reproduction": dict(trials=1),
}

SUITES = tuple(sorted(set(_TRIAL_SUITES) | set(_OTHER)))


def run_suite(name: str, overrides: dict | None = None, timestamp: str | None = None) -> tuple[int, dict]:
    """Run a suite; returns (exit status, report). Status 0 means no violation."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    spec = suite_spec(name, overrides)
    body = _run_trials(name, spec) if name in _TRIAL_SUITES else _OTHER[name](spec)
    failed = body["counts"]["failed"]
    first = next((t for t in body.get("trials", []) if not t["ok"]), None)
    spec_dict = asdict(spec)
    spec_dict["universe"] = list(spec.universe)
    spec_dict["index_size"] = list(spec.index_size)
    report = {
        "suite": name,
        "status": "pass" if failed == 0 else "fail",
        "spec": spec_dict,
        **body,
        "first_violation": first,
        "timestamp": timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return (EXIT_PASS if failed == 0 else EXIT_VIOLATION), report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


__all__ = [
    "SUITES", "UnknownSuite", "run_suite", "replay_trial", "suite_spec", "dumps_report",
    "EXIT_PASS", "EXIT_VIOLATION", "EXIT_USAGE", "lemma_connectives", "lemma_instance_holds",
    "example_structures", "EXAMPLE_SENTENCE",
]
