from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from contlogic.connectives import MonotoneConnective
from contlogic.structures import GeneralStructure
from contlogic.syntax import parse_vocabulary

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@st.composite
def unit_fractions(draw, max_den=64):
    den = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(0, den)), den)


@st.composite
def connectives(draw, max_den=16, max_inner=3):
    den = draw(st.sampled_from([2, 4, 8, max_den]))
    inner = sorted(draw(st.sets(st.integers(1, den - 1), max_size=min(max_inner, den - 1))))
    xs = [Fraction(0)] + [Fraction(j, den) for j in inner] + [Fraction(1)]
    ys = sorted(draw(st.lists(unit_fractions(max_den), min_size=len(xs), max_size=len(xs))))
    return MonotoneConnective.from_pairs(zip(xs, ys))


def grid(den):
    return [Fraction(j, den) for j in range(den + 1)]


def structure(vocab_text, size, preds=None, funcs=None, consts=None):
    """Build a structure from compact tables: unary/0-ary rows may be lists."""
    v = parse_vocabulary(vocab_text)
    ptab = {}
    for name, arity in v.predicates:
        raw = (preds or {})[name]
        if arity == 0 and not isinstance(raw, dict):
            raw = {(): raw}
        elif arity == 1 and not isinstance(raw, dict):
            raw = {(i,): x for i, x in enumerate(raw)}
        ptab[name] = {t: Fraction(x) for t, x in raw.items()}
    ftab = {}
    for name, arity in v.functions:
        raw = (funcs or {})[name]
        if arity == 1 and not isinstance(raw, dict):
            raw = {(i,): x for i, x in enumerate(raw)}
        ftab[name] = dict(raw)
    return GeneralStructure(v, size, ptab, ftab, dict(consts or {}))


ACCEPTANCE = pytest.StashKey[dict]()
CRITERIA = {
    1: "example reproduction",
    2: "conditional preservation",
    3: "limsup identity",
    4: "Los at finite index",
    5: "Leibniz oracle equivalence",
    6: "down/up round trip",
    7: "product commutation",
    8: "basic topological lemma",
    9: "morphism monotonicity",
    10: "Horn implies conditional",
    11: "counterexample search",
}


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, None)
    if log is None:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        ok, detail = log.get(n, (False, "did not complete"))
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {name}: {detail}")
