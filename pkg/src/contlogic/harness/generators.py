"""Seeded random instances: vocabularies, structures, filters and formulas.

Every random choice is uniform over the options available at that node.
Trial ``n`` of a run draws from its own ``random.Random`` whose seed is a
hash of the master seed, a label and ``n``, so any trial can be replayed
from the recorded seed alone.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..connectives import MonotoneConnective
from ..downup import Grid, threshold_name, vocab_down
from ..filters import Filter, all_filters, parse_filter, principal_ultrafilter
from ..fo import FOStructure
from ..structures import GeneralStructure, QuotientMap, reduce_structure, tuples
from ..syntax import (
    And, Apply, Atomic, Const, ConstTerm, Exists, Forall, FuncTerm, Half, Inf, Max, Min,
    Not, Or, Sup, TruncAdd, TruncSub, Var, Vocabulary, negated, normalize,
)

PRED_NAMES = ("P", "Q", "R", "S", "T")
FUNC_NAMES = ("F", "G", "H")
CONST_NAMES = ("c", "d", "e")
VAR_NAMES = ("x", "y", "z", "w")

FORMULA_CLASSES = ("conditional", "any", "existential", "universal", "positive", "quantifier-free")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    n_preds: int = 2
    max_pred_arity: int = 2
    n_funcs: int = 0
    max_func_arity: int = 1
    n_consts: int = 0
    universe: tuple[int, int] = (1, 3)
    index_size: tuple[int, int] = (1, 3)
    filter: str = "random"  # random | full | ultra | a parse_filter literal
    grid_k: int = 3
    formula_class: str = "conditional"
    depth: int = 4
    quantifier_depth: int = 2
    seed: int = 0
    trials: int = 1000
    max_product_size: int = 4096

    def __post_init__(self):
        lo, hi = self.universe
        ilo, ihi = self.index_size
        if min(lo, ilo, self.grid_k, self.depth, self.trials, self.max_product_size) < 1 or lo > hi or ilo > ihi:
            raise SpecError("bounds must be positive and ranges nonempty")
        if self.n_preds < 0 or self.n_funcs < 0 or self.n_consts < 0 or self.quantifier_depth < 0:
            raise SpecError("counts must be nonnegative")
        if self.n_preds > len(PRED_NAMES) or self.n_funcs > len(FUNC_NAMES) or self.n_consts > len(CONST_NAMES):
            raise SpecError("too many symbols requested")
        if self.formula_class not in FORMULA_CLASSES:
            raise SpecError(f"unknown formula class {self.formula_class!r}")
        if hi ** ihi > self.max_product_size:
            raise SpecError(f"largest product ({hi}^{ihi}) exceeds the size cap {self.max_product_size}")

    @property
    def grid(self) -> Grid:
        return Grid(self.grid_k)

    def with_overrides(self, **kw) -> "InstanceSpec":
        return replace(self, **kw)


def trial_seed(master: int, label: str, n: int) -> int:
    digest = hashlib.sha256(f"{master}:{label}:{n}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(seed: int) -> random.Random:
    return random.Random(seed)


# ---------------------------------------------------------------- structures


def gen_vocabulary(rng: random.Random, spec: InstanceSpec) -> Vocabulary:
    preds = tuple((PRED_NAMES[i], rng.randint(0, spec.max_pred_arity)) for i in range(spec.n_preds))
    funcs = tuple((FUNC_NAMES[i], rng.randint(1, spec.max_func_arity)) for i in range(spec.n_funcs))
    return Vocabulary(preds, funcs, CONST_NAMES[: spec.n_consts])


def grid_value(rng: random.Random, g: Grid) -> Fraction:
    return rng.choice(g.values)


def gen_structure(rng: random.Random, vocab: Vocabulary, size: int, g: Grid) -> GeneralStructure:
    preds = {p: {t: grid_value(rng, g) for t in tuples(size, a)} for p, a in vocab.predicates}
    funcs = {f: {t: rng.randrange(size) for t in tuples(size, a)} for f, a in vocab.functions}
    consts = {c: rng.randrange(size) for c in vocab.constants}
    return GeneralStructure(vocab, size, preds, funcs, consts)


def gen_family(rng: random.Random, vocab: Vocabulary, spec: InstanceSpec, n: int | None = None):
    n = n if n is not None else rng.randint(*spec.index_size)
    return [gen_structure(rng, vocab, rng.randint(*spec.universe), spec.grid) for _ in range(n)]


def gen_filter(rng: random.Random, n: int, how: str = "random") -> Filter:
    index = tuple(range(1, n + 1))
    if how == "random":
        return rng.choice(all_filters(index))
    if how == "full":
        return Filter(index, frozenset(index))
    if how == "ultra":
        return principal_ultrafilter(index, rng.choice(index))
    return parse_filter(how, index)


def gen_increasing_fo(rng: random.Random, vocab: Vocabulary, size: int, g: Grid) -> FOStructure:
    """An increasing structure over the threshold vocabulary: one random cut per tuple."""
    points = g.points
    preds = {}
    for p, a in vocab.predicates:
        cuts = {t: rng.randint(0, len(points)) for t in tuples(size, a)}
        for j, r in enumerate(points):
            preds[threshold_name(p, r)] = {t: j >= cut for t, cut in cuts.items()}
    funcs = {f: {t: rng.randrange(size) for t in tuples(size, a)} for f, a in vocab.functions}
    consts = {c: rng.randrange(size) for c in vocab.constants}
    return FOStructure(vocab_down(vocab, g), size, preds, funcs, consts)


def gen_embedding(rng: random.Random, vocab: Vocabulary, spec: InstanceSpec):
    """(m, n, h) with h an embedding of m into n.

    Either n extends m by fresh elements (h the inclusion) or n is a quotient
    of m by its Leibniz partition (h the class map).
    """
    g = spec.grid
    m = gen_structure(rng, vocab, rng.randint(*spec.universe), g)
    if rng.random() < 0.5:
        n, q = reduce_structure(m)
        return m, n, q.mapping
    extra = rng.randint(1, 2)
    size = m.size + extra
    preds = {}
    for p, a in vocab.predicates:
        preds[p] = {t: (m.preds[p][t] if max(t, default=-1) < m.size else grid_value(rng, g)) for t in tuples(size, a)}
    funcs = {}
    for f, a in vocab.functions:
        funcs[f] = {t: (m.funcs[f][t] if max(t, default=-1) < m.size else rng.randrange(size)) for t in tuples(size, a)}
    n = GeneralStructure(vocab, size, preds, funcs, dict(m.consts))
    return m, n, tuple(range(m.size))


def _congruence_closure(m: GeneralStructure, parent: list[int]) -> list[list[int]]:
    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    changed = True
    while changed:
        changed = False
        for f, a in m.vocab.functions:
            table = m.funcs[f]
            for s in tuples(m.size, a):
                for t in tuples(m.size, a):
                    if s < t and all(find(x) == find(y) for x, y in zip(s, t)):
                        u, v = find(table[s]), find(table[t])
                        if u != v:
                            parent[max(u, v)] = min(u, v)
                            changed = True
    blocks: dict[int, list[int]] = {}
    for a in range(m.size):
        blocks.setdefault(find(a), []).append(a)
    return sorted(blocks.values())


def gen_homomorphism(rng: random.Random, vocab: Vocabulary, spec: InstanceSpec):
    """(m, n, h): h onto, functions and constants respected, P^n(h a) <= P^m(a)."""
    g = spec.grid
    m = gen_structure(rng, vocab, rng.randint(*spec.universe), g)
    parent = list(range(m.size))
    for _ in range(rng.randint(0, m.size - 1)):
        a, b = rng.randrange(m.size), rng.randrange(m.size)
        ra, rb = a, b
        while parent[ra] != ra:
            ra = parent[ra]
        while parent[rb] != rb:
            rb = parent[rb]
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    blocks = _congruence_closure(m, parent)
    h = QuotientMap.from_blocks(blocks, m.size).mapping
    size = len(blocks)
    funcs = {f: {t: h[m.funcs[f][tuple(blocks[i][0] for i in t)]] for t in tuples(size, a)}
             for f, a in vocab.functions}
    consts = {c: h[e] for c, e in m.consts.items()}
    preds = {}
    for p, a in vocab.predicates:
        bound = {}
        for t, v in m.preds[p].items():
            key = tuple(h[x] for x in t)
            bound[key] = min(bound.get(key, v), v)
        preds[p] = {t: rng.choice([w for w in g.values if w <= bound[t]]) for t in tuples(size, a)}
    n = GeneralStructure(vocab, size, preds, funcs, consts)
    return m, n, h


# ------------------------------------------------------------------ formulas


def gen_connective(rng: random.Random, g: Grid) -> MonotoneConnective:
    den = 2 ** g.k
    inner = sorted(rng.sample(range(1, den), rng.randint(0, min(2, den - 1))))
    xs = [Fraction(0)] + [Fraction(j, den) for j in inner] + [Fraction(1)]
    ys = sorted(rng.choice(g.values) for _ in xs)
    return MonotoneConnective.from_pairs(list(zip(xs, ys)))


class _FormulaGen:
    def __init__(self, rng: random.Random, vocab: Vocabulary, g: Grid, depth: int, qdepth: int):
        self.rng, self.vocab, self.g = rng, vocab, g
        self.depth, self.qdepth = depth, qdepth
        self.nullary = [p for p, a in vocab.predicates if a == 0]

    # terms and atoms
    def term(self, scope, d=2):
        rng = self.rng
        leaves = [Var(v) for v in scope] + [ConstTerm(c) for c in self.vocab.constants]
        if self.vocab.functions and d > 0 and rng.random() < 0.3:
            f, a = rng.choice(self.vocab.functions)
            return FuncTerm(f, tuple(self.term(scope, d - 1) for _ in range(a)))
        return rng.choice(leaves)

    def can_atom(self, scope) -> bool:
        return bool(self.nullary) or (bool(self.vocab.predicates) and bool(scope or self.vocab.constants))

    def atom(self, scope) -> Atomic:
        usable = [(p, a) for p, a in self.vocab.predicates if a == 0 or scope or self.vocab.constants]
        p, a = self.rng.choice(usable)
        return Atomic(p, tuple(self.term(scope) for _ in range(a)))

    def fresh(self, scope):
        for v in VAR_NAMES:
            if v not in scope:
                return v
        raise SpecError("ran out of variable names")

    def const(self) -> Const:
        return Const(self.rng.choice(self.g.values))

    def quantified(self, kinds, body_gen, d, q, scope):
        v = self.fresh(scope)
        kind = self.rng.choice(kinds)
        return kind(v, body_gen(d - 1, q - 1, scope + (v,)))

    def must_bind(self, scope) -> bool:
        return not self.can_atom(scope)

    # conditional grammar: primitives closed under max, sup, inf
    def leaf(self, scope, positive: bool):
        rng = self.rng
        a = self.atom(scope)
        body = a if positive else negated(a)
        pick = rng.random()
        if pick < 0.5:
            return Apply(gen_connective(rng, self.g), body)
        if pick < 0.65:
            return TruncSub(body, self.const())
        if pick < 0.75:
            return Half(body)
        return body

    def primitive(self, scope):
        n_neg = self.rng.randint(0, 2)
        pos = n_neg == 0 or self.rng.random() < 0.5
        leaves = ([self.leaf(scope, True)] if pos else []) + [self.leaf(scope, False) for _ in range(n_neg)]
        return leaves[0] if len(leaves) == 1 else Min(tuple(leaves))

    def conditional(self, d, q, scope):
        rng = self.rng
        if q > 0 and (self.must_bind(scope) or (d > 1 and rng.random() < 0.35)):
            return self.quantified((Sup, Inf), self.conditional, d, q, scope)
        if self.must_bind(scope):
            raise SpecError("no atomic formula is available and quantifiers are exhausted")
        if d > 1 and rng.random() < 0.3:
            return Max(tuple(self.conditional(d - 1, q, scope) for _ in range(rng.randint(2, 3))))
        return self.primitive(scope)

    # unrestricted grammar
    def any(self, d, q, scope, allow_sup=True, allow_inf=True, qf_leaves=False, general_sub=True):
        rng = self.rng
        quants = tuple(k for k, ok in ((Sup, allow_sup), (Inf, allow_inf)) if ok)
        if q > 0 and quants and (self.must_bind(scope) or (d > 1 and rng.random() < 0.3)):
            return self.quantified(
                quants, lambda d2, q2, s2: self.any(d2, q2, s2, allow_sup, allow_inf, qf_leaves, general_sub), d, q, scope
            )
        if self.must_bind(scope):
            raise SpecError("no atomic formula is available and quantifiers are exhausted")
        if d <= 1 or rng.random() < 0.25:
            if qf_leaves and d > 1:
                return self.any(d, 0, scope, True, True, False, True)
            return self.atom(scope) if rng.random() < 0.85 else self.const()
        sub = lambda: self.any(d - 1, q, scope, allow_sup, allow_inf, qf_leaves, general_sub)  # noqa: E731
        kinds = ["min", "max", "add", "half", "apply", "subc"] + (["sub"] if general_sub else [])
        kind = rng.choice(kinds)
        if kind == "min":
            return Min((sub(), sub()))
        if kind == "max":
            return Max((sub(), sub()))
        if kind == "add":
            return TruncAdd(sub(), sub())
        if kind == "half":
            return Half(sub())
        if kind == "apply":
            return Apply(gen_connective(rng, self.g), sub())
        if kind == "subc":
            return TruncSub(sub(), self.const())
        return TruncSub(sub(), sub())

    # first-order
    def fo_atom_or_neg(self, scope, positive):
        a = self.atom(scope)
        return a if positive else Not(a)

    def basic_horn(self, scope):
        n_neg = self.rng.randint(0, 2)
        pos = n_neg == 0 or self.rng.random() < 0.5
        lits = ([self.atom(scope)] if pos else []) + [Not(self.atom(scope)) for _ in range(n_neg)]
        self.rng.shuffle(lits)
        return lits[0] if len(lits) == 1 else Or(tuple(lits))

    def horn(self, d, q, scope):
        rng = self.rng
        if q > 0 and (self.must_bind(scope) or (d > 1 and rng.random() < 0.35)):
            return self.quantified((Forall, Exists), self.horn, d, q, scope)
        if self.must_bind(scope):
            raise SpecError("no atomic formula is available and quantifiers are exhausted")
        if d > 1 and rng.random() < 0.3:
            return And(tuple(self.horn(d - 1, q, scope) for _ in range(2)))
        return self.basic_horn(scope)

    def fo(self, d, q, scope):
        rng = self.rng
        if q > 0 and (self.must_bind(scope) or (d > 1 and rng.random() < 0.3)):
            return self.quantified((Forall, Exists), self.fo, d, q, scope)
        if self.must_bind(scope):
            raise SpecError("no atomic formula is available and quantifiers are exhausted")
        if d <= 1 or rng.random() < 0.25:
            return self.atom(scope)
        kind = rng.choice(["not", "and", "or"])
        if kind == "not":
            return Not(self.fo(d - 1, q, scope))
        cls = And if kind == "and" else Or
        return cls((self.fo(d - 1, q, scope), self.fo(d - 1, q, scope)))


def gen_formula(rng: random.Random, vocab: Vocabulary, spec: InstanceSpec, cls: str | None = None,
                free: tuple[str, ...] = ()):
    """A normalized formula of class ``cls`` whose free variables lie in ``free``."""
    cls = cls or spec.formula_class
    if not vocab.predicates:
        raise SpecError("formula generation needs at least one predicate symbol")
    gen = _FormulaGen(rng, vocab, spec.grid, spec.depth, spec.quantifier_depth)
    d, q = spec.depth, spec.quantifier_depth
    if cls == "conditional":
        f = gen.conditional(d, q, free)
    elif cls == "any":
        f = gen.any(d, q, free)
    elif cls == "existential":
        f = gen.any(d, q, free, allow_sup=False, qf_leaves=True, general_sub=False)
    elif cls == "universal":
        f = gen.any(d, q, free, allow_inf=False, qf_leaves=True, general_sub=False)
    elif cls == "positive":
        f = gen.any(d, q, free, general_sub=False)
    elif cls == "quantifier-free":
        f = gen.any(d, 0, free)
    elif cls == "horn":
        return normalize(gen.horn(d, q, free))
    elif cls == "fo":
        return normalize(gen.fo(d, q, free))
    else:
        raise SpecError(f"unknown formula class {cls!r}")
    return normalize(f)


@dataclass
class Instance:
    seed: int
    family: list
    filter: Filter
    formula: object
    vocab: Vocabulary = field(repr=False, default=None)


def gen_instance(spec: InstanceSpec, trial: int = 0, label: str = "instance") -> Instance:
    """Family, filter and sentence for one trial; deterministic in (seed, label, trial)."""
    seed = trial_seed(spec.seed, label, trial)
    return instance_from_seed(spec, seed)


def instance_from_seed(spec: InstanceSpec, seed: int, vocab: Vocabulary | None = None, formula=None) -> Instance:
    rng = rng_for(seed)
    vocab = vocab or gen_vocabulary(rng, spec)
    if formula is None:
        formula = gen_formula(rng, vocab, spec)
    fam = gen_family(rng, vocab, spec)
    f = gen_filter(rng, len(fam), spec.filter)
    return Instance(seed, fam, f, formula, vocab)


__all__ = [
    "InstanceSpec", "SpecError", "Instance", "FORMULA_CLASSES", "trial_seed", "rng_for",
    "gen_vocabulary", "gen_structure", "gen_family", "gen_filter", "gen_increasing_fo",
    "gen_embedding", "gen_homomorphism", "gen_connective", "gen_formula", "gen_instance",
    "instance_from_seed", "grid_value",
]
