"""Finite general structures: exact evaluation, Leibniz reduction, morphisms.

Leibniz equality is computed as a greatest fixpoint. Two elements start in
the same block when every predicate row agrees with either element placed in
any single argument slot (the other arguments arbitrary). A block is then
split whenever some function symbol, applied with one of the two elements in
a single slot and the other arguments fixed, lands in different blocks.

Atomic formulas where the distinguished variable occurs several times, such
as ``P(x, F(x))``, need no special treatment: replacing the occurrences one at
a time turns ``a`` into ``b`` through a chain of single-slot swaps, each of
which preserves the value (predicate slots) or the block (function slots).
The brute-force enumeration in :func:`leibniz_partition_bruteforce` checks
this against the definition directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .connectives import eval_connective
from .syntax import (
    Apply, Atomic, Const, ConstTerm, FuncTerm, Half, Inf, Max, Min, Sup,
    TruncAdd, TruncSub, Var, Vocabulary, check_symbols, free_vars,
)
from .values import ONE, ZERO, tadd, tsub, value


class StructureError(ValueError):
    pass


class EvaluationError(ValueError):
    pass


def tuples(size: int, arity: int):
    return itertools.product(range(size), repeat=arity)


@dataclass(frozen=True, eq=True)
class GeneralStructure:
    """A [0,1]-valued interpretation of ``vocab`` on the universe ``0..size-1``.

    ``preds[P]`` maps argument tuples to values, ``funcs[F]`` maps argument
    tuples to elements, ``consts[c]`` is an element. Tables must be total.
    """

    vocab: Vocabulary
    size: int
    preds: Mapping[str, Mapping[tuple, Fraction]] = field(default_factory=dict)
    funcs: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    consts: Mapping[str, int] = field(default_factory=dict)

    __hash__ = None  # tables are dicts

    def __post_init__(self):
        if self.size < 1:
            raise StructureError("universe must be nonempty")
        pa, fa = self.vocab.pred_arity, self.vocab.func_arity
        if set(self.preds) != set(pa):
            raise StructureError(f"predicate tables {sorted(self.preds)} do not match vocabulary {sorted(pa)}")
        if set(self.funcs) != set(fa):
            raise StructureError(f"function tables {sorted(self.funcs)} do not match vocabulary {sorted(fa)}")
        if set(self.consts) != set(self.vocab.constants):
            raise StructureError("constant table does not match vocabulary")
        preds = {}
        for name, arity in pa.items():
            table = self.preds[name]
            fixed = {}
            for t in tuples(self.size, arity):
                if t not in table:
                    raise StructureError(f"missing entry {name}{t}")
                fixed[t] = value(table[t])
            if len(table) != len(fixed):
                raise StructureError(f"table for {name} has entries outside the universe")
            preds[name] = fixed
        funcs = {}
        for name, arity in fa.items():
            table = self.funcs[name]
            fixed = {}
            for t in tuples(self.size, arity):
                if t not in table:
                    raise StructureError(f"missing entry {name}{t}")
                r = table[t]
                if not 0 <= r < self.size:
                    raise StructureError(f"{name}{t} = {r} outside the universe")
                fixed[t] = int(r)
            if len(table) != len(fixed):
                raise StructureError(f"table for {name} has entries outside the universe")
            funcs[name] = fixed
        for c, e in self.consts.items():
            if not 0 <= e < self.size:
                raise StructureError(f"constant {c} = {e} outside the universe")
        object.__setattr__(self, "preds", preds)
        object.__setattr__(self, "funcs", funcs)
        object.__setattr__(self, "consts", dict(self.consts))

    def values(self):
        for table in self.preds.values():
            yield from table.values()


# ---------------------------------------------------------------- evaluation


def eval_term(m: GeneralStructure, t, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"variable {t.name!r} is not assigned") from None
    if isinstance(t, ConstTerm):
        return m.consts[t.name]
    return m.funcs[t.name][tuple(eval_term(m, a, env) for a in t.args)]


def _eval(m: GeneralStructure, f, env: dict) -> Fraction:
    if isinstance(f, Atomic):
        return m.preds[f.pred][tuple(eval_term(m, a, env) for a in f.args)]
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Min):
        return min(_eval(m, c, env) for c in f.children)
    if isinstance(f, Max):
        return max(_eval(m, c, env) for c in f.children)
    if isinstance(f, TruncSub):
        return tsub(_eval(m, f.left, env), _eval(m, f.right, env))
    if isinstance(f, TruncAdd):
        return tadd(_eval(m, f.left, env), _eval(m, f.right, env))
    if isinstance(f, Half):
        return _eval(m, f.child, env) / 2
    if isinstance(f, Apply):
        return eval_connective(f.conn, _eval(m, f.child, env))
    if isinstance(f, (Sup, Inf)):
        saved = env.get(f.var, None)
        had = f.var in env
        vals = []
        for e in range(m.size):
            env[f.var] = e
            vals.append(_eval(m, f.body, env))
        if had:
            env[f.var] = saved
        else:
            del env[f.var]
        return max(vals) if isinstance(f, Sup) else min(vals)
    raise EvaluationError(f"cannot evaluate {f!r}")


def eval_formula(m: GeneralStructure, f, a: Mapping[str, int] | None = None) -> Fraction:
    """Exact truth value of the continuous formula ``f`` at assignment ``a``."""
    a = dict(a or {})
    missing = free_vars(f) - set(a)
    if missing:
        raise EvaluationError(f"free variables not assigned: {sorted(missing)}")
    for x, e in a.items():
        if not 0 <= e < m.size:
            raise EvaluationError(f"{x} assigned to {e}, outside the universe")
    try:
        check_symbols(f, m.vocab)
    except ValueError as e:
        raise EvaluationError(str(e)) from None
    return _eval(m, f, a)


# ---------------------------------------------------------------- Leibniz


def _blocks_from_labels(labels: Sequence) -> list[list[int]]:
    groups: dict = {}
    for a, lab in enumerate(labels):
        groups.setdefault(lab, []).append(a)
    return sorted(groups.values(), key=lambda b: b[0])


def _slot_rows(size: int, arity: int, slot: int):
    """Argument tuples for each element in ``slot``, other slots enumerated."""
    others = list(tuples(size, arity - 1))
    return [[o[:slot] + (a,) + o[slot:] for o in others] for a in range(size)]


def leibniz_partition(m: GeneralStructure) -> list[list[int]]:
    """Blocks of Leibniz equality, each sorted, ordered by least element."""
    n = m.size
    sig = [[] for _ in range(n)]
    for name, arity in m.vocab.predicates:
        table = m.preds[name]
        for slot in range(arity):
            for a, row in enumerate(_slot_rows(n, arity, slot)):
                sig[a].append(tuple(table[t] for t in row))
    labels = _canon([tuple(s) for s in sig])
    func_rows = [
        (m.funcs[name], _slot_rows(n, arity, slot))
        for name, arity in m.vocab.functions
        for slot in range(arity)
    ]
    count = len(set(labels))
    while func_rows:
        new = _canon([
            (labels[a],) + tuple(tuple(labels[table[t]] for t in rows[a]) for table, rows in func_rows)
            for a in range(n)
        ])
        new_count = len(set(new))
        labels = new
        if new_count == count:
            break
        count = new_count
    return _blocks_from_labels(labels)


def _canon(sigs: list) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(s, len(ids)) for s in sigs]


def leibniz_partition_bruteforce(m: GeneralStructure, term_depth: int = 3) -> list[list[int]]:
    """Leibniz equality straight from the definition, up to a term depth.

    Enumerates the maps x -> t(x, c) for every term of depth at most
    ``term_depth`` with parameters from the universe, then every atomic
    formula built from them, and groups elements by the resulting values.
    """
    n = m.size
    layer = {tuple(range(n))} | {tuple([c] * n) for c in range(n)}
    terms = set(layer)
    for _ in range(term_depth):
        new = set()
        for name, arity in m.vocab.functions:
            table = m.funcs[name]
            for args in itertools.product(sorted(terms), repeat=arity):
                new.add(tuple(table[tuple(arg[a] for arg in args)] for a in range(n)))
        if new <= terms:
            break
        terms |= new
    terms = sorted(terms)
    sig = [[] for _ in range(n)]
    for name, arity in m.vocab.predicates:
        table = m.preds[name]
        for args in itertools.product(terms, repeat=arity):
            for a in range(n):
                sig[a].append(table[tuple(arg[a] for arg in args)])
    return _blocks_from_labels([tuple(s) for s in sig])


def is_reduced(m: GeneralStructure) -> bool:
    return len(leibniz_partition(m)) == m.size


@dataclass(frozen=True)
class QuotientMap:
    """Surjection from a source universe onto the blocks of a partition."""

    mapping: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    @classmethod
    def from_blocks(cls, blocks, size: int) -> "QuotientMap":
        mapping = [None] * size
        for i, b in enumerate(blocks):
            for a in b:
                mapping[a] = i
        if any(x is None for x in mapping):
            raise StructureError("blocks do not cover the universe")
        return cls(tuple(mapping), tuple(tuple(b) for b in blocks))


def quotient_structure(m: GeneralStructure, blocks) -> tuple[GeneralStructure, QuotientMap]:
    """Collapse ``blocks`` of ``m``; fails if any table disagrees within a block."""
    q = QuotientMap.from_blocks(blocks, m.size)
    k = len(q.blocks)
    reps = [b[0] for b in q.blocks]
    preds = {}
    for name, arity in m.vocab.predicates:
        src = m.preds[name]
        preds[name] = {t: src[tuple(reps[i] for i in t)] for t in tuples(k, arity)}
        for t, v in src.items():
            if preds[name][tuple(q(a) for a in t)] != v:
                raise StructureError(f"{name} not constant on blocks at {t}")
    funcs = {}
    for name, arity in m.vocab.functions:
        src = m.funcs[name]
        funcs[name] = {t: q(src[tuple(reps[i] for i in t)]) for t in tuples(k, arity)}
        for t, r in src.items():
            if funcs[name][tuple(q(a) for a in t)] != q(r):
                raise StructureError(f"{name} not compatible with blocks at {t}")
    consts = {c: q(e) for c, e in m.consts.items()}
    return GeneralStructure(m.vocab, k, preds, funcs, consts), q


def reduce_structure(m: GeneralStructure) -> tuple[GeneralStructure, QuotientMap]:
    """The reduction of ``m`` together with the class map a -> [a]."""
    return quotient_structure(m, leibniz_partition(m))


# ---------------------------------------------------------------- morphisms


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_morphism(kind: str, h: Sequence[int], m: GeneralStructure, n: GeneralStructure) -> MorphismCheck:
    """Check whether ``h`` is an ``"embedding"`` or ``"homomorphism"`` from m to n.

    Embeddings need not be injective: predicate values must be equal, which
    is all the definition asks. Homomorphisms must be onto and may only lower
    predicate values (P^M(a) >= P^N(h(a))).
    """
    if kind not in ("embedding", "homomorphism"):
        raise ValueError(f"unknown morphism kind {kind!r}")
    if m.vocab != n.vocab:
        return MorphismCheck(False, "vocabularies differ")
    h = tuple(h)
    if len(h) != m.size:
        return MorphismCheck(False, f"map has {len(h)} entries, universe has {m.size}")
    if any(not 0 <= b < n.size for b in h):
        return MorphismCheck(False, "map leaves the target universe")
    if kind == "homomorphism" and len(set(h)) != n.size:
        return MorphismCheck(False, "homomorphism is not onto")
    for c in m.vocab.constants:
        if h[m.consts[c]] != n.consts[c]:
            return MorphismCheck(False, f"constant {c}: h({m.consts[c]}) = {h[m.consts[c]]} != {n.consts[c]}")
    for name, table in m.funcs.items():
        target = n.funcs[name]
        for t, r in table.items():
            img = tuple(h[a] for a in t)
            if h[r] != target[img]:
                return MorphismCheck(False, f"function {name} at {t}: h({r}) = {h[r]} != {target[img]}")
    for name, table in m.preds.items():
        target = n.preds[name]
        for t, v in table.items():
            w = target[tuple(h[a] for a in t)]
            if kind == "embedding" and v != w:
                return MorphismCheck(False, f"predicate {name} at {t}: {v} != {w}")
            if kind == "homomorphism" and v < w:
                return MorphismCheck(False, f"predicate {name} at {t}: {v} < {w}")
    return MorphismCheck(True)


def _refine_colors(structs: list[GeneralStructure]) -> list[list[int]]:
    """Joint colour refinement; colours are isomorphism invariant."""
    vocab = structs[0].vocab
    colors = []
    for m in structs:
        init = []
        const_of = {e: tuple(sorted(c for c, x in m.consts.items() if x == e)) for e in range(m.size)}
        for a in range(m.size):
            init.append((const_of[a],))
        colors.append(init)
    colors = _joint_canon(colors)
    rows = []
    for m in structs:
        per = []
        for name, arity in vocab.predicates:
            for slot in range(arity):
                per.append(("P", m.preds[name], _slot_rows(m.size, arity, slot)))
        for name, arity in vocab.functions:
            for slot in range(arity):
                per.append(("F", m.funcs[name], _slot_rows(m.size, arity, slot)))
        rows.append(per)
    count = -1
    while True:
        new = []
        for s, m in enumerate(structs):
            col = colors[s]
            sigs = []
            for a in range(m.size):
                parts = [col[a]]
                for tag, table, slot_rows in rows[s]:
                    entries = []
                    for t in slot_rows[a]:
                        others = tuple(col[x] for x in t)
                        out = table[t] if tag == "P" else col[table[t]]
                        entries.append((others, out))
                    parts.append(tuple(sorted(entries)))
                sigs.append(tuple(parts))
            new.append(sigs)
        colors = _joint_canon(new)
        c = len({x for col in colors for x in col})
        if c == count:
            return colors
        count = c


def _joint_canon(sigs_per_struct):
    keys = sorted({s for sigs in sigs_per_struct for s in sigs}, key=repr)
    ids = {k: i for i, k in enumerate(keys)}
    return [[ids[s] for s in sigs] for sigs in sigs_per_struct]


def _consistent(m, n, h: dict, a: int) -> bool:
    assigned = list(h)
    for c, e in m.consts.items():
        if e in h and h[e] != n.consts[c]:
            return False
    for name, arity in m.vocab.predicates:
        src, dst = m.preds[name], n.preds[name]
        if arity == 0:
            continue
        for t in itertools.product(assigned, repeat=arity):
            if a in t and src[t] != dst[tuple(h[x] for x in t)]:
                return False
    for name, arity in m.vocab.functions:
        src, dst = m.funcs[name], n.funcs[name]
        for t in itertools.product(assigned, repeat=arity):
            if a not in t:
                continue
            r = src[t]
            img = dst[tuple(h[x] for x in t)]
            if r in h and h[r] != img:
                return False
    return True


def find_embedding_onto(m: GeneralStructure, n: GeneralStructure) -> tuple[int, ...] | None:
    """Backtracking search for a bijective embedding between reduced structures."""
    if m.vocab != n.vocab or m.size != n.size:
        return None
    for name, ar in m.vocab.predicates:
        if ar == 0 and m.preds[name][()] != n.preds[name][()]:
            return None
    cm, cn = _refine_colors([m, n])
    if sorted(cm) != sorted(cn):
        return None
    by_color: dict[int, list[int]] = {}
    for b, c in enumerate(cn):
        by_color.setdefault(c, []).append(b)
    order = sorted(range(m.size), key=lambda a: (len(by_color[cm[a]]), a))
    h: dict[int, int] = {}
    used: set[int] = set()

    def search(k: int) -> bool:
        if k == len(order):
            return True
        a = order[k]
        for b in by_color[cm[a]]:
            if b in used:
                continue
            h[a] = b
            used.add(b)
            if _consistent(m, n, h, a) and search(k + 1):
                return True
            del h[a]
            used.discard(b)
        return False

    if not search(0):
        return None
    result = tuple(h[a] for a in range(m.size))
    if not check_morphism("embedding", result, m, n):
        raise StructureError("isomorphism search produced a non-embedding")
    return result


def find_isomorphism(m: GeneralStructure, n: GeneralStructure) -> tuple[int, ...] | None:
    """Bijection from reduce(m) onto reduce(n) that is an embedding, or None."""
    rm, _ = reduce_structure(m)
    rn, _ = reduce_structure(n)
    return find_embedding_onto(rm, rn)


def isomorphic(m: GeneralStructure, n: GeneralStructure) -> bool:
    return find_isomorphism(m, n) is not None


# ------------------------------------------------------------------- parts


def vocabulary_part(m: GeneralStructure, v0: Vocabulary) -> GeneralStructure:
    """Forget every symbol outside ``v0``."""
    if not v0.issubset(m.vocab):
        raise StructureError(f"{v0} is not a sub-vocabulary of {m.vocab}")
    return GeneralStructure(
        v0,
        m.size,
        {p: m.preds[p] for p, _ in v0.predicates},
        {f: m.funcs[f] for f, _ in v0.functions},
        {c: m.consts[c] for c in v0.constants},
    )


def relabel(m: GeneralStructure, perm: Sequence[int]) -> GeneralStructure:
    """Copy of ``m`` with element ``a`` renamed ``perm[a]``."""
    preds = {p: {tuple(perm[x] for x in t): v for t, v in tab.items()} for p, tab in m.preds.items()}
    funcs = {f: {tuple(perm[x] for x in t): perm[r] for t, r in tab.items()} for f, tab in m.funcs.items()}
    consts = {c: perm[e] for c, e in m.consts.items()}
    return GeneralStructure(m.vocab, m.size, preds, funcs, consts)


def constant_structure(vocab: Vocabulary, size: int, v: Fraction = ZERO) -> GeneralStructure:
    """Structure with every predicate constantly ``v`` and functions projecting to slot 0."""
    return GeneralStructure(
        vocab,
        size,
        {p: {t: v for t in tuples(size, a)} for p, a in vocab.predicates},
        {f: {t: t[0] for t in tuples(size, a)} for f, a in vocab.functions},
        {c: 0 for c in vocab.constants},
    )


__all__ = [
    "GeneralStructure", "QuotientMap", "MorphismCheck", "StructureError", "EvaluationError",
    "eval_formula", "eval_term", "leibniz_partition", "leibniz_partition_bruteforce",
    "reduce_structure", "quotient_structure", "is_reduced", "check_morphism",
    "find_isomorphism", "find_embedding_onto", "isomorphic", "vocabulary_part",
    "relabel", "constant_structure", "tuples", "ONE",
]
