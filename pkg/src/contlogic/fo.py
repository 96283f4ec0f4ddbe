"""Classical first-order structures with built-in equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .structures import EvaluationError, GeneralStructure, StructureError, eval_term, tuples
from .syntax import And, Atomic, Equal, Exists, Forall, Not, Or, Vocabulary, check_symbols, free_vars
from .values import ONE, ZERO


@dataclass(frozen=True)
class FOStructure:
    """Boolean predicate tables over ``0..size-1``; equality is identity."""

    vocab: Vocabulary
    size: int
    preds: Mapping[str, Mapping[tuple, bool]] = field(default_factory=dict)
    funcs: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    consts: Mapping[str, int] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        if self.size < 1:
            raise StructureError("universe must be nonempty")
        if set(self.preds) != set(self.vocab.pred_arity):
            raise StructureError("predicate tables do not match vocabulary")
        if set(self.funcs) != set(self.vocab.func_arity):
            raise StructureError("function tables do not match vocabulary")
        if set(self.consts) != set(self.vocab.constants):
            raise StructureError("constant table does not match vocabulary")
        preds = {}
        for name, arity in self.vocab.predicates:
            table = self.preds[name]
            fixed = {}
            for t in tuples(self.size, arity):
                if t not in table:
                    raise StructureError(f"missing entry {name}{t}")
                v = table[t]
                if not isinstance(v, bool):
                    raise StructureError(f"{name}{t} must be true or false")
                fixed[t] = v
            preds[name] = fixed
        funcs = {}
        for name, arity in self.vocab.functions:
            table = self.funcs[name]
            fixed = {}
            for t in tuples(self.size, arity):
                if t not in table:
                    raise StructureError(f"missing entry {name}{t}")
                if not 0 <= table[t] < self.size:
                    raise StructureError(f"{name}{t} outside the universe")
                fixed[t] = int(table[t])
            funcs[name] = fixed
        for c, e in self.consts.items():
            if not 0 <= e < self.size:
                raise StructureError(f"constant {c} outside the universe")
        object.__setattr__(self, "preds", preds)
        object.__setattr__(self, "funcs", funcs)
        object.__setattr__(self, "consts", dict(self.consts))


def _holds(k: FOStructure, f, env: dict) -> bool:
    if isinstance(f, Atomic):
        return k.preds[f.pred][tuple(eval_term(k, a, env) for a in f.args)]
    if isinstance(f, Equal):
        return eval_term(k, f.left, env) == eval_term(k, f.right, env)
    if isinstance(f, Not):
        return not _holds(k, f.child, env)
    if isinstance(f, And):
        return all(_holds(k, c, env) for c in f.children)
    if isinstance(f, Or):
        return any(_holds(k, c, env) for c in f.children)
    if isinstance(f, (Forall, Exists)):
        test = all if isinstance(f, Forall) else any
        return test(_holds(k, f.body, {**env, f.var: e}) for e in range(k.size))
    raise EvaluationError(f"not a first-order formula: {f!r}")


def holds(k: FOStructure, f, a: Mapping[str, int] | None = None) -> bool:
    a = dict(a or {})
    missing = free_vars(f) - set(a)
    if missing:
        raise EvaluationError(f"free variables not assigned: {sorted(missing)}")
    check_symbols(f, k.vocab)
    return _holds(k, f, a)


def fo_as_general(k: FOStructure) -> GeneralStructure:
    """Read ``k`` as a general structure: true -> 0, false -> 1. Equality is dropped."""
    preds = {p: {t: (ZERO if v else ONE) for t, v in tab.items()} for p, tab in k.preds.items()}
    return GeneralStructure(k.vocab, k.size, preds, dict(k.funcs), dict(k.consts))


def general_as_fo(m: GeneralStructure) -> FOStructure:
    """Inverse of :func:`fo_as_general` for {0,1}-valued structures."""
    preds = {}
    for p, tab in m.preds.items():
        row = {}
        for t, v in tab.items():
            if v not in (ZERO, ONE):
                raise StructureError(f"{p}{t} = {v} is not a classical truth value")
            row[t] = v == ZERO
        preds[p] = row
    return FOStructure(m.vocab, m.size, preds, dict(m.funcs), dict(m.consts))


def fo_isomorphic(k1: FOStructure, k2: FOStructure) -> bool:
    """Isomorphism of FO structures (with equality) via the general-structure search.

    Adding a discrete binary relation makes every general structure reduced,
    so the Leibniz quotient is the identity and embeddings onto are isomorphisms.
    """
    from .structures import find_embedding_onto

    def lift(k):
        eq = "__eq__"
        while eq in {n for n, _ in k.vocab.predicates}:
            eq += "_"
        vocab = k.vocab.union(Vocabulary(((eq, 2),)))
        preds = {p: {t: (ZERO if v else ONE) for t, v in tab.items()} for p, tab in k.preds.items()}
        preds[eq] = {(a, b): (ZERO if a == b else ONE) for a in range(k.size) for b in range(k.size)}
        return GeneralStructure(vocab, k.size, preds, dict(k.funcs), dict(k.consts))

    if k1.vocab != k2.vocab:
        return False
    return find_embedding_onto(lift(k1), lift(k2)) is not None


__all__ = ["FOStructure", "holds", "fo_as_general", "general_as_fo", "fo_isomorphic"]
