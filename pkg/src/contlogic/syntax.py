"""Vocabularies, terms and formula trees for continuous and first-order logic.

All nodes are frozen dataclasses, so formulas hash and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .connectives import MonotoneConnective
from .values import is_dyadic, tadd, tsub, value


class SyntaxError_(ValueError):
    """Raised for malformed formulas (bad arity, unknown symbol, ...)."""


class UnknownSymbol(SyntaxError_):
    pass


class ArityError(SyntaxError_):
    pass


# ---------------------------------------------------------------- vocabulary


def _sorted_pairs(pairs) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((str(n), int(a)) for n, a in pairs))


@dataclass(frozen=True)
class Vocabulary:
    predicates: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        preds = _sorted_pairs(self.predicates)
        funcs = _sorted_pairs(self.functions)
        consts = tuple(sorted(self.constants))
        names = [n for n, _ in preds] + [n for n, _ in funcs] + list(consts)
        if len(names) != len(set(names)):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"symbol names must be unique, duplicated: {dup}")
        for n, a in preds:
            if a < 0:
                raise ValueError(f"predicate {n} has negative arity")
        for n, a in funcs:
            if a < 1:
                raise ValueError(f"function {n} must have arity >= 1")
        object.__setattr__(self, "predicates", preds)
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(self, "constants", consts)

    @property
    def pred_arity(self) -> dict[str, int]:
        return dict(self.predicates)

    @property
    def func_arity(self) -> dict[str, int]:
        return dict(self.functions)

    def kind(self, name: str) -> str | None:
        if name in self.pred_arity:
            return "predicate"
        if name in self.func_arity:
            return "function"
        if name in self.constants:
            return "constant"
        return None

    def issubset(self, other: "Vocabulary") -> bool:
        return (
            set(self.predicates) <= set(other.predicates)
            and set(self.functions) <= set(other.functions)
            and set(self.constants) <= set(other.constants)
        )

    def union(self, other: "Vocabulary") -> "Vocabulary":
        return Vocabulary(
            tuple(set(self.predicates) | set(other.predicates)),
            tuple(set(self.functions) | set(other.functions)),
            tuple(set(self.constants) | set(other.constants)),
        )

    def without(self, *names: str) -> "Vocabulary":
        drop = set(names)
        return Vocabulary(
            tuple(p for p in self.predicates if p[0] not in drop),
            tuple(f for f in self.functions if f[0] not in drop),
            tuple(c for c in self.constants if c not in drop),
        )

    def __str__(self) -> str:
        items = [f"{n}/{a}" for n, a in self.predicates]
        items += [f"func:{n}/{a}" for n, a in self.functions]
        items += [f"const:{c}" for c in self.constants]
        return ",".join(items)


def parse_vocabulary(text: str) -> Vocabulary:
    """Parse a compact vocabulary literal like ``P/2,Q/0,func:F/1,const:c``.

    Items without a ``kind:`` prefix are predicates.
    """
    preds, funcs, consts = [], [], []
    for raw in text.replace(";", ",").split(","):
        item = raw.strip()
        if not item:
            continue
        kind, sep, rest = item.partition(":")
        if not sep:
            kind, rest = "pred", item
        kind = kind.strip()
        rest = rest.strip()
        if kind == "const":
            consts.append(rest)
            continue
        name, slash, arity = rest.partition("/")
        if not slash:
            raise ValueError(f"missing arity in vocabulary item {item!r}")
        if kind in ("pred", "predicate"):
            preds.append((name.strip(), int(arity)))
        elif kind in ("func", "function"):
            funcs.append((name.strip(), int(arity)))
        else:
            raise ValueError(f"unknown vocabulary item kind {kind!r}")
    return Vocabulary(tuple(preds), tuple(funcs), tuple(consts))


# ---------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ConstTerm:
    name: str


@dataclass(frozen=True)
class FuncTerm:
    name: str
    args: tuple["Term", ...]


Term = Union[Var, ConstTerm, FuncTerm]


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, FuncTerm):
        out: set[str] = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def term_depth(t: Term) -> int:
    if isinstance(t, FuncTerm):
        return 1 + max(term_depth(a) for a in t.args)
    return 0


# ------------------------------------------------------------ shared atomic


@dataclass(frozen=True)
class Atomic:
    pred: str
    args: tuple[Term, ...] = ()


# --------------------------------------------------------- continuous nodes


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        v = value(self.value)
        if not is_dyadic(v):
            raise SyntaxError_(f"formula constants must be dyadic, got {v}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Min:
    children: tuple["ContFormula", ...]


@dataclass(frozen=True)
class Max:
    children: tuple["ContFormula", ...]


@dataclass(frozen=True)
class TruncSub:
    left: "ContFormula"
    right: "ContFormula"


@dataclass(frozen=True)
class TruncAdd:
    left: "ContFormula"
    right: "ContFormula"


@dataclass(frozen=True)
class Half:
    child: "ContFormula"


@dataclass(frozen=True)
class Apply:
    conn: MonotoneConnective
    child: "ContFormula"


@dataclass(frozen=True)
class Sup:
    var: str
    body: "ContFormula"


@dataclass(frozen=True)
class Inf:
    var: str
    body: "ContFormula"


ContFormula = Union[Atomic, Const, Min, Max, TruncSub, TruncAdd, Half, Apply, Sup, Inf]


def negated(a: "ContFormula") -> TruncSub:
    """The formula 1 -. a."""
    return TruncSub(Const(Fraction(1)), a)


# ---------------------------------------------------------------- FO nodes


@dataclass(frozen=True)
class Equal:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    child: "FOFormula"


@dataclass(frozen=True)
class And:
    children: tuple["FOFormula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["FOFormula", ...]


@dataclass(frozen=True)
class Forall:
    var: str
    body: "FOFormula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "FOFormula"


FOFormula = Union[Atomic, Equal, Not, And, Or, Forall, Exists]

CONT_NODES = (Atomic, Const, Min, Max, TruncSub, TruncAdd, Half, Apply, Sup, Inf)
FO_NODES = (Atomic, Equal, Not, And, Or, Forall, Exists)


def is_fo(f) -> bool:
    return isinstance(f, (Equal, Not, And, Or, Forall, Exists))


# ------------------------------------------------------------------ queries


def children(f) -> tuple:
    if isinstance(f, (Min, Max, And, Or)):
        return f.children
    if isinstance(f, (TruncSub, TruncAdd)):
        return (f.left, f.right)
    if isinstance(f, (Half, Apply, Not)):
        return (f.child,)
    if isinstance(f, (Sup, Inf, Forall, Exists)):
        return (f.body,)
    return ()


def free_vars(f) -> set[str]:
    if isinstance(f, Atomic):
        out: set[str] = set()
        for t in f.args:
            out |= term_vars(t)
        return out
    if isinstance(f, Equal):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (Sup, Inf, Forall, Exists)):
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def is_sentence(f) -> bool:
    return not free_vars(f)


def subformulas(f) -> Iterator:
    yield f
    for c in children(f):
        yield from subformulas(c)


def atoms(f) -> Iterator[Atomic]:
    for g in subformulas(f):
        if isinstance(g, Atomic):
            yield g


def _term_symbols(t: Term, preds, funcs, consts):
    if isinstance(t, ConstTerm):
        consts.add(t.name)
    elif isinstance(t, FuncTerm):
        funcs[t.name] = len(t.args)
        for a in t.args:
            _term_symbols(a, preds, funcs, consts)


def vocabulary_of(f) -> Vocabulary:
    """The smallest vocabulary declaring every symbol used in ``f``."""
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    consts: set[str] = set()
    for g in subformulas(f):
        terms: tuple = ()
        if isinstance(g, Atomic):
            preds[g.pred] = len(g.args)
            terms = g.args
        elif isinstance(g, Equal):
            terms = (g.left, g.right)
        for t in terms:
            _term_symbols(t, preds, funcs, consts)
    return Vocabulary(tuple(preds.items()), tuple(funcs.items()), tuple(consts))


def check_symbols(f, v: Vocabulary) -> None:
    """Raise UnknownSymbol/ArityError if ``f`` does not fit ``v``."""
    pa, fa = v.pred_arity, v.func_arity

    def term(t: Term):
        if isinstance(t, ConstTerm):
            if t.name not in v.constants:
                raise UnknownSymbol(f"unknown constant symbol {t.name!r}")
        elif isinstance(t, FuncTerm):
            if t.name not in fa:
                raise UnknownSymbol(f"unknown function symbol {t.name!r}")
            if fa[t.name] != len(t.args):
                raise ArityError(f"{t.name} expects {fa[t.name]} arguments, got {len(t.args)}")
            for a in t.args:
                term(a)

    for g in subformulas(f):
        if isinstance(g, Atomic):
            if g.pred not in pa:
                raise UnknownSymbol(f"unknown predicate symbol {g.pred!r}")
            if pa[g.pred] != len(g.args):
                raise ArityError(f"{g.pred} expects {pa[g.pred]} arguments, got {len(g.args)}")
            for t in g.args:
                term(t)
        elif isinstance(g, Equal):
            term(g.left)
            term(g.right)


def depth(f) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def quantifier_depth(f) -> int:
    inner = max((quantifier_depth(c) for c in children(f)), default=0)
    return inner + 1 if isinstance(f, (Sup, Inf, Forall, Exists)) else inner


# ------------------------------------------------------------- normalization


def _flatten(kind, parts):
    out = []
    for p in parts:
        if isinstance(p, kind):
            out.extend(p.children)
        else:
            out.append(p)
    return tuple(out)


def normalize(f):
    """Flatten nested Min/Max (And/Or) and fold constant subterms.

    Child order is kept as written.
    """
    if isinstance(f, (Atomic, Const, Equal)):
        return f
    if isinstance(f, (Min, Max)):
        kids = _flatten(type(f), (normalize(c) for c in f.children))
        if len(kids) == 1:
            return kids[0]
        if all(isinstance(k, Const) for k in kids):
            pick = min if isinstance(f, Min) else max
            return Const(pick(k.value for k in kids))
        return type(f)(kids)
    if isinstance(f, (And, Or)):
        kids = _flatten(type(f), (normalize(c) for c in f.children))
        return kids[0] if len(kids) == 1 else type(f)(kids)
    if isinstance(f, (TruncSub, TruncAdd)):
        l, r = normalize(f.left), normalize(f.right)
        if isinstance(l, Const) and isinstance(r, Const):
            op = tsub if isinstance(f, TruncSub) else tadd
            return Const(op(l.value, r.value))
        return type(f)(l, r)
    if isinstance(f, Half):
        c = normalize(f.child)
        if isinstance(c, Const):
            return Const(c.value / 2)
        return Half(c)
    if isinstance(f, Apply):
        return Apply(f.conn, normalize(f.child))
    if isinstance(f, Not):
        return Not(normalize(f.child))
    if isinstance(f, (Sup, Inf, Forall, Exists)):
        return type(f)(f.var, normalize(f.body))
    raise TypeError(f"not a formula: {f!r}")


def substitute_atom(f, name: str, replacement):
    """Replace every 0-ary atom ``name`` in ``f`` by ``replacement``."""
    if isinstance(f, Atomic):
        return replacement if (f.pred == name and not f.args) else f
    if isinstance(f, (Const, Equal)):
        return f
    if isinstance(f, (Min, Max, And, Or)):
        return type(f)(tuple(substitute_atom(c, name, replacement) for c in f.children))
    if isinstance(f, (TruncSub, TruncAdd)):
        return type(f)(substitute_atom(f.left, name, replacement), substitute_atom(f.right, name, replacement))
    if isinstance(f, (Half, Not)):
        return type(f)(substitute_atom(f.child, name, replacement))
    if isinstance(f, Apply):
        return Apply(f.conn, substitute_atom(f.child, name, replacement))
    return type(f)(f.var, substitute_atom(f.body, name, replacement))
