"""Syntactic classes of formulas and the rewrites that move between them.

A primitive conditional formula has the shape

    min(C0(a0), C1(1 -. a1), ..., Cn(1 -. an))

with atomic ``ak`` and nondecreasing unary ``Ck``. The matcher below reads a
normalized tree as a list of such *leaves*: unary increasing wrappers
(``C[...]``, ``half``, ``-. q``, ``+. q``) are composed into the leaf
connectives, ``q -. a`` becomes a negated leaf, and constants inside ``min``
or ``max`` are folded into a leaf connective. Conditional formulas close the
primitive ones under ``max``, ``sup`` and ``inf``; nothing else is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .connectives import (
    MonotoneConnective, cap, compose_connectives, constant, eval_connective, floor_at,
    halve, identity, minus_const, plus_const,
)
from .syntax import (
    And, Apply, Atomic, Const, Equal, Exists, Forall, Half, Inf, Max, Min, Not, Or,
    Sup, SyntaxError_, TruncAdd, TruncSub, negated, normalize, subformulas,
)
from .piecewise import template_function
from .values import ONE, ZERO, is_dyadic

HOLE = "u"


class ClassError(ValueError):
    pass


@dataclass
class ClassificationReport:
    restricted: Optional[bool] = None
    primitive_conditional: Optional[bool] = None
    conditional: Optional[bool] = None
    existential: Optional[bool] = None
    universal: Optional[bool] = None
    positive: Optional[bool] = None
    basic_horn: Optional[bool] = None
    horn: Optional[bool] = None
    violations: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        flags = {
            k: v for k, v in self.__dict__.items() if k != "violations" and v is not None
        }
        return {"flags": flags, "violations": dict(self.violations)}


# ------------------------------------------------------------- leaf matching


@dataclass(frozen=True)
class Leaf:
    conn: MonotoneConnective
    atom: Atomic
    negated: bool

    def rebuild(self):
        arg = negated(self.atom) if self.negated else self.atom
        return arg if self.conn.is_identity() else Apply(self.conn, arg)


def _wrap(leaves, b: MonotoneConnective):
    return [Leaf(compose_connectives(b, l.conn), l.atom, l.negated) for l in leaves]


def _unary_wrapper(f):
    """(connective, inner) if ``f`` is an increasing unary wrapper, else None."""
    if isinstance(f, Apply):
        return f.conn, f.child
    if isinstance(f, Half):
        return halve(), f.child
    if isinstance(f, TruncSub) and isinstance(f.right, Const):
        return minus_const(f.right.value), f.left
    if isinstance(f, TruncAdd) and isinstance(f.right, Const):
        return plus_const(f.right.value), f.left
    if isinstance(f, TruncAdd) and isinstance(f.left, Const):
        return plus_const(f.left.value), f.right
    return None


def match_primitive(f, path: str = "$"):
    """Leaves of ``f`` if it is primitive conditional, else ``(None, bad_path)``."""
    if isinstance(f, Atomic):
        return [Leaf(identity(), f, False)], None
    if isinstance(f, TruncSub) and isinstance(f.left, Const) and isinstance(f.right, Atomic):
        return [Leaf(minus_const(ONE - f.left.value), f.right, True)], None
    w = _unary_wrapper(f)
    if w is not None:
        b, inner = w
        sub = "child" if isinstance(f, (Apply, Half)) else ("left" if inner is getattr(f, "left", None) else "right")
        leaves, bad = match_primitive(inner, f"{path}.{sub}")
        return (_wrap(leaves, b), None) if leaves is not None else (None, bad)
    if isinstance(f, (Min, Max)):
        consts = [c.value for c in f.children if isinstance(c, Const)]
        parts = []
        for i, c in enumerate(f.children):
            if isinstance(c, Const):
                continue
            leaves, bad = match_primitive(c, f"{path}.children[{i}]")
            if leaves is None:
                return None, bad
            parts.append(leaves)
        if not parts:
            return None, path
        if isinstance(f, Min):
            leaves = [l for p in parts for l in p]
            if consts:
                leaves[0] = Leaf(compose_connectives(cap(min(consts)), leaves[0].conn), leaves[0].atom, leaves[0].negated)
        else:
            # max of primitives is primitive only when at most one has several leaves
            if len(parts) != 1:
                return None, path
            leaves = parts[0]
            if consts:
                leaves = _wrap(leaves, floor_at(max(consts)))
        if sum(1 for l in leaves if not l.negated) > 1:
            return None, path
        return leaves, None
    return None, path


def primitive_formula(leaves) -> object:
    """Rebuild min(C0(a0), C1(1 -. a1), ...) with the positive leaf first."""
    ordered = sorted(leaves, key=lambda l: l.negated)
    parts = tuple(l.rebuild() for l in ordered)
    return parts[0] if len(parts) == 1 else Min(parts)


# -------------------------------------------------------- conditional form


@dataclass(frozen=True)
class _Prim:
    leaves: tuple


@dataclass(frozen=True)
class _CMax:
    children: tuple


@dataclass(frozen=True)
class _CQuant:
    sup: bool
    var: str
    body: object


def _conditional_form(f, path="$"):
    leaves, bad = match_primitive(f, path)
    if leaves is not None:
        return _Prim(tuple(leaves)), None
    if isinstance(f, (Sup, Inf)):
        body, bad = _conditional_form(f.body, f"{path}.body")
        if body is None:
            return None, bad
        return _CQuant(isinstance(f, Sup), f.var, body), None
    if isinstance(f, Max):
        consts = [c.value for c in f.children if isinstance(c, Const)]
        kids = []
        for i, c in enumerate(f.children):
            if isinstance(c, Const):
                continue
            k, bad = _conditional_form(c, f"{path}.children[{i}]")
            if k is None:
                return None, bad
            kids.append(k)
        if consts:
            q = max(consts)
            for i, k in enumerate(kids):
                if isinstance(k, _Prim):
                    kids[i] = _Prim(tuple(_wrap(k.leaves, floor_at(q))))
                    break
            else:
                return None, path
        return (kids[0] if len(kids) == 1 else _CMax(tuple(kids))), None
    if bad is None:
        bad = path
    return None, bad


def _push(form, b: MonotoneConnective):
    if isinstance(form, _Prim):
        return _Prim(tuple(_wrap(form.leaves, b)))
    if isinstance(form, _CMax):
        return _CMax(tuple(_push(k, b) for k in form.children))
    return _CQuant(form.sup, form.var, _push(form.body, b))


def _rebuild(form):
    if isinstance(form, _Prim):
        return primitive_formula(form.leaves)
    if isinstance(form, _CMax):
        return Max(tuple(_rebuild(k) for k in form.children))
    body = _rebuild(form.body)
    return Sup(form.var, body) if form.sup else Inf(form.var, body)


# ---------------------------------------------------------------- classes


_RESTRICTED = (Atomic, Const, Min, Max, TruncSub, TruncAdd, Half, Sup, Inf)


def _first_path(f, pred, path="$"):
    """Path to the first subformula (preorder) satisfying ``pred``."""
    if pred(f):
        return path
    if isinstance(f, (Min, Max)):
        for i, c in enumerate(f.children):
            p = _first_path(c, pred, f"{path}.children[{i}]")
            if p:
                return p
    elif isinstance(f, (TruncSub, TruncAdd)):
        return _first_path(f.left, pred, f"{path}.left") or _first_path(f.right, pred, f"{path}.right")
    elif isinstance(f, (Half, Apply)):
        return _first_path(f.child, pred, f"{path}.child")
    elif isinstance(f, (Sup, Inf)):
        return _first_path(f.body, pred, f"{path}.body")
    return None


def _quantifier_free(f) -> bool:
    return not any(isinstance(g, (Sup, Inf)) for g in subformulas(f))


def _monotone_class(f, allow_sup: bool, allow_inf: bool, base_qf: bool, path="$"):
    """Shared checker for existential / universal / positive formulas.

    Returns the path of the first offending subformula, or None.
    """
    if base_qf and _quantifier_free(f):
        return None
    if isinstance(f, (Atomic, Const)):
        return None
    if isinstance(f, (Min, Max)):
        for i, c in enumerate(f.children):
            bad = _monotone_class(c, allow_sup, allow_inf, base_qf, f"{path}.children[{i}]")
            if bad:
                return bad
        return None
    if isinstance(f, TruncAdd):
        return (_monotone_class(f.left, allow_sup, allow_inf, base_qf, f"{path}.left")
                or _monotone_class(f.right, allow_sup, allow_inf, base_qf, f"{path}.right"))
    if isinstance(f, TruncSub):
        if isinstance(f.right, Const):
            return _monotone_class(f.left, allow_sup, allow_inf, base_qf, f"{path}.left")
        return path
    if isinstance(f, (Half, Apply)):
        return _monotone_class(f.child, allow_sup, allow_inf, base_qf, f"{path}.child")
    if isinstance(f, Sup):
        return _monotone_class(f.body, allow_sup, allow_inf, base_qf, f"{path}.body") if allow_sup else path
    if isinstance(f, Inf):
        return _monotone_class(f.body, allow_sup, allow_inf, base_qf, f"{path}.body") if allow_inf else path
    return path


def classify_cont(f) -> ClassificationReport:
    """Syntactic class membership of a continuous formula."""
    f = normalize(f)
    r = ClassificationReport()
    v = {}
    bad = _first_path(f, lambda g: not isinstance(g, _RESTRICTED))
    r.restricted = bad is None
    if bad:
        v["restricted"] = bad
    leaves, bad = match_primitive(f)
    r.primitive_conditional = leaves is not None
    if bad:
        v["primitive_conditional"] = bad
    form, bad = _conditional_form(f)
    r.conditional = form is not None
    if bad:
        v["conditional"] = bad
    for name, kw in (
        ("existential", dict(allow_sup=False, allow_inf=True, base_qf=True)),
        ("universal", dict(allow_sup=True, allow_inf=False, base_qf=True)),
        ("positive", dict(allow_sup=True, allow_inf=True, base_qf=False)),
    ):
        bad = _monotone_class(f, **kw)
        setattr(r, name, bad is None)
        if bad:
            v[name] = bad
    r.violations = v
    return r


def is_conditional(f) -> bool:
    return _conditional_form(normalize(f))[0] is not None


# --------------------------------------------------------------- Horn side


def _literal(f) -> Optional[bool]:
    """True for a positive atomic, False for a negated one, None otherwise."""
    if isinstance(f, (Atomic, Equal)):
        return True
    if isinstance(f, Not) and isinstance(f.child, (Atomic, Equal)):
        return False
    return None


def _basic_horn(f, path="$"):
    kids = f.children if isinstance(f, Or) else (f,)
    positives = 0
    for i, k in enumerate(kids):
        lit = _literal(k)
        sub = f"{path}.children[{i}]" if isinstance(f, Or) else path
        if lit is None:
            return sub
        positives += lit
        if positives > 1:
            return sub
    return None


def _horn(f, path="$"):
    if _basic_horn(f, path) is None:
        return None
    if isinstance(f, And):
        for i, c in enumerate(f.children):
            bad = _horn(c, f"{path}.children[{i}]")
            if bad:
                return bad
        return None
    if isinstance(f, (Forall, Exists)):
        return _horn(f.body, f"{path}.body")
    return _basic_horn(f, path)


def classify_horn(f) -> ClassificationReport:
    f = normalize(f)
    r = ClassificationReport()
    bad = _basic_horn(f)
    r.basic_horn = bad is None
    if bad:
        r.violations["basic_horn"] = bad
    bad = _horn(f)
    r.horn = bad is None
    if bad:
        r.violations["horn"] = bad
    return r


# ------------------------------------------------------------ translations


def fo_to_cont(f):
    """theta -> theta^c with 0 = true: or -> min, and -> max, not -> 1 -. ., forall -> sup, exists -> inf."""
    def tr(g):
        if isinstance(g, Atomic):
            return g
        if isinstance(g, Equal):
            raise ClassError("equality cannot be translated; the structures carry no identity")
        if isinstance(g, Not):
            return negated(tr(g.child))
        if isinstance(g, Or):
            return Min(tuple(tr(c) for c in g.children))
        if isinstance(g, And):
            return Max(tuple(tr(c) for c in g.children))
        if isinstance(g, Forall):
            return Sup(g.var, tr(g.body))
        if isinstance(g, Exists):
            return Inf(g.var, tr(g.body))
        raise ClassError(f"not a first-order formula: {g!r}")

    return normalize(tr(normalize(f)))


def push_unary(b: MonotoneConnective, f):
    """A conditional formula equal in value to ``b(f)`` for conditional ``f``."""
    f = normalize(f)
    form, bad = _conditional_form(f)
    if form is None:
        raise ClassError(f"formula is not conditional (violation at {bad})")
    if b.is_identity():
        return f
    return normalize(_rebuild(_push(form, b)))


# -------------------------------------------------- restricted approximation


def _double(f, times: int):
    for _ in range(times):
        f = TruncAdd(f, f)
    return f


def _exact_template(c: MonotoneConnective):
    u = Atomic(HOLE)
    if c.is_identity():
        return u
    if c.is_constant() and is_dyadic(c.points[0][1]):
        return Const(c.points[0][1])
    for t in (p[0] for p in c.points):
        if 0 < t < 1 and is_dyadic(t) and c == minus_const(t):
            return TruncSub(u, Const(t))
        if 0 < t < 1 and is_dyadic(t) and c == plus_const(1 - t):
            return TruncAdd(u, Const(1 - t))
    if c == halve():
        return Half(u)
    return None


def approx_restricted(c: MonotoneConnective, eps) -> object:
    """Restricted template A(u) with |A(x) - c(x)| <= eps on [0, 1].

    Generic construction: with grid t_j = j/N and dyadic lower roundings q_j
    of c(t_j), A(u) = max(q_0, min(q_j, N*(u -. t_{j-1})) for j >= 1), where
    the slope N = 2^m is realized by m-fold self-addition. The error is at
    most max_j (c(t_j) - c(t_{j-1})) + 2^-p.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ClassError("eps must be positive")
    exact = _exact_template(c)
    if exact is not None:
        return exact
    p = 0
    while Fraction(1, 2 ** p) > eps / 2:
        p += 1
    budget = eps - Fraction(1, 2 ** p)
    m = 0
    while True:
        n = 2 ** m
        ys = [c(Fraction(j, n)) for j in range(n + 1)]
        if max(b - a for a, b in zip(ys, ys[1:])) <= budget:
            break
        m += 1
    scale = 2 ** p
    qs = [Fraction(int(y * scale), scale) for y in ys]
    u = Atomic(HOLE)
    terms = []
    if qs[0] > 0:
        terms.append(Const(qs[0]))
    for j in range(1, n + 1):
        if qs[j] == 0 or qs[j] == qs[j - 1]:
            continue
        ramp = _double(TruncSub(u, Const(Fraction(j - 1, n))) if j > 1 else u, m)
        terms.append(Min((Const(qs[j]), ramp)) if qs[j] < 1 else ramp)
    if not terms:
        return Const(ZERO)
    return normalize(terms[0] if len(terms) == 1 else Max(tuple(terms)))


def eval_template(template, x: Fraction) -> Fraction:
    """Evaluate a one-variable template at ``u = x``."""
    return template_function(template, HOLE)(Fraction(x))


def approximation_error(template, c: MonotoneConnective, grid_denominator: int | None = None) -> Fraction:
    """max |A(x) - c(x)| over [0, 1], or over a grid when ``grid_denominator`` is given.

    The exact version evaluates at the kinks of A and c: their difference is
    piecewise linear with no other kinks, so the maximum sits at one of them.
    """
    a = template_function(template, HOLE)
    if grid_denominator is None:
        xs = set(a.xs) | set(c.xs)
    else:
        xs = {Fraction(j, grid_denominator) for j in range(grid_denominator + 1)}
    return max(abs(a(x) - c(x)) for x in xs)


__all__ = [
    "ClassificationReport", "ClassError", "Leaf", "HOLE", "classify_cont", "classify_horn",
    "is_conditional", "match_primitive", "primitive_formula", "fo_to_cont", "push_unary",
    "approx_restricted", "eval_template", "approximation_error",
]
