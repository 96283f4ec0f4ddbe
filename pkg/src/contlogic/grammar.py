"""Text grammar for both logics: tokenizer, recursive-descent parsers, printer.

Continuous formulas::

    sup x . e    inf x . e    min(e, ...)    max(e, ...)    half(e)
    e -. e       e +. e       0  1  3/8  3/2^3
    C[(0,0),(1/2,1),(1,1)](e)     P(t, ...)    P

First-order formulas::

    forall x . e    exists x . e    ~e    e & e    e | e    t = t

``-.`` and ``+.`` associate to the left. A quantifier body extends as far
right as possible. Lines whose first non-blank character is ``#`` are
comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .connectives import MonotoneConnective
from .syntax import (
    And, Apply, ArityError, Atomic, Const, ConstTerm, Equal, Exists, Forall,
    FuncTerm, Half, Inf, Max, Min, Not, Or, Sup, SyntaxError_, TruncAdd,
    TruncSub, UnknownSymbol, Var, Vocabulary, normalize,
)
from .values import fmt, is_dyadic

__all__ = [
    "ParseError", "parse_cont_formula", "parse_fo_formula", "parse_term",
    "render_formula", "render_fo", "render_term", "strip_comments",
    "parse_with_vocabulary",
]


class ParseError(SyntaxError_):
    def __init__(self, msg: str, text: str = "", pos: int | None = None):
        self.pos = pos
        if pos is not None and text:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            msg = f"{msg} at line {line}, column {col}"
        super().__init__(msg)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>-\.|\+\.|[()\[\],./^~&|=]))"
)

CONT_KEYWORDS = {"sup", "inf", "min", "max", "half"}
FO_KEYWORDS = {"forall", "exists"}


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


def strip_comments(text: str) -> str:
    return "\n".join("" if ln.lstrip().startswith("#") else ln for ln in text.splitlines())


def tokenize(text: str) -> list[Tok]:
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", text, i)
        kind = m.lastgroup
        out.append(Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()
    out.append(Tok("eof", "", n))
    return out


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary | None):
        self.text = strip_comments(text)
        self.toks = tokenize(self.text)
        self.i = 0
        self.vocab = vocab
        # inferred symbols when no vocabulary is supplied
        self.preds: dict[str, int] = {}
        self.funcs: dict[str, int] = {}

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Tok | None = None):
        t = tok or self.tok
        raise ParseError(msg, self.text, t.pos)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def take(self, text: str | None = None, kind: str | None = None) -> Tok:
        t = self.tok
        if text is not None and t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        if kind is not None and t.kind != kind:
            self.error(f"expected {kind}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # -- symbols
    def check_pred(self, name: str, nargs: int, tok: Tok):
        if self.vocab is None:
            if self.funcs.get(name) is not None:
                self.error(f"{name!r} used both as function and predicate", tok)
            prev = self.preds.setdefault(name, nargs)
            if prev != nargs:
                raise ParseError(f"{name} used with {nargs} arguments, earlier with {prev}", self.text, tok.pos)
            return
        arity = self.vocab.pred_arity.get(name)
        if arity is None:
            raise _located(UnknownSymbol, f"unknown predicate symbol {name!r}", self.text, tok.pos)
        if arity != nargs:
            raise _located(ArityError, f"{name} expects {arity} arguments, got {nargs}", self.text, tok.pos)

    def make_term(self, name: str, args, tok: Tok):
        if args is None:
            if self.vocab is not None:
                kind = self.vocab.kind(name)
                if kind == "constant":
                    return ConstTerm(name)
                if kind is not None:
                    raise _located(ArityError, f"{kind} {name!r} used as a variable", self.text, tok.pos)
            elif name in self.preds or name in self.funcs:
                self.error(f"{name!r} used as a variable", tok)
            return Var(name)
        if self.vocab is None:
            if name in self.preds:
                self.error(f"{name!r} used both as predicate and function", tok)
            prev = self.funcs.setdefault(name, len(args))
            if prev != len(args):
                self.error(f"{name} used with {len(args)} arguments, earlier with {prev}", tok)
        else:
            arity = self.vocab.func_arity.get(name)
            if arity is None:
                raise _located(UnknownSymbol, f"unknown function symbol {name!r}", self.text, tok.pos)
            if arity != len(args):
                raise _located(ArityError, f"{name} expects {arity} arguments, got {len(args)}", self.text, tok.pos)
        return FuncTerm(name, tuple(args))

    # -- terms
    def term(self):
        tok = self.take(kind="id")
        args = self.arglist() if self.at("(") else None
        return self.make_term(tok.text, args, tok)

    def arglist(self):
        self.take("(")
        args = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.take(",")
                args.append(self.term())
        self.take(")")
        return args

    def rational(self) -> Fraction:
        tok = self.take(kind="num")
        num = int(tok.text)
        if not self.at("/"):
            return Fraction(num)
        self.take("/")
        den_tok = self.take(kind="num")
        den = int(den_tok.text)
        if self.at("^"):
            if den != 2:
                self.error("only powers of 2 may be written with '^'", den_tok)
            self.take("^")
            den = 2 ** int(self.take(kind="num").text)
        if den == 0:
            self.error("zero denominator", den_tok)
        return Fraction(num, den)

    def var_name(self, keywords) -> str:
        tok = self.take(kind="id")
        if tok.text in keywords:
            self.error(f"keyword {tok.text!r} cannot be a variable", tok)
        return tok.text


def _located(cls, msg, text, pos):
    e = ParseError(msg, text, pos)
    err = cls(str(e))
    err.pos = pos
    return err


class _ContParser(_Parser):
    def formula(self):
        if self.tok.text in ("sup", "inf") and self.tok.kind == "id":
            q = self.take().text
            var = self.var_name(CONT_KEYWORDS)
            self.take(".")
            body = self.formula()
            return Sup(var, body) if q == "sup" else Inf(var, body)
        left = self.primary()
        while self.at("-.") or self.at("+."):
            op = self.take().text
            right = self.operand()
            left = TruncSub(left, right) if op == "-." else TruncAdd(left, right)
        return left

    def operand(self):
        if self.tok.kind == "id" and self.tok.text in ("sup", "inf"):
            return self.formula()
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            q = self.rational()
            if q > 1:
                self.error(f"constant {q} outside [0, 1]", tok)
            if not is_dyadic(q):
                self.error(f"non-dyadic constant literal {fmt(q)}", tok)
            return Const(q)
        if self.at("("):
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if tok.kind != "id":
            self.error(f"unexpected {tok.text or 'end of input'!r}")
        name = tok.text
        if name in ("min", "max") and self.peek().text == "(":
            self.take()
            self.take("(")
            kids = [self.formula()]
            while self.at(","):
                self.take(",")
                kids.append(self.formula())
            self.take(")")
            return Min(tuple(kids)) if name == "min" else Max(tuple(kids))
        if name == "half" and self.peek().text == "(":
            self.take()
            self.take("(")
            f = self.formula()
            self.take(")")
            return Half(f)
        if name == "C" and self.peek().text == "[":
            return self.connective_literal()
        if name in CONT_KEYWORDS:
            self.error(f"misplaced keyword {name!r}")
        self.take()
        args = self.arglist() if self.at("(") else []
        self.check_pred(name, len(args), tok)
        return Atomic(name, tuple(args))

    def connective_literal(self):
        start = self.take()
        self.take("[")
        pts = [self.point()]
        while self.at(","):
            self.take(",")
            pts.append(self.point())
        self.take("]")
        try:
            conn = MonotoneConnective(tuple(pts))
        except ValueError as e:
            self.error(f"bad connective literal: {e}", start)
        self.take("(")
        f = self.formula()
        self.take(")")
        return Apply(conn, f)

    def point(self):
        self.take("(")
        x = self.rational()
        self.take(",")
        y = self.rational()
        self.take(")")
        return (x, y)


class _FOParser(_Parser):
    def formula(self):
        if self.tok.kind == "id" and self.tok.text in FO_KEYWORDS:
            return self.quantified()
        left = self.conj()
        kids = [left]
        while self.at("|"):
            self.take("|")
            kids.append(self.quantified() if self._at_quant() else self.conj())
        return kids[0] if len(kids) == 1 else Or(tuple(kids))

    def _at_quant(self):
        return self.tok.kind == "id" and self.tok.text in FO_KEYWORDS

    def quantified(self):
        q = self.take().text
        var = self.var_name(FO_KEYWORDS)
        self.take(".")
        body = self.formula()
        return Forall(var, body) if q == "forall" else Exists(var, body)

    def conj(self):
        kids = [self.unary()]
        while self.at("&"):
            self.take("&")
            kids.append(self.quantified() if self._at_quant() else self.unary())
        return kids[0] if len(kids) == 1 else And(tuple(kids))

    def unary(self):
        if self.at("~"):
            self.take("~")
            return Not(self.quantified() if self._at_quant() else self.unary())
        if self.at("("):
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if self._at_quant():
            return self.quantified()
        tok = self.take(kind="id")
        args = self.arglist() if self.at("(") else None
        if self.at("="):
            left = self.make_term(tok.text, args, tok)
            self.take("=")
            return Equal(left, self.term())
        args = args or []
        self.check_pred(tok.text, len(args), tok)
        return Atomic(tok.text, tuple(args))


def _inferred(p: _Parser) -> Vocabulary:
    return Vocabulary(tuple(p.preds.items()), tuple(p.funcs.items()), ())


def parse_cont_formula(text: str, v: Vocabulary | None):
    """Parse a continuous formula and return its normalized tree.

    With ``v=None`` the vocabulary is inferred from usage (bare identifiers in
    term position become variables).
    """
    p = _ContParser(text, v)
    f = p.formula()
    p.done()
    return normalize(f)


def parse_fo_formula(text: str, v: Vocabulary | None):
    p = _FOParser(text, v)
    f = p.formula()
    p.done()
    return normalize(f)


def parse_with_vocabulary(text: str, logic: str = "cont"):
    """Parse without a vocabulary; return ``(formula, inferred_vocabulary)``."""
    p = _ContParser(text, None) if logic == "cont" else _FOParser(text, None)
    f = p.formula()
    p.done()
    return normalize(f), _inferred(p)


def parse_term(text: str, v: Vocabulary | None):
    p = _Parser(text, v)
    t = p.term()
    p.done()
    return t


# ------------------------------------------------------------------ printer


def render_term(t) -> str:
    if isinstance(t, (Var, ConstTerm)):
        return t.name
    return f"{t.name}(" + ", ".join(render_term(a) for a in t.args) + ")"


def _atom(f: Atomic) -> str:
    if not f.args:
        return f.pred
    return f"{f.pred}(" + ", ".join(render_term(a) for a in f.args) + ")"


def _cont(f) -> str:
    if isinstance(f, Atomic):
        return _atom(f)
    if isinstance(f, Const):
        return fmt(f.value)
    if isinstance(f, Min):
        return "min(" + ", ".join(_cont(c) for c in f.children) + ")"
    if isinstance(f, Max):
        return "max(" + ", ".join(_cont(c) for c in f.children) + ")"
    if isinstance(f, (TruncSub, TruncAdd)):
        op = "-." if isinstance(f, TruncSub) else "+."
        left = _cont(f.left)
        if isinstance(f.left, (Sup, Inf)):
            left = f"({left})"
        right = _cont(f.right)
        if isinstance(f.right, (Sup, Inf, TruncSub, TruncAdd)):
            right = f"({right})"
        return f"{left} {op} {right}"
    if isinstance(f, Half):
        return f"half({_cont(f.child)})"
    if isinstance(f, Apply):
        return f"{f.conn}({_cont(f.child)})"
    if isinstance(f, (Sup, Inf)):
        q = "sup" if isinstance(f, Sup) else "inf"
        return f"{q} {f.var} . {_cont(f.body)}"
    raise TypeError(f"not a continuous formula: {f!r}")


def _fo(f) -> str:
    if isinstance(f, Atomic):
        return _atom(f)
    if isinstance(f, Equal):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Not):
        inner = _fo(f.child)
        if isinstance(f.child, (And, Or, Equal, Forall, Exists)):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(f, Or):
        return " | ".join(
            f"({_fo(c)})" if isinstance(c, (Or, Forall, Exists)) else _fo(c) for c in f.children
        )
    if isinstance(f, And):
        return " & ".join(
            f"({_fo(c)})" if isinstance(c, (Or, And, Forall, Exists)) else _fo(c) for c in f.children
        )
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"{q} {f.var} . {_fo(f.body)}"
    raise TypeError(f"not a first-order formula: {f!r}")


def render_formula(f) -> str:
    """Render either kind of formula in the grammar accepted by the parsers."""
    if isinstance(f, (Equal, Not, And, Or, Forall, Exists)):
        return _fo(f)
    return _cont(f)


def render_fo(f) -> str:
    """Render an FO formula; needed for bare atoms, which are shared by both logics."""
    return _fo(f)
