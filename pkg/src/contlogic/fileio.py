"""Text formats for structures (``.gst`` general, ``.fst`` first-order).

::

    # comments start with '#'
    vocabulary
      predicate P 2
      function F 1
      constant c
    end
    universe 3
    P 0 1 = 3/4
    F 1 -> 0
    c = 2

First-order files write predicate entries as ``true`` / ``false``. Every
table entry must be present.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .fo import FOStructure
from .structures import GeneralStructure, StructureError, tuples
from .syntax import Vocabulary
from .values import fmt, parse_value


class FormatError(ValueError):
    pass


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _read(text: str, boolean: bool):
    lines = list(_lines(text))
    if not lines or lines[0][1] != "vocabulary":
        raise FormatError("file must start with a 'vocabulary' block")
    preds, funcs, consts = [], [], []
    i = 1
    while True:
        if i >= len(lines):
            raise FormatError("unterminated vocabulary block")
        n, line = lines[i]
        i += 1
        if line == "end":
            break
        parts = line.split()
        try:
            if parts[0] == "predicate" and len(parts) == 3:
                preds.append((parts[1], int(parts[2])))
            elif parts[0] == "function" and len(parts) == 3:
                funcs.append((parts[1], int(parts[2])))
            elif parts[0] == "constant" and len(parts) == 2:
                consts.append(parts[1])
            else:
                raise ValueError
        except ValueError:
            raise FormatError(f"line {n}: bad vocabulary declaration {line!r}") from None
    vocab = Vocabulary(tuple(preds), tuple(funcs), tuple(consts))
    if i >= len(lines) or not lines[i][1].startswith("universe"):
        raise FormatError("missing 'universe n' line")
    n, line = lines[i]
    try:
        size = int(line.split()[1])
    except (IndexError, ValueError):
        raise FormatError(f"line {n}: bad universe line {line!r}") from None
    ptab = {p: {} for p, _ in vocab.predicates}
    ftab = {f: {} for f, _ in vocab.functions}
    ctab = {}
    pa, fa = vocab.pred_arity, vocab.func_arity
    for n, line in lines[i + 1:]:
        parts = line.split()
        name = parts[0]
        try:
            if name in fa:
                arrow = parts.index("->")
                args = tuple(int(x) for x in parts[1:arrow])
                if len(args) != fa[name] or len(parts) != arrow + 2:
                    raise ValueError
                if args in ftab[name]:
                    raise FormatError(f"line {n}: duplicate entry for {name}{args}")
                ftab[name][args] = int(parts[arrow + 1])
            elif name in pa:
                eq = parts.index("=")
                args = tuple(int(x) for x in parts[1:eq])
                if len(args) != pa[name] or len(parts) != eq + 2:
                    raise ValueError
                if args in ptab[name]:
                    raise FormatError(f"line {n}: duplicate entry for {name}{args}")
                raw = parts[eq + 1]
                if boolean:
                    if raw not in ("true", "false"):
                        raise ValueError
                    ptab[name][args] = raw == "true"
                else:
                    ptab[name][args] = parse_value(raw)
            elif name in vocab.constants:
                if len(parts) != 3 or parts[1] != "=":
                    raise ValueError
                ctab[name] = int(parts[2])
            else:
                raise FormatError(f"line {n}: unknown symbol {name!r}")
        except FormatError:
            raise
        except ValueError:
            raise FormatError(f"line {n}: cannot read {line!r}") from None
    for p, a in vocab.predicates:
        for t in tuples(size, a):
            if t not in ptab[p]:
                raise FormatError(f"missing entry {p} {' '.join(map(str, t))}")
    for f, a in vocab.functions:
        for t in tuples(size, a):
            if t not in ftab[f]:
                raise FormatError(f"missing entry {f} {' '.join(map(str, t))}")
    for c in vocab.constants:
        if c not in ctab:
            raise FormatError(f"missing value for constant {c}")
    return vocab, size, ptab, ftab, ctab


def loads_general(text: str) -> GeneralStructure:
    try:
        return GeneralStructure(*_read(text, boolean=False))
    except StructureError as e:
        raise FormatError(str(e)) from None


def loads_fo(text: str) -> FOStructure:
    try:
        return FOStructure(*_read(text, boolean=True))
    except StructureError as e:
        raise FormatError(str(e)) from None


def dumps(m) -> str:
    boolean = isinstance(m, FOStructure)
    out = ["vocabulary"]
    out += [f"  predicate {p} {a}" for p, a in m.vocab.predicates]
    out += [f"  function {f} {a}" for f, a in m.vocab.functions]
    out += [f"  constant {c}" for c in m.vocab.constants]
    out += ["end", f"universe {m.size}"]
    for p, a in m.vocab.predicates:
        for t in tuples(m.size, a):
            v = m.preds[p][t]
            shown = ("true" if v else "false") if boolean else fmt(Fraction(v))
            out.append(" ".join([p, *map(str, t), "=", shown]))
    for f, a in m.vocab.functions:
        for t in tuples(m.size, a):
            out.append(" ".join([f, *map(str, t), "->", str(m.funcs[f][t])]))
    for c in m.vocab.constants:
        out.append(f"{c} = {m.consts[c]}")
    return "\n".join(out) + "\n"


def load(path) -> GeneralStructure | FOStructure:
    """Read a structure; ``.fst`` files are first-order, anything else general."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return loads_fo(text) if p.suffix == ".fst" else loads_general(text)


def save(m, path) -> None:
    Path(path).write_text(dumps(m), encoding="utf-8")


__all__ = ["FormatError", "loads_general", "loads_fo", "dumps", "load", "save"]
