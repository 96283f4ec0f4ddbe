"""Threshold translation between general structures and first-order ones.

A grid of resolution ``k`` has points j/2^k for 0 <= j < 2^k. Each n-ary
predicate P becomes n-ary predicates ``P_le_<r>`` recording "P <= r" for
every grid point r. Going down needs a reduced structure; going up takes the
least grid point whose threshold holds (1 when none does) and then reduces.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .fo import FOStructure
from .structures import GeneralStructure, QuotientMap, eval_formula, is_reduced, reduce_structure
from .syntax import Vocabulary
from .values import ONE

_THRESHOLD = re.compile(r"^(?P<base>.+)_le_(?P<num>\d+)(?:_(?P<den>\d+))?$")


class DownUpError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    k: int = 3

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("grid resolution must be at least 1")

    @property
    def points(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(j, 2 ** self.k) for j in range(2 ** self.k))

    @property
    def values(self) -> tuple[Fraction, ...]:
        """Grid points together with 1: the values that survive a round trip."""
        return self.points + (ONE,)


def threshold_name(pred: str, r: Fraction) -> str:
    if r == 0:
        return f"{pred}_le_0"
    return f"{pred}_le_{r.numerator}_{r.denominator}"


def parse_threshold(name: str) -> tuple[str, Fraction] | None:
    m = _THRESHOLD.match(name)
    if not m:
        return None
    num = int(m["num"])
    den = int(m["den"]) if m["den"] else 1
    r = Fraction(num, den)
    if m["den"] is None and num != 0:
        return None
    if threshold_name(m["base"], r) != name or r >= 1:
        return None
    return m["base"], r


def vocab_down(v: Vocabulary, g: Grid) -> Vocabulary:
    preds = [(threshold_name(p, r), a) for p, a in v.predicates for r in g.points]
    return Vocabulary(tuple(preds), v.functions, v.constants)


def structure_down(m: GeneralStructure, g: Grid) -> FOStructure:
    """M-down: ``P_le_r(x)`` holds iff P(x) <= r."""
    if not is_reduced(m):
        raise DownUpError("structure_down needs a reduced structure")
    allowed = set(g.values)
    off = sorted({v for v in m.values() if v not in allowed})
    if off:
        warnings.warn(f"values {[str(v) for v in off]} are off the grid; the round trip will not be exact")
    preds = {}
    for p, _ in m.vocab.predicates:
        table = m.preds[p]
        for r in g.points:
            preds[threshold_name(p, r)] = {t: v <= r for t, v in table.items()}
    return FOStructure(vocab_down(m.vocab, g), m.size, preds, dict(m.funcs), dict(m.consts))


def _split_vocabulary(v: Vocabulary):
    """Map base predicate -> (arity, sorted thresholds). Raises if not threshold shaped."""
    groups: dict[str, tuple[int, list]] = {}
    for name, arity in v.predicates:
        parsed = parse_threshold(name)
        if parsed is None:
            raise DownUpError(f"predicate {name!r} is not a threshold predicate")
        base, r = parsed
        ar, rs = groups.setdefault(base, (arity, []))
        if ar != arity:
            raise DownUpError(f"thresholds of {base} disagree on arity")
        rs.append(r)
    return {b: (a, sorted(rs)) for b, (a, rs) in groups.items()}


@dataclass(frozen=True)
class IncreasingCheck:
    ok: bool
    violation: str | None = None

    def __bool__(self):
        return self.ok


def is_increasing(k: FOStructure) -> IncreasingCheck:
    """True iff ``P_le_r`` implies ``P_le_s`` whenever r <= s."""
    groups = _split_vocabulary(k.vocab)
    for base, (_, rs) in sorted(groups.items()):
        for r, s in zip(rs, rs[1:]):
            lo, hi = k.preds[threshold_name(base, r)], k.preds[threshold_name(base, s)]
            for t, v in lo.items():
                if v and not hi[t]:
                    return IncreasingCheck(False, f"{threshold_name(base, r)}{t} holds but {threshold_name(base, s)}{t} fails")
    return IncreasingCheck(True)


def vocab_up(v: Vocabulary) -> Vocabulary:
    groups = _split_vocabulary(v)
    return Vocabulary(tuple((b, a) for b, (a, _) in groups.items()), v.functions, v.constants)


def structure_up_unreduced(k: FOStructure, g: Grid) -> GeneralStructure:
    """The general structure before reduction; P = least grid s with P_le_s, else 1."""
    check = is_increasing(k)
    if not check:
        raise DownUpError(f"structure is not increasing: {check.violation}")
    groups = _split_vocabulary(k.vocab)
    allowed = set(g.points)
    preds = {}
    for base, (arity, rs) in groups.items():
        if not set(rs) <= allowed:
            raise DownUpError(f"thresholds of {base} are not on the grid k={g.k}")
        tables = [(r, k.preds[threshold_name(base, r)]) for r in rs]
        row = {}
        for t in tables[0][1]:
            row[t] = next((r for r, tab in tables if tab[t]), ONE)
        preds[base] = row
    return GeneralStructure(vocab_up(k.vocab), k.size, preds, dict(k.funcs), dict(k.consts))


def structure_up(k: FOStructure, g: Grid) -> GeneralStructure:
    """K-up: decode the thresholds, then take the Leibniz reduction."""
    return reduce_structure(structure_up_unreduced(k, g))[0]


def structure_up_with_map(k: FOStructure, g: Grid) -> tuple[GeneralStructure, QuotientMap]:
    return reduce_structure(structure_up_unreduced(k, g))


def models_down(k: FOStructure, theory, g: Grid) -> bool:
    """Whether K models the threshold translation of a finite theory.

    The translated theory is not computed; K satisfies it exactly when K is
    increasing and every sentence of ``theory`` takes value 0 in K-up.
    """
    if not is_increasing(k):
        return False
    m = structure_up(k, g)
    return all(eval_formula(m, phi) == 0 for phi in theory)


__all__ = [
    "models_down",
    "Grid", "DownUpError", "IncreasingCheck", "threshold_name", "parse_threshold",
    "vocab_down", "vocab_up", "structure_down", "is_increasing", "structure_up",
    "structure_up_unreduced", "structure_up_with_map",
]
