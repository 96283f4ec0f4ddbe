"""Proper filters over finite index sets, represented by their kernels.

On a finite set every filter is principal: it consists of the supersets of
the intersection of its members (the kernel). A proper filter has a nonempty
kernel; ultrafilters have singleton kernels.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

DEBUG = bool(os.environ.get("CONTLOGIC_DEBUG"))


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class Filter:
    index: tuple
    kernel: frozenset

    def __post_init__(self):
        idx = tuple(sorted(set(self.index)))
        if not idx:
            raise FilterError("index set must be nonempty")
        ker = frozenset(self.kernel)
        if not ker:
            raise FilterError("empty kernel: the filter would not be proper")
        if not ker <= set(idx):
            raise FilterError(f"kernel {sorted(ker)} not contained in index set {list(idx)}")
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "kernel", ker)

    def __contains__(self, subset: Iterable) -> bool:
        return self.kernel <= set(subset)

    @property
    def is_ultra(self) -> bool:
        return len(self.kernel) == 1

    def members(self):
        """Every J in the filter (exponential in |I \\ kernel|)."""
        rest = [i for i in self.index if i not in self.kernel]
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                yield self.kernel | frozenset(extra)

    def position(self, i) -> int:
        return self.index.index(i)

    def __str__(self) -> str:
        return "kernel=" + ",".join(str(i) for i in sorted(self.kernel))


def full_filter(index: Iterable) -> Filter:
    """The filter {I}."""
    idx = tuple(index)
    return Filter(idx, frozenset(idx))


def principal_ultrafilter(index: Iterable, i) -> Filter:
    return Filter(tuple(index), frozenset([i]))


def filter_from_subbasis(index: Iterable, sets: Iterable[Iterable]) -> Filter:
    """Filter generated by ``sets``; fails when they have empty intersection."""
    idx = tuple(index)
    if not idx:
        raise FilterError("index set must be nonempty")
    kernel = set(idx)
    for s in sets:
        s = set(s)
        if not s <= set(idx):
            raise FilterError(f"{sorted(s)} is not a subset of the index set")
        kernel &= s
    if not kernel:
        raise FilterError("subbasis lacks the finite intersection property")
    return Filter(idx, frozenset(kernel))


def all_filters(index: Iterable) -> list[Filter]:
    idx = tuple(sorted(index))
    out = []
    for r in range(1, len(idx) + 1):
        for k in itertools.combinations(idx, r):
            out.append(Filter(idx, frozenset(k)))
    return out


def ultrafilters_extending(f: Filter) -> list[Filter]:
    """All ultrafilters containing ``f``: the principal ones at kernel points."""
    return [principal_ultrafilter(f.index, i) for i in sorted(f.kernel)]


def _as_mapping(f: Filter, g) -> Mapping:
    if isinstance(g, Mapping):
        missing = set(f.index) - set(g)
        if missing:
            raise FilterError(f"sequence undefined at {sorted(missing)}")
        return g
    g = list(g)
    if len(g) != len(f.index):
        raise FilterError(f"sequence has {len(g)} entries, index set has {len(f.index)}")
    return dict(zip(f.index, g))


def limsup_by_definition(f: Filter, g) -> Fraction:
    """inf over J in f of sup over i in J of g(i), enumerating the members."""
    g = _as_mapping(f, g)
    return min(max(g[i] for i in J) for J in f.members())


def limsup(f: Filter, g, check: bool | None = None) -> Fraction:
    """limsup of ``g`` along ``f``: the max of g over the kernel.

    With ``check`` (or CONTLOGIC_DEBUG set) the inf-of-sups definition is
    evaluated as well and the two are asserted equal.
    """
    g = _as_mapping(f, g)
    out = max(g[i] for i in f.kernel)
    if check if check is not None else DEBUG:
        slow = limsup_by_definition(f, g)
        if slow != out:
            raise AssertionError(f"limsup mismatch: kernel max {out} vs definition {slow}")
    return out


def limit_along(u: Filter, g) -> Fraction:
    """The limit of ``g`` along an ultrafilter: its value at the principal point."""
    if not u.is_ultra:
        raise FilterError("limit_along needs an ultrafilter")
    g = _as_mapping(u, g)
    (i,) = u.kernel
    return g[i]


def _parse_index(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_filter(text: str, index: Sequence) -> Filter:
    """Parse ``full``, ``kernel=1,3`` or ``subbasis={1,2};{2,3}``."""
    t = text.strip()
    if t == "full":
        return full_filter(index)
    key, sep, rest = t.partition("=")
    if not sep:
        raise FilterError(f"cannot parse filter {text!r}")
    key = key.strip()
    rest = rest.strip().strip("'\"")
    if key == "kernel":
        return Filter(tuple(index), frozenset(_parse_index(x) for x in rest.split(",") if x.strip()))
    if key == "subbasis":
        sets = []
        for part in rest.split(";"):
            part = part.strip()
            if not part:
                continue
            if not (part.startswith("{") and part.endswith("}")):
                raise FilterError(f"subbasis element {part!r} must look like {{1,2}}")
            sets.append([_parse_index(x) for x in part[1:-1].split(",") if x.strip()])
        return filter_from_subbasis(index, sets)
    raise FilterError(f"unknown filter form {key!r}")


__all__ = [
    "Filter", "FilterError", "full_filter", "principal_ultrafilter", "filter_from_subbasis",
    "all_filters", "ultrafilters_extending", "limsup", "limsup_by_definition", "limit_along",
    "parse_filter",
]
