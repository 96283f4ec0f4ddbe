"""Products of indexed families modulo a filter.

Families are sequences aligned with ``filter.index`` (the index set in
sorted order). Product elements are numbered in row-major order of their
coordinate tuples; :func:`product_elements` gives the tuple for each number.
"""

from __future__ import annotations

import itertools
from math import prod
from typing import Sequence

from .fo import FOStructure
from .filters import Filter, limsup
from .structures import GeneralStructure, QuotientMap, StructureError, reduce_structure, tuples

DEFAULT_MAX_PRODUCT_SIZE = 4096


class ProductTooLarge(StructureError):
    pass


def _check_family(ms: Sequence, f: Filter, max_size: int):
    if not ms:
        raise StructureError("empty family")
    if len(ms) != len(f.index):
        raise StructureError(f"family has {len(ms)} members, index set has {len(f.index)}")
    vocab = ms[0].vocab
    if any(m.vocab != vocab for m in ms):
        raise StructureError("family members have different vocabularies")
    size = prod(m.size for m in ms)
    if size > max_size:
        raise ProductTooLarge(f"product universe would have {size} elements (limit {max_size})")
    return vocab, size


def product_elements(ms: Sequence) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(m.size) for m in ms)))


def product_index(ms: Sequence, coords: Sequence[int]) -> int:
    out = 0
    for m, c in zip(ms, coords):
        out = out * m.size + c
    return out


def _coordinatewise(ms, vocab, elems, index_of):
    funcs = {}
    for name, arity in vocab.functions:
        table = {}
        for t in tuples(len(elems), arity):
            coords = tuple(m.funcs[name][tuple(elems[a][i] for a in t)] for i, m in enumerate(ms))
            table[t] = index_of[coords]
        funcs[name] = table
    consts = {c: index_of[tuple(m.consts[c] for m in ms)] for c in vocab.constants}
    return funcs, consts


def pre_reduced_product(
    ms: Sequence[GeneralStructure], f: Filter, max_size: int = DEFAULT_MAX_PRODUCT_SIZE
) -> GeneralStructure:
    """Cartesian product with predicates valued by limsup along ``f``."""
    vocab, _ = _check_family(ms, f, max_size)
    elems = product_elements(ms)
    index_of = {e: n for n, e in enumerate(elems)}
    preds = {}
    for name, arity in vocab.predicates:
        table = {}
        for t in tuples(len(elems), arity):
            g = [m.preds[name][tuple(elems[a][i] for a in t)] for i, m in enumerate(ms)]
            table[t] = limsup(f, g)
        preds[name] = table
    funcs, consts = _coordinatewise(ms, vocab, elems, index_of)
    return GeneralStructure(vocab, len(elems), preds, funcs, consts)


def reduced_product(
    ms: Sequence[GeneralStructure], f: Filter, max_size: int = DEFAULT_MAX_PRODUCT_SIZE
) -> tuple[GeneralStructure, QuotientMap]:
    """Leibniz reduction of the pre-reduced product, with the class map a -> a_F."""
    return reduce_structure(pre_reduced_product(ms, f, max_size))


def direct_product(ms: Sequence[GeneralStructure], max_size: int = DEFAULT_MAX_PRODUCT_SIZE) -> GeneralStructure:
    from .filters import full_filter

    return pre_reduced_product(ms, full_filter(range(len(ms))), max_size)


def fo_reduced_product(
    ks: Sequence[FOStructure], f: Filter, max_size: int = DEFAULT_MAX_PRODUCT_SIZE
) -> FOStructure:
    """Classical reduced product: tuples identified when they agree on a set in ``f``.

    Element ``n`` of the result is the class whose least member (in row-major
    order) is listed ``n``-th.
    """
    vocab, _ = _check_family(ks, f, max_size)
    elems = product_elements(ks)
    kernel_pos = [i for i, label in enumerate(f.index) if label in f.kernel]

    def agree_set(a, b):
        return {f.index[i] for i in range(len(ks)) if a[i] == b[i]}

    classes: dict[tuple, int] = {}
    class_of = []
    reps = []
    for e in elems:
        key = tuple(e[i] for i in kernel_pos)
        if key not in classes:
            classes[key] = len(reps)
            reps.append(e)
        class_of.append(classes[key])
    # the kernel projection is exactly F-agreement; spot-check against the definition
    for e, c in zip(elems, class_of):
        if agree_set(e, reps[c]) not in f:
            raise StructureError("F-agreement classes are inconsistent")
    k = len(reps)
    elem_index = {e: n for n, e in enumerate(elems)}
    preds = {}
    for name, arity in vocab.predicates:
        table = {}
        for t in tuples(k, arity):
            truth = {f.index[i] for i, m in enumerate(ks) if m.preds[name][tuple(reps[a][i] for a in t)]}
            table[t] = truth in f
        preds[name] = table
    funcs = {}
    for name, arity in vocab.functions:
        table = {}
        for t in tuples(k, arity):
            coords = tuple(m.funcs[name][tuple(reps[a][i] for a in t)] for i, m in enumerate(ks))
            table[t] = class_of[elem_index[coords]]
        funcs[name] = table
    consts = {c: class_of[elem_index[tuple(m.consts[c] for m in ks)]] for c in vocab.constants}
    return FOStructure(vocab, k, preds, funcs, consts)


__all__ = [
    "DEFAULT_MAX_PRODUCT_SIZE", "ProductTooLarge", "product_elements", "product_index",
    "pre_reduced_product", "reduced_product", "direct_product", "fo_reduced_product",
]
