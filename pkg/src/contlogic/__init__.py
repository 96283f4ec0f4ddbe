"""Exact finite-model toolkit for [0,1]-valued continuous logic.

Truth values are fractions in [0, 1] with 0 meaning true. The package covers
formulas and their grammar, general structures and Leibniz reduction,
filters and reduced products, syntactic classes (conditional, Horn and
friends), the threshold translation to first-order structures, and a seeded
test harness with a command-line front end.
"""

from .values import ONE, ZERO, HALF, value, tsub, tadd, parse_value, fmt
from .connectives import (
    MonotoneConnective, eval_connective, compose_connectives, compose_all,
    identity, constant, minus_const, plus_const, halve, cap, floor_at,
)
from .syntax import (
    Vocabulary, parse_vocabulary, Var, ConstTerm, FuncTerm, Atomic, Const, Min, Max,
    TruncSub, TruncAdd, Half, Apply, Sup, Inf, Equal, Not, And, Or, Forall, Exists,
    negated, normalize, free_vars, is_sentence,
)
from .grammar import (
    ParseError, parse_cont_formula, parse_fo_formula, parse_with_vocabulary,
    render_formula, render_fo,
)
from .structures import (
    GeneralStructure, QuotientMap, StructureError, EvaluationError, eval_formula,
    leibniz_partition, leibniz_partition_bruteforce, reduce_structure, is_reduced,
    check_morphism, find_isomorphism, isomorphic, vocabulary_part,
)
from .fo import FOStructure, holds, fo_as_general, general_as_fo, fo_isomorphic
from .filters import (
    Filter, FilterError, full_filter, principal_ultrafilter, filter_from_subbasis,
    all_filters, ultrafilters_extending, limsup, limsup_by_definition, parse_filter,
)
from .products import pre_reduced_product, reduced_product, direct_product, fo_reduced_product
from .classes import (
    ClassificationReport, ClassError, classify_cont, classify_horn, fo_to_cont,
    push_unary, approx_restricted, eval_template, approximation_error,
)
from .downup import Grid, is_increasing, models_down, structure_down, structure_up, vocab_down

__version__ = "0.1.0"
