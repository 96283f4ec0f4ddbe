"""The preservation check behind reduced-product theorems, and a search for
counterexamples to it.

For a sentence phi, a family M_i and a filter F the check asks, for every
tested epsilon: if {i : phi^{M_i} <= eps} is in F, is phi <= eps in the
reduced product? Conditional sentences must always pass.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..classes import ClassError, is_conditional
from ..downup import Grid
from ..filters import Filter
from ..products import DEFAULT_MAX_PRODUCT_SIZE, reduced_product
from ..structures import EvaluationError, GeneralStructure, eval_formula
from ..syntax import free_vars, vocabulary_of
from ..values import fmt
from .generators import InstanceSpec, gen_family, gen_filter, rng_for, trial_seed

VIOLATED, PRESERVED, VACUOUS = "violated", "preserved", "vacuous"


@dataclass
class TrialRecord:
    seed: Optional[int]
    factor_values: list[Fraction]
    kernel: list
    epsilon: Fraction
    product_value: Fraction
    verdict: str
    universe_sizes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["factor_values"] = [fmt(v) for v in self.factor_values]
        d["epsilon"] = fmt(self.epsilon)
        d["product_value"] = fmt(self.product_value)
        return d


def _require_sentence(phi):
    fv = free_vars(phi)
    if fv:
        raise EvaluationError(f"preservation is checked for sentences; free variables {sorted(fv)}")


def verdict(f: Filter, factor_values: Sequence[Fraction], product_value: Fraction, eps: Fraction) -> str:
    hyp = {i for i, v in zip(f.index, factor_values) if v <= eps} in f
    if not hyp:
        return VACUOUS
    return VIOLATED if product_value > eps else PRESERVED


def product_value(fam: Sequence[GeneralStructure], f: Filter, phi, max_size: int = DEFAULT_MAX_PRODUCT_SIZE) -> Fraction:
    prod, _ = reduced_product(fam, f, max_size)
    return eval_formula(prod, phi)


def check_preservation(fam: Sequence[GeneralStructure], f: Filter, phi, eps, seed: Optional[int] = None,
                       max_size: int = DEFAULT_MAX_PRODUCT_SIZE) -> TrialRecord:
    """One application of the verdict rule at a single epsilon."""
    _require_sentence(phi)
    eps = Fraction(eps)
    values = [eval_formula(m, phi) for m in fam]
    pv = product_value(fam, f, phi, max_size)
    return TrialRecord(seed, values, sorted(f.kernel), eps, pv, verdict(f, values, pv, eps), [m.size for m in fam])


def epsilons(g: Grid, factor_values: Iterable[Fraction]) -> list[Fraction]:
    """Grid points plus the exact factor values: enough to decide every epsilon."""
    return sorted(set(g.points) | set(factor_values))


def check_all_epsilons(fam, f: Filter, phi, g: Grid, seed: Optional[int] = None,
                       max_size: int = DEFAULT_MAX_PRODUCT_SIZE) -> TrialRecord:
    """Run the verdict rule at every relevant epsilon; report the first violation.

    Without a violation the record carries the least epsilon whose hypothesis
    holds (then the verdict is "preserved"), which always exists because the
    largest kernel value is tested.
    """
    _require_sentence(phi)
    values = [eval_formula(m, phi) for m in fam]
    pv = product_value(fam, f, phi, max_size)
    chosen, outcome = None, VACUOUS
    for eps in epsilons(g, values):
        v = verdict(f, values, pv, eps)
        if v == VIOLATED:
            chosen, outcome = eps, v
            break
        if v == PRESERVED and chosen is None:
            chosen, outcome = eps, v
    if chosen is None:
        chosen = max(values)
    return TrialRecord(seed, values, sorted(f.kernel), chosen, pv, outcome, [m.size for m in fam])


@dataclass(frozen=True)
class LimsupBound:
    ok: bool
    product_value: Fraction
    bound: Fraction

    def __bool__(self):
        return self.ok


def check_limsup_bound(fam, f: Filter, phi, max_size: int = DEFAULT_MAX_PRODUCT_SIZE) -> LimsupBound:
    """phi in the product is at most the max of the factor values over the kernel."""
    if not is_conditional(phi):
        raise ClassError("check_limsup_bound needs a conditional sentence")
    _require_sentence(phi)
    bound = max(eval_formula(fam[f.position(i)], phi) for i in f.kernel)
    pv = product_value(fam, f, phi, max_size)
    return LimsupBound(pv <= bound, pv, bound)


@dataclass
class Witness:
    trial: int
    seed: int
    family: list
    filter: Filter
    record: TrialRecord

    def to_dict(self) -> dict:
        return {"trial": self.trial, "seed": self.seed, "filter": str(self.filter),
                "index": list(self.filter.index), **self.record.to_dict()}


def search_counterexample(phi, budget: InstanceSpec, label: str = "search") -> Optional[Witness]:
    """Try ``budget.trials`` seeded families over phi's vocabulary; first violation or None."""
    _require_sentence(phi)
    vocab = vocabulary_of(phi)
    for n in range(budget.trials):
        seed = trial_seed(budget.seed, label, n)
        rng = rng_for(seed)
        fam = gen_family(rng, vocab, budget)
        f = gen_filter(rng, len(fam), budget.filter)
        rec = check_all_epsilons(fam, f, phi, budget.grid, seed, budget.max_product_size)
        if rec.verdict == VIOLATED:
            return Witness(n, seed, fam, f, rec)
    return None


def replay_search_trial(phi, budget: InstanceSpec, seed: int):
    """Rebuild the family and filter a search trial drew from its seed."""
    rng = rng_for(seed)
    fam = gen_family(rng, vocabulary_of(phi), budget)
    return fam, gen_filter(rng, len(fam), budget.filter)


__all__ = [
    "VIOLATED", "PRESERVED", "VACUOUS", "TrialRecord", "verdict", "product_value",
    "check_preservation", "check_all_epsilons", "epsilons", "LimsupBound", "check_limsup_bound",
    "Witness", "search_counterexample", "replay_search_trial",
]
