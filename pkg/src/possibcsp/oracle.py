"""Reference semantics by exhaustive enumeration.

Everything here walks the full cross-product of the domains, so it is only
meant for small instances and as ground truth in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Labeling, Problem, complement, negate, pi_star, satisfies

DEFAULT_BUDGET = 10**7


class BudgetExceeded(ValueError):
    def __init__(self, size, budget):
        super().__init__(
            f"enumeration needs {size} complete labelings, over the budget of {budget}"
        )
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class DistributionTable:
    """Explicit possibility value for every complete labeling."""

    entries: dict

    def __getitem__(self, labeling):
        return self.entries[labeling]

    def __len__(self):
        return len(self.entries)

    def values(self):
        return self.entries.values()

    def items(self):
        return self.entries.items()

    def replace(self, updates):
        new = dict(self.entries)
        new.update(updates)
        return DistributionTable(new)


@dataclass(frozen=True)
class BestSet:
    consistency: float
    labelings: tuple

    def __contains__(self, labeling):
        return Labeling(labeling) in set(self.labelings)


def _check_budget(p, budget):
    size = p.size()
    if budget is not None and size > budget:
        raise BudgetExceeded(size, budget)


def enumerate_best(p: Problem, budget=DEFAULT_BUDGET) -> BestSet:
    """Generate and test: keep every labeling with maximal pi_star."""
    _check_budget(p, budget)
    best = -1.0
    kept = []
    for lab in p.complete_labelings():
        value = pi_star(p, lab)
        if value > best:
            best = value
            kept = [lab]
        elif value == best:
            kept.append(lab)
    return BestSet(best, tuple(kept))


def pi_star_table(p: Problem, budget=DEFAULT_BUDGET) -> DistributionTable:
    _check_budget(p, budget)
    return DistributionTable({lab: pi_star(p, lab) for lab in p.complete_labelings()})


def possibility_measure(t: DistributionTable, k) -> float:
    return max((v for lab, v in t.items() if satisfies(lab, k)), default=0.0)


def necessity_measure(t: DistributionTable, k) -> float:
    neg = negate(k)
    return min((complement(v) for lab, v in t.items() if satisfies(lab, neg)), default=1.0)


def sub_normalization(t: DistributionTable) -> float:
    return complement(max(t.values(), default=0.0))


def distribution_satisfies(t: DistributionTable, p: Problem) -> bool:
    """Does ``t`` give every valued constraint at least its necessity?"""
    return all(necessity_measure(t, vc.constraint) >= vc.necessity for vc in p.constraints)
