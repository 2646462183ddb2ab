"""Possibilistic arc-consistency.

Rather than deleting unsupported labels, revision computes for each label
the best value it can reach against one constraint (plus the unary
constraints on that constraint's scope) and records the shortfall as a
unary FORBID constraint of necessity ``1 - bound``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Mode,
    Problem,
    ProblemError,
    ValuedConstraint,
    check_necessity,
    complement,
    unary_value,
    violation_bound,
)


@dataclass(frozen=True)
class UnaryInference:
    variable: str
    label: str
    necessity: float

    def as_constraint(self, p: Problem, cid=None) -> ValuedConstraint:
        k = p.make_constraint((self.variable,), [(self.label,)], Mode.FORBID)
        return ValuedConstraint(cid or f"ac:{self.variable}={self.label}", k, self.necessity)


@dataclass(frozen=True)
class AcResult:
    closed_problem: Problem
    delta: float
    inferences: tuple
    rounds: int
    arc_consistent: bool


def _unary_on(p, names):
    names = set(names)
    return [vc for vc in p.constraints if len(vc.scope) == 1 and vc.scope[0] in names]


def _check_incidence(p, j, k):
    if j not in k.scope:
        raise ProblemError(f"variable {j!r} is not in the scope of {k.id!r}")
    if len(k.scope) < 2:
        raise ProblemError(f"constraint {k.id!r} is unary")


def bound_b(p: Problem, j: str, v: str, k: ValuedConstraint) -> float:
    """Best value of ``{j: v}`` against ``k`` and the unary constraints on its scope."""
    _check_incidence(p, j, k)
    if v not in p.domain(j):
        raise ProblemError(f"label {v!r} not in domain of {j!r}")
    pool = [k] + _unary_on(p, k.scope)
    domains = [(v,) if n == j else p.domain(n) for n in k.scope]
    best = 0.0
    for values in itertools.product(*domains):
        best = max(best, violation_bound(pool, dict(zip(k.scope, values))))
        if best >= 1.0:
            break
    return best


def revise(p: Problem, j: str, k: ValuedConstraint) -> list:
    _check_incidence(p, j, k)
    unary = _unary_on(p, (j,))
    out = []
    for v in p.domain(j):
        b = bound_b(p, j, v, k)
        if b < violation_bound(unary, {j: v}):
            out.append(UnaryInference(j, v, complement(b)))
    return out


def _install(p, inf):
    """Merge ``inf`` into ``p`` by max necessity on the (variable, label) FORBID."""
    constraints = list(p.constraints)
    for i, vc in enumerate(constraints):
        c = vc.constraint
        if c.scope == (inf.variable,) and c.mode is Mode.FORBID and c.tuples == {(inf.label,)}:
            if vc.necessity >= inf.necessity:
                return p
            constraints[i] = ValuedConstraint(vc.id, c, inf.necessity)
            return p.with_constraints(constraints)
    constraints.append(inf.as_constraint(p))
    return p.with_constraints(constraints)


def label_values(p: Problem) -> dict:
    """Compatibility of each single-label labeling under the unary constraints only."""
    return {var.name: {v: unary_value(p, var.name, v) for v in var.domain}
            for var in p.variables}


def compute_delta(p: Problem) -> float:
    table = label_values(p)
    return min((max(vals.values()) for vals in table.values()), default=1.0)


def enforce_ac(p: Problem, gamma: float = 0.0) -> AcResult:
    """Revise every (variable, non-unary constraint) pair until nothing changes."""
    gamma = check_necessity(gamma, "gamma")
    work = p
    incidences = [(j, k.id) for k in p.constraints if len(k.scope) > 1 for j in k.scope]
    rounds = 0
    while True:
        rounds += 1
        changed = False
        for j, cid in incidences:
            k = work.constraint(cid)
            for inf in revise(work, j, k):
                if inf.necessity >= gamma:
                    work = _install(work, inf)
                    changed = True
        if not changed:
            break

    before = label_values(p)
    after = label_values(work)
    inferences = []
    for var in p.variables:
        for v in var.domain:
            if after[var.name][v] < before[var.name][v]:
                inferences.append(UnaryInference(var.name, v, complement(after[var.name][v])))
    delta = compute_delta(work)
    return AcResult(
        closed_problem=work,
        delta=delta,
        inferences=tuple(inferences),
        rounds=rounds,
        arc_consistent=delta > 0.0,
    )


def forward_check(p: Problem, partial, unassigned) -> dict:
    """Per-label bounds for the unassigned variables given ``partial``.

    A label's bound is the minimum over the constraints that ``partial``
    plus that label fully scope (and that mention the variable).
    """
    assigned = set(partial)
    table = {}
    for j in unassigned:
        relevant = [vc for vc in p.constraints
                    if j in vc.scope and set(vc.scope) <= assigned | {j}]
        row = {}
        for v in p.domain(j):
            ext = dict(partial)
            ext[j] = v
            row[v] = violation_bound(relevant, ext)
        table[j] = row
    return table
