"""Depth-first branch and bound over the labeling tree.

The bound of a node is the minimum of ``1 - necessity`` over the
constraints its labeling violates among those it fully covers.  It only
decreases going down, is exact at the leaves, and is maintained
incrementally: extending to the variable at depth ``j`` only has to check
the constraints that become fully scoped at that step.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .core import Labeling, Problem, ProblemError, violation_bound
from .propagate import forward_check

LOG = logging.getLogger(__name__)


class Heuristic(str, enum.Enum):
    DECLARED = "declared"
    MAX_DEGREE = "max-degree"
    MAX_CARDINALITY = "max-cardinality"


class ValueOrder(str, enum.Enum):
    DECLARED = "declared"
    BOUND = "bound"


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    ALPHA_PRUNED = "ALPHA-PRUNED"
    BETA_STOPPED = "BETA-STOPPED"
    BUDGET_EXHAUSTED = "BUDGET-EXHAUSTED"


class Action(str, enum.Enum):
    EXTEND = "EXTEND"
    CUTOFF = "CUTOFF"
    LEAF = "LEAF"
    IMPROVE = "IMPROVE"


@dataclass(frozen=True)
class TraceEvent:
    depth: int
    var: str
    label: str
    bound: float
    action: Action
    labeling: Labeling


@dataclass(frozen=True)
class SearchOptions:
    variable_order: Union[Sequence[str], Heuristic, str] = Heuristic.DECLARED
    value_order: ValueOrder = ValueOrder.DECLARED
    alpha0: float = 0.0
    beta0: float = 1.0
    all_best: bool = False
    node_limit: Optional[int] = None
    forward_check: bool = False

    def __post_init__(self):
        for name in ("alpha0", "beta0"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} is outside [0, 1]")
        if self.alpha0 > self.beta0:
            raise ValueError(f"alpha0={self.alpha0} exceeds beta0={self.beta0}")
        if self.node_limit is not None and self.node_limit < 0:
            raise ValueError("node_limit must be non-negative")
        object.__setattr__(self, "value_order", ValueOrder(self.value_order))
        vo = self.variable_order
        if isinstance(vo, str):
            object.__setattr__(self, "variable_order", Heuristic(vo))
        else:
            object.__setattr__(self, "variable_order", tuple(vo))


@dataclass
class SearchResult:
    best_value: float
    best_labelings: tuple
    status: Status
    nodes_expanded: int = 0
    cutoffs: int = 0
    order: tuple = ()
    improvements: list = field(default_factory=list)


def newly_scoped(p: Problem, order: Sequence[str], j: int):
    """Constraints completed when ``order[j]`` is assigned after ``order[:j]``."""
    if not 0 <= j < len(order):
        raise IndexError(f"step {j} outside 0..{len(order) - 1}")
    before = set(order[:j])
    upto = before | {order[j]}
    return [vc for vc in p.constraints
            if set(vc.scope) <= upto and not set(vc.scope) <= before]


def extend_bound(beta: float, new_constraints, l_extended) -> float:
    for vc in new_constraints:
        missing = [n for n in vc.scope if n not in l_extended]
        if missing:
            raise ProblemError(f"constraint {vc.id!r} has unassigned scope variables {missing}")
    return violation_bound(new_constraints, l_extended, start=beta)


def order_heuristic(p: Problem, tag) -> list:
    tag = Heuristic(tag)
    names = list(p.names)
    if tag is Heuristic.DECLARED:
        return names
    if tag is Heuristic.MAX_DEGREE:
        degree = {n: 0 for n in names}
        for vc in p.constraints:
            for n in vc.scope:
                degree[n] += 1
        # sorted() is stable, so ties keep declaration order
        return sorted(names, key=lambda n: -degree[n])
    # greedy: pick the variable that completes the most constraints now,
    # then the one involved with most already-ordered variables, then degree
    chosen = []
    placed = set()
    remaining = list(names)
    while remaining:
        def score(n):
            upto = placed | {n}
            completed = sum(1 for vc in p.constraints
                            if n in vc.scope and set(vc.scope) <= upto)
            linked = sum(1 for vc in p.constraints
                         if n in vc.scope and placed & set(vc.scope))
            degree = sum(1 for vc in p.constraints if n in vc.scope)
            return (completed, linked, degree)
        best = max(remaining, key=score)  # max() returns the first maximal item
        chosen.append(best)
        placed.add(best)
        remaining.remove(best)
    return chosen


def resolve_order(p: Problem, variable_order) -> list:
    if isinstance(variable_order, (Heuristic, str)):
        return order_heuristic(p, variable_order)
    order = list(variable_order)
    if sorted(order) != sorted(p.names) or len(set(order)) != len(order):
        raise ValueError(f"variable order {order} is not a permutation of {list(p.names)}")
    return order


class _Stop(Exception):
    pass


class _Search:
    def __init__(self, p, opts, trace):
        self.p = p
        self.opts = opts
        self.trace = trace
        self.order = resolve_order(p, opts.variable_order)
        self.steps = [newly_scoped(p, self.order, j) for j in range(len(self.order))]
        self.alpha = opts.alpha0
        self.found = False
        self.best = []
        self.nodes = 0
        self.cutoffs = 0
        self.status = Status.OPTIMAL
        self.improvements = []

    def pruned(self, bound):
        # before any incumbent: leaves must beat alpha0 strictly;
        # collecting ties needs the strict test once an incumbent exists
        if self.found and self.opts.all_best:
            return bound < self.alpha
        return bound <= self.alpha

    def emit(self, depth, labeling, bound, action):
        if self.trace is not None:
            var = self.order[depth - 1]
            self.trace(TraceEvent(depth, var, labeling[var], bound, action, labeling))

    def children(self, depth, labeling, beta, allowed):
        var = self.order[depth]
        domain = self.p.domain(var)
        if allowed is not None:
            domain = [v for v in domain if v in allowed]
        kids = []
        for label in domain:
            child = labeling.extend(var, label)
            kids.append((label, child, extend_bound(beta, self.steps[depth], child)))
        if self.opts.value_order is ValueOrder.BOUND:
            kids.sort(key=lambda kid: -kid[2])
        return kids

    def run(self):
        try:
            self.visit(0, Labeling(), 1.0)
        except _Stop:
            pass

    def live_labels(self, depth, labeling, beta):
        """Forward checking: labels of the next variable that survive, or None when disabled."""
        if not self.opts.forward_check or depth >= len(self.order):
            return None
        future = self.order[depth:]
        table = forward_check(self.p, labeling, future)
        live = {}
        for var in future:
            keep = {v for v, b in table[var].items() if not self.pruned(min(beta, b))}
            if not keep:
                return {}
            live[var] = keep
        return live[self.order[depth]]

    def visit(self, depth, labeling, beta):
        n = len(self.order)
        if depth == n:
            self.leaf(labeling, beta)
            return
        allowed = self.live_labels(depth, labeling, beta) if depth > 0 else None
        if allowed is not None and not allowed:
            self.cutoffs += 1
            return
        for label, child, bound in self.children(depth, labeling, beta, allowed):
            if self.opts.node_limit is not None and self.nodes >= self.opts.node_limit:
                self.status = Status.BUDGET_EXHAUSTED
                raise _Stop
            self.nodes += 1
            if self.pruned(bound):
                self.cutoffs += 1
                self.emit(depth + 1, child, bound, Action.CUTOFF)
                continue
            if depth + 1 == n:
                self.visit(depth + 1, child, bound)
            else:
                self.emit(depth + 1, child, bound, Action.EXTEND)
                self.visit(depth + 1, child, bound)

    def leaf(self, labeling, value):
        depth = len(self.order)
        if not self.found or value > self.alpha:
            self.found = True
            self.alpha = value
            self.best = [labeling]
            self.improvements.append((self.nodes, value))
            LOG.debug("improved to %s after %d nodes", value, self.nodes)
            self.emit(depth, labeling, value, Action.IMPROVE)
        else:
            self.best.append(labeling)
            self.emit(depth, labeling, value, Action.LEAF)
        if self.opts.beta0 < 1.0 and value >= self.opts.beta0:
            self.status = Status.BETA_STOPPED
            raise _Stop
        if value >= 1.0 and not self.opts.all_best:
            # nothing can improve on a fully compatible labeling
            raise _Stop


def solve(p: Problem, opts: Optional[SearchOptions] = None,
          trace: Optional[Callable[[TraceEvent], None]] = None) -> SearchResult:
    """Compute the consistency degree and best labeling(s) of ``p``."""
    opts = opts or SearchOptions()
    s = _Search(p, opts, trace)
    s.run()
    best = tuple(s.best)
    value = s.alpha if s.found else 0.0
    status = s.status
    if not s.found and status is Status.OPTIMAL:
        if opts.alpha0 > 0.0:
            status = Status.ALPHA_PRUNED
        else:
            # every node had bound 0, so every complete labeling ties at 0
            labelings = p.complete_labelings()
            best = tuple(labelings) if opts.all_best else (next(iter(labelings)),)
    return SearchResult(
        best_value=value,
        best_labelings=best,
        status=status,
        nodes_expanded=s.nodes,
        cutoffs=s.cutoffs,
        order=tuple(s.order),
        improvements=s.improvements,
    )
