"""Domain types and exact semantics for possibilistic CSPs.

A problem is a set of finite-domain variables plus necessity-valued
extensional constraints.  The value of a complete labeling is the minimum
of ``1 - necessity`` over the constraints it violates (1 when it violates
nothing); every other module builds on :func:`pi_star` and
:func:`partial_bound`.
"""

from __future__ import annotations

import enum
import functools
import itertools
from decimal import Decimal
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional

_FORBIDDEN_CHARS = set(";{}#")


@functools.lru_cache(maxsize=4096)
def complement(x: float) -> float:
    """``1 - x`` computed on the shortest decimal form of ``x``.

    Keeps ``complement(0.8) == 0.2`` and ``complement(complement(x)) == x``
    for the short decimal literals necessities are written with.
    """
    return float(Decimal(1) - Decimal(repr(float(x))))


class ProblemError(ValueError):
    """Raised when a problem, constraint or labeling breaks an invariant."""


def check_token(text, what="token"):
    if not isinstance(text, str) or not text:
        raise ProblemError(f"{what} must be a non-empty string, got {text!r}")
    if any(c.isspace() or c in _FORBIDDEN_CHARS for c in text):
        raise ProblemError(f"{what} {text!r} contains whitespace or one of ';{{}}#'")
    return text


def check_necessity(value, what="necessity"):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ProblemError(f"{what} must be a number, got {value!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ProblemError(f"{what} {value!r} is outside [0, 1]")
    return value


class Labeling(Mapping):
    """Immutable, hashable assignment of labels to variable names."""

    __slots__ = ("_data", "_hash")

    def __init__(self, assignments=(), **kwargs):
        data = dict(assignments)
        data.update(kwargs)
        self._data = data
        self._hash = None

    def __getitem__(self, key):
        return self._data[key]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._data == dict(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self._data.items())
        return f"Labeling({inner})"

    def extend(self, var, label):
        new = dict(self._data)
        new[var] = label
        return Labeling(new)

    def restrict(self, names):
        return tuple(self._data[n] for n in names)

    def covers(self, names):
        return all(n in self._data for n in names)


@dataclass(frozen=True)
class DomainVariable:
    name: str
    domain: tuple

    def __post_init__(self):
        check_token(self.name, "variable name")
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ProblemError(f"variable {self.name!r} has an empty domain")
        for label in self.domain:
            check_token(label, "label")
        if len(set(self.domain)) != len(self.domain):
            raise ProblemError(f"variable {self.name!r} has duplicate labels")


class Mode(str, enum.Enum):
    ALLOW = "allow"
    FORBID = "forbid"

    def flipped(self):
        return Mode.FORBID if self is Mode.ALLOW else Mode.ALLOW


@dataclass(frozen=True)
class Constraint:
    """Extensional relation over ``scope``.

    ``domains`` holds the domain of each scope variable (same order as
    ``scope``); it is needed to take complements and to enumerate the
    semantic relation.
    """

    scope: tuple
    tuples: frozenset
    mode: Mode
    domains: tuple

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "domains", tuple(tuple(d) for d in self.domains))
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.scope:
            raise ProblemError("constraint scope is empty")
        if len(set(self.scope)) != len(self.scope):
            raise ProblemError(f"constraint scope {self.scope} has duplicates")
        if len(self.domains) != len(self.scope):
            raise ProblemError("constraint needs one domain per scope variable")
        for t in self.tuples:
            if len(t) != len(self.scope):
                raise ProblemError(f"tuple {t} does not match scope arity {len(self.scope)}")
            for name, dom, lab in zip(self.scope, self.domains, t):
                if lab not in dom:
                    raise ProblemError(f"label {lab!r} not in domain of {name!r}")

    @property
    def arity(self):
        return len(self.scope)

    def contains(self, values):
        """Membership of a scope-ordered tuple in the semantic relation."""
        return (tuple(values) in self.tuples) == (self.mode is Mode.ALLOW)

    def cross_product(self):
        return itertools.product(*self.domains)

    def relation(self):
        """The semantic relation as an explicit set of tuples."""
        if self.mode is Mode.ALLOW:
            return set(self.tuples)
        return {t for t in self.cross_product() if t not in self.tuples}


def full_relation(scope, domains):
    return Constraint(scope, frozenset(), Mode.FORBID, domains)


def empty_relation(scope, domains):
    return Constraint(scope, frozenset(), Mode.ALLOW, domains)


@dataclass(frozen=True)
class ValuedConstraint:
    id: str
    constraint: Constraint
    necessity: float

    def __post_init__(self):
        check_token(self.id, "constraint id")
        object.__setattr__(self, "necessity", check_necessity(self.necessity))

    @property
    def scope(self):
        return self.constraint.scope

    def violated_by(self, labeling):
        """True when ``labeling`` covers the scope and falls outside the relation."""
        c = self.constraint
        if not all(n in labeling for n in c.scope):
            return False
        return not c.contains(tuple(labeling[n] for n in c.scope))


@dataclass(frozen=True)
class Problem:
    name: str
    variables: tuple
    constraints: tuple = ()
    _domains: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_token(self.name, "problem name")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        domains = {}
        for v in self.variables:
            if v.name in domains:
                raise ProblemError(f"duplicate variable name {v.name!r}")
            domains[v.name] = v.domain
        object.__setattr__(self, "_domains", domains)
        for vc in self.constraints:
            for name, dom in zip(vc.scope, vc.constraint.domains):
                if name not in domains:
                    raise ProblemError(f"constraint {vc.id!r} mentions undeclared variable {name!r}")
                if tuple(dom) != domains[name]:
                    raise ProblemError(
                        f"constraint {vc.id!r} carries a domain for {name!r} that differs from its declaration"
                    )

    @property
    def names(self):
        return tuple(v.name for v in self.variables)

    def domain(self, name):
        try:
            return self._domains[name]
        except KeyError:
            raise ProblemError(f"unknown variable {name!r}") from None

    def domains_of(self, scope):
        return tuple(self.domain(n) for n in scope)

    def constraint(self, cid):
        for vc in self.constraints:
            if vc.id == cid:
                return vc
        raise KeyError(cid)

    def make_constraint(self, scope, tuples, mode=Mode.ALLOW):
        return Constraint(tuple(scope), frozenset(map(tuple, tuples)), Mode(mode), self.domains_of(scope))

    def with_constraints(self, constraints):
        return Problem(self.name, self.variables, tuple(constraints))

    def labeling(self, assignments=(), **kwargs):
        """Build a validated labeling for this problem."""
        lab = Labeling(assignments, **kwargs)
        for name, value in lab.items():
            if value not in self.domain(name):
                raise ProblemError(f"label {value!r} not in domain of {name!r}")
        return lab

    def is_complete(self, labeling):
        return len(labeling) == len(self.variables) and labeling.covers(self.names)

    def complete_labelings(self):
        """All complete labelings, lexicographic in (variable order, domain order)."""
        names = self.names
        for values in itertools.product(*(v.domain for v in self.variables)):
            yield Labeling(zip(names, values))

    def size(self):
        n = 1
        for v in self.variables:
            n *= len(v.domain)
        return n


# -- labeling relations -----------------------------------------------------

def more_defined(a: Mapping, b: Mapping) -> bool:
    """True iff every assignment of ``b`` also appears in ``a`` (non-strict)."""
    return all(k in a and a[k] == v for k, v in b.items())


def satisfies(labeling: Mapping, k: Constraint) -> bool:
    if not all(n in labeling for n in k.scope):
        return False
    return k.contains(tuple(labeling[n] for n in k.scope))


# -- constraint algebra -----------------------------------------------------

def negate(k: Constraint) -> Constraint:
    return Constraint(k.scope, k.tuples, k.mode.flipped(), k.domains)


def _union_scope(k1, k2):
    scope = list(k1.scope)
    domains = list(k1.domains)
    for name, dom in zip(k2.scope, k2.domains):
        if name in scope:
            if tuple(dom) != tuple(domains[scope.index(name)]):
                raise ProblemError(f"operands disagree on the domain of {name!r}")
            continue
        scope.append(name)
        domains.append(dom)
    return tuple(scope), tuple(domains)


def _combine(k1, k2, op):
    scope, domains = _union_scope(k1, k2)
    pos1 = [scope.index(n) for n in k1.scope]
    pos2 = [scope.index(n) for n in k2.scope]
    keep = set()
    for t in itertools.product(*domains):
        in1 = k1.contains(tuple(t[i] for i in pos1))
        in2 = k2.contains(tuple(t[i] for i in pos2))
        if op(in1, in2):
            keep.add(t)
    return Constraint(scope, frozenset(keep), Mode.ALLOW, domains)


def conjoin(k1: Constraint, k2: Constraint) -> Constraint:
    return _combine(k1, k2, lambda a, b: a and b)


def disjoin(k1: Constraint, k2: Constraint) -> Constraint:
    return _combine(k1, k2, lambda a, b: a or b)


# -- valuations -------------------------------------------------------------

def violation_bound(constraints: Iterable[ValuedConstraint], labeling: Mapping, start=1.0) -> float:
    """min(start, 1 - necessity of each constraint in ``constraints`` violated by ``labeling``).

    Constraints whose scope is not covered by ``labeling`` are skipped.
    """
    value = start
    for vc in constraints:
        c = vc.constraint
        if all(n in labeling for n in c.scope) and not c.contains(tuple(labeling[n] for n in c.scope)):
            value = min(value, complement(vc.necessity))
    return value


def pi_star(p: Problem, labeling: Mapping) -> float:
    """Maximal possibility of a complete labeling (its compatibility)."""
    if not all(n in labeling for n in p.names):
        missing = [n for n in p.names if n not in labeling]
        raise ProblemError(f"labeling is incomplete, missing {missing}")
    return violation_bound(p.constraints, labeling)


def partial_bound(p: Problem, labeling: Mapping) -> float:
    """Admissible upper bound on the compatibility of a partial labeling."""
    return violation_bound(p.constraints, labeling)


def classical_consistent(p: Problem, labeling: Mapping) -> bool:
    soft = [vc.id for vc in p.constraints if vc.necessity < 1.0]
    if soft:
        raise ProblemError(f"classical consistency needs hard constraints only; soft: {soft}")
    return all(not vc.violated_by(labeling) for vc in p.constraints)


def iter_extensions(p: Problem, labeling: Mapping) -> Iterator[Labeling]:
    """All complete labelings more defined than ``labeling``."""
    free = [v for v in p.variables if v.name not in labeling]
    base = dict(labeling)
    for values in itertools.product(*(v.domain for v in free)):
        full = dict(base)
        full.update(zip((v.name for v in free), values))
        yield Labeling(full)


def unary_value(p: Problem, var: str, label: str, constraints: Optional[Iterable[ValuedConstraint]] = None) -> float:
    """Compatibility of ``{var: label}`` under the unary constraints on ``var``."""
    pool = p.constraints if constraints is None else constraints
    unary = [vc for vc in pool if vc.scope == (var,)]
    return violation_bound(unary, {var: label})
