"""Possibilistic constraint satisfaction: min-max branch and bound and arc-consistency."""

from .core import (
    Constraint,
    DomainVariable,
    Labeling,
    Mode,
    Problem,
    ProblemError,
    ValuedConstraint,
    classical_consistent,
    complement,
    conjoin,
    disjoin,
    more_defined,
    negate,
    partial_bound,
    pi_star,
    satisfies,
)
from .io import GeneratorSpec, builtin_menu, parse_problem, random_problem, write_problem
from .oracle import enumerate_best, pi_star_table
from .propagate import bound_b, enforce_ac, forward_check, revise
from .search import SearchOptions, SearchResult, Status, solve

__version__ = "0.1.0"
