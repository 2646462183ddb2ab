"""scikit-learn style wrappers around the solver and arc-consistency.

``X`` is a problem: a :class:`~possibcsp.core.Problem`, PCSP source text,
or a path to a ``.pcsp`` file.
"""

from __future__ import annotations

import os
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import Problem, ProblemError, pi_star
from .io import load_problem, parse_problem
from .propagate import enforce_ac
from .search import SearchOptions, solve


def check_problem(X) -> Problem:
    """Coerce ``X`` to a validated :class:`Problem`."""
    if isinstance(X, Problem):
        return X
    if isinstance(X, os.PathLike):
        return load_problem(X)
    if isinstance(X, str):
        if X.lstrip().startswith(("problem", "#")) or "\n" in X:
            return parse_problem(X)
        return load_problem(Path(X))
    raise ProblemError(f"expected a Problem, PCSP text or a path, got {type(X).__name__}")


def check_labeling(problem: Problem, labeling):
    lab = problem.labeling(labeling)
    if not problem.is_complete(lab):
        raise ProblemError("labeling must assign every variable")
    return lab


class PossibilisticSolver(BaseEstimator):
    """Branch-and-bound solver.

    After ``fit``: ``consistency_``, ``best_labelings_``, ``status_`` and
    the raw ``result_``.
    """

    def __init__(self, variable_order="declared", value_order="declared", alpha=0.0,
                 beta=1.0, all_best=False, node_limit=None, forward_check=False):
        self.variable_order = variable_order
        self.value_order = value_order
        self.alpha = alpha
        self.beta = beta
        self.all_best = all_best
        self.node_limit = node_limit
        self.forward_check = forward_check

    def _options(self):
        return SearchOptions(
            variable_order=self.variable_order,
            value_order=self.value_order,
            alpha0=self.alpha,
            beta0=self.beta,
            all_best=self.all_best,
            node_limit=self.node_limit,
            forward_check=self.forward_check,
        )

    def fit(self, X, y=None):
        problem = check_problem(X)
        self.problem_ = problem
        self.result_ = solve(problem, self._options())
        self.consistency_ = self.result_.best_value
        self.best_labelings_ = self.result_.best_labelings
        self.status_ = self.result_.status
        return self

    def predict(self, X=None):
        """Best labelings found for the fitted problem (or refit on ``X``)."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self, "result_")
        return [dict(lab) for lab in self.best_labelings_]

    def score(self, labelings):
        """Compatibility of each given complete labeling."""
        check_is_fitted(self, "problem_")
        return [pi_star(self.problem_, check_labeling(self.problem_, lab)) for lab in labelings]


class ArcConsistency(TransformerMixin, BaseEstimator):
    """Possibilistic arc-consistency; ``transform`` returns the closed problem."""

    def __init__(self, gamma=0.0):
        self.gamma = gamma

    def fit(self, X, y=None):
        self.problem_ = check_problem(X)
        self.result_ = enforce_ac(self.problem_, self.gamma)
        self.delta_ = self.result_.delta
        self.inferences_ = self.result_.inferences
        return self

    def transform(self, X):
        check_is_fitted(self, "result_")
        problem = check_problem(X)
        if problem == self.problem_:
            return self.result_.closed_problem
        return enforce_ac(problem, self.gamma).closed_problem
