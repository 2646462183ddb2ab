import itertools

import pytest

from conftest import MENU_ORDER, PAPER_MENU, brute_best, classical_bt, count_queens, queens, random_instance
from possibcsp.core import DomainVariable, Problem, ValuedConstraint, empty_relation, partial_bound, pi_star
from possibcsp.oracle import enumerate_best
from possibcsp.search import (
    Action,
    SearchOptions,
    Status,
    extend_bound,
    newly_scoped,
    order_heuristic,
    solve,
)


class TestNewlyScoped:
    def test_menu_drink_step(self, menu):
        assert {vc.id for vc in newly_scoped(menu, MENU_ORDER, 1)} == set("abcefgl")

    def test_menu_dish_step(self, menu):
        assert {vc.id for vc in newly_scoped(menu, MENU_ORDER, 0)} == {"o"}

    def test_single_variable(self):
        p = Problem("one", [DomainVariable("x", ("a", "b"))])
        k = p.make_constraint(("x",), [("a",)])
        p = p.with_constraints([ValuedConstraint("c1", k, 0.4), ValuedConstraint("c2", k, 0.9)])
        assert newly_scoped(p, ["x"], 0) == list(p.constraints)

    def test_partition(self, menu):
        seen = [vc.id for j in range(4) for vc in newly_scoped(menu, MENU_ORDER, j)]
        assert sorted(seen) == sorted(vc.id for vc in menu.constraints)

    def test_out_of_range(self, menu):
        with pytest.raises(IndexError):
            newly_scoped(menu, MENU_ORDER, 4)


class TestExtendBound:
    def test_no_violation(self, menu):
        lab = {"dish": "fish", "drink": "white-wine"}
        e = [menu.constraint("e")]
        assert extend_bound(0.7, e, lab) == 0.7

    def test_violated_f(self, menu):
        lab = {"dish": "fish", "drink": "white-wine"}
        assert extend_bound(1.0, [menu.constraint("f")], lab) == 0.8

    def test_unassigned_scope(self, menu):
        with pytest.raises(ValueError):
            extend_bound(1.0, [menu.constraint("f")], {"dish": "fish"})

    @pytest.mark.parametrize("seed", range(20))
    def test_composition_equals_pi_star(self, seed):
        p = random_instance(seed, max_vars=4)
        order = list(p.names)
        steps = [newly_scoped(p, order, j) for j in range(len(order))]
        for full in p.complete_labelings():
            beta = 1.0
            for j, name in enumerate(order):
                part = {n: full[n] for n in order[: j + 1]}
                beta = extend_bound(beta, steps[j], part)
                assert beta == partial_bound(p, part)
            assert beta == pi_star(p, full)


class TestOrderHeuristic:
    def test_single(self):
        p = Problem("one", [DomainVariable("x", ("a",))])
        for tag in ("declared", "max-degree", "max-cardinality"):
            assert order_heuristic(p, tag) == ["x"]

    def test_menu_max_degree(self, menu):
        degree = {n: sum(n in vc.scope for vc in menu.constraints) for n in menu.names}
        assert max(degree, key=degree.get) == "dish"
        assert order_heuristic(menu, "max-degree")[0] == "dish"

    @pytest.mark.parametrize("tag", ["declared", "max-degree", "max-cardinality"])
    @pytest.mark.parametrize("seed", range(10))
    def test_permutation(self, tag, seed):
        p = random_instance(seed)
        assert sorted(order_heuristic(p, tag)) == sorted(p.names)

    def test_unknown_tag(self, menu):
        with pytest.raises(ValueError):
            order_heuristic(menu, "random")


class TestSolve:
    def test_menu_paper_order(self, menu):
        r = solve(menu, SearchOptions(variable_order=MENU_ORDER))
        assert r.status is Status.OPTIMAL
        assert r.best_value == 0.8
        assert r.best_labelings == (PAPER_MENU,)

    def test_menu_all_best(self, menu):
        r = solve(menu, SearchOptions(variable_order=MENU_ORDER, all_best=True))
        assert set(r.best_labelings) == set(enumerate_best(menu).labelings)

    def test_alpha_pruned(self, menu):
        r = solve(menu, SearchOptions(alpha0=0.9, beta0=1.0))
        assert r.status is Status.ALPHA_PRUNED
        assert r.best_labelings == ()

    def test_alpha_below_consistency(self, menu):
        r = solve(menu, SearchOptions(alpha0=0.5))
        assert r.status is Status.OPTIMAL and r.best_value == 0.8

    def test_beta_stop(self, menu):
        r = solve(menu, SearchOptions(variable_order=MENU_ORDER, beta0=0.3))
        assert r.status is Status.BETA_STOPPED
        assert r.best_value >= 0.3
        assert all(pi_star(menu, lab) == r.best_value for lab in r.best_labelings)

    def test_beta_never_reached_is_optimal(self, menu):
        r = solve(menu, SearchOptions(beta0=0.9))
        assert r.status is Status.OPTIMAL and r.best_value == 0.8

    def test_node_limit(self, menu):
        r = solve(menu, SearchOptions(variable_order=MENU_ORDER, node_limit=5))
        assert r.status is Status.BUDGET_EXHAUSTED
        assert r.nodes_expanded == 5
        assert all(pi_star(menu, lab) == r.best_value for lab in r.best_labelings)

    def test_bad_options(self, menu):
        with pytest.raises(ValueError):
            SearchOptions(alpha0=0.6, beta0=0.5)
        with pytest.raises(ValueError):
            solve(menu, SearchOptions(variable_order=["dish", "drink"]))

    def test_zero_consistency(self):
        p = Problem("bot", [DomainVariable("x", ("a", "b")), DomainVariable("y", ("a", "b"))])
        p = p.with_constraints([ValuedConstraint("k", empty_relation(("x", "y"), (("a", "b"),) * 2), 1.0)])
        single = solve(p)
        assert single.status is Status.OPTIMAL and single.best_value == 0.0
        assert len(single.best_labelings) == 1
        every = solve(p, SearchOptions(all_best=True))
        assert len(every.best_labelings) == 4

    def test_six_queens(self):
        p = queens(6)
        r = solve(p, SearchOptions(all_best=True))
        assert r.best_value == 1.0
        assert len(r.best_labelings) == count_queens(6) == 4

    def test_trace_wellformed(self, menu):
        events = []
        r = solve(menu, SearchOptions(variable_order=MENU_ORDER), trace=events.append)
        assert len(events) == r.nodes_expanded
        assert sum(e.action is Action.CUTOFF for e in events) == r.cutoffs
        improves = [e.bound for e in events if e.action is Action.IMPROVE]
        assert improves == sorted(improves) and len(set(improves)) == len(improves)
        assert improves[-1] == 0.8
        for e in events:
            assert 1 <= e.depth <= 4 and e.var == MENU_ORDER[e.depth - 1]


@pytest.mark.parametrize("seed", range(60))
def test_oracle_equivalence_all_options(seed):
    p = random_instance(seed)
    top, labs = brute_best(p)
    expected = {p.labeling(a) for a in labs}
    for heuristic, value_order, fc in itertools.product(
            ["declared", "max-degree", "max-cardinality"], ["declared", "bound"], [False, True]):
        opts = SearchOptions(variable_order=heuristic, value_order=value_order, forward_check=fc)
        r = solve(p, opts)
        assert r.status is Status.OPTIMAL
        assert r.best_value == top
        assert all(lab in expected for lab in r.best_labelings)
        r = solve(p, SearchOptions(variable_order=heuristic, value_order=value_order,
                                   forward_check=fc, all_best=True))
        assert set(r.best_labelings) == expected


@pytest.mark.parametrize("seed", range(40))
def test_alpha_monotone_and_pruning_sound(seed):
    p = random_instance(seed, max_vars=4)
    events = []
    r = solve(p, SearchOptions(), trace=events.append)
    improves = [e.bound for e in events if e.action is Action.IMPROVE]
    assert all(a < b for a, b in zip(improves, improves[1:]))
    # replay every cutoff: none of its leaves beats the alpha in force at that moment
    alpha = 0.0
    for e in events:
        if e.action is Action.IMPROVE:
            alpha = e.bound
        elif e.action is Action.CUTOFF:
            leaves = [a for a in _extensions(p, e.labeling)]
            assert max(pi_star(p, a) for a in leaves) <= alpha
    assert r.best_value == enumerate_best(p).consistency


def _extensions(p, part):
    free = [v for v in p.variables if v.name not in part]
    for values in itertools.product(*(v.domain for v in free)):
        full = dict(part)
        full.update(zip((v.name for v in free), values))
        yield full


@pytest.mark.parametrize("n", [4, 5, 6])
@pytest.mark.parametrize("all_best", [False, True])
def test_classical_degeneration(n, all_best):
    p = queens(n)
    order = list(reversed(p.names))
    nodes, solutions = classical_bt(p, order, first_only=not all_best)
    r = solve(p, SearchOptions(variable_order=order, all_best=all_best))
    assert r.nodes_expanded == nodes
    if all_best:
        assert {frozenset(s.items()) for s in solutions} == {frozenset(l.items()) for l in r.best_labelings}


@pytest.mark.parametrize("seed", range(30))
def test_forward_checking_expands_fewer_nodes(seed):
    p = random_instance(seed)
    plain = solve(p, SearchOptions(all_best=True))
    fc = solve(p, SearchOptions(all_best=True, forward_check=True))
    assert fc.best_value == plain.best_value
    assert set(fc.best_labelings) == set(plain.best_labelings)
    assert fc.nodes_expanded <= plain.nodes_expanded
