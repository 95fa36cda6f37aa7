from fractions import Fraction

import pytest

from tsgames.acceptance import naive_enumerate, naive_is_equilibrium, naive_optimal
from tsgames.core import (
    Assignment,
    GameInstance,
    ToleranceVector,
    new_tolerance_vector,
    social_welfare,
    standard_tolerance,
)
from tsgames.equilibrium import (
    DynamicsOutcome,
    best_deviation,
    best_response_dynamics,
    enumerate_equilibria,
    is_equilibrium,
    optimal_welfare,
    placement_count,
    price_ratios,
)
from tsgames.errors import BudgetExceeded, NoEquilibrium, ValidationError
from tsgames.instances import no_equilibrium_tree_game, seven_type_grid_example
from tsgames.topology import build_graph, standard_graph

from conftest import random_connected_graph

F = Fraction


def seven_type_games():
    instance = seven_type_grid_example()
    binary = instance.game
    perturbed = GameInstance(
        7, 2, binary.topology,
        ToleranceVector((F(1), F(1), F(3, 5), F(0), F(0), F(0), F(0))),
    )
    return binary, perturbed, instance.assignments["equilibrium_v"]


class TestBestDeviation:
    def test_gain_through_relaxed_middle_distance(self):
        # Raising t2 past 1/2 lets the row-2 type-4 agent profit by jumping
        # to the rightmost marked-empty node: 2/3 -> (1 + 2*t2)/3 = 11/15.
        _, perturbed, assignment = seven_type_games()
        witness = best_deviation(perturbed, assignment, 7)
        assert witness is not None
        assert (witness.to_node, witness.old_utility, witness.new_utility) == (
            9, F(2, 3), F(11, 15),
        )

    def test_agent_at_utility_one_never_moves(self):
        binary, _, assignment = seven_type_games()
        assert best_deviation(binary, assignment, 0) is None

    def test_segregated_path_has_no_deviation(self, p5_game):
        a = Assignment((1, 1, 0, 2, 2))
        assert all(best_deviation(p5_game, a, v) is None for v in a.occupied())

    def test_empty_origin_rejected(self, p5_game):
        with pytest.raises(ValidationError) as e:
            best_deviation(p5_game, Assignment((1, 1, 0, 2, 2)), 2)
        assert e.value.code == "node-empty"

    def test_witness_targets_an_empty_node(self, rng):
        for _ in range(20):
            topo = random_connected_graph(rng, 8, rng.randrange(0, 8))
            game = GameInstance(2, 2, topo, standard_tolerance("zero", 2))
            cells = [0] * 8
            nodes = list(range(8))
            rng.shuffle(nodes)
            for v in nodes[:2]:
                cells[v] = 1
            for v in nodes[2:4]:
                cells[v] = 2
            a = Assignment(tuple(cells))
            for v in a.occupied():
                witness = best_deviation(game, a, v)
                if witness is not None:
                    assert a.cells[witness.to_node] == 0
                    assert witness.new_utility > witness.old_utility


class TestIsEquilibrium:
    def test_banded_grid_under_binary_vector(self):
        binary, _, assignment = seven_type_games()
        ok, witness = is_equilibrium(binary, assignment)
        assert ok and witness is None

    def test_banded_grid_breaks_under_larger_t2(self):
        _, perturbed, assignment = seven_type_games()
        ok, witness = is_equilibrium(perturbed, assignment)
        assert not ok
        assert witness.from_node == 7  # smallest deviating node id
        assert witness.old_utility == F(2, 3)
        assert witness.new_utility == F(11, 15)

    def test_zero_tolerance_equilibrium_not_tolerant_one(self):
        # An agent seeing {own type, far type} is content under zero
        # tolerance but gains (1 + t1)/2 by moving next to a near type.
        topo = build_graph(7, [(0, 1), (0, 2), (1, 3), (3, 4), (4, 5), (5, 6), (6, 2)])
        cells = Assignment((1, 1, 3, 0, 2, 2, 3))
        zero = GameInstance(3, 2, topo, standard_tolerance("zero", 3))
        tolerant = GameInstance(3, 2, topo, new_tolerance_vector([1, "1/2", 0]))
        assert is_equilibrium(zero, cells)[0]
        ok, witness = is_equilibrium(tolerant, cells)
        assert not ok
        assert (witness.from_node, witness.to_node) == (0, 3)
        assert (witness.old_utility, witness.new_utility) == (F(1, 2), F(3, 4))

    def test_tolerant_equilibrium_not_zero_tolerance_one(self):
        # The reverse separation: equal tolerant utilities block the jump
        # that the zero-tolerance agent strictly wants.
        topo = build_graph(7, [(0, 1), (0, 2), (0, 3), (1, 4), (3, 4), (5, 6), (3, 6)])
        cells = Assignment((1, 1, 2, 3, 0, 2, 3))
        zero = GameInstance(3, 2, topo, standard_tolerance("zero", 3))
        tolerant = GameInstance(3, 2, topo, new_tolerance_vector([1, "1/2", 0]))
        assert is_equilibrium(tolerant, cells)[0]
        ok, witness = is_equilibrium(zero, cells)
        assert not ok
        assert (witness.old_utility, witness.new_utility) == (F(1, 3), F(1, 2))


class TestDynamics:
    def test_equilibrium_start_converges_immediately(self, p5_game):
        result = best_response_dynamics(p5_game, Assignment((1, 1, 0, 2, 2)), 100)
        assert result.outcome is DynamicsOutcome.CONVERGED
        assert result.steps == 0
        assert result.trace == ()

    def test_alternating_path_settles_into_segregation(self, p5_game):
        result = best_response_dynamics(p5_game, Assignment((1, 2, 1, 2, 0)), 100)
        assert result.outcome is DynamicsOutcome.CONVERGED
        assert result.final_assignment.cells == (1, 1, 0, 2, 2)
        assert result.steps == 3
        assert result.trace == ((1, 4), (0, 1), (2, 0))
        assert is_equilibrium(p5_game, result.final_assignment)[0]

    def test_game_without_equilibrium_never_converges(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        initial = Assignment.from_placement(
            11, {v: (1 if v < 5 else 2) for v in range(10)}
        )
        for max_steps in (50, 500):
            result = best_response_dynamics(instance.game, initial, max_steps)
            assert result.outcome in (
                DynamicsOutcome.CYCLE_DETECTED, DynamicsOutcome.STEP_LIMIT,
            )

    def test_deterministic_traces(self, p5_game):
        first = best_response_dynamics(p5_game, Assignment((2, 1, 0, 1, 2)), 50)
        second = best_response_dynamics(p5_game, Assignment((2, 1, 0, 1, 2)), 50)
        assert first == second

    def test_step_limit_respected(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        initial = Assignment.from_placement(
            11, {v: (1 if v < 5 else 2) for v in range(10)}
        )
        result = best_response_dynamics(instance.game, initial, 0)
        assert result.outcome is DynamicsOutcome.STEP_LIMIT
        assert result.steps == 0


class TestEnumeration:
    def test_path_five_equilibria(self, p5_game):
        cells = [a.cells for a in enumerate_equilibria(p5_game)]
        assert cells == [(1, 1, 0, 2, 2), (2, 2, 0, 1, 1)]

    def test_budget_error_carries_count(self, p5_game):
        with pytest.raises(BudgetExceeded) as e:
            enumerate_equilibria(p5_game, budget=10)
        assert e.value.count == 30

    def test_no_equilibrium_tree_is_empty(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        assert placement_count(instance.game) == 2772
        assert enumerate_equilibria(instance.game) == []

    def test_two_cliques_bridge(self):
        # Monochromatic cliques are at equilibrium unless both bridge
        # endpoints (nodes 2 and 3) are occupied by opposite types; the
        # exact set below was frozen from the naive oracle.
        topo = build_graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
        game = GameInstance(2, 2, topo, standard_tolerance("zero", 2))
        cells = [a.cells for a in enumerate_equilibria(game)]
        assert cells == [
            (0, 1, 1, 0, 2, 2),
            (0, 2, 2, 0, 1, 1),
            (1, 0, 1, 0, 2, 2),
            (1, 1, 0, 0, 2, 2),
            (1, 1, 0, 2, 0, 2),
            (1, 1, 0, 2, 2, 0),
            (2, 0, 2, 0, 1, 1),
            (2, 2, 0, 0, 1, 1),
            (2, 2, 0, 1, 0, 1),
            (2, 2, 0, 1, 1, 0),
        ]
        assert cells == naive_enumerate(game)

    def test_optimal_welfare_on_path(self, p5_game):
        assignment, welfare = optimal_welfare(p5_game)
        assert assignment.cells == (1, 1, 0, 2, 2)
        assert welfare == 4

    def test_worker_count_does_not_change_results(self, p5_game):
        single = enumerate_equilibria(p5_game, workers=1)
        parallel = enumerate_equilibria(p5_game, workers=2)
        assert single == parallel
        assert optimal_welfare(p5_game, workers=1) == optimal_welfare(p5_game, workers=2)

    def test_agreement_with_naive_oracle(self, rng):
        for _ in range(6):
            node_count = rng.randrange(5, 9)
            topo = random_connected_graph(rng, node_count, rng.randrange(0, 6))
            game = GameInstance(2, 2, topo, standard_tolerance("zero", 2))
            fast = [a.cells for a in enumerate_equilibria(game)]
            assert fast == naive_enumerate(game)
            best, welfare = optimal_welfare(game)
            naive_cells, naive_welfare = naive_optimal(game)
            assert (best.cells, welfare) == (naive_cells, naive_welfare)

    def test_two_type_set_inclusions_small_graphs(self, rng):
        # Tolerant equilibria are zero-tolerance equilibria; isolation-free
        # zero-tolerance equilibria survive adding tolerance.
        tolerant_tv = new_tolerance_vector([1, "1/2"])
        zero_tv = standard_tolerance("zero", 2)
        for _ in range(15):
            topo = random_connected_graph(rng, rng.randrange(5, 8), rng.randrange(0, 6))
            zero_game = GameInstance(2, 2, topo, zero_tv)
            tolerant_game = GameInstance(2, 2, topo, tolerant_tv)
            zero_eq = {a.cells for a in enumerate_equilibria(zero_game)}
            tolerant_eq = {a.cells for a in enumerate_equilibria(tolerant_game)}
            assert tolerant_eq <= zero_eq
            for cells in zero_eq - tolerant_eq:
                a = Assignment(cells)
                assert any(
                    all(a.cells[u] == 0 for u in topo.neighbors[v])
                    for v in a.occupied()
                )


class TestPriceRatios:
    def test_path_five_prices(self, p5_game):
        report = price_ratios(p5_game)
        assert (report.opt, report.worst_eq, report.best_eq) == (4, 4, 4)
        assert report.poa == report.pos == 1
        assert report.equilibrium_count == 2

    def test_report_invariants_on_random_games(self, rng):
        found = 0
        while found < 5:
            topo = random_connected_graph(rng, rng.randrange(5, 8), rng.randrange(0, 5))
            game = GameInstance(2, 2, topo, standard_tolerance("zero", 2))
            try:
                report = price_ratios(game)
            except NoEquilibrium:
                continue
            found += 1
            assert report.worst_eq <= report.best_eq <= report.opt
            assert report.poa >= report.pos >= 1

    def test_no_equilibrium_raises(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        with pytest.raises(NoEquilibrium):
            price_ratios(instance.game)


def test_library_checker_matches_naive_on_random_placements(rng):
    for _ in range(40):
        node_count = rng.randrange(5, 9)
        topo = random_connected_graph(rng, node_count, rng.randrange(0, 7))
        game = GameInstance(2, 2, topo, new_tolerance_vector([1, "1/3"]))
        nodes = list(range(node_count))
        rng.shuffle(nodes)
        cells = [0] * node_count
        for v in nodes[:2]:
            cells[v] = 1
        for v in nodes[2:4]:
            cells[v] = 2
        assignment = Assignment(tuple(cells))
        assert is_equilibrium(game, assignment)[0] == naive_is_equilibrium(game, cells)
