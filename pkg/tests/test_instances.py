from fractions import Fraction
from math import gcd

import pytest

from tsgames.core import (
    GameInstance,
    new_tolerance_vector,
    social_welfare,
    standard_tolerance,
    tolerance_sums,
    utility,
)
from tsgames.equilibrium import enumerate_equilibria, is_equilibrium
from tsgames.errors import ValidationError
from tsgames.instances import (
    evaluate_bound,
    no_equilibrium_tree_game,
    poa_lb_equilibrium_welfare,
    poa_lb_game,
    pos_alternative_welfare,
    pos_alternative_welfare_floor,
    pos_equilibrium_welfare,
    pos_game,
    seven_type_grid_example,
)

F = Fraction


class TestNoEquilibriumTree:
    def test_two_type_shape(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        topo = instance.game.topology
        assert instance.game.n == 10
        assert topo.node_count == 11
        assert topo.is_tree()
        assert len(instance.metadata["branch_nodes"]) == 3
        assert all(len(g) == 2 for g in instance.metadata["leaf_groups"])
        assert instance.assignments == {}

    def test_three_type_shape(self):
        instance = no_equilibrium_tree_game(3, standard_tolerance("zero", 3))
        topo = instance.game.topology
        assert instance.game.n == 21
        assert topo.node_count == 22
        assert len(instance.metadata["branch_nodes"]) == 5
        assert all(len(g) == 3 for g in instance.metadata["leaf_groups"])

    def test_full_tolerance_at_distance_one_rejected(self):
        with pytest.raises(ValidationError) as e:
            no_equilibrium_tree_game(3, standard_tolerance("alpha_binary", 3, 2))
        assert e.value.code == "t1-is-one"

    def test_exhaustive_emptiness(self):
        instance = no_equilibrium_tree_game(2, new_tolerance_vector([1, "1/2"]))
        assert enumerate_equilibria(instance.game) == []


class TestAnarchyWitness:
    def test_shape_and_counts(self):
        instance = poa_lb_game(3, 1, standard_tolerance("zero", 3))
        game = instance.game
        assert game.n == 21
        assert game.topology.node_count == 43  # 2n + 1
        assert game.agents_per_type == 7

    def test_every_small_clique_node_has_one_outside_edge(self):
        instance = poa_lb_game(3, 2, standard_tolerance("zero", 3))
        topo = instance.game.topology
        chains = instance.metadata["mixed_clique_chains"]
        tail = instance.metadata["tail_clique"]
        for clique in [c for chain in chains for c in chain] + [tail]:
            members = set(clique)
            for node in clique:
                outside = [u for u in topo.neighbors[node] if u not in members]
                assert len(outside) == 1

    @pytest.mark.parametrize(
        "tolerance",
        [
            standard_tolerance("zero", 3),
            standard_tolerance("proportional", 3),
            standard_tolerance("inverse_proportional", 3),
        ],
    )
    def test_equilibrium_and_welfare_formula(self, tolerance):
        instance = poa_lb_game(3, 1, tolerance)
        eq = instance.assignments["equilibrium_v"]
        assert is_equilibrium(instance.game, eq)[0]
        assert social_welfare(instance.game, eq) == poa_lb_equilibrium_welfare(
            3, 1, tolerance
        )

    def test_per_agent_utilities(self):
        tolerance = standard_tolerance("proportional", 3)
        instance = poa_lb_game(3, 1, tolerance)
        game = instance.game
        eq = instance.assignments["equilibrium_v"]
        _, per_type = tolerance_sums(tolerance)
        center_neighbors = set(game.topology.neighbors[instance.metadata["center"]])
        chains = instance.metadata["mixed_clique_chains"]
        for clique in [c for chain in chains for c in chain]:
            for node in clique:
                ell = eq.cells[node]
                expected = (
                    (per_type[ell - 1] - 1) / (game.lam - 1)
                    if node in center_neighbors
                    else per_type[ell - 1] / game.lam
                )
                assert utility(game, eq, node) == expected

    def test_optimum_is_fully_segregated(self):
        instance = poa_lb_game(3, 1, standard_tolerance("zero", 3))
        opt = instance.assignments["optimal"]
        assert all(utility(instance.game, opt, v) == 1 for v in opt.occupied())
        assert social_welfare(instance.game, opt) == instance.game.n

    def test_ratio_matches_lower_bound_formula(self):
        for kind in ("zero", "proportional", "inverse_proportional"):
            tolerance = standard_tolerance(kind, 3)
            instance = poa_lb_game(3, 1, tolerance)
            sw_opt = social_welfare(instance.game, instance.assignments["optimal"])
            sw_eq = social_welfare(instance.game, instance.assignments["equilibrium_v"])
            assert sw_opt / sw_eq == evaluate_bound("poa_lower", 3, 21, tolerance)

    def test_two_types_longer_chains(self):
        instance = poa_lb_game(2, 2, standard_tolerance("zero", 2))
        assert instance.game.topology.node_count == 2 * instance.game.n + 1
        assert is_equilibrium(instance.game, instance.assignments["equilibrium_v"])[0]


class TestStabilityWitness:
    def test_shape_b2(self):
        instance = pos_game(2, "1/2")
        md = instance.metadata
        assert instance.game.topology.node_count == 121
        assert instance.game.n == 120
        assert (len(md["clique_pendants"]), len(md["hub_pendants"])) == (25, 10)
        assert len(md["core_clique"]) == 25
        assert sum(len(b) for b in md["bridge_blocks"]) == 10
        assert sum(len(b) for b in md["outer_blocks"]) == 50

    @pytest.mark.parametrize("bad", [1, 3, 6, 0, -2])
    def test_bad_b_rejected(self, bad):
        with pytest.raises(ValidationError) as e:
            pos_game(bad, "1/2")
        assert e.value.code == "bad-b"

    def test_bad_t1_rejected(self):
        with pytest.raises(ValidationError):
            pos_game(2, 1)
        with pytest.raises(ValidationError):
            pos_game(2, "-1/2")

    @pytest.mark.parametrize("b", [2, 4, 8, 10, 14])
    def test_coprimality_needed_by_the_uniqueness_argument(self, b):
        z = 2 * b + 1
        c = b * z
        assert gcd(c * z // 2 + c, b + 1) == 1

    @pytest.mark.parametrize("t1", [F(0), F(1, 2)])
    def test_trapped_assignment_is_an_equilibrium(self, t1):
        instance = pos_game(2, t1)
        assert is_equilibrium(instance.game, instance.assignments["equilibrium_v"])[0]

    def test_per_agent_utilities_zero_tolerance_view(self):
        b = 2
        instance = pos_game(b, "1/2")
        game = instance.game
        eq = instance.assignments["equilibrium_v"]
        zero_view = GameInstance(
            2, game.agents_per_type, game.topology, standard_tolerance("zero", 2)
        )
        md = instance.metadata
        for block in md["outer_blocks"]:
            for v in block:
                if eq.cells[v]:
                    assert utility(zero_view, eq, v) == F(1, b + 1)
        z = 2 * b + 1
        for block in md["bridge_blocks"]:
            for v in block:
                assert utility(zero_view, eq, v) >= F(z, z + 2)
        for v in md["clique_pendants"] + md["core_clique"] + md["hub_pendants"]:
            assert utility(zero_view, eq, v) == 1
        assert utility(zero_view, eq, md["hub"]) == 1

    def test_welfare_closed_forms(self):
        t1 = F(1, 2)
        instance = pos_game(2, t1)
        eq = instance.assignments["equilibrium_v"]
        v_star = instance.assignments["v_star"]
        assert social_welfare(instance.game, eq) == pos_equilibrium_welfare(2, t1)
        assert social_welfare(instance.game, v_star) == pos_alternative_welfare(2, t1)

    def test_alternative_assignment_beats_its_floor(self):
        for t1 in (F(0), F(1, 2), F(3, 4)):
            assert pos_alternative_welfare(2, t1) > pos_alternative_welfare_floor(2, t1)

    def test_ratio_reaches_the_supremum_from_below(self):
        # As the blocks grow, OPT / SW(equilibrium) approaches 2 / (1 + t1).
        t1 = F(1, 2)
        ratios = [
            pos_alternative_welfare(b, t1) / pos_equilibrium_welfare(b, t1)
            for b in (2, 4, 8, 14, 20, 40)
        ]
        supremum = evaluate_bound("pos_lower", 2, 120, new_tolerance_vector([1, t1]))
        assert supremum == F(4, 3)
        assert all(r < supremum for r in ratios)
        assert ratios == sorted(ratios)  # monotone approach
        assert supremum - ratios[-1] < F(1, 25)


class TestSevenTypeGrid:
    def test_game_and_assignment(self):
        instance = seven_type_grid_example()
        assert instance.game.topology.grid_shape == (4, 4)
        assert instance.game.lam == 7
        a = instance.assignments["equilibrium_v"]
        assert a.cells == (1, 2, 3, 4, 1, 2, 3, 4, 0, 0, 6, 7, 5, 5, 6, 7)
        assert instance.metadata["perturbed_tolerance"] == [
            "1", "1", "3/5", "0", "0", "0", "0",
        ]


class TestEvaluateBound:
    def test_zero_tolerance_anarchy_value(self):
        assert evaluate_bound("zts_poa", 3, 21) == F(7, 2)

    def test_general_upper_bound_with_two_proportional_types(self):
        tv = standard_tolerance("proportional", 2)  # [1, 0], tau = 1
        assert evaluate_bound("poa_upper", 2, 10, tv) == F(20, 8)  # 2n/(n-2)

    def test_named_family_upper_bounds(self):
        assert evaluate_bound("proportional_poa_upper", 4, 16) == F(4 * 16, 2 * 16 - 4)
        harmonic = F(1) + F(1, 2) + F(1, 3)
        assert evaluate_bound("inverse_poa_upper", 3, 12) == F(3 * 12) / (harmonic * 12 - 3)

    def test_stability_supremum(self):
        assert evaluate_bound("pos_lower", 2, 8, standard_tolerance("zero", 2)) == 2
        assert evaluate_bound("pos_lower", 2, 8, new_tolerance_vector([1, "1/2"])) == F(4, 3)

    def test_lower_bound_formula(self):
        tv = standard_tolerance("zero", 3)
        # with per-type tolerance totals of 1 each, it reduces to n - lambda
        assert evaluate_bound("poa_lower", 3, 21, tv) == F(7, 2)

    def test_degenerate_denominator(self):
        with pytest.raises(ValidationError) as e:
            evaluate_bound("zts_poa", 3, 3)
        assert e.value.code == "degenerate-denominator"

    def test_n_must_be_multiple_of_lambda(self):
        with pytest.raises(ValidationError):
            evaluate_bound("zts_poa", 3, 20)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            evaluate_bound("nope", 2, 8)
