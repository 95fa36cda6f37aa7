"""Generators for the named benchmark instances and closed-form bounds.

Each generator returns a NamedInstance bundling the game, any distinguished
assignments ("equilibrium_v", "optimal", "v_star"), and metadata describing
the node groups the construction is made of, so tests and the CLI can refer
to them without re-deriving ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .constructions import construct_binary_grid
from .core import (
    Assignment,
    GameInstance,
    Rational,
    ToleranceVector,
    as_rational,
    format_rational,
    standard_tolerance,
    tolerance_sums,
)
from .errors import ValidationError
from .topology import Topology, build_graph, grid


@dataclass(frozen=True)
class NamedInstance:
    """A generated game plus its distinguished assignments and node groups."""

    game: GameInstance
    assignments: Dict[str, Assignment] = field(default_factory=dict)
    metadata: Dict[str, object] = field(default_factory=dict)


def no_equilibrium_tree_game(lam: int, tv: ToleranceVector) -> NamedInstance:
    """A tree game with no equilibrium at all (for any vector with t_1 < 1).

    The board is a 4-level tree: a root with a single child ("gate"), which
    fans out to 2*lam - 1 branch nodes, each carrying lam leaves. With
    2*lam + 1 agents per type there is exactly one empty node in any
    placement, and wherever it sits some agent profits by jumping there.
    """
    if tv.lam != lam:
        raise ValidationError(
            "length-mismatch", f"tolerance vector has {tv.lam} weights for {lam} types"
        )
    if tv.values[1] >= 1:
        raise ValidationError("t1-is-one", "this construction needs t_1 < 1")
    branch_count = 2 * lam - 1
    root, gate = 0, 1
    branches = list(range(2, 2 + branch_count))
    edges = [(root, gate)] + [(gate, g) for g in branches]
    leaf_groups = []
    next_id = 2 + branch_count
    for g in branches:
        leaves = list(range(next_id, next_id + lam))
        next_id += lam
        edges.extend((g, leaf) for leaf in leaves)
        leaf_groups.append(leaves)
    topology = build_graph(next_id, edges)
    game = GameInstance(lam, 2 * lam + 1, topology, tv)
    assert topology.node_count == game.n + 1
    metadata = {
        "lambda": lam,
        "root": root,
        "gate": gate,
        "branch_nodes": branches,
        "leaf_groups": leaf_groups,
    }
    return NamedInstance(game=game, metadata=metadata)


def poa_lb_game(lam: int, mu: int, tv: ToleranceVector) -> NamedInstance:
    """Worst-case anarchy witness: cliques around an empty center.

    One "home" clique per type (its size equals the type size) realizes the
    optimum with welfare n. The bad equilibrium instead spreads the agents
    over small rainbow cliques (one agent per type each) chained so that
    every cross-clique neighbor pair is same-typed and the center's
    neighbors all have distinct types.
    """
    if lam < 2:
        raise ValidationError("empty-or-short", "need at least 2 types")
    if mu < 1:
        raise ValidationError("bad-mu", "need mu >= 1")
    if tv.lam != lam:
        raise ValidationError(
            "length-mismatch", f"tolerance vector has {tv.lam} weights for {lam} types"
        )
    x = 2 * lam * mu + 1
    n = lam * x
    center = 0
    next_id = 1
    home_cliques = []
    for _ in range(lam):
        home_cliques.append(list(range(next_id, next_id + x)))
        next_id += x
    chains = []  # chains[i][j] = node list of the j-th small clique of chain i
    for _ in range(lam):
        chain = []
        for _ in range(2 * mu):
            chain.append(list(range(next_id, next_id + lam)))
            next_id += lam
        chains.append(chain)
    tail_clique = list(range(next_id, next_id + lam))
    next_id += lam

    edges = []
    for clique in home_cliques + [c for chain in chains for c in chain] + [tail_clique]:
        edges.extend(
            (clique[a], clique[b])
            for a in range(len(clique))
            for b in range(a + 1, len(clique))
        )
    for i in range(lam):
        edges.append((center, home_cliques[i][0]))
        edges.append((center, chains[i][0][0]))
        for j in range(2 * mu - 1):
            if j % 2 == 0:  # first/odd step: positions 1..lam-1 go forward
                edges.extend(
                    (chains[i][j][p], chains[i][j + 1][p]) for p in range(1, lam)
                )
            else:  # even step: the single uncovered position 0 goes forward
                edges.append((chains[i][j][0], chains[i][j + 1][0]))
        edges.append((chains[i][2 * mu - 1][0], tail_clique[i]))
    topology = build_graph(next_id, edges)
    assert topology.node_count == 2 * n + 1
    game = GameInstance(lam, x, topology, tv)

    equilibrium = {}
    for i in range(lam):
        for clique in chains[i]:
            for p, node in enumerate(clique):
                equilibrium[node] = (i + p) % lam + 1
    for i, node in enumerate(tail_clique):
        equilibrium[node] = i + 1
    optimal = {}
    for i in range(lam):
        for node in home_cliques[i]:
            optimal[node] = i + 1
    assignments = {
        "equilibrium_v": Assignment.from_placement(topology.node_count, equilibrium),
        "optimal": Assignment.from_placement(topology.node_count, optimal),
    }
    metadata = {
        "lambda": lam,
        "mu": mu,
        "center": center,
        "home_cliques": home_cliques,
        "mixed_clique_chains": chains,
        "tail_clique": tail_clique,
    }
    return NamedInstance(game=game, assignments=assignments, metadata=metadata)


def poa_lb_equilibrium_welfare(lam: int, mu: int, tv: ToleranceVector) -> Fraction:
    """Closed-form welfare of the bad equilibrium of :func:`poa_lb_game`."""
    n = lam * (2 * lam * mu + 1)
    _, per_type = tolerance_sums(tv)
    total = sum(per_type, Fraction(0))
    return total * n / lam**2 + (total - lam**2) / (lam * (lam - 1))


def pos_game(b: int, t1: Rational) -> NamedInstance:
    """Stability lower-bound witness for two types.

    A core clique with pendant nodes feeds z bridge blocks, each fanning out
    to a large outer block; a hub node touches every outer block plus its own
    pendants. "equilibrium_v" traps almost every blue agent in the outer
    blocks at utility (1 + t1*b)/(b + 1); "v_star" swaps the roles of the
    bridge blocks and the hub pendants for much higher welfare.
    """
    if b < 2 or b % 2 != 0 or b % 3 == 0:
        raise ValidationError("bad-b", "b must be even, >= 2, and not a multiple of 3")
    t1 = as_rational(t1)
    if not (0 <= t1 < 1):
        raise ValidationError("bad-t1", "t1 must satisfy 0 <= t1 < 1")
    z = 2 * b + 1
    c = b * z
    half = c * z // 2  # c*z is even because b is
    n = 2 * c * (z + 1)

    clique_pendants = list(range(0, half))
    hub_pendants = list(range(half, half + c))
    core_clique = list(range(half + c, 2 * half + c))
    start = 2 * half + c
    bridge_blocks = [list(range(start + i * b, start + (i + 1) * b)) for i in range(z)]
    start += z * b
    outer_blocks = [list(range(start + i * c, start + (i + 1) * c)) for i in range(z)]
    hub = start + z * c

    edges = []
    edges.extend(
        (core_clique[a], core_clique[bb])
        for a in range(len(core_clique))
        for bb in range(a + 1, len(core_clique))
    )
    edges.extend(zip(clique_pendants, core_clique))
    for u in core_clique:
        for block in bridge_blocks:
            edges.extend((u, v) for v in block)
    for bridge, outer in zip(bridge_blocks, outer_blocks):
        for u in bridge:
            edges.extend((u, v) for v in outer)
    edges.extend((hub, v) for block in outer_blocks for v in block)
    edges.extend((hub, v) for v in hub_pendants)
    topology = build_graph(hub + 1, edges)
    assert topology.node_count == n + 1
    game = GameInstance(2, n // 2, topology, ToleranceVector((Fraction(1), t1)))

    red, blue = 1, 2
    equilibrium = {v: red for v in clique_pendants + core_clique}
    for block in bridge_blocks:
        equilibrium.update({v: red for v in block})
    equilibrium[hub] = blue
    equilibrium.update({v: blue for v in hub_pendants})
    outer_nodes = [v for block in outer_blocks for v in block]
    for v in outer_nodes[:-1]:  # the last outer node stays empty
        equilibrium[v] = blue

    v_star = {v: red for v in clique_pendants + core_clique + hub_pendants}
    v_star[hub] = blue
    v_star.update({v: blue for v in outer_nodes})
    bridge_nodes = [v for block in bridge_blocks for v in block]
    for v in bridge_nodes[:-1]:  # the last bridge node stays empty
        v_star[v] = blue

    assignments = {
        "equilibrium_v": Assignment.from_placement(topology.node_count, equilibrium),
        "v_star": Assignment.from_placement(topology.node_count, v_star),
    }
    metadata = {
        "b": b,
        "z": z,
        "c": c,
        "t1": format_rational(t1),
        "clique_pendants": clique_pendants,
        "hub_pendants": hub_pendants,
        "core_clique": core_clique,
        "bridge_blocks": bridge_blocks,
        "outer_blocks": outer_blocks,
        "hub": hub,
    }
    return NamedInstance(game=game, assignments=assignments, metadata=metadata)


def pos_equilibrium_welfare(b: int, t1: Rational) -> Fraction:
    """Closed-form welfare of pos_game's "equilibrium_v"."""
    t1 = as_rational(t1)
    z = 2 * b + 1
    c = b * z
    half = Fraction(c * z, 2)
    return (
        c * z
        + b * (z - 1) * (half + t1 * c) / (half + c)
        + b * (half + t1 * (c - 1)) / (half + c - 1)
        + (c * z - 1) * (1 + t1 * b) / (b + 1)
        + c
        + 1
    )


def pos_alternative_welfare(b: int, t1: Rational) -> Fraction:
    """Closed-form welfare of pos_game's "v_star".

    Sum of the exact per-group utilities: clique pendants and core clique,
    bridge blocks, outer blocks, the hub ((cz + t1*c)/(cz + c)), and the c
    hub pendants, red agents each earning t1 from the blue hub. The last two
    contributions vanish at t1 = 0.
    """
    t1 = as_rational(t1)
    z = 2 * b + 1
    c = b * z
    half = Fraction(c * z, 2)
    return (
        half * (1 + (half + t1 * (c - 1)) / (half + c - 1))
        + (c - 1) * (c + t1 * half) / (half + c)
        + c * z
        + (c * z + t1 * c) / (c * z + c)
        + t1 * c
    )


def pos_alternative_welfare_floor(b: int, t1: Rational) -> Fraction:
    """Simple lower bound that pos_alternative_welfare always exceeds."""
    t1 = as_rational(t1)
    z = 2 * b + 1
    c = b * z
    return c * z * (2 * z + 3 + t1) / (z + 2)


def seven_type_grid_example() -> NamedInstance:
    """The 4x4 grid with 7 types of 2 agents whose banded fill is an
    equilibrium under [1,1,0,...] but not once t_2 grows past 1/2."""
    game = GameInstance(7, 2, grid(4, 4), standard_tolerance("alpha_binary", 7, 2))
    assignment = construct_binary_grid(game)
    perturbed = ToleranceVector(
        (Fraction(1), Fraction(1), Fraction(3, 5)) + (Fraction(0),) * 4
    )
    metadata = {
        "binary_tolerance": [format_rational(v) for v in game.tolerance.values],
        "perturbed_tolerance": [format_rational(v) for v in perturbed.values],
    }
    return NamedInstance(
        game=game, assignments={"equilibrium_v": assignment}, metadata=metadata
    )


BOUND_KINDS = (
    "poa_upper",
    "poa_lower",
    "zts_poa",
    "pos_lower",
    "proportional_poa_upper",
    "inverse_poa_upper",
)


def evaluate_bound(
    kind: str, lam: int, n: int, tv: Optional[ToleranceVector] = None
) -> Fraction:
    """Evaluate one of the closed-form price bounds at finite parameters."""
    if lam < 2:
        raise ValidationError("empty-or-short", "need at least 2 types")
    if n <= 0 or n % lam:
        raise ValidationError("bad-n", f"n={n} is not a positive multiple of {lam}")

    def ratio(numerator: Fraction, denominator: Fraction) -> Fraction:
        if denominator <= 0:
            raise ValidationError(
                "degenerate-denominator", f"bound denominator {denominator} is not positive"
            )
        return numerator / denominator

    if kind == "poa_upper":
        if tv is None:
            raise ValidationError("missing-tolerance", "poa_upper needs a tolerance vector")
        tau, _ = tolerance_sums(tv)
        return ratio(Fraction(lam * n), tau * n - lam)
    if kind == "poa_lower":
        if tv is None:
            raise ValidationError("missing-tolerance", "poa_lower needs a tolerance vector")
        _, per_type = tolerance_sums(tv)
        total = sum(per_type, Fraction(0))
        return ratio(
            Fraction(lam * n), total * n / lam - Fraction(lam**2 - total, lam - 1)
        )
    if kind == "zts_poa":
        return ratio(Fraction(lam * n), Fraction(n - lam))
    if kind == "pos_lower":
        if tv is None or tv.lam != 2:
            raise ValidationError(
                "missing-tolerance", "pos_lower needs a 2-type tolerance vector"
            )
        return Fraction(2) / (1 + tv.values[1])
    if kind == "proportional_poa_upper":
        return ratio(Fraction(lam * n), Fraction(lam, 2) * n - lam)
    if kind == "inverse_poa_upper":
        harmonic = sum((Fraction(1, d) for d in range(1, lam + 1)), Fraction(0))
        return ratio(Fraction(lam * n), harmonic * n - lam)
    raise ValidationError("unknown-kind", f"unknown bound kind {kind!r}")
