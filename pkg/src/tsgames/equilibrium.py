"""Deviation analysis, equilibrium checking, dynamics, and exhaustive search.

A deviation is a jump to an empty node; the mover's origin is vacated before
the target neighborhood is evaluated, and only strictly improving jumps
count. Comparisons run on integer-scaled utilities (one common denominator
for the tolerance weights), which is exact and much faster than Fraction
arithmetic in the enumeration loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Tuple

from .core import Assignment, GameInstance
from .errors import (
    BudgetExceeded,
    NoEquilibrium,
    ValidationError,
    ZeroWelfareEquilibrium,
)

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class DeviationWitness:
    """A strictly improving jump: agent at from_node gains by moving to to_node."""

    from_node: int
    to_node: int
    old_utility: Fraction
    new_utility: Fraction


class DynamicsOutcome(Enum):
    CONVERGED = "converged"
    CYCLE_DETECTED = "cycle-detected"
    STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class DynamicsResult:
    outcome: DynamicsOutcome
    final_assignment: Assignment
    steps: int
    trace: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class PriceReport:
    opt: Fraction
    worst_eq: Fraction
    best_eq: Fraction
    poa: Fraction
    pos: Fraction
    equilibrium_count: int


class _FastGame:
    """Integer-scaled evaluator shared by the checker and the enumerators.

    Tolerance weights become integers over one common denominator ``scale``;
    an agent's utility is num / (scale * count) where num sums scaled weights
    over occupied neighbors. All comparisons cross-multiply integers.
    """

    __slots__ = ("adj", "lam", "scale", "weights", "node_count")

    def __init__(self, game: GameInstance):
        self.adj = game.topology.neighbors
        self.node_count = game.topology.node_count
        self.lam = game.lam
        values = game.tolerance.values
        self.scale = math.lcm(*(v.denominator for v in values))
        scaled = [int(v * self.scale) for v in values]
        # weights[l][k] for 1-based type indices; row/column 0 stay 0.
        self.weights = [[0] * (self.lam + 1)]
        for l in range(1, self.lam + 1):
            row = [0] * (self.lam + 1)
            for k in range(1, self.lam + 1):
                row[k] = scaled[abs(l - k)]
            self.weights.append(row)

    def parts(self, cells, node: int, mover_type: int, skip: int = -1):
        """(weighted numerator, occupied neighbor count) at ``node`` for an
        agent of ``mover_type``, ignoring ``skip`` (the vacated origin)."""
        row = self.weights[mover_type]
        num = 0
        cnt = 0
        for u in self.adj[node]:
            if u != skip:
                k = cells[u]
                if k:
                    num += row[k]
                    cnt += 1
        return num, cnt

    def utility_fraction(self, num: int, cnt: int) -> Fraction:
        if cnt == 0:
            return Fraction(0)
        return Fraction(num, cnt * self.scale)

    def welfare(self, cells, occupied) -> Fraction:
        total = Fraction(0)
        for node in occupied:
            num, cnt = self.parts(cells, node, cells[node])
            if cnt:
                total += Fraction(num, cnt * self.scale)
        return total


def _improves(new_num: int, new_cnt: int, old_num: int, old_cnt: int) -> bool:
    """Strict utility improvement test on scaled parts."""
    if new_cnt == 0:
        return False
    if old_cnt == 0:
        return new_num > 0
    return new_num * old_cnt > old_num * new_cnt


def _strictly_better(a_num: int, a_cnt: int, b_num: int, b_cnt: int) -> bool:
    """Is utility a strictly greater than utility b (both scaled parts)?"""
    if a_cnt == 0:
        return False
    if b_cnt == 0:
        return a_num > 0
    return a_num * b_cnt > b_num * a_cnt


def _best_deviation_cells(ctx: _FastGame, cells, node: int):
    """Best strictly improving jump for the agent at ``node``, or None.

    Ties in the target utility keep the smallest target id (the scan is
    ascending and requires a strict improvement to replace the incumbent).
    """
    mover = cells[node]
    old_num, old_cnt = ctx.parts(cells, node, mover)
    if old_cnt and old_num == old_cnt * ctx.scale:
        return None  # utility already 1, nothing can beat it
    best = None
    for target in range(ctx.node_count):
        if cells[target]:
            continue
        num, cnt = ctx.parts(cells, target, mover, skip=node)
        if _improves(num, cnt, old_num, old_cnt):
            if best is None or _strictly_better(num, cnt, best[0], best[1]):
                best = (num, cnt, target)
    if best is None:
        return None
    return DeviationWitness(
        from_node=node,
        to_node=best[2],
        old_utility=ctx.utility_fraction(old_num, old_cnt),
        new_utility=ctx.utility_fraction(best[0], best[1]),
    )


def _has_deviation_cells(ctx: _FastGame, cells, occupied, empties) -> bool:
    """Early-exit check used by the enumerators."""
    scale = ctx.scale
    for node in occupied:
        mover = cells[node]
        old_num, old_cnt = ctx.parts(cells, node, mover)
        if old_cnt and old_num == old_cnt * scale:
            continue
        for target in empties:
            num, cnt = ctx.parts(cells, target, mover, skip=node)
            if _improves(num, cnt, old_num, old_cnt):
                return True
    return False


def best_deviation(
    game: GameInstance, assignment: Assignment, node: int
) -> Optional[DeviationWitness]:
    """The strictly best strictly improving jump for the agent at ``node``.

    Returns None when no jump improves. Ties between equally good targets go
    to the smallest target node id.
    """
    if not (0 <= node < game.topology.node_count):
        raise ValidationError("node-unknown", f"node {node} not on the board")
    if assignment.cells[node] == 0:
        raise ValidationError("node-empty", f"node {node} is empty")
    ctx = _FastGame(game)
    return _best_deviation_cells(ctx, assignment.cells, node)


def is_equilibrium(
    game: GameInstance, assignment: Assignment
) -> tuple[bool, Optional[DeviationWitness]]:
    """True iff no agent has a strictly improving jump.

    On failure, returns the best deviation of the smallest occupied node id
    that has one.
    """
    assignment.validate_for(game)
    ctx = _FastGame(game)
    cells = assignment.cells
    for node in range(ctx.node_count):
        if cells[node]:
            witness = _best_deviation_cells(ctx, cells, node)
            if witness is not None:
                return False, witness
    return True, None


def best_response_dynamics(
    game: GameInstance, initial: Assignment, max_steps: int
) -> DynamicsResult:
    """Deterministic improving dynamics.

    Each step scans occupied nodes in ascending id and applies the first
    agent's best deviation. Stops at a fixpoint, when an assignment repeats,
    or after ``max_steps`` moves.
    """
    initial.validate_for(game)
    ctx = _FastGame(game)
    cells = list(initial.cells)
    seen = {tuple(cells)}
    trace: list[tuple[int, int]] = []
    steps = 0
    while True:
        witness = None
        for node in range(ctx.node_count):
            if cells[node]:
                witness = _best_deviation_cells(ctx, cells, node)
                if witness is not None:
                    break
        if witness is None:
            return DynamicsResult(
                DynamicsOutcome.CONVERGED, Assignment(tuple(cells)), steps, tuple(trace)
            )
        if steps >= max_steps:
            return DynamicsResult(
                DynamicsOutcome.STEP_LIMIT, Assignment(tuple(cells)), steps, tuple(trace)
            )
        cells[witness.to_node] = cells[witness.from_node]
        cells[witness.from_node] = 0
        steps += 1
        trace.append((witness.from_node, witness.to_node))
        key = tuple(cells)
        if key in seen:
            return DynamicsResult(
                DynamicsOutcome.CYCLE_DETECTED, Assignment(key), steps, tuple(trace)
            )
        seen.add(key)


def placement_count(game: GameInstance) -> int:
    """Number of distinct type placements of the game."""
    total = 1
    free = game.topology.node_count
    for _ in range(game.lam):
        total *= math.comb(free, game.agents_per_type)
        free -= game.agents_per_type
    return total


def _scan_placements(game: GameInstance, first_combos, want_equilibria, want_optimal):
    """Enumerate every type placement whose type-1 nodes are in first_combos.

    Returns (equilibrium cells list, best (welfare, cells) pair or None).
    """
    ctx = _FastGame(game)
    node_count = ctx.node_count
    x = game.agents_per_type
    lam = game.lam
    equilibria: list[tuple[int, ...]] = []
    best: Optional[tuple[Fraction, tuple[int, ...]]] = None
    cells = [0] * node_count

    def visit():
        nonlocal best
        placed = tuple(cells)
        occupied = [v for v in range(node_count) if placed[v]]
        if want_equilibria:
            empties = [v for v in range(node_count) if not placed[v]]
            if not _has_deviation_cells(ctx, placed, occupied, empties):
                equilibria.append(placed)
        if want_optimal:
            sw = ctx.welfare(placed, occupied)
            if best is None or sw > best[0] or (sw == best[0] and placed < best[1]):
                best = (sw, placed)

    def recurse(type_index: int, pool: list[int]):
        if type_index > lam:
            visit()
            return
        for combo in combinations(pool, x):
            for v in combo:
                cells[v] = type_index
            chosen = set(combo)
            recurse(type_index + 1, [v for v in pool if v not in chosen])
            for v in combo:
                cells[v] = 0

    for first in first_combos:
        for v in first:
            cells[v] = 1
        chosen = set(first)
        recurse(2, [v for v in range(node_count) if v not in chosen])
        for v in first:
            cells[v] = 0
    return equilibria, best


def _scan_task(args):
    game, combos, want_equilibria, want_optimal = args
    return _scan_placements(game, combos, want_equilibria, want_optimal)


def _enumerate(game, budget, workers, want_equilibria, want_optimal):
    total = placement_count(game)
    if budget is not None and total > budget:
        raise BudgetExceeded(total, budget)
    first_combos = list(combinations(range(game.topology.node_count), game.agents_per_type))
    if workers <= 1 or len(first_combos) < 2:
        equilibria, best = _scan_placements(game, first_combos, want_equilibria, want_optimal)
    else:
        from concurrent.futures import ProcessPoolExecutor

        workers = min(workers, len(first_combos))
        chunk = -(-len(first_combos) // workers)
        tasks = [
            (game, first_combos[i : i + chunk], want_equilibria, want_optimal)
            for i in range(0, len(first_combos), chunk)
        ]
        equilibria = []
        best = None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part_eq, part_best in pool.map(_scan_task, tasks):
                equilibria.extend(part_eq)
                if part_best is not None and (
                    best is None
                    or part_best[0] > best[0]
                    or (part_best[0] == best[0] and part_best[1] < best[1])
                ):
                    best = part_best
    equilibria.sort()
    return equilibria, best, total


def enumerate_equilibria(
    game: GameInstance,
    budget: Optional[int] = DEFAULT_BUDGET,
    workers: int = 1,
) -> list[Assignment]:
    """All equilibrium type placements, in lexicographic cell order.

    Raises BudgetExceeded (carrying the would-be count) when the placement
    space is larger than ``budget``. Results are identical for any worker
    count.
    """
    equilibria, _, _ = _enumerate(game, budget, workers, True, False)
    return [Assignment(cells) for cells in equilibria]


def optimal_welfare(
    game: GameInstance,
    budget: Optional[int] = DEFAULT_BUDGET,
    workers: int = 1,
) -> tuple[Assignment, Fraction]:
    """A welfare-maximizing placement (lexicographically smallest among
    maximizers) and its social welfare."""
    _, best, _ = _enumerate(game, budget, workers, False, True)
    assert best is not None
    return Assignment(best[1]), best[0]


def price_ratios(
    game: GameInstance,
    budget: Optional[int] = DEFAULT_BUDGET,
    workers: int = 1,
) -> PriceReport:
    """Exact optimum, worst/best equilibrium welfare, and the derived
    anarchy/stability ratios."""
    equilibria, best, _ = _enumerate(game, budget, workers, True, True)
    if not equilibria:
        raise NoEquilibrium("the game admits no equilibrium")
    assert best is not None
    ctx = _FastGame(game)
    welfares = [
        ctx.welfare(cells, [v for v in range(ctx.node_count) if cells[v]])
        for cells in equilibria
    ]
    worst = min(welfares)
    best_eq = max(welfares)
    opt = best[0]
    if worst == 0:
        raise ZeroWelfareEquilibrium(
            "worst equilibrium has zero welfare; anarchy ratio undefined"
        )
    return PriceReport(
        opt=opt,
        worst_eq=worst,
        best_eq=best_eq,
        poa=opt / worst,
        pos=opt / best_eq,
        equilibrium_count=len(equilibria),
    )
