"""Constructive equilibria for structured boards.

Grids: a column-wise fill for two zero-tolerance types, a row-band tiling for
games where adjacent types tolerate each other fully (2-binary vectors), and
a column fill within the first ~sqrt(n) rows for wider binary tolerance.
Trees: a centroid-rooted, subtree-by-subtree bottom-up fill.

The grid fills follow their recipes exactly (they are proven correct); the
band and tree constructions additionally re-verify their output with the
equilibrium checker and fail loudly instead of returning a bad placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

from .core import Assignment, GameInstance
from .equilibrium import is_equilibrium
from .errors import (
    ConstructionCheckFailed,
    NotATree,
    NotGrid,
    ValidationError,
    WrongGameClass,
)
from .topology import Topology, centroid


def _grid_view(topology: Topology):
    """Logical (rows, cols, node_at) with rows <= cols.

    Boards built taller than wide are used transposed, so every fill below
    can assume row count <= column count.
    """
    if topology.grid_shape is None:
        raise NotGrid("construction needs a grid board")
    physical_rows, physical_cols = topology.grid_shape
    if physical_rows <= physical_cols:
        def node_at(i: int, j: int) -> int:
            return (i - 1) * physical_cols + (j - 1)

        return physical_rows, physical_cols, node_at

    def node_at(i: int, j: int) -> int:  # logical (i, j) is physical (j, i)
        return (j - 1) * physical_cols + (i - 1)

    return physical_cols, physical_rows, node_at


def _column_major(rows: int, cols: int):
    """Positions (i, j) column by column, top to bottom."""
    for j in range(1, cols + 1):
        for i in range(1, rows + 1):
            yield i, j


def construct_2zts_grid(game: GameInstance) -> Assignment:
    """Equilibrium for two zero-tolerance types on a grid.

    Column-wise fill: every type-1 agent, then all mM - n empty nodes, then
    every type-2 agent.
    """
    if game.lam != 2 or game.tolerance.binary_alpha() != 1:
        raise WrongGameClass("needs exactly 2 types with zero tolerance")
    rows, cols, node_at = _grid_view(game.topology)
    x = game.agents_per_type
    empties = rows * cols - game.n
    cells = [0] * game.topology.node_count
    for index, (i, j) in enumerate(_column_major(rows, cols)):
        if index < x:
            cells[node_at(i, j)] = 1
        elif index >= x + empties:
            cells[node_at(i, j)] = 2
    return Assignment(tuple(cells))


@dataclass
class GridFillState:
    """Mutable cursor for tiling a grid row band by row band.

    Works in logical coordinates with rows <= cols; ``cursor`` is the next
    unfilled logical row (1-based). Agents are drawn per type in priority
    order (type 1 first) from ``remaining``.
    """

    grid: Topology
    rows: int
    cols: int
    cursor: int
    placement: Dict[int, int]
    remaining: List[int]  # index 0 unused; remaining[t] agents of type t left
    marked_empty: set = field(default_factory=set)
    _node_at: Callable[[int, int], int] = field(repr=False, default=None)
    _next_type: int = 1

    @classmethod
    def for_game(cls, game: GameInstance) -> "GridFillState":
        rows, cols, node_at = _grid_view(game.topology)
        return cls(
            grid=game.topology,
            rows=rows,
            cols=cols,
            cursor=1,
            placement={},
            remaining=[0] + [game.agents_per_type] * game.lam,
            _node_at=node_at,
        )

    def node_at(self, i: int, j: int) -> int:
        return self._node_at(i, j)

    def done(self) -> bool:
        return not any(self.remaining[1:])

    def rows_left(self) -> int:
        return self.rows - self.cursor + 1

    def empties_left(self) -> int:
        return self.rows_left() * self.cols - sum(self.remaining)

    def draw(self) -> int:
        while self._next_type < len(self.remaining) and not self.remaining[self._next_type]:
            self._next_type += 1
        t = self._next_type
        self.remaining[t] -= 1
        return t

    def place(self, node: int) -> None:
        self.placement[node] = self.draw()

    def skip_row(self) -> None:
        if self.cursor > self.rows:
            raise ValidationError("row-overflow", "no row left to skip")
        self.cursor += 1

    def assignment(self) -> Assignment:
        return Assignment.from_placement(self.grid.node_count, self.placement)


def tile(state: GridFillState, rows: int, empties: int) -> GridFillState:
    """Fill the next ``rows``-row band column by column.

    The leftmost ``empties`` nodes of the band's top row are marked empty and
    skipped; every other node receives the next agent in type order while
    agents remain. The cursor advances past the band.
    """
    if rows < 0 or state.cursor + rows - 1 > state.rows:
        raise ValidationError(
            "row-overflow", f"tile of {rows} rows does not fit below row {state.cursor}"
        )
    if not (0 <= empties <= state.cols):
        raise ValidationError("k-too-large", f"cannot leave {empties} of {state.cols} nodes empty")
    top = state.cursor
    for j in range(1, empties + 1):
        state.marked_empty.add(state.node_at(top, j))
    for j in range(1, state.cols + 1):
        for i in range(top, top + rows):
            node = state.node_at(i, j)
            if node in state.marked_empty:
                continue
            if state.done():
                break
            state.place(node)
    state.cursor = top + rows
    return state


def construct_binary_grid(game: GameInstance) -> Assignment:
    """Equilibrium for a grid game whose tolerance is 1 up to type distance 1.

    Tiles full row bands of height x (one type per column) separated by empty
    rows while a full empty row can be afforded, then closes the remaining
    rows with one band that absorbs the leftover empty nodes. Placement order
    keeps every agent's neighbors within type distance 1 of its own type,
    except for at most one neighbor across a band boundary.
    """
    alpha = game.tolerance.binary_alpha()
    if alpha != 2:
        raise WrongGameClass("needs a binary tolerance vector with exactly two leading ones")
    state = GridFillState.for_game(game)
    x = game.agents_per_type
    cols = state.cols
    while not state.done() and x <= state.rows_left() and state.empties_left() >= cols:
        tile(state, x, 0)
        if state.done():
            break
        state.skip_row()
    if not state.done():
        rows_left = state.rows_left()
        empties_left = state.empties_left()
        if x > rows_left:
            tile(state, rows_left, 0)
        else:
            # rows_left = quot * x + rem with quot >= 1, 0 <= rem < x
            quot, rem = divmod(rows_left, x)
            for _ in range(quot - 1):
                if state.done():
                    break
                tile(state, x, 0)
            if not state.done():
                if rem == 0:
                    tile(state, x, empties_left)
                else:
                    # The understocked band must go below the full one: its
                    # marked nodes then border far types above, so no jump
                    # onto them beats the utilities the fill guarantees.
                    tile(state, x, 0)
                    if not state.done():
                        tile(state, rem, empties_left)
    return state.assignment()


def construct_band_grid(game: GameInstance) -> Assignment:
    """Equilibrium for alpha-binary grid games with alpha >= ceil(sqrt(lam)).

    Fills columns left to right in type order, restricted to the first
    min(rows, floor(sqrt(n))) rows, which keeps the type distance between any
    two neighbors below alpha and gives every agent utility exactly 1. The
    output is re-verified before being returned.
    """
    alpha = game.tolerance.binary_alpha()
    min_alpha = math.isqrt(game.lam - 1) + 1  # ceil(sqrt(lam))
    if game.lam < 3 or alpha is None or alpha < min_alpha:
        raise WrongGameClass(
            f"needs >= 3 types and a binary vector with alpha >= ceil(sqrt(lam)) = {min_alpha}"
        )
    rows, cols, node_at = _grid_view(game.topology)
    band = min(rows, math.isqrt(game.n))
    if band * cols < game.n:
        raise ConstructionCheckFailed(
            f"band of {band} rows x {cols} cols cannot hold {game.n} agents"
        )
    cells = [0] * game.topology.node_count
    for index, (i, j) in enumerate(_column_major(band, cols)):
        if index >= game.n:
            break
        cells[node_at(i, j)] = index // game.agents_per_type + 1
    assignment = Assignment(tuple(cells))
    ok, witness = is_equilibrium(game, assignment)
    if not ok:
        raise ConstructionCheckFailed(f"band fill is not an equilibrium: {witness}")
    return assignment


# ---------------------------------------------------------------------------
# Trees


@dataclass(frozen=True)
class RootedSubtree:
    """One component hanging below the (empty) root of a rooted tree."""

    root: int  # child of the tree root
    nodes: Tuple[int, ...]
    levels: Tuple[Tuple[int, ...], ...]  # nodes by depth below the tree root's child
    parent: Dict[int, int]  # within the subtree; the subtree root maps to -1
    children: Dict[int, Tuple[int, ...]]

    @property
    def size(self) -> int:
        return len(self.nodes)


def subtrees_below(topology: Topology, root: int) -> list[RootedSubtree]:
    """Subtrees obtained by removing ``root``, ordered by non-increasing size
    with ties broken towards the smallest contained node id."""
    parent, depth, order = topology.rooted_at(root)
    by_child: dict[int, list[int]] = {c: [] for c in topology.neighbors[root]}
    # Walk the BFS order; every non-root node belongs to the subtree of its
    # ancestor child of root.
    anchor = {root: None}
    for v in order[1:]:
        anchor[v] = v if parent[v] == root else anchor[parent[v]]
        by_child[anchor[v]].append(v)
    subtrees = []
    for child in sorted(by_child):
        nodes = sorted(by_child[child])
        levels: dict[int, list[int]] = {}
        for v in nodes:
            levels.setdefault(depth[v] - 1, []).append(v)
        level_list = tuple(tuple(sorted(levels[d])) for d in sorted(levels))
        sub_parent = {v: (parent[v] if v != child else -1) for v in nodes}
        sub_children: dict[int, tuple[int, ...]] = {
            v: tuple(u for u in topology.neighbors[v] if sub_parent.get(u) == v)
            for v in nodes
        }
        subtrees.append(
            RootedSubtree(
                root=child,
                nodes=tuple(nodes),
                levels=level_list,
                parent=sub_parent,
                children=sub_children,
            )
        )
    subtrees.sort(key=lambda s: (-s.size, s.nodes[0]))
    return subtrees


def bottom_up(
    subtree: RootedSubtree, pools: Sequence[Tuple[int, int]]
) -> dict[int, int]:
    """Fill an empty subtree from its deepest level upwards.

    ``pools`` is an ordered sequence of (type index, agent count). The first
    pool fills whole levels deepest-first, preferring siblings of the node
    just filled; the second pool first occupies the parents of every
    first-pool agent, then extends the occupied set connectedly; later pools
    keep extending connectedly. Stops when the subtree is full or the pools
    run out. Returns the placements made ({node: type}).
    """
    pools = [(t, count) for t, count in pools if count > 0]
    placed: dict[int, int] = {}
    if not pools:
        return placed
    capacity = subtree.size

    def full() -> bool:
        return len(placed) >= capacity

    # First pool: deepest level first; within a level prefer siblings of the
    # most recent placement, otherwise the smallest pending node id.
    first_type, first_count = pools[0]
    first_nodes: list[int] = []
    for level in reversed(subtree.levels):
        if first_count == 0 or full():
            break
        pending = [v for v in level if v not in placed]
        last = None
        while pending and first_count and not full():
            node = None
            if last is not None:
                siblings = [v for v in pending if subtree.parent[v] == subtree.parent[last]]
                if siblings:
                    node = siblings[0]
            if node is None:
                node = pending[0]
            pending.remove(node)
            placed[node] = first_type
            first_nodes.append(node)
            first_count -= 1

    def connected_fill(type_index: int, count: int) -> int:
        while count and not full():
            frontier = sorted(
                v
                for v in subtree.nodes
                if v not in placed
                and (
                    (subtree.parent[v] != -1 and subtree.parent[v] in placed)
                    or any(u in placed for u in subtree.children[v])
                )
            )
            if not frontier:
                break
            placed[frontier[0]] = type_index
            count -= 1
        return count

    if len(pools) >= 2 and not full():
        second_type, second_count = pools[1]
        # Cover the parent of every first-pool agent before anything else.
        while second_count and not full():
            uncovered = sorted(
                subtree.parent[v]
                for v in first_nodes
                if subtree.parent[v] != -1 and subtree.parent[v] not in placed
            )
            if not uncovered:
                break
            placed[uncovered[0]] = second_type
            second_count -= 1
        second_count = connected_fill(second_type, second_count)
        for type_index, count in pools[2:]:
            if full():
                break
            connected_fill(type_index, count)
    return placed


def _tree_reference_alpha(lam: int) -> int:
    return 2 if lam == 3 else lam // 2


def construct_tree_equilibrium(game: GameInstance) -> Assignment:
    """Equilibrium on a tree for tolerance vectors that are fully tolerant
    within type distance 2 (3 types) or lam // 2 (4+ types).

    Roots the tree at a centroid (left empty), orders the subtrees by
    non-increasing size, and fills them in three passes: low types bottom-up
    until type 1 runs out, then high types (descending) until the last type
    runs out, then the middle remainder. A final repair pass reconnects any
    isolated agents in the last subtree touched, or moves a single isolated
    agent to the root. The result is re-verified before being returned.
    """
    topology = game.topology
    if not topology.is_tree():
        raise NotATree("construction needs a tree board")
    lam = game.lam
    if lam < 3:
        raise WrongGameClass("needs at least 3 types")
    alpha_ref = _tree_reference_alpha(lam)
    if any(game.tolerance.values[d] != 1 for d in range(alpha_ref)):
        raise WrongGameClass(
            f"needs full tolerance up to type distance {alpha_ref - 1}"
        )
    root = centroid(topology)
    subtrees = subtrees_below(topology, root)
    remaining = [0] + [game.agents_per_type] * lam
    cells = [0] * topology.node_count
    next_subtree = 0

    def run_band(band: Sequence[int]) -> None:
        nonlocal next_subtree
        if next_subtree >= len(subtrees):
            raise ConstructionCheckFailed("ran out of subtrees before placing every agent")
        sub = subtrees[next_subtree]
        next_subtree += 1
        pools = [(t, remaining[t]) for t in band]
        for node, t in bottom_up(sub, pools).items():
            cells[node] = t
            remaining[t] -= 1

    low_band = list(range(1, (lam + 1) // 2 + 1))  # types 1 .. ceil(lam/2)
    while remaining[1] > 0:
        run_band(low_band)
    high_band = list(range(lam, lam // 2, -1))  # lam down to ceil((lam+1)/2)
    while remaining[lam] > 0:
        run_band(high_band)
    while any(remaining[t] for t in range(1, lam + 1)):
        middle_band = [t for t in range(1, lam + 1) if remaining[t] > 0]
        run_band(middle_band)

    last = subtrees[next_subtree - 1]
    isolated = [
        v
        for v in last.nodes
        if cells[v] and not any(cells[u] for u in topology.neighbors[v])
    ]
    if len(isolated) == 1:
        cells[root] = cells[isolated[0]]
        cells[isolated[0]] = 0
    elif len(isolated) >= 2:
        types = sorted(cells[v] for v in isolated)
        for v in isolated:
            cells[v] = 0
        for t in types:
            candidates = sorted(
                v
                for v in last.nodes
                if not cells[v] and any(cells[u] for u in topology.neighbors[v])
            )
            target = candidates[0] if candidates else last.root
            cells[target] = t

    assignment = Assignment(tuple(cells))
    assignment.validate_for(game)
    ok, witness = is_equilibrium(game, assignment)
    if not ok:
        raise ConstructionCheckFailed(f"tree fill is not an equilibrium: {witness}")
    return assignment
