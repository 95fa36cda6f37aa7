"""Game boards: validated undirected graphs, generators, and tree helpers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .errors import NotATree, ValidationError

# Fill colors used for DOT export and figures, indexed by (type - 1) mod len.
TYPE_PALETTE = (
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
    "#a65628", "#f781bf", "#999999", "#66c2a5", "#ffd92f",
)
EMPTY_COLOR = "white"


@dataclass(frozen=True)
class Topology:
    """Simple connected undirected graph with dense integer node ids.

    ``grid_shape`` is ``(rows, cols)`` for boards built by :func:`grid`.
    Grid coordinates are 1-based and row-major: node (i, j) has id
    ``(i - 1) * cols + (j - 1)``.
    """

    node_count: int
    neighbors: Tuple[Tuple[int, ...], ...]
    grid_shape: Optional[Tuple[int, int]] = None

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.neighbors) // 2

    def edges(self) -> list[tuple[int, int]]:
        """All edges as sorted (low, high) pairs, in ascending order."""
        out = []
        for u, adj in enumerate(self.neighbors):
            for v in adj:
                if u < v:
                    out.append((u, v))
        return out

    def degree(self, node: int) -> int:
        return len(self.neighbors[node])

    def is_tree(self) -> bool:
        # Connectivity is guaranteed at construction time.
        return self.edge_count == self.node_count - 1

    def is_grid(self) -> bool:
        return self.grid_shape is not None

    def node_at(self, i: int, j: int) -> int:
        """Node id at 1-based grid coordinates (row i, column j)."""
        if self.grid_shape is None:
            raise ValidationError("not-grid", "topology has no grid metadata")
        rows, cols = self.grid_shape
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ValidationError(
                "node-unknown", f"grid coordinate ({i}, {j}) outside {rows}x{cols}"
            )
        return (i - 1) * cols + (j - 1)

    def coords(self, node: int) -> tuple[int, int]:
        """1-based (row, column) of a node in a grid topology."""
        if self.grid_shape is None:
            raise ValidationError("not-grid", "topology has no grid metadata")
        self._check_node(node)
        cols = self.grid_shape[1]
        return node // cols + 1, node % cols + 1

    def rooted_at(self, root: int):
        """Root the graph at ``root`` via BFS.

        Returns (parent, depth, order): parent of the root is -1, ``order``
        is the BFS visit order. Only meaningful for trees, but defined for
        any connected graph (BFS tree).
        """
        self._check_node(root)
        parent = [-1] * self.node_count
        depth = [0] * self.node_count
        seen = [False] * self.node_count
        seen[root] = True
        order = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in self.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    order.append(v)
                    queue.append(v)
        return tuple(parent), tuple(depth), tuple(order)

    def _check_node(self, node: int) -> None:
        if not (0 <= node < self.node_count):
            raise ValidationError("node-unknown", f"node {node} not on the board")


def build_graph(node_count: int, edges: Iterable[Sequence[int]]) -> Topology:
    """Validate and build a simple connected undirected graph."""
    if node_count < 1:
        raise ValidationError("too-small", "a board needs at least one node")
    adjacency: list[set[int]] = [set() for _ in range(node_count)]
    seen: set[tuple[int, int]] = set()
    for edge in edges:
        u, v = edge
        for end in (u, v):
            if not (0 <= end < node_count):
                raise ValidationError("node-unknown", f"edge endpoint {end} out of range")
        if u == v:
            raise ValidationError("self-loop", f"self-loop at node {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise ValidationError("duplicate-edge", f"duplicate edge {key}")
        seen.add(key)
        adjacency[u].add(v)
        adjacency[v].add(u)
    _check_connected(node_count, adjacency)
    return Topology(node_count, tuple(tuple(sorted(adj)) for adj in adjacency))


def _check_connected(node_count: int, adjacency: Sequence[set[int]]) -> None:
    reached = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in reached:
                reached.add(v)
                queue.append(v)
    if len(reached) != node_count:
        raise ValidationError(
            "disconnected", f"graph is disconnected ({len(reached)}/{node_count} reachable)"
        )


def grid(m: int, M: int) -> Topology:
    """4-neighborhood grid with m rows and M columns."""
    if m < 1 or M < 1 or m * M < 2:
        raise ValidationError("too-small", f"grid {m}x{M} is too small")
    edges = []
    for i in range(m):
        for j in range(M):
            node = i * M + j
            if j + 1 < M:
                edges.append((node, node + 1))
            if i + 1 < m:
                edges.append((node, node + M))
    topo = build_graph(m * M, edges)
    return Topology(topo.node_count, topo.neighbors, grid_shape=(m, M))


def standard_graph(kind: str, size: int) -> Topology:
    """Named generator: path, cycle, clique, or star (center = node 0)."""
    if kind == "path":
        if size < 2:
            raise ValidationError("too-small", "a path needs at least 2 nodes")
        return build_graph(size, [(i, i + 1) for i in range(size - 1)])
    if kind == "cycle":
        if size < 3:
            raise ValidationError("too-small", "a cycle needs at least 3 nodes")
        return build_graph(size, [(i, (i + 1) % size) for i in range(size)])
    if kind == "clique":
        if size < 2:
            raise ValidationError("too-small", "a clique needs at least 2 nodes")
        return build_graph(
            size, [(i, j) for i in range(size) for j in range(i + 1, size)]
        )
    if kind == "star":
        if size < 2:
            raise ValidationError("too-small", "a star needs at least 2 nodes")
        return build_graph(size, [(0, i) for i in range(1, size)])
    raise ValidationError("unknown-kind", f"unknown standard graph kind {kind!r}")


def centroid(topology: Topology) -> int:
    """Tree node whose removal leaves components of size <= floor(n/2).

    Ties are broken towards the smallest node id so downstream constructions
    are reproducible.
    """
    if not topology.is_tree():
        raise NotATree(f"{topology.node_count}-node graph with "
                       f"{topology.edge_count} edges is not a tree")
    n = topology.node_count
    if n < 3:
        raise ValidationError("too-small", "centroid needs a tree with >= 3 nodes")
    parent, _, order = topology.rooted_at(0)
    size = [1] * n
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    best, best_worst = 0, n
    for v in range(n):
        worst = n - size[v]
        for u in topology.neighbors[v]:
            if parent[u] == v:
                worst = max(worst, size[u])
        if worst < best_worst:
            best, best_worst = v, worst
    return best


def to_dot(topology: Topology, assignment=None, name: str = "board") -> str:
    """Render as Graphviz DOT: one undirected edge per line, nodes filled
    by type color when an assignment is given."""
    lines = [f"graph {name} {{"]
    if assignment is not None:
        lines.append("  node [style=filled];")
        for node in range(topology.node_count):
            t = assignment.type_of(node)
            color = EMPTY_COLOR if t == 0 else TYPE_PALETTE[(t - 1) % len(TYPE_PALETTE)]
            lines.append(f'  {node} [fillcolor="{color}"];')
    for u, v in topology.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
