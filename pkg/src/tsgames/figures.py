"""Matplotlib renderers for assignments and sweep reports.

Figures are written straight to files (Agg backend); the CLI report path
drops them next to its CSV output.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .core import Assignment
from .topology import EMPTY_COLOR, TYPE_PALETTE, Topology


def _type_color(t: int) -> str:
    return EMPTY_COLOR if t == 0 else TYPE_PALETTE[(t - 1) % len(TYPE_PALETTE)]


def _grid_positions(topology: Topology) -> dict[int, tuple[float, float]]:
    rows, cols = topology.grid_shape
    return {
        (i - 1) * cols + (j - 1): (float(j), float(rows - i))
        for i in range(1, rows + 1)
        for j in range(1, cols + 1)
    }


def _tree_positions(topology: Topology) -> dict[int, tuple[float, float]]:
    # Layer nodes by depth from node 0; spread leaves evenly, parents sit
    # above the mean of their children.
    parent, depth, order = topology.rooted_at(0)
    xs: dict[int, float] = {}
    next_leaf = 0.0
    for v in reversed(order):
        children = [u for u in topology.neighbors[v] if parent[u] == v]
        if children:
            xs[v] = sum(xs[u] for u in children) / len(children)
        else:
            xs[v] = next_leaf
            next_leaf += 1.0
    return {v: (xs[v], float(-depth[v])) for v in range(topology.node_count)}


def _circle_positions(topology: Topology) -> dict[int, tuple[float, float]]:
    import math

    n = topology.node_count
    return {
        v: (math.cos(2 * math.pi * v / n), math.sin(2 * math.pi * v / n))
        for v in range(n)
    }


def save_assignment_figure(
    topology: Topology,
    assignment: Optional[Assignment],
    path: Union[str, Path],
    title: Optional[str] = None,
) -> Path:
    """Draw the board with nodes colored by type; returns the file path."""
    path = Path(path)
    if topology.is_grid():
        rows, cols = topology.grid_shape
        fig, ax = plt.subplots(figsize=(1 + 0.6 * cols, 1 + 0.6 * rows))
        for i in range(1, rows + 1):
            for j in range(1, cols + 1):
                node = (i - 1) * cols + (j - 1)
                t = assignment.type_of(node) if assignment else 0
                ax.add_patch(
                    Rectangle((j - 1, rows - i), 1, 1, facecolor=_type_color(t),
                              edgecolor="black", linewidth=0.8)
                )
                label = str(t) if t else ""
                ax.text(j - 0.5, rows - i + 0.5, label, ha="center", va="center")
        ax.set_xlim(0, cols)
        ax.set_ylim(0, rows)
        ax.set_aspect("equal")
        ax.axis("off")
    else:
        pos = _tree_positions(topology) if topology.is_tree() else _circle_positions(topology)
        fig, ax = plt.subplots(figsize=(7, 5))
        for u, v in topology.edges():
            ax.plot(
                [pos[u][0], pos[v][0]], [pos[u][1], pos[v][1]],
                color="0.6", linewidth=0.8, zorder=1,
            )
        for v in range(topology.node_count):
            t = assignment.type_of(v) if assignment else 0
            ax.scatter(*pos[v], s=220, color=_type_color(t), edgecolors="black", zorder=2)
            ax.text(*pos[v], str(t) if t else "", ha="center", va="center", zorder=3)
        ax.set_aspect("equal")
        ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_figure(rows: Sequence[dict], path: Union[str, Path]) -> Path:
    """Plot price ratios against the number of agents for a sweep report.

    ``rows`` are the CSV rows of the sweep: dicts with keys n, poa, pos
    (ratios are Fractions or None when no equilibrium exists).
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    have = [r for r in rows if r.get("poa") is not None]
    if have:
        ns = [r["n"] for r in have]
        ax.plot(ns, [float(r["poa"]) for r in have], "o-", label="anarchy ratio")
        ax.plot(ns, [float(r["pos"]) for r in have], "s--", label="stability ratio")
        ax.legend()
    missing = [r for r in rows if r.get("poa") is None]
    if missing:
        for r in missing:
            ax.axvline(r["n"], color="red", linestyle=":", linewidth=0.8)
    ax.set_xlabel("number of agents n")
    ax.set_ylabel("ratio to optimum welfare")
    ax.set_title("equilibrium quality sweep")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
