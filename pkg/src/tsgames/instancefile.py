"""Reading and writing game instance files.

The on-disk format is JSON with every rational written as a string "p/q"
(or a bare integer string), so round-trips are exact. A topology is either
an explicit node_count + edge list or a generator spec; grids keep their
shape metadata either way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

from .core import (
    Assignment,
    GameInstance,
    ToleranceVector,
    as_rational,
    format_rational,
    standard_tolerance,
)
from .errors import ValidationError
from .topology import Topology, build_graph, grid, standard_graph


@dataclass
class InstanceDocument:
    """In-memory form of an instance file."""

    game: GameInstance
    assignments: Dict[str, Assignment] = field(default_factory=dict)
    metadata: Dict[str, object] = field(default_factory=dict)


def _topology_doc(topology: Topology) -> dict:
    if topology.grid_shape is not None:
        rows, cols = topology.grid_shape
        return {"generator": "grid", "rows": rows, "cols": cols}
    return {"node_count": topology.node_count, "edges": topology.edges()}


def _topology_from_doc(doc: dict) -> Topology:
    if "generator" in doc:
        kind = doc["generator"]
        if kind == "grid":
            return grid(doc["rows"], doc["cols"])
        if kind in ("path", "cycle", "clique", "star"):
            return standard_graph(kind, doc["size"])
        raise ValidationError("unknown-kind", f"unknown topology generator {kind!r}")
    try:
        return build_graph(doc["node_count"], [tuple(e) for e in doc["edges"]])
    except KeyError as exc:
        raise ValidationError("bad-file", f"topology section missing {exc}") from exc


def _tolerance_doc(tv: ToleranceVector) -> list[str]:
    return [format_rational(v) for v in tv.values]


def _tolerance_from_doc(doc: Union[list, dict], lam: int) -> ToleranceVector:
    if isinstance(doc, dict):
        return standard_tolerance(doc["kind"], lam, doc.get("alpha"))
    return ToleranceVector(tuple(as_rational(v) for v in doc))


def document_to_json(doc: InstanceDocument) -> str:
    game = doc.game
    payload: dict = {
        "topology": _topology_doc(game.topology),
        "game": {
            "lambda": game.lam,
            "agents_per_type": game.agents_per_type,
            "tolerance": _tolerance_doc(game.tolerance),
        },
    }
    if doc.assignments:
        payload["assignments"] = {
            label: [[node, t] for node, t in sorted(a.placement().items())]
            for label, a in sorted(doc.assignments.items())
        }
    if doc.metadata:
        payload["metadata"] = doc.metadata
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def document_from_json(text: str) -> InstanceDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("bad-file", f"not valid JSON: {exc}") from exc
    try:
        topology = _topology_from_doc(payload["topology"])
        game_doc = payload["game"]
        lam = game_doc["lambda"]
        tolerance = _tolerance_from_doc(game_doc["tolerance"], lam)
        game = GameInstance(lam, game_doc["agents_per_type"], topology, tolerance)
    except KeyError as exc:
        raise ValidationError("bad-file", f"instance file missing section {exc}") from exc
    assignments = {}
    for label, pairs in payload.get("assignments", {}).items():
        assignment = Assignment.from_placement(
            topology.node_count, {int(node): int(t) for node, t in pairs}
        )
        assignment.validate_for(game)
        assignments[label] = assignment
    return InstanceDocument(
        game=game, assignments=assignments, metadata=payload.get("metadata", {})
    )


def write_instance(path: Union[str, Path], doc: InstanceDocument) -> None:
    Path(path).write_text(document_to_json(doc))


def read_instance(path: Union[str, Path]) -> InstanceDocument:
    return document_from_json(Path(path).read_text())
