"""Domain types and exact utility/welfare computation.

A game places ``lam`` equally sized agent types on a graph board. Types are
ordered, and an agent's tolerance towards a neighbor depends only on the
distance between their type indices: the tolerance vector maps distance d to
a weight t_d with 1 = t_0 >= t_1 >= ... >= t_{lam-1} >= 0 and t_{lam-1} < 1.
All arithmetic is exact (fractions.Fraction); equilibrium logic elsewhere
compares these rationals with no epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple, Union

from .errors import ValidationError
from .topology import Topology

Rational = Union[int, str, Fraction]


def as_rational(value: Rational) -> Fraction:
    """Coerce an int, Fraction, or "p/q" string to an exact Fraction.

    Floats are rejected on purpose: every quantity in this package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError("not-rational", f"cannot parse rational {value!r}") from exc
    raise ValidationError(
        "not-rational", f"refusing to treat {type(value).__name__} as an exact rational"
    )


def format_rational(value: Fraction) -> str:
    """Canonical text form: "p/q", or just "p" for integers."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ToleranceVector:
    """Non-increasing tolerance weights by type distance; first entry is 1."""

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(as_rational(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) < 2:
            raise ValidationError("empty-or-short", "need at least 2 tolerance weights")
        if values[0] != 1:
            raise ValidationError("not-normalized", f"t_0 must be 1, got {values[0]}")
        if any(values[d] < values[d + 1] for d in range(len(values) - 1)):
            raise ValidationError("not-monotone", "weights must be non-increasing")
        if values[-1] >= 1:
            raise ValidationError("trivial", "all-ones tolerance makes every game trivial")
        if values[-1] < 0:
            raise ValidationError("negative", "tolerance weights must be >= 0")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, distance: int) -> Fraction:
        return self.values[distance]

    @property
    def lam(self) -> int:
        return len(self.values)

    def weight(self, type_a: int, type_b: int) -> Fraction:
        """Tolerance between two (1-based) type indices."""
        return self.values[abs(type_a - type_b)]

    def binary_alpha(self) -> int | None:
        """If the vector is alpha-binary (ones then zeros), return alpha."""
        ones = 0
        for v in self.values:
            if v == 1:
                ones += 1
            else:
                break
        if all(v == 0 for v in self.values[ones:]):
            return ones
        return None


def new_tolerance_vector(values: Iterable[Rational]) -> ToleranceVector:
    """Validate a raw weight sequence into a ToleranceVector."""
    return ToleranceVector(tuple(values))


def standard_tolerance(kind: str, lam: int, alpha: int | None = None) -> ToleranceVector:
    """Build one of the named tolerance families.

    kinds: "zero" (t_d = 0 for d >= 1), "alpha_binary" (t_d = 1 iff d < alpha),
    "proportional" (t_d = 1 - d/(lam-1)), "inverse_proportional" (t_d = 1/(d+1)).
    """
    if lam < 2:
        raise ValidationError("empty-or-short", "need at least 2 types")
    if kind == "alpha_binary":
        if alpha is None:
            raise ValidationError("alpha-out-of-range", "alpha_binary needs alpha")
        if not (1 <= alpha <= lam):
            raise ValidationError("alpha-out-of-range", f"alpha={alpha} outside [1, {lam}]")
        if alpha == lam:
            raise ValidationError(
                "alpha-binary-trivial",
                f"alpha={lam} would make every pair of types fully tolerant",
            )
        values = [Fraction(1) if d < alpha else Fraction(0) for d in range(lam)]
        return ToleranceVector(tuple(values))
    if alpha is not None:
        raise ValidationError("alpha-out-of-range", f"kind {kind!r} takes no alpha")
    if kind == "zero":
        values = [Fraction(1)] + [Fraction(0)] * (lam - 1)
    elif kind == "proportional":
        values = [1 - Fraction(d, lam - 1) for d in range(lam)]
    elif kind == "inverse_proportional":
        values = [Fraction(1, d + 1) for d in range(lam)]
    else:
        raise ValidationError("unknown-kind", f"unknown tolerance kind {kind!r}")
    return ToleranceVector(tuple(values))


def tolerance_sums(tv: ToleranceVector) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Total tolerance tau and, per type, the tolerance towards one agent of
    every type: tau_ell = sum_k t_{|ell-k|}."""
    tau = sum(tv.values, Fraction(0))
    lam = tv.lam
    per_type = tuple(
        sum((tv.values[abs(ell - k)] for k in range(1, lam + 1)), Fraction(0))
        for ell in range(1, lam + 1)
    )
    return tau, per_type


@dataclass(frozen=True)
class GameInstance:
    """A balanced game: lam types of agents_per_type agents on a board."""

    lam: int
    agents_per_type: int
    topology: Topology
    tolerance: ToleranceVector

    def __post_init__(self):
        if self.lam < 2:
            raise ValidationError("empty-or-short", "need at least 2 types")
        if self.agents_per_type < 2:
            raise ValidationError(
                "too-few-agents", "balanced games need at least 2 agents per type"
            )
        if self.tolerance.lam != self.lam:
            raise ValidationError(
                "length-mismatch",
                f"tolerance vector has {self.tolerance.lam} weights for {self.lam} types",
            )
        if self.topology.node_count <= self.n:
            raise ValidationError(
                "board-too-small",
                f"{self.n} agents need more than {self.topology.node_count} nodes",
            )

    @property
    def n(self) -> int:
        return self.lam * self.agents_per_type


@dataclass(frozen=True)
class Assignment:
    """Type placement: cells[node] is a 1-based type index, 0 when empty.

    Agents of one type are interchangeable, so a placement of types is the
    canonical representation; an agent-labelled view never enters the API.
    """

    cells: Tuple[int, ...]

    @classmethod
    def from_placement(cls, node_count: int, placement: Mapping[int, int]) -> "Assignment":
        cells = [0] * node_count
        for node, type_index in placement.items():
            if not (0 <= node < node_count):
                raise ValidationError("node-unknown", f"node {node} not on the board")
            if type_index < 1:
                raise ValidationError("bad-type", f"type index {type_index} must be >= 1")
            cells[node] = type_index
        return cls(tuple(cells))

    def placement(self) -> dict[int, int]:
        return {node: t for node, t in enumerate(self.cells) if t}

    def type_of(self, node: int) -> int:
        return self.cells[node]

    def occupied(self) -> tuple[int, ...]:
        return tuple(node for node, t in enumerate(self.cells) if t)

    def empty_nodes(self) -> tuple[int, ...]:
        return tuple(node for node, t in enumerate(self.cells) if not t)

    def type_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for t in self.cells:
            if t:
                counts[t] = counts.get(t, 0) + 1
        return counts

    def validate_for(self, game: GameInstance) -> None:
        if len(self.cells) != game.topology.node_count:
            raise ValidationError(
                "length-mismatch",
                f"assignment covers {len(self.cells)} nodes, board has "
                f"{game.topology.node_count}",
            )
        counts = self.type_counts()
        for t in counts:
            if not (1 <= t <= game.lam):
                raise ValidationError("bad-type", f"type index {t} outside [1, {game.lam}]")
        for t in range(1, game.lam + 1):
            if counts.get(t, 0) != game.agents_per_type:
                raise ValidationError(
                    "unbalanced-placement",
                    f"type {t} places {counts.get(t, 0)} agents, expected "
                    f"{game.agents_per_type}",
                )


def utility(game: GameInstance, assignment: Assignment, node: int) -> Fraction:
    """Exact utility of the agent at ``node``: the tolerance-weighted share of
    its occupied neighborhood, or 0 when isolated."""
    topology = game.topology
    if not (0 <= node < topology.node_count):
        raise ValidationError("node-unknown", f"node {node} not on the board")
    own = assignment.cells[node]
    if own == 0:
        raise ValidationError("node-empty", f"node {node} is empty")
    total = 0
    weighted = Fraction(0)
    for neighbor in topology.neighbors[node]:
        k = assignment.cells[neighbor]
        if k:
            total += 1
            weighted += game.tolerance.weight(own, k)
    if total == 0:
        return Fraction(0)
    return weighted / total


def social_welfare(game: GameInstance, assignment: Assignment) -> Fraction:
    """Total utility over all occupied nodes."""
    return sum(
        (utility(game, assignment, node) for node in assignment.occupied()),
        Fraction(0),
    )
