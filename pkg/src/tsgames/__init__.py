"""Tolerance Schelling games on graphs.

Agents of ordered types occupy nodes of a graph and may jump to empty nodes;
an agent's utility is the tolerance-weighted fraction of its occupied
neighborhood, where tolerance decays with the distance between type indices.
The package computes utilities and welfare exactly, checks and enumerates
equilibria, runs the constructive equilibrium algorithms for grids and
trees, generates the named lower-bound instances, and evaluates the
closed-form anarchy/stability bounds.
"""

from .constructions import (
    GridFillState,
    RootedSubtree,
    bottom_up,
    construct_2zts_grid,
    construct_band_grid,
    construct_binary_grid,
    construct_tree_equilibrium,
    subtrees_below,
    tile,
)
from .core import (
    Assignment,
    GameInstance,
    ToleranceVector,
    as_rational,
    format_rational,
    new_tolerance_vector,
    social_welfare,
    standard_tolerance,
    tolerance_sums,
    utility,
)
from .equilibrium import (
    DEFAULT_BUDGET,
    DeviationWitness,
    DynamicsOutcome,
    DynamicsResult,
    PriceReport,
    best_deviation,
    best_response_dynamics,
    enumerate_equilibria,
    is_equilibrium,
    optimal_welfare,
    placement_count,
    price_ratios,
)
from .errors import (
    BudgetExceeded,
    ConstructionCheckFailed,
    GameError,
    NoEquilibrium,
    NotATree,
    NotGrid,
    ValidationError,
    WrongGameClass,
    ZeroWelfareEquilibrium,
)
from .instances import (
    BOUND_KINDS,
    NamedInstance,
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
from .topology import Topology, build_graph, centroid, grid, standard_graph, to_dot

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BOUND_KINDS",
    "BudgetExceeded",
    "ConstructionCheckFailed",
    "DEFAULT_BUDGET",
    "DeviationWitness",
    "DynamicsOutcome",
    "DynamicsResult",
    "GameError",
    "GameInstance",
    "GridFillState",
    "NamedInstance",
    "NoEquilibrium",
    "NotATree",
    "NotGrid",
    "PriceReport",
    "RootedSubtree",
    "ToleranceVector",
    "Topology",
    "ValidationError",
    "WrongGameClass",
    "ZeroWelfareEquilibrium",
    "as_rational",
    "best_deviation",
    "best_response_dynamics",
    "bottom_up",
    "build_graph",
    "centroid",
    "construct_2zts_grid",
    "construct_band_grid",
    "construct_binary_grid",
    "construct_tree_equilibrium",
    "enumerate_equilibria",
    "evaluate_bound",
    "format_rational",
    "grid",
    "is_equilibrium",
    "new_tolerance_vector",
    "no_equilibrium_tree_game",
    "optimal_welfare",
    "placement_count",
    "poa_lb_equilibrium_welfare",
    "poa_lb_game",
    "pos_alternative_welfare",
    "pos_alternative_welfare_floor",
    "pos_equilibrium_welfare",
    "pos_game",
    "price_ratios",
    "seven_type_grid_example",
    "social_welfare",
    "standard_graph",
    "standard_tolerance",
    "subtrees_below",
    "tile",
    "to_dot",
    "tolerance_sums",
    "utility",
]
