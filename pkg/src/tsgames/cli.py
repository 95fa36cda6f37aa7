"""Command-line interface.

Subcommands cover the full workflow: generate named instances to JSON files,
check and construct assignments, run improving dynamics, enumerate
equilibria with exact price ratios, evaluate closed-form bounds, export DOT,
run sweeps that report CSV plus a rendered figure, and run the built-in
acceptance suite. All numbers print as exact rationals with a non-
authoritative 6-significant-digit decimal in parentheses.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .constructions import (
    construct_2zts_grid,
    construct_band_grid,
    construct_binary_grid,
    construct_tree_equilibrium,
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
)
from .equilibrium import (
    DEFAULT_BUDGET,
    best_response_dynamics,
    enumerate_equilibria,
    is_equilibrium,
    optimal_welfare,
    placement_count,
)
from .errors import BudgetExceeded, GameError, ValidationError
from .instances import (
    BOUND_KINDS,
    evaluate_bound,
    no_equilibrium_tree_game,
    poa_lb_game,
    pos_game,
    seven_type_grid_example,
)
from .instancefile import InstanceDocument, read_instance, write_instance
from .topology import standard_graph, to_dot

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def fmt(value: Fraction) -> str:
    """Exact rational plus a 6-significant-digit decimal (non-authoritative)."""
    return f"{format_rational(value)} ({float(value):.6g})"


def parse_tolerance(text: str, lam: int) -> ToleranceVector:
    """Parse a --tolerance argument: a named family ("zero", "proportional",
    "inverse-proportional", "binary:ALPHA") or a comma list of rationals."""
    text = text.strip()
    if text == "zero":
        return standard_tolerance("zero", lam)
    if text == "proportional":
        return standard_tolerance("proportional", lam)
    if text in ("inverse-proportional", "inverse_proportional"):
        return standard_tolerance("inverse_proportional", lam)
    if text.startswith("binary:"):
        return standard_tolerance("alpha_binary", lam, int(text.split(":", 1)[1]))
    return new_tolerance_vector([as_rational(part) for part in text.split(",")])


def _instance_label(args) -> dict[str, Assignment]:
    doc = read_instance(args.input)
    return doc


def _pick_assignment(doc: InstanceDocument, label: str) -> Assignment:
    if label not in doc.assignments:
        known = ", ".join(sorted(doc.assignments)) or "none"
        raise ValidationError(
            "unknown-assignment", f"no assignment {label!r} in file (have: {known})"
        )
    return doc.assignments[label]


def _game_with_tolerance(game: GameInstance, tolerance: Optional[str]) -> GameInstance:
    if tolerance is None:
        return game
    return GameInstance(
        game.lam, game.agents_per_type, game.topology, parse_tolerance(tolerance, game.lam)
    )


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_generate(args) -> int:
    if args.name == "no-eq-tree":
        tolerance = parse_tolerance(args.tolerance or "zero", args.lam)
        instance = no_equilibrium_tree_game(args.lam, tolerance)
    elif args.name == "poa-lb":
        tolerance = parse_tolerance(args.tolerance or "zero", args.lam)
        instance = poa_lb_game(args.lam, args.mu, tolerance)
    elif args.name == "pos":
        instance = pos_game(args.b, as_rational(args.t1))
    elif args.name == "seven-type-grid":
        instance = seven_type_grid_example()
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError("unknown-kind", f"unknown instance {args.name!r}")
    doc = InstanceDocument(
        game=instance.game, assignments=dict(instance.assignments),
        metadata=dict(instance.metadata),
    )
    write_instance(args.output, doc)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_check(args) -> int:
    doc = read_instance(args.input)
    assignment = _pick_assignment(doc, args.assignment)
    game = _game_with_tolerance(doc.game, args.tolerance)
    assignment.validate_for(game)
    ok, witness = is_equilibrium(game, assignment)
    print(f"assignment: {args.assignment}")
    print("verdict: EQUILIBRIUM" if ok else "verdict: NOT EQUILIBRIUM")
    if witness is not None:
        print(
            f"witness: node {witness.from_node} -> node {witness.to_node}, "
            f"utility {fmt(witness.old_utility)} -> {fmt(witness.new_utility)}"
        )
    print(f"social welfare: {fmt(social_welfare(game, assignment))}")
    if args.figure:
        from .figures import save_assignment_figure

        save_assignment_figure(game.topology, assignment, args.figure)
        print(f"wrote {args.figure}")
    return EXIT_OK


_METHODS = {
    "zts-grid": construct_2zts_grid,
    "binary-grid": construct_binary_grid,
    "band-grid": construct_band_grid,
    "tree": construct_tree_equilibrium,
}


def cmd_construct(args) -> int:
    doc = read_instance(args.input)
    assignment = _METHODS[args.method](doc.game)
    label = args.label or args.method
    doc.assignments[label] = assignment
    output = args.output or args.input
    write_instance(output, doc)
    ok, witness = is_equilibrium(doc.game, assignment)
    print(f"constructed assignment {label!r} ({doc.game.n} agents)")
    print("verification: EQUILIBRIUM" if ok else f"verification: NOT EQUILIBRIUM ({witness})")
    print(f"social welfare: {fmt(social_welfare(doc.game, assignment))}")
    print(f"wrote {output}")
    if args.figure:
        from .figures import save_assignment_figure

        save_assignment_figure(doc.game.topology, assignment, args.figure)
        print(f"wrote {args.figure}")
    return EXIT_OK


def cmd_dynamics(args) -> int:
    doc = read_instance(args.input)
    assignment = _pick_assignment(doc, args.assignment)
    result = best_response_dynamics(doc.game, assignment, args.max_steps)
    print(f"outcome: {result.outcome.value}")
    print(f"steps: {result.steps}")
    shown = ", ".join(f"{a}->{b}" for a, b in result.trace[:10])
    if len(result.trace) > 10:
        shown += ", ..."
    print(f"trace: [{shown}]")
    print(f"final welfare: {fmt(social_welfare(doc.game, result.final_assignment))}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    doc = read_instance(args.input)
    game = doc.game
    print(f"placements: {placement_count(game)}")
    equilibria = enumerate_equilibria(game, budget=args.budget, workers=args.workers)
    print(f"equilibria: {len(equilibria)}")
    _, opt = optimal_welfare(game, budget=args.budget, workers=args.workers)
    print(f"opt: {fmt(opt)}")
    if equilibria:
        welfares = [social_welfare(game, a) for a in equilibria]
        worst, best = min(welfares), max(welfares)
        print(f"worst equilibrium: {fmt(worst)}")
        print(f"best equilibrium: {fmt(best)}")
        if worst > 0:
            print(f"poa: {fmt(opt / worst)}")
        else:
            print("poa: undefined (zero-welfare equilibrium)")
        print(f"pos: {fmt(opt / best)}")
    if args.list:
        for index, assignment in enumerate(equilibria, start=1):
            cells = ",".join(str(t) for t in assignment.cells)
            print(f"equilibrium {index}: {cells}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    tolerance = (
        parse_tolerance(args.tolerance, args.lam) if args.tolerance is not None else None
    )
    kind = args.kind.replace("-", "_")
    value = evaluate_bound(kind, args.lam, args.n, tolerance)
    print(fmt(value))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    doc = read_instance(args.input)
    assignment = _pick_assignment(doc, args.assignment) if args.assignment else None
    Path(args.output).write_text(to_dot(doc.game.topology, assignment))
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    from . import acceptance

    results = acceptance.run(theorem=args.theorem)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_ERROR


def _sweep_instances(args):
    if args.input:
        for path in args.input:
            doc = read_instance(path)
            yield Path(path).stem, doc.game
        return
    if not args.family:
        raise ValidationError("bad-usage", "sweep needs instance files or --family")
    lo, _, hi = args.sizes.partition(":")
    sizes = range(int(lo), int(hi or lo) + 1)
    for size in sizes:
        topology = standard_graph(args.family, size)
        if topology.node_count <= args.lam * args.agents:
            continue
        tolerance = parse_tolerance(args.tolerance or "zero", args.lam)
        yield f"{args.family}-{size}", GameInstance(
            args.lam, args.agents, topology, tolerance
        )


def cmd_sweep(args) -> int:
    rows = []
    for name, game in _sweep_instances(args):
        topology = game.topology
        kind = "grid" if topology.is_grid() else "tree" if topology.is_tree() else "graph"
        equilibria = enumerate_equilibria(game, budget=args.budget, workers=args.workers)
        _, opt = optimal_welfare(game, budget=args.budget, workers=args.workers)
        poa = pos = None
        if equilibria:
            welfares = [social_welfare(game, a) for a in equilibria]
            worst, best = min(welfares), max(welfares)
            poa = opt / worst if worst > 0 else None
            pos = opt / best if best > 0 else None
        rows.append(
            {
                "instance": name,
                "lambda": game.lam,
                "n": game.n,
                "topology": kind,
                "eq_count": len(equilibria),
                "opt": opt,
                "poa": poa,
                "pos": pos,
            }
        )
    output = Path(args.output)
    with output.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["instance", "lambda", "n", "topology", "eq_count", "opt", "poa", "pos"])
        for row in rows:
            writer.writerow(
                [
                    row["instance"],
                    row["lambda"],
                    row["n"],
                    row["topology"],
                    row["eq_count"],
                    format_rational(row["opt"]),
                    format_rational(row["poa"]) if row["poa"] is not None else "",
                    format_rational(row["pos"]) if row["pos"] is not None else "",
                ]
            )
    print(f"wrote {output}")
    figure = Path(args.figure) if args.figure else output.with_suffix(".png")
    from .figures import save_sweep_figure

    save_sweep_figure(rows, figure)
    print(f"wrote {figure}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsgames",
        description="Tolerance Schelling games: exact equilibrium analysis on graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a named benchmark instance to a file")
    p.add_argument("name", choices=["no-eq-tree", "poa-lb", "pos", "seven-type-grid"])
    p.add_argument("--lambda", dest="lam", type=int, default=2, help="number of types")
    p.add_argument("--mu", type=int, default=1, help="size parameter for poa-lb")
    p.add_argument("--b", type=int, default=2, help="size parameter for pos")
    p.add_argument("--t1", default="1/2", help="cross-type tolerance for pos")
    p.add_argument("--tolerance", help="family name, binary:ALPHA, or comma rationals")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("check", help="check whether a stored assignment is an equilibrium")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--tolerance", help="override the instance's tolerance vector")
    p.add_argument("--figure", help="also render the assignment to this image file")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("construct", help="run an equilibrium construction and store it")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--method", required=True, choices=sorted(_METHODS))
    p.add_argument("-o", "--output", help="output file (default: rewrite the input)")
    p.add_argument("--label", help="assignment label (default: the method name)")
    p.add_argument("--figure", help="also render the assignment to this image file")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("dynamics", help="run deterministic improving dynamics")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(handler=cmd_dynamics)

    p = sub.add_parser("enumerate", help="enumerate equilibria, optimum, and price ratios")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--list", action="store_true", help="print every equilibrium")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("bounds", help="evaluate a closed-form price bound")
    p.add_argument("--kind", required=True,
                   choices=sorted(k.replace("_", "-") for k in BOUND_KINDS))
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tolerance")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("export-dot", help="export the board (optionally colored) as DOT")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--assignment")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_export_dot)

    p = sub.add_parser("verify-paper", help="run the built-in acceptance suite")
    p.add_argument("--theorem", type=int, help="restrict to the criteria for one theorem")
    p.set_defaults(handler=cmd_verify_paper)

    p = sub.add_parser("sweep", help="price-ratio report: CSV plus a rendered figure")
    p.add_argument("-i", "--input", nargs="*", help="instance files to sweep over")
    p.add_argument("--family", choices=["path", "cycle", "star"],
                   help="generate boards of this family instead of reading files")
    p.add_argument("--sizes", default="5:10", help="size range LO:HI for --family")
    p.add_argument("--lambda", dest="lam", type=int, default=2)
    p.add_argument("--agents", type=int, default=2, help="agents per type for --family")
    p.add_argument("--tolerance", help="tolerance for --family instances")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.add_argument("--figure", help="figure path (default: CSV path with .png)")
    p.set_defaults(handler=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BudgetExceeded as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GameError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR


run_command = main  # exit code + printed outputs


if __name__ == "__main__":
    sys.exit(main())
