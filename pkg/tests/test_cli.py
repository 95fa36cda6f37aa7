import contextlib
import csv
import io

import pytest

from tsgames import cli
from tsgames.core import GameInstance, standard_tolerance
from tsgames.instancefile import InstanceDocument, read_instance, write_instance
from tsgames.topology import grid, standard_graph


def run_cli(*argv):
    buffer = io.StringIO()
    errors = io.StringIO()
    with contextlib.redirect_stdout(buffer), contextlib.redirect_stderr(errors):
        code = cli.main(list(argv))
    return code, buffer.getvalue(), errors.getvalue()


def test_generate_then_enumerate_no_equilibrium_tree(tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = run_cli(
        "generate", "no-eq-tree", "--lambda", "2", "--tolerance", "1,1/2",
        "-o", str(path),
    )
    assert code == 0
    code, out, _ = run_cli("enumerate", "-i", str(path))
    assert code == 0
    assert "placements: 2772" in out
    assert "equilibria: 0" in out


def test_bounds_output_format():
    code, out, _ = run_cli("bounds", "--kind", "zts-poa", "--lambda", "3", "--n", "21")
    assert code == 0
    assert out.strip() == "7/2 (3.5)"


def test_check_reports_witness_with_tolerance_override(tmp_path):
    path = tmp_path / "seven.json"
    assert run_cli("generate", "seven-type-grid", "-o", str(path))[0] == 0
    code, out, _ = run_cli(
        "check", "-i", str(path), "--assignment", "equilibrium_v",
        "--tolerance", "1,1,3/5,0,0,0,0",
    )
    assert code == 0
    assert "NOT EQUILIBRIUM" in out
    assert "2/3" in out and "11/15" in out
    code, out, _ = run_cli("check", "-i", str(path), "--assignment", "equilibrium_v")
    assert "verdict: EQUILIBRIUM" in out


def test_construct_appends_assignment(tmp_path):
    path = tmp_path / "grid.json"
    game = GameInstance(3, 2, grid(3, 4), standard_tolerance("alpha_binary", 3, 2))
    write_instance(path, InstanceDocument(game=game))
    out_path = tmp_path / "with-eq.json"
    code, out, _ = run_cli(
        "construct", "-i", str(path), "--method", "binary-grid", "-o", str(out_path)
    )
    assert code == 0
    assert "verification: EQUILIBRIUM" in out
    doc = read_instance(out_path)
    assert "binary-grid" in doc.assignments


def test_dynamics_output(tmp_path):
    path = tmp_path / "seven.json"
    run_cli("generate", "seven-type-grid", "-o", str(path))
    code, out, _ = run_cli(
        "dynamics", "-i", str(path), "--assignment", "equilibrium_v",
        "--max-steps", "10",
    )
    assert code == 0
    assert "outcome: converged" in out
    assert "steps: 0" in out


def test_export_dot(tmp_path):
    path = tmp_path / "seven.json"
    run_cli("generate", "seven-type-grid", "-o", str(path))
    dot_path = tmp_path / "seven.dot"
    code, _, _ = run_cli(
        "export-dot", "-i", str(path), "--assignment", "equilibrium_v",
        "-o", str(dot_path),
    )
    assert code == 0
    text = dot_path.read_text()
    assert "0 -- 1;" in text
    assert "fillcolor" in text


def test_budget_exceeded_has_distinct_exit_code(tmp_path):
    path = tmp_path / "g.json"
    run_cli("generate", "no-eq-tree", "--lambda", "2", "--tolerance", "1,0",
            "-o", str(path))
    code, _, err = run_cli("enumerate", "-i", str(path), "--budget", "5")
    assert code == cli.EXIT_BUDGET == 3
    assert err.startswith("error: budget-exceeded:")
    assert "\n" not in err.strip()


def test_errors_are_single_machine_parsable_lines(tmp_path):
    path = tmp_path / "p.json"
    game = GameInstance(2, 2, standard_graph("path", 5), standard_tolerance("zero", 2))
    write_instance(path, InstanceDocument(game=game))
    code, _, err = run_cli("check", "-i", str(path), "--assignment", "missing")
    assert code == 1
    assert err.startswith("error: unknown-assignment:")


def test_enumerate_list_is_deterministic_across_workers(tmp_path):
    path = tmp_path / "p.json"
    game = GameInstance(2, 2, standard_graph("path", 6), standard_tolerance("zero", 2))
    write_instance(path, InstanceDocument(game=game))
    outputs = [
        run_cli("enumerate", "-i", str(path), "--list", "--workers", str(w))
        for w in (1, 2)
    ]
    assert outputs[0] == outputs[1]
    assert outputs[0][0] == 0
    assert "equilibrium 1:" in outputs[0][1]


def test_sweep_writes_csv_and_figure(tmp_path):
    out_csv = tmp_path / "report.csv"
    code, out, _ = run_cli(
        "sweep", "--family", "path", "--sizes", "5:8", "--lambda", "2",
        "--agents", "2", "--tolerance", "zero", "-o", str(out_csv),
    )
    assert code == 0
    assert out_csv.exists()
    figure = tmp_path / "report.png"
    assert figure.exists() and figure.stat().st_size > 0
    with out_csv.open() as handle:
        rows = list(csv.DictReader(handle))
    assert [r["instance"] for r in rows] == ["path-5", "path-6", "path-7", "path-8"]
    assert rows[0]["poa"] == "1" and rows[0]["eq_count"] == "2"
    assert rows[0]["topology"] == "tree"


def test_sweep_over_instance_files(tmp_path):
    paths = []
    for size in (5, 6):
        game = GameInstance(2, 2, standard_graph("path", size), standard_tolerance("zero", 2))
        path = tmp_path / f"p{size}.json"
        write_instance(path, InstanceDocument(game=game))
        paths.append(str(path))
    out_csv = tmp_path / "files.csv"
    code, _, _ = run_cli("sweep", "-i", *paths, "-o", str(out_csv))
    assert code == 0
    with out_csv.open() as handle:
        rows = list(csv.DictReader(handle))
    assert [r["instance"] for r in rows] == ["p5", "p6"]


def test_verify_paper_single_theorem():
    code, out, _ = run_cli("verify-paper", "--theorem", "3")
    assert code == 0
    assert "criterion  2" in out
    assert "PASS" in out
    assert "1/1 criteria passed" in out


def test_run_command_alias():
    assert cli.run_command is cli.main
