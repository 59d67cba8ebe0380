"""The command-line surface: generate / colour / params / occupancy / verify."""

import json

import pytest

from fancolour import Graph, count_fans_per_vertex, read_graph, write_graph
from fancolour.cli import main

from conftest import from_networkx


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_generate_cycle(tmp_path, capsys):
    out = str(tmp_path / "c5.txt")
    assert run_cli("generate", "cycle", "--n", "5", "--out", out) == 0
    g = read_graph(out)
    assert g == Graph.cycle(5)
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 5 and info["m"] == 5


def test_generate_random_regular_degrees(tmp_path):
    out = str(tmp_path / "reg.txt")
    assert run_cli(
        "generate", "random-regular", "--n", "10", "--degree", "3",
        "--seed", "7", "--out", out,
    ) == 0
    g = read_graph(out)
    assert all(g.degree(v) == 3 for v in range(10))


def test_generate_binomial_triangle_free(tmp_path, capsys):
    out = str(tmp_path / "b.txt")
    assert run_cli(
        "generate", "binomial", "--n", "50", "--p", "0.1", "--seed", "3",
        "--triangle-free", "--fan-report", "3", "--out", out,
    ) == 0
    g = read_graph(out)
    assert count_fans_per_vertex(g, 3) == [0] * g.n
    info = json.loads(capsys.readouterr().out)
    assert info["max_fans_per_vertex"] == 0


def test_colour_edgeless_single_colour(tmp_path, capsys):
    gpath = str(tmp_path / "e.txt")
    write_graph(Graph(4, []), gpath)
    code = run_cli(
        "colour", "--graph", gpath, "--q", "1", "--lambda", "1", "--ell", "1",
        "--seed", "0", "--out", str(tmp_path / "run"),
    )
    assert code == 0
    col = read_json(str(tmp_path / "run.colouring.json"))
    assert col == {"0": 1, "1": 1, "2": 1, "3": 1}


def test_colour_c5_q3_and_verify_roundtrip(tmp_path, capsys):
    gpath = str(tmp_path / "c5.txt")
    write_graph(Graph.cycle(5), gpath)
    code = run_cli(
        "colour", "--graph", gpath, "--q", "3", "--lambda", "1", "--ell", "1",
        "--seed", "2", "--out", str(tmp_path / "run"),
    )
    assert code == 0
    # round-trip through cmd_verify needs the lists file
    from fancolour.cover import write_lists
    from fancolour import uniform_lists

    lpath = str(tmp_path / "lists.json")
    write_lists(uniform_lists(5, 3), lpath)
    capsys.readouterr()
    assert run_cli(
        "verify", "--graph", gpath, "--lists", lpath,
        "--colouring", str(tmp_path / "run.colouring.json"),
    ) == 0
    report = read_json(str(tmp_path / "run.report.json"))
    assert report["outcome"] == "flawless"
    assert report["phase2_outcome"] == "coloured"


def test_colour_budget_exceeded_exit_code(tmp_path):
    # C5 with q=3, ell=2 never reaches a flawless state: exit code 2
    gpath = str(tmp_path / "c5.txt")
    write_graph(Graph.cycle(5), gpath)
    code = run_cli(
        "colour", "--graph", gpath, "--q", "3", "--lambda", "1", "--ell", "2",
        "--seed", "0", "--budget", "300", "--out", str(tmp_path / "run"),
    )
    assert code == 2
    report = read_json(str(tmp_path / "run.report.json"))
    assert report["outcome"] == "budget_exceeded"


def test_colour_runs_and_jobs(tmp_path, capsys):
    gpath = str(tmp_path / "c8.txt")
    write_graph(Graph.cycle(8), gpath)
    code = run_cli(
        "colour", "--graph", gpath, "--q", "4", "--lambda", "1", "--ell", "2",
        "--seed", "5", "--runs", "3", "--jobs", "2",
        "--out", str(tmp_path / "batch"),
    )
    assert code == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.strip().splitlines()]
    assert [entry["seed"] for entry in lines] == [5, 6, 7]
    for s in (5, 6, 7):
        assert read_json(str(tmp_path / f"batch.seed{s}.colouring.json"))


def test_colour_missing_graph_is_input_error(tmp_path):
    assert run_cli(
        "colour", "--graph", str(tmp_path / "nope.txt"), "--q", "3",
        "--lambda", "1", "--ell", "1",
    ) == 4


def test_params_text_and_flags(capsys):
    assert run_cli(
        "params", "--delta", "1000000", "--mode", "theorem",
        "--k", "3", "--t", "0.5", "--eps", "1", "--n", "100",
    ) == 0
    out = capsys.readouterr().out
    assert "PASS  ell_gt_7_log_delta" in out
    assert "PASS  t_le_ell_over_40" in out
    assert "step_budget" in out


def test_params_a_substitution_json(capsys):
    assert run_cli(
        "params", "--delta", "100", "--k", "3", "--t", "0.5", "--eps", "1",
        "--lambda", "1", "--ell", "4", "--format", "json",
    ) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["a"] == 1.0


def test_params_t_eq_ell_flagged(capsys):
    assert run_cli(
        "params", "--delta", "100", "--k", "3", "--t", "4", "--eps", "1",
        "--lambda", "1", "--ell", "4",
    ) == 0
    out = capsys.readouterr().out
    assert "FAIL  t_le_ell_over_40" in out


def test_occupancy_k2(tmp_path, capsys):
    gpath = str(tmp_path / "k2.txt")
    write_graph(Graph(2, [(0, 1)]), gpath)
    assert run_cli(
        "occupancy", "--graph", gpath, "--lambdas", "1", "--a", "0",
        "--format", "json",
    ) == 0
    rows = json.loads(capsys.readouterr().out)
    assert abs(rows[0]["fraction"] - 1 / 3) < 1e-12


def test_occupancy_c5_bound_below_fraction(tmp_path, capsys):
    gpath = str(tmp_path / "c5.txt")
    write_graph(Graph.cycle(5), gpath)
    assert run_cli(
        "occupancy", "--graph", gpath, "--lambdas", "0.2,1", "--a", "0",
        "--format", "json",
    ) == 0
    rows = json.loads(capsys.readouterr().out)
    assert abs(rows[1]["fraction"] - 3 / 11) < 1e-12
    for row in rows:
        assert row["occupancy_bound"] <= row["fraction"] + 1e-12


def test_occupancy_empirical_mode(tmp_path, capsys):
    gpath = str(tmp_path / "c6.txt")
    write_graph(Graph.cycle(6), gpath)
    # C6 contains paths on up to 6 vertices, so the sampler needs k = 8
    assert run_cli(
        "occupancy", "--graph", gpath, "--lambdas", "1", "--a", "0",
        "--samples", "20000", "--k", "8", "--seed", "3", "--format", "json",
    ) == 0
    rows = json.loads(capsys.readouterr().out)
    from fancolour import occupancy_fraction

    exact = occupancy_fraction(Graph.cycle(6), 1.0)
    assert rows[0]["fraction_mode"] == "sampled"
    assert abs(rows[0]["fraction"] - exact) < 0.02


def test_colour_rejects_ragged_lists(tmp_path):
    gpath = str(tmp_path / "k2.txt")
    write_graph(Graph(2, [(0, 1)]), gpath)
    from fancolour.cover import write_lists

    lpath = str(tmp_path / "ragged.json")
    write_lists([[1, 2], [1]], lpath)
    assert run_cli(
        "colour", "--graph", gpath, "--lists", lpath, "--lambda", "1",
        "--ell", "1", "--out", str(tmp_path / "r"),
    ) == 4


def test_verify_detects_violations(tmp_path, capsys):
    gpath = str(tmp_path / "k2.txt")
    write_graph(Graph(2, [(0, 1)]), gpath)
    from fancolour.cover import write_lists

    lpath = str(tmp_path / "lists.json")
    write_lists([[1, 2], [1, 3]], lpath)
    cpath = str(tmp_path / "col.json")
    with open(cpath, "w") as fh:
        json.dump({"0": 1, "1": 1}, fh)
    assert run_cli(
        "verify", "--graph", gpath, "--lists", lpath, "--colouring", cpath
    ) == 3
    assert "monochromatic" in capsys.readouterr().out

    with open(cpath, "w") as fh:
        json.dump({"0": 9, "1": 1}, fh)
    assert run_cli(
        "verify", "--graph", gpath, "--lists", lpath, "--colouring", cpath
    ) == 3
    assert "vertex 0" in capsys.readouterr().out


def test_determinism_byte_identical(tmp_path):
    gpath = str(tmp_path / "c8.txt")
    write_graph(Graph.cycle(8), gpath)
    for tag in ("one", "two"):
        assert run_cli(
            "colour", "--graph", gpath, "--q", "4", "--lambda", "1",
            "--ell", "2", "--seed", "9", "--out", str(tmp_path / tag),
        ) == 0
    col1 = (tmp_path / "one.colouring.json").read_bytes()
    col2 = (tmp_path / "two.colouring.json").read_bytes()
    assert col1 == col2
    rep1 = read_json(str(tmp_path / "one.report.json"))
    rep2 = read_json(str(tmp_path / "two.report.json"))
    rep1.pop("wall_ms")
    rep2.pop("wall_ms")
    assert rep1 == rep2


def test_bflaw_estimator(tmp_path, capsys):
    gpath = str(tmp_path / "c8.txt")
    write_graph(Graph.cycle(8), gpath)
    assert run_cli(
        "bflaw", "--graph", gpath, "--q", "4", "--lambda", "1", "--ell", "2",
        "--seed", "1", "--samples", "500",
    ) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["b_actions_observed"] >= 1
    assert 0.0 <= out["frequency"] <= 1.0
    assert out["reference_bound_1_over_4d3"] == 1.0 / 32.0
