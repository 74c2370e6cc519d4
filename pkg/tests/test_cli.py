"""Command-line surface: files, tables, exit codes, determinism."""

import pytest

from boxdim import cli, dimension, scenarios
from boxdim.graphs import read_edge_list


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_manifest(path):
    lines = path.read_text().splitlines()[1:]
    return dict(line.split(",", 1) for line in lines if line)


def test_generate_hm_writes_graph_and_manifest(tmp_path, capsys):
    assert run("generate", "hm", "--base", "cherry", "--n", "3",
               "--out", tmp_path) == 0
    graph, _ = read_edge_list(tmp_path / "graph.txt")
    assert graph.num_vertices == 27
    manifest = read_manifest(tmp_path / "manifest.csv")
    assert manifest["diameter"] == manifest["diameter_formula"] == "6"
    assert (tmp_path / "base.txt").exists()
    assert "27 vertices" in capsys.readouterr().out


def test_generate_shm_manifest_counts(tmp_path):
    assert run("generate", "shm", "--initial", "triangle", "--m", "2",
               "--p", "1", "--steps", "2", "--out", tmp_path) == 0
    manifest = read_manifest(tmp_path / "manifest.csv")
    assert manifest["vertices_step_2"] == "75"
    assert manifest["edges_step_2"] == "75"


def test_generate_gw_is_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert run("generate", "gw", "--q", "0:0,1:0.5,2:0.5",
                   "--height", "9", "--seed", "7",
                   "--out", tmp_path / sub) == 0
    assert (tmp_path / "a" / "graph.txt").read_bytes() == \
        (tmp_path / "b" / "graph.txt").read_bytes()
    # a different seed gives a different tree
    assert run("generate", "gw", "--q", "0:0,1:0.5,2:0.5",
               "--height", "9", "--seed", "8", "--out", tmp_path / "c") == 0
    assert (tmp_path / "a" / "graph.txt").read_bytes() != \
        (tmp_path / "c" / "graph.txt").read_bytes()


def test_config_echo_grammar(tmp_path):
    assert run("generate", "spherical", "--rule", "constant 2", "--n", "3",
               "--out", tmp_path) == 0
    text = (tmp_path / "run.toml").read_text()
    assert 'command = "generate"' in text
    assert 'rule = "constant 2"' in text
    assert "n = 3" in text
    # every line is a bare key = value pair
    for line in text.strip().splitlines():
        key, sep, value = line.partition(" = ")
        assert sep and key and value


def test_config_value_formatting():
    assert scenarios.config_value(True) == "true"
    assert scenarios.config_value(3) == "3"
    assert scenarios.config_value(0.5) == "0.5"
    assert scenarios.config_value("a b") == '"a b"'
    assert scenarios.config_value('say "hi"') == '"say \\"hi\\""'
    assert scenarios.config_value([1, 2]) == "[1, 2]"


def test_box_exact_appends_rows(tmp_path):
    assert run("generate", "hm", "--base", "cherry", "--n", "2",
               "--out", tmp_path) == 0
    table = tmp_path / "table.csv"
    for ell in (3, 5):
        assert run("box", "--graph", tmp_path / "graph.txt", "--method",
                   "exact", "--ell", ell, "--n", "2", "--table", table,
                   "--out", tmp_path) == 0
    rows = dimension.load_box_table(table)
    assert [(r.ell, r.count) for r in rows] == [(3, 3), (5, 1)]
    assert all(r.method == "Exact" for r in rows)
    assert (tmp_path / "cover_ell3.txt").exists()


def test_box_model_bounds_and_witness(tmp_path, capsys):
    table = tmp_path / "t.csv"
    assert run("box", "--model", "spherical", "--rule", "constant 2",
               "--n", "4", "--method", "bounds", "--k", "1",
               "--table", table, "--out", tmp_path) == 0
    assert run("box", "--model", "hm", "--base", "cherry", "--n", "3",
               "--method", "witness", "--k", "1", "--table", table,
               "--out", tmp_path) == 0
    rows = dimension.load_box_table(table)
    assert [(r.method, r.count) for r in rows] == \
        [("LowerBound", 8), ("UpperBound", 11), ("LowerBound", 9)]


def test_box_exact_refuses_oversized_graphs(tmp_path, capsys):
    code = run("box", "--model", "hm", "--base", "cherry", "--n", "5",
               "--method", "exact", "--k", "1", "--out", tmp_path)
    assert code == 2
    err = capsys.readouterr().err
    assert "refused" in err and "243" in err


def test_box_rejects_rows_that_contradict_the_table(tmp_path, capsys):
    table = tmp_path / "t.csv"
    assert run("box", "--model", "hm", "--base", "cherry", "--n", "2",
               "--method", "exact", "--k", "1", "--table", table,
               "--out", tmp_path) == 0
    # a lower bound above the true exact count must block the append
    dimension.save_box_table(
        [dimension.BoxRow(3, 2, 5, "LowerBound", 9)], tmp_path / "x.csv")
    code = run("box", "--model", "hm", "--base", "cherry", "--n", "2",
               "--method", "exact", "--ell", "3", "--table",
               tmp_path / "x.csv", "--out", tmp_path)
    assert code == 2
    assert "sandwich" in capsys.readouterr().err
    # and the clashing row was not appended
    assert len((tmp_path / "x.csv").read_text().strip().splitlines()) == 2


def test_box_flag_validation(tmp_path, capsys):
    assert run("box", "--method", "exact", "--ell", "3",
               "--out", tmp_path) == 2  # neither --graph nor --model
    assert run("box", "--model", "hm", "--n", "2", "--method", "exact",
               "--out", tmp_path) == 2  # neither --ell nor --k
    assert run("box", "--model", "spherical", "--rule", "constant 2",
               "--n", "3", "--method", "bounds", "--ell", "4",
               "--out", tmp_path) == 2  # even ell is not 2k+1


def test_dim_exit_codes(tmp_path):
    table = tmp_path / "t.csv"
    for k in (1, 2, 3, 4):
        assert run("box", "--model", "hm", "--base", "cherry", "--n", "6",
                   "--method", "bounds", "--k", k, "--table", table,
                   "--out", tmp_path) == 0
    ok = run("dim", "--table", table, "--kind", "tau",
             "--expect", "0.5493", "--tol", "0.02", "--out", tmp_path)
    assert ok == 0
    assert (tmp_path / "fits.csv").exists()
    assert (tmp_path / "fit.png").exists()
    bad = run("dim", "--table", table, "--kind", "tau",
              "--expect", "0.9", "--tol", "0.01", "--no-plot",
              "--out", tmp_path)
    assert bad == 1


def test_dim_rejects_missing_and_malformed_tables(tmp_path, capsys):
    assert run("dim", "--table", tmp_path / "nope.csv", "--kind", "tau",
               "--out", tmp_path) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("ell,n,count,method,size\n3,0,2,Exact\n")
    assert run("dim", "--table", bad, "--kind", "tau",
               "--out", tmp_path) == 2
    assert "bad.csv:2" in capsys.readouterr().err


def test_repro_runs_a_scenario(tmp_path, capsys):
    assert run("repro", "hm-diameter", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
    assert (tmp_path / "run.toml").exists()
    assert (tmp_path / "diameters.csv").exists()
    assert (tmp_path / "diameters.png").exists()


def test_repro_rejects_unknown_scenarios(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("repro", "not-a-scenario", "--out", tmp_path)
    assert info.value.code == 2


def test_run_scenario_rejects_unknown_names(tmp_path):
    with pytest.raises(KeyError):
        scenarios.run_scenario("mystery", tmp_path)
