import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sleepsis.cli import EXIT_INVALID, EXIT_OK, main
from sleepsis.config import ConfigError, ExperimentSpec, parse_config, to_config_text
from sleepsis.exceptions import DegenerateSchedulingError
from sleepsis.graph import generate_price, read_edge_list, write_edge_list

MINIMAL = """
command = run-mc   # trailing comment
[graph]
n = 200
m = 2
[model]
beta = 0.5
gamma = 0.3
u = 0.3
v = 0.7
"""


def test_minimal_config_uses_defaults():
    spec = parse_config(MINIMAL)
    assert spec.command == "run-mc" and spec.n == 200
    assert (spec.runs, spec.seeds, spec.steps, spec.sim_seed) == (50, 10, 1000, 0)


def test_range_error_names_key_and_line():
    with pytest.raises(ConfigError, match=r"<config>:7: beta must lie in \[0, 1\]"):
        parse_config(MINIMAL.replace("beta = 0.5", "beta = 1.5"))


def test_degenerate_schedule_at_parse_time():
    with pytest.raises(DegenerateSchedulingError):
        parse_config(MINIMAL.replace("u = 0.3", "u = 0").replace("v = 0.7", "v = 0"))


@pytest.mark.parametrize("text, match", [
    ("command = run-mc\n[graph]\nwidth = 3\n", "unknown key 'width'"),
    ("command = run-mc\n[nowhere]\n", "unknown section"),
    ("[graph]\nn = 10\n", "missing required key 'command'"),
    ("command = run-mc\n[graph]\nn = ten\n", ":3: n must be an integer"),
    ("command = fly\n", "unknown command"),
    ("command = run-mc\n[graph]\nedges = /no/such/file\n", "file not found"),
])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_overrides_win():
    spec = parse_config(MINIMAL, {"beta": 0.25, "runs": 3})
    assert spec.beta == 0.25 and spec.runs == 3


probs = st.floats(0, 1, allow_nan=False)


@settings(max_examples=50)
@given(st.sampled_from(["run-mc", "sweep-gamma", "threshold"]), probs, probs, probs,
       probs.filter(lambda x: x > 0), st.integers(0, 2**31), st.lists(probs, max_size=4),
       st.lists(st.tuples(probs, probs), max_size=3), st.sampled_from(["stationary", "all_active"]))
def test_spec_round_trip(cmd, beta, gamma, u, v, seed, betas, schedules, init):
    spec = ExperimentSpec(command=cmd, beta=beta, gamma=gamma, u=u, v=v, sim_seed=seed, betas=tuple(betas),
                          schedules=tuple(schedules), init_active=init)
    assert parse_config(to_config_text(spec)) == spec


def run_cli(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def test_cli_threshold(tmp_path, capsys):
    assert run_cli(tmp_path, "threshold", "--n", "300", "--gamma", "0.5") == EXIT_OK
    assert "beta_c_theory" in capsys.readouterr().out
    assert (tmp_path / "threshold.csv").exists()
    meta = (tmp_path / "threshold.csv.meta").read_text()
    assert "graph_seed = 0" in meta and "software_version" in meta


@pytest.mark.parametrize("cmd, out, extra", [
    ("generate-graph", "graph.edges", []),
    ("run-mmc", "mmc_series.csv", ["--steps", "20"]),
    ("run-mc", "mc_ensemble.csv", ["--steps", "20", "--runs", "3"]),
    ("temporal", "fig2_temporal.csv", ["--steps", "20", "--runs", "3"]),
    ("threshold", "threshold.csv", []),
])
def test_cli_commands_are_byte_deterministic(tmp_path, cmd, out, extra):
    args = [cmd, "--n", "150", "--graph-seed", "4", "--sim-seed", "9"] + extra
    assert run_cli(tmp_path / "a", *args) == EXIT_OK
    assert run_cli(tmp_path / "b", *args) == EXIT_OK
    for name in (out, out + ".meta"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_jobs_do_not_change_output(tmp_path):
    args = ["run-mc", "--n", "150", "--steps", "15", "--runs", "4"]
    assert run_cli(tmp_path / "a", *args, "--jobs", "1") == EXIT_OK
    assert run_cli(tmp_path / "b", *args, "--jobs", "2") == EXIT_OK
    assert (tmp_path / "a/mc_ensemble.csv").read_bytes() == (tmp_path / "b/mc_ensemble.csv").read_bytes()


def test_cli_reads_edge_list_without_touching_it(tmp_path):
    path = tmp_path / "in.edges"
    g = generate_price(120, 2, seed=1)
    write_edge_list(g, path)
    before = path.read_bytes(), os.stat(path).st_mtime_ns
    assert run_cli(tmp_path / "o", "threshold", "--edges", str(path)) == EXIT_OK
    assert (path.read_bytes(), os.stat(path).st_mtime_ns) == before
    assert "graph_edges" in (tmp_path / "o/threshold.csv.meta").read_text()


def test_cli_generate_graph_round_trips(tmp_path):
    assert run_cli(tmp_path, "generate-graph", "--n", "100", "--graph-seed", "3") == EXIT_OK
    assert read_edge_list(tmp_path / "graph.edges") == generate_price(100, 2, seed=3)


def test_cli_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "exp.conf"
    cfg.write_text(MINIMAL.replace("n = 200", "n = 120"))
    assert run_cli(tmp_path / "o", "run-mc", "--config", str(cfg), "--steps", "5", "--runs", "2",
                   "--beta", "0.1") == EXIT_OK
    meta = (tmp_path / "o/mc_ensemble.csv.meta").read_text()
    assert "beta = 0.1\n" in meta and "graph_n = 120" in meta


@pytest.mark.parametrize("args", [["run-mc", "--beta", "1.5"], ["run-mc", "--u", "0", "--v", "0"],
                                  ["fly"], ["run-mc", "--config", "/no/such.conf"]])
def test_cli_validation_exit_code(tmp_path, args, capsys):
    assert run_cli(tmp_path, *args) == EXIT_INVALID
    assert "error" in capsys.readouterr().err


def test_cli_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["threshold", "--n", "50", "--out", str(blocker / "sub")]) == 2
