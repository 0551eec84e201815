import json
import py_compile

import numpy as np
import pytest

from delay_consensus.cli import (
    config_to_dict,
    dict_to_config,
    load_config,
    main,
    read_trace_csv,
    trace_header,
    write_trace_csv,
)
from delay_consensus.errors import ConfigError
import delay_consensus.scenarios as scenarios

from _helpers import load_scenario_doc, two_agent_doc


def write_doc(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_config_round_trip_leaderless():
    doc = load_scenario_doc("leaderless6")
    config = dict_to_config(doc)
    emitted = config_to_dict(config)
    assert config_to_dict(dict_to_config(emitted)) == emitted


def test_config_round_trip_leader_and_reduced_protocol():
    doc = load_scenario_doc("leader6")
    emitted = config_to_dict(dict_to_config(doc))
    assert emitted["leader"] == {"q0": [0.5, 0.5], "qdot": [1.5, 2.0]}
    assert config_to_dict(dict_to_config(emitted)) == emitted

    di = {
        "graph": {"edges": [{"from": 1, "to": 2, "w": 1.0, "b": 1.0, "T": 0.0},
                            {"from": 2, "to": 1, "w": 1.0, "b": 1.0, "T": 0.0}]},
        "agents": [{"model": "double_integrator", "q0": [0.0], "qdot0": [0.4]},
                   {"model": "double_integrator", "q0": [1.0], "qdot0": [-0.2]}],
        "protocol": {"mode": "double_integrator", "k": 1.0},
        "sim": {"dt": 0.01, "duration": 1.0},
    }
    emitted = config_to_dict(dict_to_config(di))
    assert config_to_dict(dict_to_config(emitted)) == emitted


def test_unknown_keys_rejected():
    doc = two_agent_doc()
    doc["grpah"] = {}
    with pytest.raises(ConfigError):
        dict_to_config(doc)
    doc = two_agent_doc()
    doc["agents"][0]["mass"] = 1.0
    with pytest.raises(ConfigError):
        dict_to_config(doc)
    doc = two_agent_doc()
    doc["graph"]["edges"][0]["delay"] = 0.5
    with pytest.raises(ConfigError):
        dict_to_config(doc)


def test_schema_validation_messages():
    doc = two_agent_doc()
    del doc["agents"][0]["a_true"]
    with pytest.raises(ConfigError):
        dict_to_config(doc)
    doc = two_agent_doc()
    doc["agents"][0]["model"] = "quadrotor"
    with pytest.raises(ConfigError):
        dict_to_config(doc)
    doc = two_agent_doc()
    doc["graph"]["edges"][0]["from"] = 9
    with pytest.raises(ConfigError):
        dict_to_config(doc)
    doc = two_agent_doc()
    doc["protocol"]["k"] = 1.0
    with pytest.raises(ConfigError):
        dict_to_config(doc)


def test_dense_gain_matrices_accepted():
    doc = two_agent_doc()
    entry = doc["agents"][0]
    del entry["K_diag"]
    entry["K"] = [[40.0, 1.0], [1.0, 40.0]]
    config = dict_to_config(doc)
    assert np.array_equal(config.agents[0].K, [[40.0, 1.0], [1.0, 40.0]])
    emitted = config_to_dict(config)
    assert emitted["agents"][0]["K"] == [[40.0, 1.0], [1.0, 40.0]]
    assert "K_diag" in emitted["agents"][1]


def test_trace_csv_round_trip(tmp_path):
    from delay_consensus.sim import run

    config = dict_to_config(two_agent_doc(duration=0.1))
    trace = run(config)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(trace_header(2, 2))
    assert len(header.split(",")) == 1 + 2 * (4 * 2 + 2)
    data = read_trace_csv(path)
    assert data["n"] == 2 and data["m"] == 2
    assert np.array_equal(data["t"], trace.t)
    for key, arr in (("q", trace.q), ("qdot", trace.qdot), ("v", trace.v), ("s", trace.s)):
        assert np.array_equal(data[key], arr)
    assert np.array_equal(data["vlyap"], trace.vlyap)
    assert np.array_equal(data["da_norm"], trace.da_norm)


def test_trace_stride_keeps_final_row(tmp_path):
    from delay_consensus.sim import run

    config = dict_to_config(two_agent_doc(duration=0.1))
    trace = run(config)  # 21 rows
    path = tmp_path / "thin.csv"
    write_trace_csv(trace, path, stride=4)
    data = read_trace_csv(path)
    assert data["t"].size == 6  # rows 0,4,8,12,16,20
    assert data["t"][-1] == trace.t[-1]
    # a stride that does not divide the row count still keeps the final row
    write_trace_csv(trace, path, stride=8)
    data = read_trace_csv(path)
    assert data["t"].size == 4  # rows 0,8,16 plus the appended final row
    assert data["t"][-1] == trace.t[-1]


def test_malformed_trace_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,q1_1\n")
    with pytest.raises(ConfigError):
        read_trace_csv(path)
    path.write_text("nonsense\nrows\n")
    with pytest.raises(ConfigError):
        read_trace_csv(path)


def test_analyze_command_reports_predictions(tmp_path, capsys):
    report = tmp_path / "report.json"
    code = main(["analyze", str(scenarios.path("leaderless6")), "--json", str(report)])
    assert code == 0
    out = capsys.readouterr().out
    assert "spanning tree: yes" in out
    doc = json.loads(report.read_text())
    assert doc["mode"] == "leaderless"
    assert abs(doc["sigma_s"] - 2.0 / 3.0) <= 1e-12
    assert np.allclose(doc["predicted_consensus_velocity"], [0.04, -0.03], atol=1e-12)
    assert abs(sum(doc["gamma"]) - 1.0) <= 1e-12
    assert np.allclose(doc["delay_factors"], [1.5] * 6, atol=1e-12)


def test_analyze_leader_mode_predicts_leader_velocity(tmp_path):
    report = tmp_path / "report.json"
    assert main(["analyze", str(scenarios.path("leader6")), "--json", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["mode"] == "leader"
    assert np.allclose(doc["predicted_consensus_velocity"], [1.5, 2.0], atol=1e-12)
    # augmented graph: all weight sits on the leader vertex
    assert doc["gamma"][0] == 1.0
    assert np.allclose(doc["delay_factors"], [2.0, 1.5, 1.5, 1.5, 2.0, 1.5], atol=1e-12)


def test_analyze_rejects_invalid_graph(tmp_path, capsys):
    doc = two_agent_doc()
    doc["graph"]["edges"] = [doc["graph"]["edges"][0]]  # one-way link only: no spanning tree
    del doc["graph"]["edges"][0]["w"]
    path = write_doc(tmp_path, doc)
    assert main(["analyze", str(path)]) == 1
    assert "error" in capsys.readouterr().err


def test_analyze_exit_on_validation_failure(tmp_path, capsys):
    doc = two_agent_doc()
    doc["agents"][0]["K_diag"] = [-1.0, 1.0]
    path = write_doc(tmp_path, doc)
    assert main(["analyze", str(path)]) == 1
    assert "bad_gain" in capsys.readouterr().err


def test_simulate_writes_trace_and_metrics(tmp_path, capsys):
    doc = two_agent_doc(duration=0.5)
    doc["output"] = {"path": str(tmp_path / "out" / "run.csv")}
    path = write_doc(tmp_path, doc)
    assert main(["simulate", str(path), "--seedless"]) == 0
    trace_path = tmp_path / "out" / "run.csv"
    metrics_path = tmp_path / "out" / "run.metrics.json"
    assert trace_path.exists() and metrics_path.exists()
    metrics = json.loads(metrics_path.read_text())
    assert metrics["diverged"] is False
    assert metrics["endpoint"]["time"] == 0.5
    assert len(metrics["predicted_consensus_velocity"]) == 2
    assert "endpoint mean velocity" in capsys.readouterr().out


def test_simulate_duration_flag_and_validation_exit(tmp_path, capsys):
    path = write_doc(tmp_path, two_agent_doc(duration=0.5))
    assert main(["simulate", str(path), "--duration", "0.0"]) == 1
    assert "bad_value" in capsys.readouterr().err


def test_simulate_exit_two_on_divergence(tmp_path, capsys):
    doc = two_agent_doc(duration=1.0)
    for agent in doc["agents"]:
        agent["K_diag"] = [1e6, 1e6]
    doc["output"] = {"path": str(tmp_path / "boom.csv")}
    path = write_doc(tmp_path, doc)
    assert main(["simulate", str(path)]) == 2
    metrics = json.loads((tmp_path / "boom.metrics.json").read_text())
    assert metrics["diverged"] is True
    assert (tmp_path / "boom.csv").exists()


def test_simulate_respects_output_dir_override(tmp_path, monkeypatch):
    out_dir = tmp_path / "redirect"
    monkeypatch.setenv("DELAY_CONSENSUS_OUT", str(out_dir))
    doc = two_agent_doc(duration=0.1)
    doc["output"] = {"path": "somewhere/run.csv"}
    path = write_doc(tmp_path, doc)
    assert main(["simulate", str(path)]) == 0
    assert (out_dir / "run.csv").exists()
    assert (out_dir / "run.metrics.json").exists()


def test_simulate_byte_identical_reruns(tmp_path):
    doc = two_agent_doc(duration=1.0)
    doc["output"] = {"path": str(tmp_path / "a.csv")}
    path_a = write_doc(tmp_path, doc, "a.json")
    doc["output"] = {"path": str(tmp_path / "b.csv")}
    path_b = write_doc(tmp_path, doc, "b.json")
    assert main(["simulate", str(path_a)]) == 0
    assert main(["simulate", str(path_b)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_plot_emits_script_and_manifest(tmp_path):
    doc = two_agent_doc(duration=0.2)
    doc["output"] = {"path": str(tmp_path / "run.csv")}
    path = write_doc(tmp_path, doc)
    assert main(["simulate", str(path)]) == 0
    assert main(["plot", str(tmp_path / "run.csv")]) == 0
    script = tmp_path / "run_plots.py"
    manifest = json.loads((tmp_path / "run_plots.json").read_text())
    assert script.exists()
    py_compile.compile(str(script), doraise=True)
    assert manifest["figures"] == ["run_positions_coord1.png", "run_velocities_coord1.png"]
    assert manifest["reference_velocity"] is not None
    assert manifest["coordinates"] == [1]


def test_plot_all_coords_and_leader_overlay(tmp_path, monkeypatch):
    monkeypatch.setenv("DELAY_CONSENSUS_OUT", str(tmp_path))
    doc = load_scenario_doc("leader6")
    doc["sim"]["duration"] = 0.1
    doc["output"] = {"path": "leader_run.csv"}
    path = write_doc(tmp_path, doc)
    assert main(["simulate", str(path)]) == 0
    assert main(["plot", str(tmp_path / "leader_run.csv"), "--all-coords"]) == 0
    manifest = json.loads((tmp_path / "leader_run_plots.json").read_text())
    assert manifest["leader"] == {"q0": [0.5, 0.5], "qdot": [1.5, 2.0]}
    assert len(manifest["figures"]) == 4


def test_plot_rejects_malformed_trace(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,trace\n1,2,3\n")
    assert main(["plot", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_config_is_reported(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_load_config_from_file(tmp_path):
    path = write_doc(tmp_path, two_agent_doc())
    config = load_config(path)
    assert config.graph.n == 2
    assert config.dt == 0.005


def test_version_and_help_exit_cleanly(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "delay-consensus" in capsys.readouterr().out
    with pytest.raises(SystemExit) as excinfo:
        main(["--help"])
    assert excinfo.value.code == 0
