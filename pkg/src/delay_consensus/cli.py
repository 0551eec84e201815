"""Command-line front end: scenario files, analysis reports, runs, plots.

Configuration files are JSON and agent numbering in them is 1-based (the
virtual leader, when present, is implicit and not an agent entry).  Traces
are CSV with full round-trip float precision; metrics and analysis reports
are JSON.  All file writes go through a temp-file-then-rename so partially
written documents are never observed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import DoubleIntegrator, ManipulatorParams, TwoLinkManipulator
from .errors import ConfigError, DivergedError
from .graph import WeightedDigraph, analyze_graph, leader_augmented, observer_gamma
from .protocol import DoubleIntegratorGains, LeaderSpec
from .sim import (
    ADAPTIVE,
    DOUBLE_INTEGRATOR,
    AgentSpec,
    ScenarioConfig,
    SimTrace,
    compute_metrics,
    predicted_consensus_velocity,
    run,
    validate,
)

OUTPUT_DIR_ENV = "DELAY_CONSENSUS_OUT"


# ---------------------------------------------------------------------------
# configuration documents
# ---------------------------------------------------------------------------

def _require_keys(obj, required, optional, location):
    if not isinstance(obj, dict):
        raise ConfigError(f"{location}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{location}: unknown keys {sorted(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{location}: missing keys {missing}")


def _number(value, location) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{location}: expected a number, got {value!r}")
    return float(value)


def _vector(value, location, length=None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{location}: expected a non-empty array of numbers")
    out = np.array([_number(x, location) for x in value])
    if length is not None and out.shape != (length,):
        raise ConfigError(f"{location}: expected {length} entries, got {out.size}")
    return out


def _agent_index(value, n, location) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{location}: expected an integer agent number")
    if not 1 <= value <= n:
        raise ConfigError(f"{location}: agent number {value} out of range 1..{n}")
    return value - 1


def _gain_matrix(entry, diag_key, dense_key, size, location) -> np.ndarray:
    has_diag = diag_key in entry
    has_dense = dense_key in entry
    if has_diag == has_dense:
        raise ConfigError(f"{location}: give exactly one of {diag_key!r} or {dense_key!r}")
    if has_diag:
        return np.diag(_vector(entry[diag_key], f"{location}.{diag_key}", size))
    rows = entry[dense_key]
    if not isinstance(rows, list) or len(rows) != size:
        raise ConfigError(f"{location}.{dense_key}: expected {size} rows")
    return np.array([list(_vector(r, f"{location}.{dense_key}", size)) for r in rows])


def dict_to_config(doc: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed JSON document (strict schema)."""
    _require_keys(doc, ["graph", "agents", "protocol"],
                  ["sim", "output", "leader", "description"], "config")

    agents_doc = doc["agents"]
    if not isinstance(agents_doc, list) or not agents_doc:
        raise ConfigError("agents: expected a non-empty array")
    n = len(agents_doc)

    proto = doc["protocol"]
    _require_keys(proto, ["mode"], ["k"], "protocol")
    mode = proto["mode"]
    if mode not in (ADAPTIVE, DOUBLE_INTEGRATOR):
        raise ConfigError(f"protocol.mode: expected 'adaptive' or 'double_integrator', got {mode!r}")
    di_gains = None
    if mode == DOUBLE_INTEGRATOR:
        if "k" not in proto:
            raise ConfigError("protocol: double_integrator mode requires 'k'")
        di_gains = DoubleIntegratorGains(_number(proto["k"], "protocol.k"))
    elif "k" in proto:
        raise ConfigError("protocol: 'k' is only valid in double_integrator mode")

    graph_doc = doc["graph"]
    _require_keys(graph_doc, ["edges"], ["leader_links"], "graph")
    edges = []
    if not isinstance(graph_doc["edges"], list):
        raise ConfigError("graph.edges: expected an array")
    for idx, entry in enumerate(graph_doc["edges"]):
        loc = f"graph.edges[{idx}]"
        _require_keys(entry, ["from", "to", "w", "b", "T"], [], loc)
        edges.append((
            _agent_index(entry["from"], n, f"{loc}.from"),
            _agent_index(entry["to"], n, f"{loc}.to"),
            _number(entry["w"], f"{loc}.w"),
            _number(entry["b"], f"{loc}.b"),
            _number(entry["T"], f"{loc}.T"),
        ))
    links = []
    for idx, entry in enumerate(graph_doc.get("leader_links", [])):
        loc = f"graph.leader_links[{idx}]"
        _require_keys(entry, ["agent", "w0", "b0", "T0"], [], loc)
        links.append((
            _agent_index(entry["agent"], n, f"{loc}.agent"),
            _number(entry["w0"], f"{loc}.w0"),
            _number(entry["b0"], f"{loc}.b0"),
            _number(entry["T0"], f"{loc}.T0"),
        ))
    try:
        graph = WeightedDigraph.from_lists(n, edges, links)
    except ValueError as exc:
        raise ConfigError(f"graph: {exc}") from exc

    specs = []
    for idx, entry in enumerate(agents_doc):
        loc = f"agents[{idx}]"
        gain_keys = ["a_hat0", "K_diag", "K", "Gamma_diag", "Gamma"]
        if mode == DOUBLE_INTEGRATOR:
            _require_keys(entry, ["model", "q0", "qdot0"], [], loc)
        else:
            _require_keys(entry, ["model", "q0", "qdot0"],
                          ["a_true", "gravity_on"] + gain_keys, loc)
        q0 = _vector(entry["q0"], f"{loc}.q0")
        qdot0 = _vector(entry["qdot0"], f"{loc}.qdot0", q0.size)
        kind = entry["model"]
        if kind == "two_link":
            if "a_true" not in entry:
                raise ConfigError(f"{loc}: two_link model requires 'a_true'")
            gravity_on = entry.get("gravity_on", False)
            if not isinstance(gravity_on, bool):
                raise ConfigError(f"{loc}.gravity_on: expected a boolean")
            a_true = _vector(entry["a_true"], f"{loc}.a_true")
            try:
                model = TwoLinkManipulator(ManipulatorParams(tuple(a_true), gravity_on))
            except ValueError as exc:
                raise ConfigError(f"{loc}: {exc}") from exc
            if q0.size != 2:
                raise ConfigError(f"{loc}: two_link model needs 2-entry q0/qdot0")
        elif kind == "double_integrator":
            if "a_true" in entry:
                raise ConfigError(f"{loc}: double_integrator model takes no 'a_true'")
            model = DoubleIntegrator(q0.size)
        else:
            raise ConfigError(f"{loc}.model: unknown model {kind!r}")
        spec = AgentSpec(model, q0, qdot0)
        if mode == ADAPTIVE:
            p = model.param_count
            spec.K = _gain_matrix(entry, "K_diag", "K", model.dof, loc)
            spec.Gamma = _gain_matrix(entry, "Gamma_diag", "Gamma", p, loc)
            if "a_hat0" in entry:
                spec.a_hat0 = _vector(entry["a_hat0"], f"{loc}.a_hat0", p)
            else:
                spec.a_hat0 = np.zeros(p)
        specs.append(spec)

    leader = None
    if "leader" in doc:
        _require_keys(doc["leader"], ["q0", "qdot"], [], "leader")
        try:
            leader = LeaderSpec(_vector(doc["leader"]["q0"], "leader.q0"),
                                _vector(doc["leader"]["qdot"], "leader.qdot"))
        except ValueError as exc:
            raise ConfigError(f"leader: {exc}") from exc

    sim_doc = doc.get("sim", {})
    _require_keys(sim_doc, [], ["dt", "duration", "integrator"], "sim")
    dt = _number(sim_doc.get("dt", 0.005), "sim.dt")
    duration = _number(sim_doc.get("duration", 60.0), "sim.duration")
    integrator = sim_doc.get("integrator", "euler")
    if integrator not in ("euler", "rk4"):
        raise ConfigError(f"sim.integrator: expected 'euler' or 'rk4', got {integrator!r}")

    output_path = None
    if "output" in doc:
        _require_keys(doc["output"], [], ["path"], "output")
        if "path" in doc["output"]:
            if not isinstance(doc["output"]["path"], str):
                raise ConfigError("output.path: expected a string")
            output_path = doc["output"]["path"]

    return ScenarioConfig(
        graph=graph, agents=tuple(specs), mode=mode, di_gains=di_gains,
        leader=leader, dt=dt, duration=duration, integrator=integrator,
        output_path=output_path,
    )


def config_to_dict(config: ScenarioConfig) -> dict:
    """Canonical JSON document for a scenario (inverse of dict_to_config)."""
    doc: dict = {
        "graph": {
            "edges": [
                {"from": e.i + 1, "to": e.j + 1, "w": e.w, "b": e.b, "T": e.delay}
                for e in config.graph.edges
            ],
        },
        "agents": [],
        "protocol": {"mode": config.mode},
        "sim": {"dt": config.dt, "duration": config.duration},
    }
    if config.graph.leader_links:
        doc["graph"]["leader_links"] = [
            {"agent": l.agent + 1, "w0": l.w, "b0": l.b, "T0": l.delay}
            for l in config.graph.leader_links
        ]
    for spec in config.agents:
        entry: dict = {}
        if isinstance(spec.model, TwoLinkManipulator):
            entry["model"] = "two_link"
            entry["a_true"] = list(spec.model.params.a)
            if spec.model.params.gravity_on:
                entry["gravity_on"] = True
        elif isinstance(spec.model, DoubleIntegrator):
            entry["model"] = "double_integrator"
        else:
            raise ConfigError(f"model {type(spec.model).__name__} has no file representation")
        entry["q0"] = [float(x) for x in spec.q0]
        entry["qdot0"] = [float(x) for x in spec.qdot0]
        if config.mode == ADAPTIVE:
            for key, mat in (("K", spec.K), ("Gamma", spec.Gamma)):
                if np.count_nonzero(mat - np.diag(np.diag(mat))) == 0:
                    entry[f"{key}_diag"] = [float(x) for x in np.diag(mat)]
                else:
                    entry[key] = [[float(x) for x in row] for row in mat]
            entry["a_hat0"] = [float(x) for x in spec.a_hat0]
        doc["agents"].append(entry)
    if config.mode == DOUBLE_INTEGRATOR:
        doc["protocol"]["k"] = config.di_gains.k
    if config.integrator != "euler":
        doc["sim"]["integrator"] = config.integrator
    if config.leader is not None:
        doc["leader"] = {"q0": [float(x) for x in config.leader.q0],
                         "qdot": [float(x) for x in config.leader.qdot]}
    if config.output_path is not None:
        doc["output"] = {"path": config.output_path}
    return doc


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return dict_to_config(doc)


# ---------------------------------------------------------------------------
# trace and report files
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_header(n: int, m: int) -> list[str]:
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"q{i}_{c}" for c in range(1, m + 1)]
        cols += [f"qdot{i}_{c}" for c in range(1, m + 1)]
        cols += [f"v{i}_{c}" for c in range(1, m + 1)]
        cols += [f"s{i}_{c}" for c in range(1, m + 1)]
        cols += [f"Vlyap{i}", f"da_norm{i}"]
    return cols


def write_trace_csv(trace: SimTrace, path, stride: int = 1):
    """Write a trace as CSV, one row per step (thinned by ``stride``, final row kept)."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    n, m = trace.n_agents, trace.dof
    rows = list(range(0, trace.t.size, stride))
    if rows and rows[-1] != trace.t.size - 1:
        rows.append(trace.t.size - 1)
    lines = [",".join(trace_header(n, m))]
    for k in rows:
        cells = [repr(float(trace.t[k]))]
        for i in range(n):
            for arr in (trace.q, trace.qdot, trace.v, trace.s):
                cells += [repr(float(x)) for x in arr[k, i]]
            cells.append(repr(float(trace.vlyap[k, i])))
            cells.append(repr(float(trace.da_norm[k, i])))
        lines.append(",".join(cells))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_trace_csv(path) -> dict:
    """Parse a trace CSV back into arrays; raises ConfigError when malformed."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    raw = [line for line in raw if line]
    if len(raw) < 2:
        raise ConfigError(f"{path}: trace has no data rows")
    header = raw[0].split(",")
    if header[0] != "t" or len(header) < 11:
        raise ConfigError(f"{path}: unrecognized trace header")
    m = sum(1 for name in header if name.startswith("q1_"))
    per_agent = 4 * m + 2
    if m < 1 or (len(header) - 1) % per_agent != 0:
        raise ConfigError(f"{path}: unrecognized trace header")
    n = (len(header) - 1) // per_agent
    if header != trace_header(n, m):
        raise ConfigError(f"{path}: trace header does not match the column contract")
    try:
        table = np.array([[float(x) for x in line.split(",")] for line in raw[1:]])
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric trace data: {exc}") from exc
    if table.shape[1] != len(header):
        raise ConfigError(f"{path}: ragged trace rows")
    out = {"t": table[:, 0], "n": n, "m": m}
    blocks = {"q": 0, "qdot": m, "v": 2 * m, "s": 3 * m}
    for key, offset in blocks.items():
        arr = np.zeros((table.shape[0], n, m))
        for i in range(n):
            base = 1 + i * per_agent + offset
            arr[:, i, :] = table[:, base:base + m]
        out[key] = arr
    for key, offset in (("vlyap", 4 * m), ("da_norm", 4 * m + 1)):
        arr = np.zeros((table.shape[0], n))
        for i in range(n):
            arr[:, i] = table[:, 1 + i * per_agent + offset]
        out[key] = arr
    return out


def write_json(obj, path):
    _atomic_write(Path(path), json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _out_path(path) -> Path:
    """Resolve an output path, honoring the output-directory override variable."""
    override = os.environ.get(OUTPUT_DIR_ENV)
    path = Path(path)
    if override:
        out_dir = Path(override)
        out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir / path.name
    if str(path.parent) not in ("", "."):
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _print_issues(issues):
    for issue in issues:
        print(f"error [{issue.code}] {issue.location}: {issue.message}", file=sys.stderr)


def _fmt_vec(vec) -> str:
    return "[" + ", ".join(f"{float(x):.6g}" for x in vec) + "]"


def _delay_factors(config: ScenarioConfig) -> list[float]:
    factors = []
    for i in range(config.graph.n):
        f = 1.0 + sum(e.w * e.delay for e in config.graph.edges if e.i == i)
        link = config.graph.leader_link_for(i)
        if link is not None:
            f += link.w * link.delay
        factors.append(f)
    return factors


def cmd_analyze(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    issues = validate(config)
    if issues:
        _print_issues(issues)
        return 1

    leader_mode = config.leader is not None
    graph = leader_augmented(config.graph) if leader_mode else config.graph
    bundle = analyze_graph(graph)
    gamma_obs = observer_gamma(graph)
    vbar = predicted_consensus_velocity(config)
    factors = _delay_factors(config)

    mode = "leader" if leader_mode else "leaderless"
    print(f"mode: {mode}")
    print(f"spanning tree: {'yes' if bundle.has_spanning_tree else 'no'}")
    label = " (index 0 is the leader)" if leader_mode else ""
    print(f"gamma{label}: {_fmt_vec(bundle.gamma)}")
    print(f"sigma_S: {bundle.sigma_s:.10g}")
    print(f"predicted consensus velocity: {_fmt_vec(vbar)}")
    print(f"delay factor per agent: {_fmt_vec(factors)}")

    if args.json:
        report = {
            "mode": mode,
            "has_spanning_tree": True,
            "gamma": [float(x) for x in bundle.gamma],
            "gamma_observer": [float(x) for x in gamma_obs],
            "sigma_s": float(bundle.sigma_s),
            "predicted_consensus_velocity": [float(x) for x in vbar],
            "delay_factors": factors,
            "n_agents": config.graph.n,
            "dof": int(config.agents[0].model.dof),
        }
        path = _out_path(args.json)
        write_json(report, path)
        print(f"report written to {path}")
    return 0


def _metrics_document(config, trace, metrics, trace_path, stride) -> dict:
    doc = metrics.to_dict()
    doc.update({
        "trace": str(trace_path),
        "stride": stride,
        "mode": config.mode,
        "dt": config.dt,
        "n_agents": config.graph.n,
        "dof": int(config.agents[0].model.dof),
        "leader": None if config.leader is None else {
            "q0": [float(x) for x in config.leader.q0],
            "qdot": [float(x) for x in config.leader.qdot],
        },
    })
    return doc


def cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.dt is not None:
        config.dt = args.dt
    if args.duration is not None:
        config.duration = args.duration
    if args.stride < 1:
        print("error: --stride must be >= 1", file=sys.stderr)
        return 1
    issues = validate(config)
    if issues:
        _print_issues(issues)
        return 1

    vbar = predicted_consensus_velocity(config)
    code = 0
    try:
        trace = run(config)
    except DivergedError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        trace = exc.trace
        code = 2

    default_name = Path(args.config).stem + "_trace.csv"
    trace_path = _out_path(config.output_path or default_name)
    metrics_path = trace_path.with_name(trace_path.stem + ".metrics.json")
    metrics = compute_metrics(trace, vbar)
    write_trace_csv(trace, trace_path, stride=args.stride)
    write_json(_metrics_document(config, trace, metrics, trace_path, args.stride), metrics_path)

    print(f"trace written to {trace_path}")
    print(f"metrics written to {metrics_path}")
    print(f"predicted consensus velocity: {_fmt_vec(vbar)}")
    print(f"endpoint mean velocity:       {_fmt_vec(metrics.simulated_mean_velocity)}")
    print(f"endpoint velocity error: {metrics.endpoint_velocity_error:.3e}   "
          f"position spread: {metrics.endpoint_position_spread:.3e}")
    if trace.diverged:
        print("run DIVERGED; partial trace retained")
    return code


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Render figures from a delay-consensus trace CSV.  Requires matplotlib."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

TRACE = __TRACE__
FIGURES = __FIGURES__


def read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    index = {name: k for k, name in enumerate(header)}
    return {name: [float(r[index[name]]) for r in data] for name in header}


def main():
    cols = read_columns(TRACE)
    t = cols["t"]
    out_dir = Path(__file__).resolve().parent
    for fig in FIGURES:
        plt.figure(figsize=(8.0, 4.5))
        for name, label in zip(fig["columns"], fig["labels"]):
            plt.plot(t, cols[name], label=label)
        if fig["leader"] is not None:
            intercept, slope = fig["leader"]
            plt.plot(t, [intercept + slope * x for x in t], "k--", label="leader")
        if fig["reference"] is not None:
            plt.axhline(fig["reference"], color="k", linestyle=":", label="predicted")
        plt.xlabel("time [s]")
        plt.ylabel(fig["ylabel"])
        plt.title(fig["title"])
        plt.legend(loc="best", fontsize=8)
        plt.tight_layout()
        target = out_dir / fig["file"]
        plt.savefig(target, dpi=150)
        plt.close()
        print(f"wrote {target}")


if __name__ == "__main__":
    main()
'''


def cmd_plot(args) -> int:
    try:
        data = read_trace_csv(args.trace)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    trace_path = Path(args.trace)
    metrics_path = args.metrics
    if metrics_path is None:
        candidate = trace_path.with_name(trace_path.stem + ".metrics.json")
        metrics_path = candidate if candidate.exists() else None
    vbar = leader = None
    if metrics_path is not None:
        try:
            with open(metrics_path, encoding="utf-8") as fh:
                metrics_doc = json.load(fh)
            vbar = metrics_doc.get("predicted_consensus_velocity")
            leader = metrics_doc.get("leader")
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot use metrics file {metrics_path}: {exc}", file=sys.stderr)
            return 1

    n, m = data["n"], data["m"]
    coords = range(m) if args.all_coords else [0]
    figures = []
    for c in coords:
        figures.append({
            "file": f"{trace_path.stem}_positions_coord{c + 1}.png",
            "title": f"positions (coordinate {c + 1})",
            "ylabel": "position",
            "columns": [f"q{i}_{c + 1}" for i in range(1, n + 1)],
            "labels": [f"agent {i}" for i in range(1, n + 1)],
            "leader": None if leader is None else (leader["q0"][c], leader["qdot"][c]),
            "reference": None,
        })
        figures.append({
            "file": f"{trace_path.stem}_velocities_coord{c + 1}.png",
            "title": f"velocities (coordinate {c + 1})",
            "ylabel": "velocity",
            "columns": [f"qdot{i}_{c + 1}" for i in range(1, n + 1)],
            "labels": [f"agent {i}" for i in range(1, n + 1)],
            "leader": None,
            "reference": None if vbar is None else float(vbar[c]),
        })

    script = _PLOT_TEMPLATE.replace("__TRACE__", repr(str(trace_path.resolve())))
    script = script.replace("__FIGURES__", repr(figures))
    script_path = _out_path(trace_path.parent / (trace_path.stem + "_plots.py"))
    manifest_path = _out_path(trace_path.parent / (trace_path.stem + "_plots.json"))
    _atomic_write(script_path, script)
    manifest = {
        "trace": str(trace_path),
        "script": str(script_path),
        "figures": [f["file"] for f in figures],
        "coordinates": [c + 1 for c in coords],
        "reference_velocity": vbar,
        "leader": leader,
        "metrics": None if metrics_path is None else str(metrics_path),
    }
    write_json(manifest, manifest_path)
    print(f"plot script written to {script_path}")
    print(f"manifest written to {manifest_path}")
    print(f"run:  python {script_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delay-consensus",
        description="Simulate and analyze second-order consensus of mechanical "
                    "agents coupled over delayed directed links.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spanning tree, gamma, sigma_S and the predicted consensus velocity")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run a scenario; writes a CSV trace and a metrics JSON")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--dt", type=float, help="override the step size in seconds")
    p.add_argument("--duration", type=float, help="override the run length in seconds")
    p.add_argument("--stride", type=int, default=1, help="keep every Nth trace row (final row always kept)")
    p.add_argument("--seedless", action="store_true",
                   help="accepted for interface parity; runs are always deterministic")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="emit a matplotlib script and manifest for a trace")
    p.add_argument("trace", help="trace CSV file")
    p.add_argument("--metrics", metavar="PATH",
                   help="metrics JSON for reference lines (default: sibling of the trace)")
    p.add_argument("--all-coords", action="store_true", help="plot every coordinate, not just the first")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
