"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Heavy scenario runs are shared through the session-scoped fixtures in
conftest.py.  Criterion 7 is asserted exactly as stated; see the scenario
description of leader6 for the known storage-function step at the leader
link activation instant.
"""
import os
import subprocess
import sys
import time

import numpy as np

from delay_consensus.delayline import DelayLine
from delay_consensus.dynamics import TwoLinkManipulator
from delay_consensus.graph import build_laplacian, compute_gamma, has_spanning_tree, observer_gamma
from delay_consensus.sim import compute_metrics, predicted_consensus_velocity
import delay_consensus.scenarios as scenarios

from _helpers import (
    brute_force_has_tree,
    lstsq_gamma,
    pairs_to_graph,
    random_digraph_pairs,
    random_spanning_tree_pairs,
    random_valid_params,
)

LYAP_TOL = 1e-4


def _verdict(name, ok, detail=""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def _per_agent_coordinate_error(trace, target):
    return float(np.abs(trace.qdot[-1] - np.asarray(target)).max())


def test_criterion_01_consensus_matches_closed_form(leaderless_run):
    config, trace, elapsed = leaderless_run
    vbar = predicted_consensus_velocity(config)
    assert np.allclose(vbar, [0.04, -0.03], atol=1e-12)  # hand-evaluated closed form
    metrics = compute_metrics(trace, vbar)
    vel_err = _per_agent_coordinate_error(trace, vbar)
    detail = (f"velocity err {vel_err:.2e} <= 1e-2, position spread "
              f"{metrics.endpoint_position_spread:.2e} <= 1e-2, runtime {elapsed:.1f}s <= 10s")
    _verdict("C1 closed-form consensus match", vel_err <= 1e-2
             and metrics.endpoint_position_spread <= 1e-2 and elapsed <= 10.0, detail)


def test_criterion_02_delay_scaling_law(leaderless_run, doubled_delay_run):
    config1, trace1, _ = leaderless_run
    config2, trace2, _ = doubled_delay_run
    vbar1 = predicted_consensus_velocity(config1)
    vbar2 = predicted_consensus_velocity(config2)
    assert np.allclose(vbar2 / vbar1, 0.7, atol=1e-12)  # denominators 1.75 and 2.5
    vel_err = _per_agent_coordinate_error(trace2, vbar2)
    sim_ratio = trace2.qdot[-1].mean(axis=0) / trace1.qdot[-1].mean(axis=0)
    ratio_err = float(np.abs(sim_ratio - vbar2 / vbar1).max())
    detail = f"velocity err {vel_err:.2e} <= 1e-2, ratio err {ratio_err:.2e} <= 1e-3"
    _verdict("C2 delay-scaling law", vel_err <= 1e-2 and ratio_err <= 1e-3, detail)


def test_criterion_03_leader_follower(leader_run):
    config, trace, _ = leader_run
    metrics = compute_metrics(trace, predicted_consensus_velocity(config))
    detail = (f"velocity err {metrics.leader_endpoint_velocity_error:.2e} <= 1e-2, "
              f"position err {metrics.leader_endpoint_position_error:.2e} <= 1e-2")
    _verdict("C3 leader-follower convergence",
             metrics.leader_endpoint_velocity_error <= 1e-2
             and metrics.leader_endpoint_position_error <= 1e-2, detail)


def test_criterion_04_reduced_protocol(double_integrator_run):
    config, trace, _ = double_integrator_run
    vbar = predicted_consensus_velocity(config)
    assert np.allclose(vbar, [0.04, -0.03], atol=1e-12)
    vel_err = _per_agent_coordinate_error(trace, vbar)
    _verdict("C4 double-integrator protocol", vel_err <= 1e-2,
             f"velocity err {vel_err:.2e} <= 1e-2")


def test_criterion_05_zero_delay_degeneration(zero_delay_run):
    config, trace, _ = zero_delay_run
    gamma = observer_gamma(config.graph)
    target = gamma @ np.stack([spec.qdot0 for spec in config.agents])
    assert np.allclose(target, [0.07, -0.0525], atol=1e-12)  # plain weighted mean
    vel_err = _per_agent_coordinate_error(trace, target)
    _verdict("C5 zero-delay degeneration", vel_err <= 1e-3,
             f"velocity err {vel_err:.2e} <= 1e-3")


def test_criterion_06_dynamics_property_suite():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    min_eig = np.inf
    max_skew = 0.0
    max_regressor_gap = 0.0
    h = 1e-6
    for _ in range(10_000):
        model = TwoLinkManipulator(random_valid_params(rng))
        q = rng.uniform(-np.pi, np.pi, 2)
        qdot = rng.uniform(-2.0, 2.0, 2)
        x = rng.uniform(-2.0, 2.0, 2)
        zeta = rng.uniform(-2.0, 2.0, 2)
        zeta_dot = rng.uniform(-2.0, 2.0, 2)
        min_eig = min(min_eig, np.linalg.eigvalsh(model.inertia(q)).min())
        mdot = (model.inertia(q + h * qdot) - model.inertia(q - h * qdot)) / (2.0 * h)
        skew = abs(x @ (mdot - 2.0 * model.coriolis(q, qdot)) @ x)
        max_skew = max(max_skew, skew)
        lhs = model.inertia(q) @ zeta_dot + model.coriolis(q, qdot) @ zeta + model.gravity(q)
        gap = np.abs(model.regressor(q, qdot, zeta, zeta_dot) @ model.true_params - lhs).max()
        max_regressor_gap = max(max_regressor_gap, gap)
    elapsed = time.perf_counter() - start
    detail = (f"min eig {min_eig:.3e} > 0, skew {max_skew:.2e} <= 1e-8, "
              f"regressor gap {max_regressor_gap:.2e} <= 1e-12, runtime {elapsed:.1f}s <= 5s")
    _verdict("C6 dynamics property suite",
             min_eig > 0.0 and max_skew <= 1e-8 and max_regressor_gap <= 1e-12
             and elapsed <= 5.0, detail)


def test_criterion_07_lyapunov_suite(leaderless_run, leader_run, doubled_delay_run,
                                     zero_delay_run, double_integrator_run):
    runs = (("leaderless6", leaderless_run), ("leader6", leader_run),
            ("doubled delays", doubled_delay_run), ("zero delays", zero_delay_run),
            ("reduced protocol", double_integrator_run))
    parts = []
    ok = True
    for label, (_, trace, _) in runs:
        diffs = np.diff(trace.vlyap, axis=0)
        worst = float(diffs.max())
        count = int((diffs > LYAP_TOL).sum())
        good = worst <= LYAP_TOL and count == 0
        ok = ok and good
        parts.append(f"{label}: max step increase {worst:.2e}, violations {count}")
    _verdict("C7 Lyapunov suite", ok, "; ".join(parts))


def test_criterion_08_graph_suite():
    rng = np.random.default_rng(99)
    worst_residual = 0.0
    worst_oracle_gap = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = pairs_to_graph(random_spanning_tree_pairs(rng, n), n, rng)
        lap = build_laplacian(g)
        gamma = compute_gamma(lap)
        worst_residual = max(worst_residual,
                             np.linalg.norm(gamma @ lap) / np.linalg.norm(lap))
        worst_oracle_gap = max(worst_oracle_gap, np.abs(gamma - lstsq_gamma(lap)).max())
    agree = True
    for _ in range(500):
        n = int(rng.integers(1, 9))
        pairs = random_digraph_pairs(rng, n)
        g = pairs_to_graph(pairs, n, rng)
        agree = agree and (has_spanning_tree(g) == brute_force_has_tree(n, pairs))
    detail = (f"gamma residual {worst_residual:.2e} <= 1e-9, oracle gap "
              f"{worst_oracle_gap:.2e} <= 1e-8, reachability agreement {agree}")
    _verdict("C8 graph suite",
             worst_residual <= 1e-9 and worst_oracle_gap <= 1e-8 and agree, detail)


def test_criterion_09_delayline_exactness():
    rng = np.random.default_rng(4242)
    ok = True
    for steps in range(0, 201):
        line = DelayLine(steps, 1)
        inputs = rng.standard_normal((1000, 1))
        for k in range(1000):
            out = line.push_and_read(inputs[k])
            expected = inputs[k - steps] if k - steps >= 0 else np.zeros(1)
            if not np.array_equal(out, expected):
                ok = False
                break
        if not ok:
            break
    _verdict("C9 delay-line exactness", ok,
             "exact match with full-history oracle for all delays 0..200")


def test_criterion_10_determinism(tmp_path):
    config_path = str(scenarios.path("leaderless6"))
    outputs = []
    for sub in ("one", "two"):
        out_dir = tmp_path / sub
        env = dict(os.environ, DELAY_CONSENSUS_OUT=str(out_dir))
        proc = subprocess.run(
            [sys.executable, "-m", "delay_consensus.cli", "simulate", config_path],
            env=env, capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        outputs.append((out_dir / "leaderless6_trace.csv").read_bytes())
    identical = outputs[0] == outputs[1]
    _verdict("C10 determinism", identical,
             f"two independent runs produced {'identical' if identical else 'DIFFERENT'} CSV bytes")
