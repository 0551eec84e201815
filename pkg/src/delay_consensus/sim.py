"""Deterministic fixed-step scenario engine.

Wires the interaction graph, agent dynamics, delay lines and per-agent
control stack into one closed loop and records a dense trace.  Each step
is two-phase: every rate is evaluated from the pre-step state snapshot
(all delay lines are pushed exactly once with snapshot values), then all
states commit together.  That removes agent-ordering artifacts and makes
repeated runs of the same scenario bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import protocol
from .delayline import DelayLine, delay_steps
from .dynamics import DoubleIntegrator, KinematicModel
from .errors import DivergedError, NonCommensurateDelayError, ValidationError
from .graph import WeightedDigraph, has_spanning_tree, leader_augmented, observer_gamma, predict_consensus_velocity
from .protocol import ControllerState, DoubleIntegratorGains, LeaderSpec

DIVERGENCE_LIMIT = 1e9
LYAPUNOV_STEP_TOL = 1e-4
ADAPTIVE = "adaptive"
DOUBLE_INTEGRATOR = "double_integrator"


@dataclass
class AgentSpec:
    """One agent: model with its true parameters, initial state, controller gains.

    ``K``/``Gamma``/``a_hat0`` are only meaningful in adaptive mode and stay
    None for double-integrator or kinematic agents.  ``a_hat0`` defaults to
    zero when omitted.
    """

    model: object
    q0: np.ndarray
    qdot0: np.ndarray
    K: np.ndarray | None = None
    Gamma: np.ndarray | None = None
    a_hat0: np.ndarray | None = None

    def __post_init__(self):
        self.q0 = np.asarray(self.q0, dtype=float)
        self.qdot0 = np.asarray(self.qdot0, dtype=float)
        if self.K is not None:
            self.K = np.asarray(self.K, dtype=float)
        if self.Gamma is not None:
            self.Gamma = np.asarray(self.Gamma, dtype=float)
        if self.a_hat0 is not None:
            self.a_hat0 = np.asarray(self.a_hat0, dtype=float)


@dataclass
class ScenarioConfig:
    """Full declarative description of one simulation run."""

    graph: WeightedDigraph
    agents: tuple[AgentSpec, ...]
    mode: str = ADAPTIVE
    di_gains: DoubleIntegratorGains | None = None
    leader: LeaderSpec | None = None
    dt: float = 0.005
    duration: float = 60.0
    integrator: str = "euler"
    output_path: str | None = None

    def __post_init__(self):
        self.agents = tuple(self.agents)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass(eq=False)
class SimTrace:
    """Time-indexed record of one run; all series share the time grid."""

    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    v: np.ndarray
    s: np.ndarray
    tau: np.ndarray
    vlyap: np.ndarray
    da_norm: np.ndarray
    dt: float
    mode: str
    leader: LeaderSpec | None = None
    diverged: bool = False

    @property
    def n_agents(self) -> int:
        return self.q.shape[1]

    @property
    def dof(self) -> int:
        return self.q.shape[2]


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    location: str
    message: str


def _spd_problem(mat: np.ndarray, m: int) -> str | None:
    if mat is None:
        return "missing"
    if mat.shape != (m, m):
        return f"expected shape ({m}, {m}), got {mat.shape}"
    scale = max(np.abs(mat).max(), 1.0)
    if np.abs(mat - mat.T).max() > protocol.SPD_SYMMETRY_RTOL * scale:
        return "not symmetric"
    if np.linalg.eigvalsh(mat).min() <= 0.0:
        return "not positive definite"
    return None


def validate(config: ScenarioConfig) -> list[ValidationIssue]:
    """Check a scenario before running it.  Returns an empty list when OK.

    Reported codes: no_spanning_tree, non_commensurate_delay, bad_gain,
    dimension_mismatch, bad_value.  Locations use the 1-based agent
    numbering of configuration files.
    """
    issues: list[ValidationIssue] = []

    def add(code, location, message):
        issues.append(ValidationIssue(code, location, message))

    if not (np.isfinite(config.dt) and config.dt > 0.0):
        add("bad_value", "sim.dt", f"dt must be positive, got {config.dt}")
    if not (np.isfinite(config.duration) and config.duration > 0.0):
        add("bad_value", "sim.duration", f"duration must be positive, got {config.duration}")
    if issues:
        return issues
    n_steps = int(round(config.duration / config.dt))
    if n_steps < 1 or abs(config.duration - n_steps * config.dt) > 1e-9 * max(config.duration, config.dt):
        add("bad_value", "sim.duration",
            f"duration {config.duration} is not a whole number of steps of dt {config.dt}")
    if config.integrator not in ("euler", "rk4"):
        add("bad_value", "sim.integrator", f"unknown integrator {config.integrator!r}")
    if config.mode not in (ADAPTIVE, DOUBLE_INTEGRATOR):
        add("bad_value", "protocol.mode", f"unknown mode {config.mode!r}")
        return issues

    g = config.graph
    if len(config.agents) != g.n:
        add("dimension_mismatch", "agents",
            f"graph has {g.n} vertices but {len(config.agents)} agents are given")
        return issues

    dofs = {spec.model.dof for spec in config.agents}
    if len(dofs) != 1:
        add("dimension_mismatch", "agents", f"agents have mixed dof {sorted(dofs)}")
        return issues
    m = dofs.pop()

    for idx, spec in enumerate(config.agents):
        loc = f"agent {idx + 1}"
        if spec.q0.shape != (m,) or spec.qdot0.shape != (m,):
            add("dimension_mismatch", loc,
                f"q0/qdot0 must have shape ({m},), got {spec.q0.shape} and {spec.qdot0.shape}")
            continue
        if not (np.isfinite(spec.q0).all() and np.isfinite(spec.qdot0).all()):
            add("bad_value", loc, "initial state must be finite")
            continue
        if isinstance(spec.model, KinematicModel):
            continue
        if config.mode == ADAPTIVE:
            p = spec.model.param_count
            problem = _spd_problem(spec.K, m)
            if problem:
                add("bad_gain", loc, f"K {problem}")
            problem = _spd_problem(spec.Gamma, p)
            if problem:
                add("bad_gain", loc, f"Gamma {problem}")
            if spec.a_hat0 is not None and spec.a_hat0.shape != (p,):
                add("dimension_mismatch", loc,
                    f"a_hat0 must have shape ({p},), got {spec.a_hat0.shape}")
        else:
            if not isinstance(spec.model, DoubleIntegrator):
                add("dimension_mismatch", loc,
                    "double-integrator protocol requires double-integrator agents")

    if config.mode == DOUBLE_INTEGRATOR:
        if config.di_gains is None:
            add("bad_gain", "protocol.k", "double-integrator mode needs a scalar gain k")
        elif not (np.isfinite(config.di_gains.k) and config.di_gains.k > 0.0):
            add("bad_gain", "protocol.k", f"k must be positive, got {config.di_gains.k}")

    if (config.leader is None) != (len(g.leader_links) == 0):
        add("dimension_mismatch", "leader",
            "leader motion and graph leader links must be given together")
    if config.leader is not None and config.leader.q0.shape != (m,):
        add("dimension_mismatch", "leader",
            f"leader q0/qdot must have shape ({m},), got {config.leader.q0.shape}")

    for e in g.edges:
        try:
            delay_steps(e.delay, config.dt)
        except NonCommensurateDelayError as exc:
            add("non_commensurate_delay", f"edge ({e.i + 1} <- {e.j + 1})", str(exc))
    for l in g.leader_links:
        try:
            delay_steps(l.delay, config.dt)
        except NonCommensurateDelayError as exc:
            add("non_commensurate_delay", f"leader link agent {l.agent + 1}", str(exc))

    tree_graph = leader_augmented(g) if config.leader is not None else g
    if not has_spanning_tree(tree_graph):
        add("no_spanning_tree", "graph",
            "interaction graph (with the leader, if any) has no spanning tree")

    return issues


def predicted_consensus_velocity(config: ScenarioConfig) -> np.ndarray:
    """Closed-form consensus velocity of a scenario.

    The leader's velocity in leader mode; otherwise the delay-scaled
    weighted mean of the agents' initial velocities, with the weighting
    vector taken from the observer-weight Laplacian.
    """
    if config.leader is not None:
        return config.leader.qdot.copy()
    v0 = np.stack([spec.qdot0 for spec in config.agents])
    return predict_consensus_velocity(config.graph, observer_gamma(config.graph), v0)


class _LeaderRuntime:
    __slots__ = ("w0", "b0", "t0", "line_pos", "line_vel", "read_pos", "read_vel")

    def __init__(self, link, dt, m):
        self.w0 = link.w
        self.b0 = link.b
        self.t0 = link.delay
        self.line_pos = DelayLine.from_delay(link.delay, dt, m)
        self.line_vel = DelayLine.from_delay(link.delay, dt, m)
        self.read_pos = np.zeros(m)
        self.read_vel = np.zeros(m)


class _Engine:
    def __init__(self, config: ScenarioConfig):
        self.config = config
        g = config.graph
        self.n = g.n
        self.m = config.agents[0].model.dof
        self.dt = config.dt
        self.mode = config.mode
        self.leader = config.leader
        self.models = [spec.model for spec in config.agents]
        self.kinematic = [isinstance(mod, KinematicModel) for mod in self.models]

        n, m, dt = self.n, self.m, self.dt
        self.q = np.stack([spec.q0 for spec in config.agents]).astype(float)
        self.qd = np.stack([spec.qdot0 for spec in config.agents]).astype(float)
        self.v = self.qd.copy()
        self._q0 = self.q.copy()
        self._qd0 = self.qd.copy()

        self.ctrls: list[ControllerState | None] = [None] * n
        if self.mode == ADAPTIVE:
            for i, spec in enumerate(config.agents):
                if self.kinematic[i]:
                    continue
                p = spec.model.param_count
                a0 = spec.a_hat0 if spec.a_hat0 is not None else np.zeros(p)
                self.ctrls[i] = ControllerState(a0, spec.K, spec.Gamma)
        self.k_gain = config.di_gains.k if config.di_gains is not None else 0.0

        self.nb_src: list[list[int]] = [[] for _ in range(n)]
        self.nb_w: list[np.ndarray] = []
        self.nb_b: list[np.ndarray] = []
        self.nb_t: list[np.ndarray] = []
        self.lines_v: list[list[DelayLine]] = [[] for _ in range(n)]
        self.lines_q: list[list[DelayLine]] = [[] for _ in range(n)]
        self.lines_qd: list[list[DelayLine]] = [[] for _ in range(n)]
        per_agent = [[] for _ in range(n)]
        for e in g.edges:
            per_agent[e.i].append(e)
        for i in range(n):
            ws, bs, ts = [], [], []
            for e in per_agent[i]:
                self.nb_src[i].append(e.j)
                ws.append(e.w)
                bs.append(e.b)
                ts.append(e.delay)
                self.lines_v[i].append(DelayLine.from_delay(e.delay, dt, m))
                self.lines_q[i].append(DelayLine.from_delay(e.delay, dt, m))
                self.lines_qd[i].append(DelayLine.from_delay(e.delay, dt, m))
            self.nb_w.append(np.array(ws))
            self.nb_b.append(np.array(bs))
            self.nb_t.append(np.array(ts))
        self.reads_v = [np.zeros((len(self.nb_src[i]), m)) for i in range(n)]
        self.reads_q = [np.zeros((len(self.nb_src[i]), m)) for i in range(n)]
        self.reads_qd = [np.zeros((len(self.nb_src[i]), m)) for i in range(n)]

        self.leader_rt: list[_LeaderRuntime | None] = [None] * n
        for link in g.leader_links:
            self.leader_rt[link.agent] = _LeaderRuntime(link, dt, m)

        # per-step row buffers
        self.row_vdot = np.zeros((n, m))
        self.row_qdd = np.zeros((n, m))
        self.row_s = np.zeros((n, m))
        self.row_tau = np.zeros((n, m))
        self.row_vlyap = np.zeros(n)
        self.row_danorm = np.zeros(n)
        self.row_ahat_dot: list[np.ndarray | None] = [None] * n

    def _push_lines(self, t: float):
        q, qd, v = self.q, self.qd, self.v
        for i in range(self.n):
            srcs = self.nb_src[i]
            for slot, j in enumerate(srcs):
                self.reads_v[i][slot] = self.lines_v[i][slot].push_and_read(v[j])
                self.reads_q[i][slot] = self.lines_q[i][slot].push_and_read(q[j])
                self.reads_qd[i][slot] = self.lines_qd[i][slot].push_and_read(qd[j])
            rt = self.leader_rt[i]
            if rt is not None:
                rt.read_pos = rt.line_pos.push_and_read(self.leader.position_at(t))
                rt.read_vel = rt.line_vel.push_and_read(self.leader.qdot)

    def _agent_rates(self, i: int, q_i, qd_i, v_i, ahat_i):
        """Rates of agent i's continuous states at the frozen delayed reads.

        Returns (qdd, vdot, ahat_dot, s, tau).  Must agree with the
        composition of the protocol-module operations (pinned by a test).
        """
        rt = self.leader_rt[i]
        vdot = protocol.observer_rhs(
            v_i, self.nb_b[i], self.reads_v[i],
            (rt.b0, rt.read_vel) if rt is not None else None,
        )
        qdr = protocol.reference_velocity(
            v_i, q_i, self.nb_w[i], self.nb_t[i], self.reads_q[i],
            (rt.w0, rt.t0, rt.read_pos) if rt is not None else None,
        )
        qddr = protocol.reference_acceleration(
            vdot, qd_i, self.nb_w[i], self.nb_t[i], self.reads_qd[i],
            (rt.w0, rt.t0, rt.read_vel) if rt is not None else None,
        )
        s = protocol.sliding_vector(qd_i, qdr)
        model = self.models[i]
        if self.mode == ADAPTIVE:
            y = model.regressor(q_i, qd_i, qdr, qddr)
            tau = y @ ahat_i - self.ctrls[i].K @ s
            qdd = model.forward_dynamics(q_i, qd_i, tau)
            ahat_dot = -(self.ctrls[i].Gamma @ (y.T @ s))
        else:
            qdd = protocol.double_integrator_rhs(
                q_i, qd_i, v_i, vdot, self.nb_w[i], self.nb_t[i],
                self.reads_q[i], self.reads_qd[i], self.k_gain,
                (rt.w0, rt.t0, rt.read_pos, rt.read_vel) if rt is not None else None,
            )
            tau = qdd
            ahat_dot = None
        return qdd, vdot, ahat_dot, s, tau

    def _eval(self, t: float) -> bool:
        """Phase one: push delay lines, evaluate all rates from the snapshot."""
        self._push_lines(t)
        for i in range(self.n):
            if self.kinematic[i]:
                self.row_vdot[i] = 0.0
                self.row_qdd[i] = 0.0
                self.row_s[i] = 0.0
                self.row_tau[i] = 0.0
                self.row_vlyap[i] = 0.0
                self.row_danorm[i] = 0.0
                continue
            ctrl = self.ctrls[i]
            ahat = ctrl.a_hat if ctrl is not None else None
            qdd, vdot, ahat_dot, s, tau = self._agent_rates(
                i, self.q[i], self.qd[i], self.v[i], ahat
            )
            self.row_vdot[i] = vdot
            self.row_qdd[i] = qdd
            self.row_s[i] = s
            self.row_tau[i] = tau
            self.row_ahat_dot[i] = ahat_dot
            if ctrl is not None:
                model = self.models[i]
                self.row_vlyap[i] = protocol.lyapunov_value(
                    model, self.q[i], s, ctrl.a_hat, model.true_params, ctrl.Gamma
                )
                self.row_danorm[i] = float(np.linalg.norm(ctrl.a_hat - model.true_params))
            else:
                self.row_vlyap[i] = 0.5 * float(s @ s)
                self.row_danorm[i] = 0.0
        return bool(
            np.isfinite(self.row_qdd).all()
            and np.isfinite(self.row_vdot).all()
            and np.isfinite(self.row_tau).all()
        )

    def _commit_euler(self, t: float):
        dt = self.dt
        self.q += dt * self.qd
        self.qd += dt * self.row_qdd
        self.v += dt * self.row_vdot
        for i in range(self.n):
            if self.kinematic[i]:
                self.q[i] = self._q0[i] + self._qd0[i] * (t + dt)
                self.qd[i] = self._qd0[i]
                self.v[i] = self._qd0[i]
            elif self.ctrls[i] is not None:
                self.ctrls[i].a_hat += dt * self.row_ahat_dot[i]

    def _commit_rk4(self, t: float):
        # Delayed reads are zero-order held across the sub-stages, so each
        # agent's local state integrates independently within the step.
        dt = self.dt
        for i in range(self.n):
            if self.kinematic[i]:
                self.q[i] = self._q0[i] + self._qd0[i] * (t + dt)
                self.qd[i] = self._qd0[i]
                self.v[i] = self._qd0[i]
                continue
            ctrl = self.ctrls[i]
            a0 = ctrl.a_hat.copy() if ctrl is not None else None
            q0, qd0, v0 = self.q[i].copy(), self.qd[i].copy(), self.v[i].copy()

            def rates(qx, qdx, vx, ax):
                qdd, vdot, adot, _, _ = self._agent_rates(i, qx, qdx, vx, ax)
                return qdx.copy(), qdd, vdot, adot

            k1 = rates(q0, qd0, v0, a0)
            k2 = rates(q0 + 0.5 * dt * k1[0], qd0 + 0.5 * dt * k1[1],
                       v0 + 0.5 * dt * k1[2], None if a0 is None else a0 + 0.5 * dt * k1[3])
            k3 = rates(q0 + 0.5 * dt * k2[0], qd0 + 0.5 * dt * k2[1],
                       v0 + 0.5 * dt * k2[2], None if a0 is None else a0 + 0.5 * dt * k2[3])
            k4 = rates(q0 + dt * k3[0], qd0 + dt * k3[1],
                       v0 + dt * k3[2], None if a0 is None else a0 + dt * k3[3])
            sixth = dt / 6.0
            self.q[i] = q0 + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            self.qd[i] = qd0 + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            self.v[i] = v0 + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            if ctrl is not None:
                ctrl.a_hat = a0 + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    def _states_ok(self) -> bool:
        for arr in (self.q, self.qd, self.v):
            if not (np.abs(arr).max() <= DIVERGENCE_LIMIT):
                return False
        for ctrl in self.ctrls:
            if ctrl is not None and not (np.abs(ctrl.a_hat).max() <= DIVERGENCE_LIMIT):
                return False
        return True

    def run(self) -> SimTrace:
        config = self.config
        n_steps = config.n_steps
        n, m = self.n, self.m
        t_grid = np.arange(n_steps + 1) * self.dt
        tr_q = np.zeros((n_steps + 1, n, m))
        tr_qd = np.zeros((n_steps + 1, n, m))
        tr_v = np.zeros((n_steps + 1, n, m))
        tr_s = np.zeros((n_steps + 1, n, m))
        tr_tau = np.zeros((n_steps + 1, n, m))
        tr_vl = np.zeros((n_steps + 1, n))
        tr_da = np.zeros((n_steps + 1, n))

        commit = self._commit_rk4 if config.integrator == "rk4" else self._commit_euler
        rows = n_steps + 1
        diverged = False
        for k in range(n_steps + 1):
            t = k * self.dt
            if not self._eval(t):
                rows = k
                diverged = True
                break
            tr_q[k] = self.q
            tr_qd[k] = self.qd
            tr_v[k] = self.v
            tr_s[k] = self.row_s
            tr_tau[k] = self.row_tau
            tr_vl[k] = self.row_vlyap
            tr_da[k] = self.row_danorm
            if k == n_steps:
                break
            commit(t)
            if not self._states_ok():
                rows = k + 1
                diverged = True
                break

        trace = SimTrace(
            t=t_grid[:rows], q=tr_q[:rows], qdot=tr_qd[:rows], v=tr_v[:rows],
            s=tr_s[:rows], tau=tr_tau[:rows], vlyap=tr_vl[:rows], da_norm=tr_da[:rows],
            dt=self.dt, mode=self.mode, leader=self.leader, diverged=diverged,
        )
        if diverged:
            raise DivergedError(
                f"state magnitude exceeded {DIVERGENCE_LIMIT:.0e} near t={rows * self.dt:.4g} s",
                trace=trace,
            )
        return trace


def run(config: ScenarioConfig) -> SimTrace:
    """Validate and integrate a scenario at fixed step ``config.dt``.

    The observer states, agent dynamics under the adaptive torques (or the
    reduced double-integrator protocol) and all delayed couplings advance
    together on the step grid; the trace is sampled every step.  Identical
    configurations produce bit-identical traces.  Raises ValidationError on
    a bad scenario and DivergedError (with the partial trace attached) when
    any state magnitude passes 1e9.
    """
    issues = validate(config)
    if issues:
        raise ValidationError(issues)
    return _Engine(config).run()


@dataclass(frozen=True)
class Metrics:
    """Endpoint and time-series error summary of one trace."""

    predicted_consensus_velocity: tuple[float, ...]
    simulated_mean_velocity: tuple[float, ...]
    prediction_gap: float
    endpoint_observer_error: float
    endpoint_velocity_error: float
    endpoint_position_spread: float
    peak_observer_error: float
    peak_velocity_error: float
    peak_position_spread: float
    lyapunov_violation_count: int
    lyapunov_max_increase: float
    sliding_norm_integral: float
    sliding_tail_fraction: float
    endpoint_time: float
    diverged: bool
    leader_endpoint_velocity_error: float | None = None
    leader_endpoint_position_error: float | None = None

    def to_dict(self) -> dict:
        return {
            "predicted_consensus_velocity": list(self.predicted_consensus_velocity),
            "simulated_mean_velocity": list(self.simulated_mean_velocity),
            "prediction_gap": self.prediction_gap,
            "endpoint": {
                "time": self.endpoint_time,
                "observer_error": self.endpoint_observer_error,
                "velocity_error": self.endpoint_velocity_error,
                "position_spread": self.endpoint_position_spread,
                "leader_velocity_error": self.leader_endpoint_velocity_error,
                "leader_position_error": self.leader_endpoint_position_error,
            },
            "peak": {
                "observer_error": self.peak_observer_error,
                "velocity_error": self.peak_velocity_error,
                "position_spread": self.peak_position_spread,
            },
            "lyapunov_violation_count": self.lyapunov_violation_count,
            "lyapunov_max_increase": self.lyapunov_max_increase,
            "sliding_norm_integral": self.sliding_norm_integral,
            "sliding_tail_fraction": self.sliding_tail_fraction,
            "diverged": self.diverged,
        }


def _pairwise_spread(q: np.ndarray) -> np.ndarray:
    worst = np.zeros(q.shape[0])
    n = q.shape[1]
    for a in range(n):
        for b in range(a + 1, n):
            np.maximum(worst, np.linalg.norm(q[:, a, :] - q[:, b, :], axis=1), out=worst)
    return worst


def compute_metrics(trace: SimTrace, vbar_predicted) -> Metrics:
    """Consensus error summary of ``trace`` against a predicted consensus velocity."""
    vbar = np.asarray(vbar_predicted, dtype=float)
    obs_err = np.linalg.norm(trace.v - vbar, axis=2).max(axis=1)
    vel_err = np.linalg.norm(trace.qdot - vbar, axis=2).max(axis=1)
    spread = _pairwise_spread(trace.q)

    diffs = np.diff(trace.vlyap, axis=0)
    max_increase = float(diffs.max()) if diffs.size else 0.0
    violations = int((diffs > LYAPUNOV_STEP_TOL).sum()) if diffs.size else 0

    s_sq = (trace.s ** 2).sum(axis=2)
    per_agent = s_sq.sum(axis=0) * trace.dt
    tail_rows = max(1, s_sq.shape[0] // 10)
    tail = s_sq[-tail_rows:].sum(axis=0) * trace.dt
    with np.errstate(invalid="ignore", divide="ignore"):
        fractions = np.where(per_agent > 1e-300, tail / per_agent, 0.0)
    sim_mean = trace.qdot[-1].mean(axis=0)

    leader_vel = leader_pos = None
    if trace.leader is not None:
        q_l = trace.leader.q0 + np.outer(trace.t, trace.leader.qdot)
        leader_pos = float(np.linalg.norm(trace.q[-1] - q_l[-1], axis=1).max())
        leader_vel = float(np.linalg.norm(trace.qdot[-1] - trace.leader.qdot, axis=1).max())

    return Metrics(
        predicted_consensus_velocity=tuple(float(x) for x in vbar),
        simulated_mean_velocity=tuple(float(x) for x in sim_mean),
        prediction_gap=float(np.abs(sim_mean - vbar).max()),
        endpoint_observer_error=float(obs_err[-1]),
        endpoint_velocity_error=float(vel_err[-1]),
        endpoint_position_spread=float(spread[-1]),
        peak_observer_error=float(obs_err.max()),
        peak_velocity_error=float(vel_err.max()),
        peak_position_spread=float(spread.max()),
        lyapunov_violation_count=violations,
        lyapunov_max_increase=max_increase,
        sliding_norm_integral=float(per_agent.sum()),
        sliding_tail_fraction=float(fractions.max()),
        endpoint_time=float(trace.t[-1]),
        diverged=trace.diverged,
        leader_endpoint_velocity_error=leader_vel,
        leader_endpoint_position_error=leader_pos,
    )
