"""Per-agent control stack for delayed second-order consensus.

Covers the delayed averaging observer, the delay-compensated velocity and
acceleration references, the sliding vector, the adaptive torque and
parameter-update laws, the reduced double-integrator protocol, and the
per-agent storage function used to monitor convergence.

Delayed neighbor samples come from delay lines owned by the caller and
read zero before any data has arrived; every formula here is written
against that convention.  Leader terms are optional tuples so the same
functions serve the leaderless and leader-follower modes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadGainError

SPD_SYMMETRY_RTOL = 1e-9


def _require_spd(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise BadGainError(f"{name} must be a square matrix, got shape {mat.shape}")
    scale = max(np.abs(mat).max(), 1.0)
    if np.abs(mat - mat.T).max() > SPD_SYMMETRY_RTOL * scale:
        raise BadGainError(f"{name} is not symmetric")
    if np.linalg.eigvalsh(mat).min() <= 0.0:
        raise BadGainError(f"{name} is not positive definite")
    return mat


@dataclass
class ControllerState:
    """Adaptive controller of one agent: parameter estimate plus gains.

    ``K`` and ``Gamma`` must be symmetric positive definite (checked at
    construction).  ``a_hat`` is the live estimate; the engine updates it
    in place as the run progresses.
    """

    a_hat: np.ndarray
    K: np.ndarray
    Gamma: np.ndarray

    def __post_init__(self):
        self.a_hat = np.array(self.a_hat, dtype=float)
        self.K = _require_spd(self.K, "K")
        self.Gamma = _require_spd(self.Gamma, "Gamma")
        if self.a_hat.shape != (self.Gamma.shape[0],):
            raise BadGainError(
                f"a_hat has shape {self.a_hat.shape}, Gamma is {self.Gamma.shape}"
            )


@dataclass(frozen=True, eq=False)
class LeaderSpec:
    """Constant-velocity virtual leader: initial position and velocity."""

    q0: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q0", np.asarray(self.q0, dtype=float))
        object.__setattr__(self, "qdot", np.asarray(self.qdot, dtype=float))
        if self.q0.shape != self.qdot.shape or self.q0.ndim != 1:
            raise ValueError("leader q0 and qdot must be 1-D arrays of equal length")

    def position_at(self, t: float) -> np.ndarray:
        return self.q0 + self.qdot * t


@dataclass(frozen=True)
class DoubleIntegratorGains:
    """Scalar gain of the reduced protocol; must be positive (validated before a run)."""

    k: float


def observer_rhs(v_i, b_weights, delayed_v, leader=None) -> np.ndarray:
    """Rate of the delayed averaging observer.

    -sum_j b_ij (v_i - v_j(t - T_ij)), minus b_i0 (v_i - leader velocity
    delayed) when ``leader = (b_i0, delayed_leader_velocity)`` is given.
    """
    rhs = np.zeros_like(v_i)
    for b, vj in zip(b_weights, delayed_v):
        rhs -= b * (v_i - vj)
    if leader is not None:
        b0, vl = leader
        rhs -= b0 * (v_i - vl)
    return rhs


def reference_velocity(v_i, q_i, w_weights, delays, delayed_q, leader=None) -> np.ndarray:
    """Delay-compensated velocity reference.

    (1 + sum_j w_ij T_ij) v_i - sum_j w_ij (q_i - q_j(t - T_ij)); with
    ``leader = (w_i0, T_i0, delayed_leader_position)`` the factor gains
    w_i0 T_i0 and the leader position term is subtracted as well.
    """
    factor = 1.0
    for w, t in zip(w_weights, delays):
        factor += w * t
    if leader is not None:
        factor += leader[0] * leader[1]
    out = factor * v_i
    for w, qj in zip(w_weights, delayed_q):
        out = out - w * (q_i - qj)
    if leader is not None:
        w0, _, ql = leader
        out = out - w0 * (q_i - ql)
    return out


def reference_acceleration(vdot_i, qdot_i, w_weights, delays, delayed_qdot, leader=None) -> np.ndarray:
    """Time derivative of the velocity reference.

    Same structure as ``reference_velocity`` with velocities in place of
    positions and the observer rate in place of the observer value.
    Pre-history delayed velocities are zero, consistent with positions held
    at zero, so the reference is piecewise smooth with jumps only at the
    delay activation instants.
    """
    factor = 1.0
    for w, t in zip(w_weights, delays):
        factor += w * t
    if leader is not None:
        factor += leader[0] * leader[1]
    out = factor * vdot_i
    for w, qdj in zip(w_weights, delayed_qdot):
        out = out - w * (qdot_i - qdj)
    if leader is not None:
        w0, _, qdl = leader
        out = out - w0 * (qdot_i - qdl)
    return out


def sliding_vector(qdot_i, qdot_ref) -> np.ndarray:
    """Velocity tracking error s_i = qdot_i - reference."""
    return qdot_i - qdot_ref


def control_torque(model, q_i, qdot_i, qdot_ref, qddot_ref, ctrl: ControllerState, s_i,
                   regressor=None) -> np.ndarray:
    """Adaptive torque Y(q, qd, qd_ref, qdd_ref) a_hat - K s.

    ``regressor`` may carry a precomputed Y to avoid building it twice when
    the adaptation law runs in the same step.
    """
    y = model.regressor(q_i, qdot_i, qdot_ref, qddot_ref) if regressor is None else regressor
    return y @ ctrl.a_hat - ctrl.K @ s_i


def adaptation_rhs(model, q_i, qdot_i, qdot_ref, qddot_ref, gamma_gain, s_i,
                   regressor=None) -> np.ndarray:
    """Parameter estimate rate -Gamma Y^T s."""
    y = model.regressor(q_i, qdot_i, qdot_ref, qddot_ref) if regressor is None else regressor
    return -(gamma_gain @ (y.T @ s_i))


def double_integrator_rhs(q_i, qdot_i, v_i, vdot_i, w_weights, delays,
                          delayed_q, delayed_qdot, k: float, leader=None) -> np.ndarray:
    """Acceleration command of the reduced protocol for qdd = tau agents.

    -sum_j w_ij (qd_i - qd_j(t-T)) - k sum_j w_ij (q_i - q_j(t-T))
    + (1 + sum_j w_ij T_ij)(vdot_i + k v_i) - k qd_i, extended with the
    analogous leader terms when ``leader = (w_i0, T_i0, delayed_leader_pos,
    delayed_leader_vel)`` is given.
    """
    factor = 1.0
    for w, t in zip(w_weights, delays):
        factor += w * t
    if leader is not None:
        factor += leader[0] * leader[1]
    acc = factor * (vdot_i + k * v_i) - k * qdot_i
    for w, qj, qdj in zip(w_weights, delayed_q, delayed_qdot):
        acc = acc - w * (qdot_i - qdj) - (k * w) * (q_i - qj)
    if leader is not None:
        w0, _, ql, qdl = leader
        acc = acc - w0 * (qdot_i - qdl) - (k * w0) * (q_i - ql)
    return acc


def lyapunov_value(model, q_i, s_i, a_hat, a_true, gamma_gain) -> float:
    """Per-agent storage value (1/2) s^T M(q) s + (1/2) da^T Gamma^-1 da.

    Zero exactly when the sliding vector is zero and the estimate matches
    the true parameters; nonincreasing along closed-loop trajectories up to
    integration error.
    """
    m = model.inertia(q_i)
    value = 0.5 * float(s_i @ m @ s_i)
    da = np.asarray(a_hat, dtype=float) - np.asarray(a_true, dtype=float)
    if da.size:
        value += 0.5 * float(da @ np.linalg.solve(gamma_gain, da))
    return value
