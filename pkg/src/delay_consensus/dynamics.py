"""Agent physics: planar two-link arm, double integrator, kinematic stand-in.

Every model exposes the same surface: ``dof``, ``param_count``,
``true_params``, ``inertia``, ``coriolis``, ``gravity``, ``regressor`` and
``forward_dynamics``.  The Coriolis matrix is the standard choice that
makes dM/dt - 2C skew symmetric, and the regressor realizes the
linear-in-parameters identity

    M(q) zdot + C(q, qd) z + g(q) = Y(q, qd, z, zdot) a

exactly, which is what the adaptive controller relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedError

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ManipulatorParams:
    """Constant parameter vector of the two-link arm.

    Three entries (a1, a2, a3) without gravity, five with it.  Positive
    definiteness of the inertia matrix for every configuration requires
    a1 > a3 > 0 and a1*a3 - a3^2 - a2^2 > 0; both are enforced here so the
    check never has to run inside a simulation loop.
    """

    a: tuple[float, ...]
    gravity_on: bool = False

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        object.__setattr__(self, "a", a)
        expected = 5 if self.gravity_on else 3
        if len(a) != expected:
            raise ValueError(
                f"expected {expected} parameters with gravity_on={self.gravity_on}, got {len(a)}"
            )
        a1, a2, a3 = a[:3]
        if not (a1 > a3 > 0.0 and a1 * a3 - a3 * a3 - a2 * a2 > 0.0):
            raise ValueError(
                "inertia matrix would not be uniformly positive definite: "
                f"need a1 > a3 > 0 and a1*a3 - a3^2 - a2^2 > 0, got a={a[:3]}"
            )


class TwoLinkManipulator:
    """Planar arm with two revolute joints, gravity optional.

    Closed forms (c2 = cos q2, s2 = sin q2):

        M = [[a1 + 2 a2 c2, a3 + a2 c2], [a3 + a2 c2, a3]]
        C = a2 s2 [[-qd2, -(qd1 + qd2)], [qd1, 0]]
        g = [a4 cos q1 + a5 cos(q1 + q2), a5 cos(q1 + q2)]   (zero when gravity is off)
    """

    dof = 2

    def __init__(self, params):
        if not isinstance(params, ManipulatorParams):
            params = ManipulatorParams(tuple(params))
        self.params = params
        self._a = np.array(params.a)

    @property
    def param_count(self) -> int:
        return len(self.params.a)

    @property
    def true_params(self) -> np.ndarray:
        return self._a.copy()

    def inertia(self, q: np.ndarray) -> np.ndarray:
        a1, a2, a3 = self.params.a[:3]
        c2 = math.cos(q[1])
        off = a3 + a2 * c2
        return np.array([[a1 + 2.0 * a2 * c2, off], [off, a3]])

    def coriolis(self, q: np.ndarray, qdot: np.ndarray) -> np.ndarray:
        a2 = self.params.a[1]
        h = a2 * math.sin(q[1])
        return np.array(
            [[-h * qdot[1], -h * (qdot[0] + qdot[1])], [h * qdot[0], 0.0]]
        )

    def gravity(self, q: np.ndarray) -> np.ndarray:
        if not self.params.gravity_on:
            return np.zeros(2)
        a4, a5 = self.params.a[3:]
        c12 = math.cos(q[0] + q[1])
        return np.array([a4 * math.cos(q[0]) + a5 * c12, a5 * c12])

    def regressor(self, q, qdot, zeta, zeta_dot) -> np.ndarray:
        c2 = math.cos(q[1])
        s2 = math.sin(q[1])
        y12 = c2 * (2.0 * zeta_dot[0] + zeta_dot[1]) - s2 * (
            qdot[1] * zeta[0] + (qdot[0] + qdot[1]) * zeta[1]
        )
        y22 = c2 * zeta_dot[0] + s2 * qdot[0] * zeta[0]
        row0 = [zeta_dot[0], y12, zeta_dot[1]]
        row1 = [0.0, y22, zeta_dot[0] + zeta_dot[1]]
        if self.params.gravity_on:
            c1 = math.cos(q[0])
            c12 = math.cos(q[0] + q[1])
            row0 += [c1, c12]
            row1 += [0.0, c12]
        return np.array([row0, row1])

    def forward_dynamics(self, q, qdot, tau) -> np.ndarray:
        """Joint accelerations from torques: solves M qdd = tau - C qd - g."""
        a1, a2, a3 = self.params.a[:3]
        c2 = math.cos(q[1])
        m11 = a1 + 2.0 * a2 * c2
        m12 = a3 + a2 * c2
        det = m11 * a3 - m12 * m12
        trace = m11 + a3
        disc = math.sqrt(max(trace * trace - 4.0 * det, 0.0))
        lam_min = 0.5 * (trace - disc)
        lam_max = 0.5 * (trace + disc)
        if lam_min <= 0.0 or lam_max > CONDITION_LIMIT * lam_min:
            raise IllConditionedError(
                f"inertia matrix at q2={q[1]} is numerically singular "
                f"(condition number above {CONDITION_LIMIT:.0e})"
            )
        rhs = tau - self.coriolis(q, qdot) @ np.asarray(qdot, dtype=float) - self.gravity(q)
        return np.array(
            [
                (a3 * rhs[0] - m12 * rhs[1]) / det,
                (m11 * rhs[1] - m12 * rhs[0]) / det,
            ]
        )


class DoubleIntegrator:
    """Unit-inertia agent: qdd = tau, one torque channel per axis."""

    def __init__(self, dof: int):
        if dof < 1:
            raise ValueError(f"dof must be >= 1, got {dof}")
        self.dof = int(dof)

    @property
    def param_count(self) -> int:
        return self.dof

    @property
    def true_params(self) -> np.ndarray:
        return np.ones(self.dof)

    def inertia(self, q) -> np.ndarray:
        return np.eye(self.dof)

    def coriolis(self, q, qdot) -> np.ndarray:
        return np.zeros((self.dof, self.dof))

    def gravity(self, q) -> np.ndarray:
        return np.zeros(self.dof)

    def regressor(self, q, qdot, zeta, zeta_dot) -> np.ndarray:
        return np.diag(np.asarray(zeta_dot, dtype=float))

    def forward_dynamics(self, q, qdot, tau) -> np.ndarray:
        return np.asarray(tau, dtype=float).copy()


class KinematicModel:
    """Agent that holds its initial velocity exactly.

    Stands in for an ideal constant-velocity vertex when a leader-follower
    scenario is embedded into a plain leaderless run.  Never controlled; the
    engine advances it in closed form.
    """

    def __init__(self, dof: int):
        if dof < 1:
            raise ValueError(f"dof must be >= 1, got {dof}")
        self.dof = int(dof)

    @property
    def param_count(self) -> int:
        return 0

    @property
    def true_params(self) -> np.ndarray:
        return np.zeros(0)
