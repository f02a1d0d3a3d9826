"""PD controller on the true pendulum angles, and the Lyapunov monitor.

The controlled quantities are psi_i = theta_i - phi_i (pendulum orientation
relative to its disk) and the disk angles phi_i. The control law is kept in
its original printed form: u = Kp e + Kd edot with position errors taken as
current minus desired, and the derivative channel on thetadot/phidot rather
than psidot. A psi_rate flag switches the derivative channel to psidot for
experiments; nothing load-bearing uses it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .energetics import potential_energy, total_energy
from .model import Input, RobotParams, State, ValidationError

# zero pattern of the printed 2x4 gain matrices: row 1 couples
# (psi1, phi1), row 2 couples (psi2, phi2)
_ZERO_SLOTS = ((0, 1), (0, 3), (1, 0), (1, 2))


@dataclass(frozen=True)
class GainMatrices:
    """2x4 proportional and derivative gains.

    Rows produce (u1, u2); columns weight the error vector
    (psi1 - theta1d, psi2 - theta2d, phi1 - phi1d, phi2 - phi2d). The printed
    structure leaves cross-module slots zero; dense matrices are rejected
    unless allow_dense is set (the flag exists for experiments and is off in
    every shipped preset).
    """

    Kp: tuple = ((0.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0))
    Kd: tuple = ((0.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0))
    allow_dense: bool = False

    def __post_init__(self):
        for label, m in (("Kp", self.Kp), ("Kd", self.Kd)):
            arr = np.asarray(m, dtype=np.float64)
            if arr.shape != (2, 4):
                raise ValidationError(f"{label} must be 2x4, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{label} must be finite")
            if not self.allow_dense:
                for (i, j) in _ZERO_SLOTS:
                    if arr[i, j] != 0.0:
                        raise ValidationError(
                            f"{label}[{i}][{j}] must be 0 by the gain "
                            f"structure (set allow_dense to override), got "
                            f"{arr[i, j]!r}")

    def kp_array(self) -> np.ndarray:
        return np.asarray(self.Kp, dtype=np.float64)

    def kd_array(self) -> np.ndarray:
        return np.asarray(self.Kd, dtype=np.float64)


@dataclass(frozen=True)
class Setpoints:
    """Targets: theta_d for the true pendulum angles psi, phi_d for disks."""

    theta_d: tuple[float, float] = (0.0, 0.0)
    phi_d: tuple[float, float] = (0.0, 0.0)
    dtheta_d: tuple[float, float] = (0.0, 0.0)
    dphi_d: tuple[float, float] = (0.0, 0.0)

    def target_array(self) -> np.ndarray:
        return np.array([*self.theta_d, *self.phi_d,
                         *self.dtheta_d, *self.dphi_d], dtype=np.float64)


def error_vector(setpoints: Setpoints, state: State) -> np.ndarray:
    t1, t2, p1, p2 = state.q
    return np.array([(t1 - p1) - setpoints.theta_d[0],
                     (t2 - p2) - setpoints.theta_d[1],
                     p1 - setpoints.phi_d[0],
                     p2 - setpoints.phi_d[1]])


def error_rate(setpoints: Setpoints, state: State,
               psi_rate: bool = False) -> np.ndarray:
    dt1, dt2, dp1, dp2 = state.qdot
    if psi_rate:
        first = (dt1 - dp1) - setpoints.dtheta_d[0]
        second = (dt2 - dp2) - setpoints.dtheta_d[1]
    else:
        first = dt1 - setpoints.dtheta_d[0]
        second = dt2 - setpoints.dtheta_d[1]
    return np.array([first, second,
                     dp1 - setpoints.dphi_d[0],
                     dp2 - setpoints.dphi_d[1]])


def pd_control(gains: GainMatrices, setpoints: Setpoints, state: State,
               psi_rate: bool = False) -> Input:
    e = error_vector(setpoints, state)
    de = error_rate(setpoints, state, psi_rate)
    u = gains.kp_array() @ e + gains.kd_array() @ de
    return Input(tau=(float(u[0]), float(u[1])))


def saturate(inp: Input, M: float) -> Input:
    """Component-wise clamp to [-M, M]; idempotent, sign preserving."""
    if not M > 0:
        raise ValidationError(f"saturation bound must be positive, got {M!r}")
    return Input(tau=(float(np.clip(inp.tau[0], -M, M)),
                      float(np.clip(inp.tau[1], -M, M))))


@dataclass(frozen=True)
class LyapunovSample:
    V: float
    Vdot: Optional[float]
    components: tuple[float, float, float]  # energy, Kp, Kd terms


def reference_energy(params: RobotParams, setpoints: Setpoints,
                     variant: str = "paper-verbatim") -> float:
    """Energy at the setpoint configuration, zero velocity.

    The configuration solves psi_i = theta_id, phi_i = phi_id, i.e.
    q_ref = (theta1d + phi1d, theta2d + phi2d, phi1d, phi2d).
    """
    q_ref = (setpoints.theta_d[0] + setpoints.phi_d[0],
             setpoints.theta_d[1] + setpoints.phi_d[1],
             setpoints.phi_d[0], setpoints.phi_d[1])
    return potential_energy(params, State(q=q_ref), variant)


def lyapunov(params: RobotParams, gains: GainMatrices, setpoints: Setpoints,
             state: State, prev_sample: Optional[LyapunovSample] = None,
             dt: float = 0.0, energy: Optional[float] = None,
             e_ref: Optional[float] = None,
             psi_rate: bool = False,
             variant: str = "paper-verbatim") -> LyapunovSample:
    """Composite monitor value; diagnostic only, never fed back.

    V = 1/2 (E - E_ref)^2 + 1/2 sum_rc Kp[r][c] e[c]^2
      + sum_rc Kd[r][c] edot[c]^2
    with E shifted by the setpoint-configuration energy so V is zero at the
    target equilibrium. The derivative-gain quadratic deliberately carries no
    1/2: the composite is kept as transcribed (see the errata report notes).
    Vdot is a backward difference against prev_sample when given. The 2x4
    gain matrices do not define a square quadratic form; the weighting sums
    each gain entry against its error component squared.
    """
    if energy is None:
        energy = total_energy(params, state, variant)
    if e_ref is None:
        e_ref = reference_energy(params, setpoints, variant)
    e = error_vector(setpoints, state)
    de = error_rate(setpoints, state, psi_rate)
    kp_term = 0.5 * float(np.sum(gains.kp_array() * (e * e)[None, :]))
    kd_term = float(np.sum(gains.kd_array() * (de * de)[None, :]))
    energy_term = 0.5 * (energy - e_ref) ** 2
    V = energy_term + kp_term + kd_term
    Vdot = None
    if prev_sample is not None:
        if not dt > 0:
            raise ValidationError("dt must be positive when chaining samples")
        Vdot = (V - prev_sample.V) / dt
    return LyapunovSample(V=float(V), Vdot=Vdot,
                          components=(float(energy_term), float(kp_term),
                                      float(kd_term)))
