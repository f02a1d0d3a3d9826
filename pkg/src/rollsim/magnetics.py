"""Magnetic tip coupling: linear flux model and its generalized force.

B falls linearly from B_max at contact to zero at separation P_max and stays
zero beyond; the attractive tip force F = B^2 A / (2 mu0) maps onto the
generalized coordinates through the tip Jacobians (virtual work), which is
the only mapping consistent with the Lagrangian setting. The force is
conservative along p_m, with closed-form potential W used in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _core
from .model import RobotParams, State, ValidationError


@dataclass(frozen=True)
class MagneticParams:
    """Flux model constants.

    B_max and P_max have no authoritative values; the shipped presets carry
    placeholders and disable the coupling. A and mu0 defaults are the
    documented interaction area and free-space permeability as used
    throughout.
    """

    B_max: float = 0.05
    P_max: float = 0.02
    A: float = 0.0025
    mu0: float = 1.257e-6
    enabled: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.B_max) and self.B_max >= 0):
            raise ValidationError(f"B_max must be >= 0, got {self.B_max!r}")
        for name in ("P_max", "A", "mu0"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([1.0 if self.enabled else 0.0,
                         self.B_max, self.P_max, self.A, self.mu0],
                        dtype=np.float64)


def separation(params: RobotParams, state: State) -> float:
    """Euclidean distance p_m between the pendulum tips."""
    p, _, _ = _core.pm_and_grad(params.as_array(),
                                np.asarray(state.q, dtype=np.float64))
    return float(p)


def flux_density(mag: MagneticParams, p_m: float) -> float:
    if p_m < 0:
        raise ValidationError(f"separation must be >= 0, got {p_m!r}")
    if p_m > mag.P_max:
        return 0.0
    return mag.B_max * (1.0 - p_m / mag.P_max)


def magnetic_force(mag: MagneticParams, B: float) -> float:
    """Attractive force magnitude F = B^2 A / (2 mu0), N."""
    return B * B * mag.A / (2.0 * mag.mu0)


def generalized_magnetic_torque(params: RobotParams, mag: MagneticParams,
                                state: State):
    """Generalized force of the tip attraction, with a degeneracy flag.

    Returns (Q, degenerate). Q = -F * grad_q p_m: the force on tip 1 acts
    along the unit vector toward tip 2 and vice versa, so attraction does
    positive work while the tips approach. At p_m = 0 the direction is
    undefined; the equal-and-opposite pair then contributes nothing and Q is
    zero with degenerate = True. Disabled coupling returns exact zeros so a
    disabled run reproduces the uncoupled dynamics bit for bit.
    """
    if not mag.enabled:
        return np.zeros(4), False
    p, grad, degenerate = _core.pm_and_grad(
        params.as_array(), np.asarray(state.q, dtype=np.float64))
    if degenerate:
        return np.zeros(4), True
    F = magnetic_force(mag, flux_density(mag, p))
    return -F * grad, False


def magnetic_potential(mag: MagneticParams, p_m: float) -> float:
    """Potential W(p) with -dW/dp = -F(p), zero at and beyond P_max.

    Integrating F = (A B_max^2 / (2 mu0)) (1 - p/P_max)^2 from p to P_max
    gives W(p) = -(A B_max^2 P_max / (6 mu0)) (1 - p/P_max)^3, so the
    generalized force -grad_q W equals -F grad_q p_m. Test oracle; the
    simulator integrates the force directly.
    """
    if p_m >= mag.P_max:
        return 0.0
    c = mag.A * mag.B_max ** 2 * mag.P_max / (6.0 * mag.mu0)
    return -c * (1.0 - p_m / mag.P_max) ** 3
