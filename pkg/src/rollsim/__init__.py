"""rollsim: dynamics of a two-module pendulum-driven rolling robot.

The equations of motion are produced from the energy functions themselves
(exact polarization for the mass matrix, guarded finite differences for the
gravity and bias terms), so the simulated dynamics cannot drift from the
energies they claim to conserve. A verbatim transcription of the published
coefficient tables lives alongside for comparison; see dynamics.printed_terms
and dynamics.errata_compare.
"""

from .control import (GainMatrices, LyapunovSample, Setpoints, lyapunov,
                      pd_control, saturate)
from .config import ConfigError, UnknownPresetError, list_presets, load_scenario
from .dynamics import (DynamicsTerms, ErrataReport, SingularDynamicsError,
                       bias_vector, errata_compare, forward_dynamics,
                       gravity_vector, mass_matrix, printed_terms)
from .energetics import (POTENTIAL_VARIANTS, EnergyBreakdown, dissipation,
                         kinetic_energy, potential_energy, total_energy)
from .kinematics import (BodyPositions, BodyVelocities, disk2_height,
                         pendulum_tips, positions, upright_deviation,
                         velocities, wrap_angle)
from .magnetics import (MagneticParams, flux_density, generalized_magnetic_torque,
                        magnetic_force, magnetic_potential, separation)
from .model import (Input, RobotParams, State, ValidationError,
                    generalized_torque, load_params)
from .simulate import (Event, IntegrationError, PDSpec, Scenario, Trajectory,
                       detect_events, rk4_step, run)

__version__ = "0.1.0"

__all__ = [
    "RobotParams", "State", "Input", "ValidationError", "load_params",
    "generalized_torque",
    "BodyPositions", "BodyVelocities", "positions", "velocities",
    "disk2_height", "pendulum_tips", "wrap_angle", "upright_deviation",
    "EnergyBreakdown", "kinetic_energy", "potential_energy", "dissipation",
    "total_energy", "POTENTIAL_VARIANTS",
    "DynamicsTerms", "ErrataReport", "SingularDynamicsError", "mass_matrix",
    "gravity_vector", "bias_vector", "forward_dynamics", "printed_terms",
    "errata_compare",
    "MagneticParams", "separation", "flux_density", "magnetic_force",
    "generalized_magnetic_torque", "magnetic_potential",
    "GainMatrices", "Setpoints", "LyapunovSample", "pd_control", "saturate",
    "lyapunov",
    "Scenario", "Trajectory", "Event", "PDSpec", "rk4_step", "run",
    "detect_events", "IntegrationError",
    "ConfigError", "UnknownPresetError", "load_scenario", "list_presets",
    "__version__",
]
