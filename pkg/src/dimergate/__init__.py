"""dimergate: two dipole-coupled molecules as a dissipative two-qubit processor.

A compact numpy/scipy simulator of a pair of laser-driven two-level
molecules with coherent dipole-dipole exchange, collective decay and a
shifted doubly-excited level.  It reproduces the pair's eigenstate
structure, steady-state resonance-fluorescence spectra, the two-photon
resonance shift and conditional one-/two-qubit gate protocols under
Lindblad dynamics.
"""

__version__ = "0.1.0"

from .model import (
    ANGULAR_PER_MHZ,
    BASIS_LABELS,
    ConditionalFrequencies,
    DipoleGeometry,
    DressedCoefficients,
    EigenSystem,
    NearFieldCoupling,
    NearFieldValidityWarning,
    ParameterError,
    SystemParams,
    build_hamiltonian,
    conditional_frequencies,
    dressed_coefficients,
    eigensystem,
    near_field_coupling,
)
from .dynamics import (
    DynamicsError,
    IntegrationError,
    SteadyStateError,
    Trajectory,
    build_liouvillian,
    evolve,
    population,
    steady_state,
    validate_density_matrix,
)
from .gates import (
    GateResult,
    PulseSchedule,
    PulseSegment,
    ScheduleError,
    bell_schedule,
    bell_target,
    cnot_schedule,
    ideal_xy_gate,
    pi_pulse_duration,
    run_schedule,
    state_fidelity,
    xy_gate_time,
    xy_hamiltonian,
)
from .sweeps import (
    Peak,
    PeakError,
    SweepSpec,
    SweepTable,
    eigen_sweep,
    peak_finder,
    spectrum_sweep,
)

__all__ = [
    "__version__",
    "ANGULAR_PER_MHZ", "BASIS_LABELS",
    "ParameterError", "SystemParams", "DipoleGeometry",
    "NearFieldCoupling", "NearFieldValidityWarning",
    "EigenSystem", "DressedCoefficients", "ConditionalFrequencies",
    "build_hamiltonian", "eigensystem", "dressed_coefficients",
    "near_field_coupling", "conditional_frequencies",
    "DynamicsError", "IntegrationError", "SteadyStateError",
    "Trajectory", "build_liouvillian", "evolve", "steady_state",
    "population", "validate_density_matrix",
    "ScheduleError", "PulseSegment", "PulseSchedule", "GateResult",
    "pi_pulse_duration", "cnot_schedule", "bell_schedule", "bell_target",
    "ideal_xy_gate", "xy_gate_time", "xy_hamiltonian",
    "state_fidelity", "run_schedule",
    "SweepSpec", "SweepTable", "Peak", "PeakError",
    "eigen_sweep", "spectrum_sweep", "peak_finder",
]
