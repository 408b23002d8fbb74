"""Gate protocols: pulse schedules, conditional logic, fidelities.

A schedule is an ordered list of rectangular drive segments.  All segments
share one fixed rotating frame (the reference drive frequency); a detuned
segment is described by its frequency offset and is integrated with the
residual oscillatory phase rather than by switching frames, so no stitching
phases appear between segments.  Drive phases are referenced to the start of
their own segment.

The conditional-frequency structure enables a CNOT: because the
doubly-excited level is shifted by eps, the resonance frequency of one
molecule depends on the state of the other, and a pi pulse at the
conditional line flips the target only when the control is excited.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .model import (
    ANGULAR_PER_MHZ,
    NUMBER_OP,
    ParameterError,
    SystemParams,
    build_hamiltonian,
    conditional_frequencies,
)
from .dynamics import Trajectory, evolve, validate_density_matrix

__all__ = [
    "ScheduleError",
    "PulseSegment",
    "PulseSchedule",
    "GateResult",
    "MAX_SEGMENT_NS",
    "pi_pulse_duration",
    "cnot_schedule",
    "bell_schedule",
    "bell_target",
    "xy_hamiltonian",
    "xy_gate_time",
    "ideal_xy_gate",
    "state_fidelity",
    "run_schedule",
]

#: guard against schedules whose duration diverges (e.g. amplitude -> 0)
MAX_SEGMENT_NS = 1e6


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class PulseSegment:
    """One rectangular drive segment.

    ``freq_offset`` is the drive frequency minus the reference frequency
    (cyclic MHz); ``amp1``/``amp2`` are the couplings of molecule 1 and 2
    during the segment (0 switches a molecule's drive off) and ``phase`` is
    the drive phase in radians, referenced to the segment start.
    """

    duration_ns: float
    freq_offset: float = 0.0
    amp1: float = 0.0
    amp2: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        values = (self.duration_ns, self.freq_offset, self.amp1, self.amp2, self.phase)
        if not all(math.isfinite(v) for v in values):
            raise ScheduleError(f"segment fields must be finite: {self}")
        if not self.duration_ns > 0.0:
            raise ScheduleError(f"segment duration must be > 0 ns, got {self.duration_ns}")
        if self.duration_ns > MAX_SEGMENT_NS:
            raise ScheduleError(
                f"segment duration {self.duration_ns:.3g} ns exceeds the "
                f"{MAX_SEGMENT_NS:.0e} ns guard")


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple[PulseSegment, ...]

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ScheduleError("schedule must contain at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_duration_ns(self) -> float:
        return float(sum(s.duration_ns for s in self.segments))

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True)
class GateResult:
    """Outcome of running a schedule: final state, trajectory and fidelity."""

    final_state: np.ndarray
    trajectory: Trajectory
    fidelity: float
    target_label: str = ""

    def __post_init__(self):
        if not -1e-9 <= self.fidelity <= 1.0 + 1e-9:
            raise ScheduleError(f"fidelity {self.fidelity!r} outside [0, 1]")


def pi_pulse_duration(rabi_amp: float, angle: float = math.pi) -> float:
    """Duration in ns of a rotation by ``angle`` at coupling ``rabi_amp`` MHz.

    A resonant coupling of ell MHz completes a full population flop in
    1/(2*ell) us, so a pi rotation takes 1e3/(4*ell) ns: 1.25 ns at 200 MHz.
    """
    if not rabi_amp > 0.0:
        raise ScheduleError(f"rabi_amp must be > 0 MHz, got {rabi_amp}")
    if not angle > 0.0:
        raise ScheduleError(f"angle must be > 0 rad, got {angle}")
    duration = (angle / math.pi) * 1e3 / (4.0 * rabi_amp)
    if duration > MAX_SEGMENT_NS:
        raise ScheduleError(
            f"pulse duration {duration:.3g} ns exceeds the {MAX_SEGMENT_NS:.0e} ns "
            "guard (amplitude too small)")
    return duration


def _segment_unitary(params: SystemParams, seg: PulseSegment) -> np.ndarray:
    """Decay-free propagator of one segment, expressed in the reference frame.

    Propagates in the frame co-rotating with the segment drive (where the
    generator is constant) and undoes the frame rotation at the segment end;
    with segment-local drive phases this equals the fixed-frame propagator.
    """
    seg_params = replace(params, ell1=seg.amp1, ell2=seg.amp2)
    ham = build_hamiltonian(seg_params, seg.freq_offset, seg.phase)
    unitary = expm(-1j * ham * seg.duration_ns)
    if seg.freq_offset == 0.0:
        return unitary
    unwind = expm(-1j * ANGULAR_PER_MHZ * seg.freq_offset * seg.duration_ns * NUMBER_OP)
    return unwind @ unitary


def cnot_schedule(params: SystemParams, control: int = 1,
                  amp: float = 0.0) -> PulseSchedule:
    """Single conditional pi pulse implementing CNOT-style logic.

    With ``control=1`` the pulse sits at the molecule-2 line conditioned on
    molecule 1 being excited (offset w2 - delta + eps relative to the
    reference); ``control=2`` targets molecule 1 at w1 + delta + eps.  One
    laser illuminates the whole pair, so both couplings are set to ``amp``
    and selectivity comes from detuning alone; build a ``PulseSegment``
    directly for per-molecule amplitude overrides.
    """
    if control not in (1, 2):
        raise ScheduleError(f"control must be 1 or 2, got {control}")
    cond = conditional_frequencies(params)
    offset = cond.omega12_offset if control == 1 else cond.omega21_offset
    duration = pi_pulse_duration(amp, math.pi)
    return PulseSchedule(segments=(
        PulseSegment(duration_ns=duration, freq_offset=offset,
                     amp1=amp, amp2=amp, phase=0.0),
    ))


def bell_target() -> np.ndarray:
    """The maximally entangled target (|00> + |11>)/sqrt(2)."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / math.sqrt(2.0)
    return psi


def bell_schedule(params: SystemParams, amp: float) -> PulseSchedule:
    """Two-pulse preparation of (|00> + |11>)/sqrt(2) from the ground state.

    A pi/2 pulse at the bare molecule-1 line creates
    (|00> + |10>)/sqrt(2); a pi pulse at the conditional molecule-2 line
    (offset w2 - delta + eps) then promotes |10> to |11>.

    The second pulse's phase is calibrated so that the promoted amplitude
    lands on the +|11> axis of the reference frame at the end of the pulse:
    the segment propagator transforms covariantly under a drive phase,
    U(phi) = exp(-i*phi*N) U(0) exp(+i*phi*N) with N the excitation number,
    so the 00-11 coherence phase accumulated by the phi=0 schedule (free
    diagonal evolution plus the spectator light shift) is cancelled exactly
    by choosing phi equal to it.
    """
    cond = conditional_frequencies(params)
    half = PulseSegment(duration_ns=pi_pulse_duration(amp, math.pi / 2.0),
                        freq_offset=params.delta1, amp1=amp, amp2=amp, phase=0.0)
    full = PulseSegment(duration_ns=pi_pulse_duration(amp, math.pi),
                        freq_offset=cond.omega12_offset, amp1=amp, amp2=amp,
                        phase=0.0)
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    psi = _segment_unitary(params, full) @ (_segment_unitary(params, half) @ psi)
    if abs(psi[0]) < 1e-6 or abs(psi[3]) < 1e-6:
        raise ScheduleError(
            "phase calibration failed: the uncalibrated schedule leaves "
            "negligible weight on |00> or |11>")
    phi = float(np.angle(psi[3] / psi[0]))
    return PulseSchedule(segments=(half, replace(full, phase=phi % (2.0 * math.pi))))


def xy_hamiltonian(v12: float) -> np.ndarray:
    """Exchange Hamiltonian v12*(sx sx + sy sy) in rad/ns.

    Equals 2*v12*(S1+ S2- + S1- S2+): twice the excitation-exchange term of
    the pair Hamiltonian, which is the normalization under which the full
    swap of the single-excitation pair takes t_xy = pi/(4*v12) in angular
    units.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[1, 2] = h[2, 1] = 2.0 * ANGULAR_PER_MHZ * v12
    return h


def xy_gate_time(v12: float) -> float:
    """Natural entangling time t_xy = pi/(4*|v12|) in ns (125/|v12| for MHz)."""
    if v12 == 0.0:
        raise ScheduleError("v12 must be nonzero for a finite gate time")
    return math.pi / (4.0 * ANGULAR_PER_MHZ * abs(v12))


def ideal_xy_gate(v12: float, t_ns: float) -> np.ndarray:
    """Closed-form propagator exp(-i * Hxy * t) of the exchange interaction.

    Block rotation on {|01>, |10>} by angle a = 2 * (angular v12) * t ns:

        |01> -> cos(a)|01> - i sin(a)|10>,    |00>, |11> fixed.

    At t = xy_gate_time(v12) the map is the full swap |01> <-> -i|10>
    (+i for negative v12).  ``v12 = 0`` returns the identity with a warning.
    """
    if v12 == 0.0:
        warnings.warn("v12 is zero: the xy gate is the identity", stacklevel=2)
        return np.eye(4, dtype=complex)
    angle = 2.0 * ANGULAR_PER_MHZ * v12 * t_ns
    gate = np.eye(4, dtype=complex)
    gate[1, 1] = gate[2, 2] = math.cos(angle)
    gate[1, 2] = gate[2, 1] = -1j * math.sin(angle)
    return gate


def state_fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Fidelity F = sqrt(<psi|rho|psi>) against a pure target, clamped to [0, 1]."""
    psi = np.asarray(target, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ScheduleError(f"target must be a 4-vector, got shape {psi.shape}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise ScheduleError(f"target must be unit norm, got {norm!r}")
    rho = np.asarray(rho, dtype=complex)
    overlap = float(np.real(psi.conj() @ rho @ psi))
    return math.sqrt(min(max(overlap, 0.0), 1.0))


def run_schedule(rho0: np.ndarray, schedule: PulseSchedule, params: SystemParams,
                 target: np.ndarray | None = None, target_label: str = "",
                 output_stride: float | None = None) -> GateResult:
    """Propagate a state through a schedule and score it against a target.

    Each segment re-derives its Hamiltonian from ``params`` with the
    segment's amplitudes, offset and phase; decay rates apply throughout.
    The fidelity is evaluated on the final state at the end of the schedule.
    ``output_stride`` controls trajectory sampling (ns); by default each
    segment contributes ~64 samples.
    """
    rho = validate_density_matrix(rho0, name="rho0")
    times = [np.array([0.0])]
    states = [rho[np.newaxis]]
    t_base = 0.0
    for seg in schedule:
        stride = output_stride if output_stride is not None else seg.duration_ns / 64.0
        seg_params = replace(params, ell1=seg.amp1, ell2=seg.amp2)
        traj = evolve(rho, seg_params, seg.duration_ns,
                      freq_offset=seg.freq_offset, drive_phase=seg.phase,
                      output_stride=stride)
        rho = traj.final_state
        times.append(t_base + traj.times_ns[1:])
        states.append(traj.states[1:])
        t_base += seg.duration_ns
    trajectory = Trajectory(times_ns=np.concatenate(times),
                            states=np.concatenate(states))
    fidelity = 1.0
    if target is not None:
        fidelity = state_fidelity(rho, target)
    else:
        # no target: score the survival of rho0 when it is pure
        eigvals, eigvecs = np.linalg.eigh(rho0)
        if eigvals[-1] > 1.0 - 1e-9:
            fidelity = state_fidelity(rho, eigvecs[:, -1])
    return GateResult(final_state=rho, trajectory=trajectory,
                      fidelity=fidelity, target_label=target_label)
