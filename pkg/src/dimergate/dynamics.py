"""Dissipative dynamics: Lindblad superoperator, time evolution, steady state.

The master equation for the two-molecule density matrix rho (4x4, basis
{|00>, |01>, |10>, |11>}) is

    drho/dt = -i [H, rho]
              + sum_{i,j} G_ij ( Sj- rho Si+ - 1/2 {Si+ Sj-, rho} )

with G_11 = Gamma1, G_22 = Gamma2 and G_12 = G_21 = Gamma12, the collective
cross-damping responsible for sub- and superradiant linewidths.  Everything
is represented densely: a 16x16 Liouvillian acting on the column-stacked
vectorization of rho (vec index = row + 4*col), so that
vec(A rho B) = (B^T kron A) vec(rho).

Time evolution uses the exact propagator expm(L*dt) whenever the generator
is time independent (reference drive, offset 0).  Drive segments detuned
from the reference frequency keep the fixed reference frame and carry the
residual oscillatory phase exp(-i*(2*pi*1e-3*offset*t + phase)) on the drive
operators inside an adaptive RK integrator instead of switching frames.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .model import (
    ANGULAR_PER_MHZ,
    BASIS_LABELS,
    ParameterError,
    SystemParams,
    build_hamiltonian,
    lowering_operator,
)

__all__ = [
    "DynamicsError",
    "IntegrationError",
    "SteadyStateError",
    "Trajectory",
    "vectorize",
    "unvectorize",
    "build_liouvillian",
    "evolve",
    "steady_state",
    "population",
    "validate_density_matrix",
]

_I4 = np.eye(4, dtype=complex)
_S_MINUS = (lowering_operator(1), lowering_operator(2))
_S_PLUS = tuple(s.conj().T for s in _S_MINUS)

#: row vector extracting Tr(rho) from vec(rho)
TRACE_ROW = np.eye(4, dtype=complex).reshape(-1, order="F")

_LABEL_TO_INDEX = {label: i for i, label in enumerate(BASIS_LABELS)}
_LABEL_TO_INDEX.update({"gg": 0, "ge": 1, "eg": 2, "ee": 3})


class DynamicsError(RuntimeError):
    pass


class IntegrationError(DynamicsError):
    """Time integration failed; ``last_t`` holds the last good time in ns."""

    def __init__(self, message: str, last_t: float):
        super().__init__(message)
        self.last_t = last_t


class SteadyStateError(DynamicsError):
    pass


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a 4x4 matrix into a length-16 vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    return np.asarray(vec, dtype=complex).reshape(4, 4, order="F")


def validate_density_matrix(rho: np.ndarray, *, name: str = "rho",
                            herm_tol: float = 1e-10, trace_tol: float = 1e-10,
                            eig_floor: float = -1e-7) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return rho as ndarray."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ParameterError(f"{name} must be 4x4, got shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > herm_tol:
        raise ParameterError(f"{name} is not Hermitian: max deviation {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ParameterError(f"{name} trace is {tr!r}, expected 1")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if min_eig < eig_floor:
        raise ParameterError(f"{name} has negative eigenvalue {min_eig:.3e}")
    return rho


def _dissipator(params: SystemParams) -> np.ndarray:
    """16x16 collective-decay dissipator in 1/ns."""
    rates = ANGULAR_PER_MHZ * np.array(
        [[params.gamma1, params.gamma12],
         [params.gamma12, params.gamma2]])
    diss = np.zeros((16, 16), dtype=complex)
    for i in range(2):
        for j in range(2):
            g = rates[i, j]
            if g == 0.0:
                continue
            sandwich = np.kron(_S_PLUS[i].T, _S_MINUS[j])
            anti = _S_PLUS[i] @ _S_MINUS[j]
            diss += g * (sandwich
                         - 0.5 * np.kron(_I4, anti)
                         - 0.5 * np.kron(anti.T, _I4))
    return diss


def build_liouvillian(params: SystemParams, hamiltonian: np.ndarray) -> np.ndarray:
    """Dense 16x16 generator of the master equation, in 1/ns.

    ``hamiltonian`` is a 4x4 Hermitian matrix in rad/ns (typically from
    :func:`dimergate.model.build_hamiltonian`); the decay rates come from
    ``params``.  The trace functional is a left null vector of the result.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (4, 4):
        raise ParameterError(f"hamiltonian must be 4x4, got shape {h.shape}")
    commutator = -1j * (np.kron(_I4, h) - np.kron(h.T, _I4))
    return commutator + _dissipator(params)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered density-matrix samples: ``states[k]`` at ``times_ns[k]``."""

    times_ns: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        if self.times_ns.ndim != 1 or self.states.shape != (self.times_ns.size, 4, 4):
            raise ParameterError("trajectory arrays have inconsistent shapes")
        if np.any(np.diff(self.times_ns) <= 0.0):
            raise ParameterError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return self.times_ns.size

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        return zip(self.times_ns, self.states)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def populations(self, index) -> np.ndarray:
        """Population of one basis state along the trajectory."""
        i = _resolve_index(index)
        return np.clip(self.states[:, i, i].real, 0.0, 1.0)

    def validate(self, *, trace_tol: float = 1e-9, herm_tol: float = 1e-9,
                 eig_floor: float = -1e-7) -> None:
        """Assert solver-quality bounds on every sample."""
        for t, rho in self:
            tr = abs(np.trace(rho).real - 1.0)
            if tr > trace_tol:
                raise DynamicsError(f"trace error {tr:.3e} at t = {t} ns")
            herm = np.abs(rho - rho.conj().T).max()
            if herm > herm_tol:
                raise DynamicsError(f"Hermiticity error {herm:.3e} at t = {t} ns")
            min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
            if min_eig < eig_floor:
                raise DynamicsError(f"negative eigenvalue {min_eig:.3e} at t = {t} ns")


def _sample_times(duration: float, stride: float | None) -> np.ndarray:
    if stride is None:
        return np.array([0.0, duration])
    if stride <= 0.0:
        raise ParameterError(f"output stride must be > 0, got {stride}")
    times = np.arange(0.0, duration, stride)
    if duration - times[-1] > 1e-12 * max(duration, 1.0):
        times = np.append(times, duration)
    else:
        times[-1] = duration
    return times


def _evolve_constant(rho0, params, duration, phase, times):
    ham = build_hamiltonian(params, 0.0, phase)
    liou = build_liouvillian(params, ham)
    states = np.empty((times.size, 4, 4), dtype=complex)
    states[0] = rho0
    vec = vectorize(rho0)
    prop = None
    last_dt = None
    for k in range(1, times.size):
        dt = times[k] - times[k - 1]
        if prop is None or abs(dt - last_dt) > 1e-12:
            prop = expm(liou * dt)
            last_dt = dt
        vec = prop @ vec
        states[k] = unvectorize(vec)
    return states


def evolve(rho0: np.ndarray, params: SystemParams, duration_ns: float, *,
           freq_offset: float = 0.0, drive_phase: float = 0.0,
           output_stride: float | None = None,
           check: bool = True) -> Trajectory:
    """Integrate the master equation over one piecewise-constant drive segment.

    The drive amplitudes are ``params.ell1`` and ``params.ell2``;
    ``freq_offset`` (cyclic MHz) detunes the segment's drive from the
    reference frequency and ``drive_phase`` (rad) is referenced to the
    segment start.  Returns samples every ``output_stride`` ns (plus the
    endpoint); with ``output_stride=None`` only start and end are kept.

    For ``freq_offset == 0`` the generator is constant and exact exponential
    stepping is used; otherwise the oscillating drive is integrated with an
    embedded adaptive RK scheme (rtol 1e-10, atol 1e-12).  All returned
    states stay in the reference frame.
    """
    rho0 = validate_density_matrix(rho0, name="rho0")
    if not duration_ns > 0.0:
        raise ParameterError(f"duration must be > 0 ns, got {duration_ns}")
    times = _sample_times(duration_ns, output_stride)
    if freq_offset == 0.0:
        states = _evolve_constant(rho0, params, duration_ns, drive_phase, times)
    else:
        states = _evolve_detuned(rho0, params, duration_ns, freq_offset,
                                 drive_phase, times)
    traj = Trajectory(times_ns=times, states=states)
    if check:
        traj.validate()
    return traj


def _evolve_detuned(rho0, params, duration, offset, phase, times):
    # fixed reference frame: the drive operators carry the residual phase
    bare = replace(params, ell1=0.0, ell2=0.0)
    h_static = build_hamiltonian(bare, 0.0, 0.0)
    diss = _dissipator(params)
    amps = (ANGULAR_PER_MHZ * params.ell1, ANGULAR_PER_MHZ * params.ell2)
    offset_ang = ANGULAR_PER_MHZ * offset

    def rhs(t, y):
        rho = y.reshape(4, 4, order="F")
        rot = np.exp(-1j * (offset_ang * t + phase))
        ham = h_static + amps[0] * (rot * _S_PLUS[0] + np.conj(rot) * _S_MINUS[0]) \
                       + amps[1] * (rot * _S_PLUS[1] + np.conj(rot) * _S_MINUS[1])
        drho = -1j * (ham @ rho - rho @ ham)
        return drho.reshape(-1, order="F") + diss @ y

    sol = solve_ivp(rhs, (0.0, duration), vectorize(rho0), t_eval=times,
                    method="RK45", rtol=1e-10, atol=1e-12)
    if not sol.success:
        last = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration failed at t = {last} ns: {sol.message}",
                               last_t=last)
    states = np.empty((times.size, 4, 4), dtype=complex)
    for k in range(times.size):
        states[k] = unvectorize(sol.y[:, k])
    return states


def steady_state(liouvillian: np.ndarray) -> np.ndarray:
    """Unique stationary density matrix of a dissipative Liouvillian.

    Solves L(rho) = 0 with Tr rho = 1 by replacing the d(rho_00)/dt row
    (which is linearly dependent through trace preservation) with the trace
    constraint.  Uniqueness is checked first via the singular-value gap: the
    second-smallest singular value must exceed 1e-6 times the largest.  The
    result is Hermitized and validated; the residual max|L(rho)| must not
    exceed 1e-8.
    """
    liou = np.asarray(liouvillian, dtype=complex)
    if liou.shape != (16, 16):
        raise ParameterError(f"Liouvillian must be 16x16, got {liou.shape}")
    svals = np.linalg.svd(liou, compute_uv=False)
    if svals[-2] <= 1e-6 * svals[0]:
        raise SteadyStateError(
            "Liouvillian null space is degenerate (singular-value gap "
            f"{svals[-2]:.3e} vs norm {svals[0]:.3e}); the steady state is not "
            "unique, evolve in time from a chosen initial state instead")
    system = liou.copy()
    system[0, :] = TRACE_ROW
    rhs = np.zeros(16, dtype=complex)
    rhs[0] = 1.0
    rho = unvectorize(np.linalg.solve(system, rhs))
    rho = 0.5 * (rho + rho.conj().T)
    residual = np.abs(liou @ vectorize(rho)).max()
    if residual > 1e-8:
        raise SteadyStateError(f"steady-state residual {residual:.3e} exceeds 1e-8")
    return validate_density_matrix(rho, name="steady state")


def _resolve_index(index) -> int:
    if isinstance(index, str):
        try:
            return _LABEL_TO_INDEX[index.lower()]
        except KeyError:
            raise ParameterError(f"unknown basis label {index!r}; "
                                 f"use one of {BASIS_LABELS} or gg/ge/eg/ee") from None
    i = int(index)
    if not 0 <= i <= 3:
        raise ParameterError(f"basis index must be 0..3, got {index!r}")
    return i


def population(rho: np.ndarray, index) -> float:
    """Diagonal occupation of one basis state, clamped to [0, 1].

    ``index`` may be 0..3, a bit-string label "00".."11" or the letter form
    "gg"/"ge"/"eg"/"ee" (first letter = molecule 1).
    """
    rho = np.asarray(rho, dtype=complex)
    i = _resolve_index(index)
    value = rho[i, i].real
    if value < -1e-7 or value > 1.0 + 1e-7:
        raise ParameterError(f"population {value!r} outside [0, 1] beyond tolerance")
    return float(min(max(value, 0.0), 1.0))
