"""Parameter sweeps: eigenstate maps and steady-state fluorescence spectra.

Each grid point is an independent, pure computation, so sweeps may be
evaluated concurrently; rows are always assembled in ascending order of the
sweep variable and the result is bit-identical between serial and parallel
runs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import __version__ as _version
from .model import ParameterError, SystemParams, build_hamiltonian, eigensystem
from .dynamics import build_liouvillian, steady_state

__all__ = [
    "SWEEP_VARIABLES",
    "SweepSpec",
    "SweepTable",
    "Peak",
    "PeakError",
    "eigen_sweep",
    "spectrum_sweep",
    "peak_finder",
]

#: sweep variables and how they act on the base parameter record
SWEEP_VARIABLES = ("delta_minus", "delta_plus_half", "delta_eps", "ell")

_OBSERVABLE_CHOICES = ("populations", "coherences")


class PeakError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """A one-dimensional inclusive linspace sweep over one model parameter.

    ``delta_plus_half`` sweeps the per-photon laser detuning (the spectrum
    axis), so the full sum detuning is twice the grid value; ``ell`` drives
    both couplings together.
    """

    variable: str
    start: float
    stop: float
    points: int
    base: SystemParams
    observables: tuple[str, ...] = ("populations",)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ParameterError(
                f"unknown sweep variable {self.variable!r}; choose from {SWEEP_VARIABLES}")
        if not self.start < self.stop:
            raise ParameterError(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if self.points < 2:
            raise ParameterError(f"sweep needs at least 2 points, got {self.points}")
        for obs in self.observables:
            if obs not in _OBSERVABLE_CHOICES:
                raise ParameterError(
                    f"unknown observable {obs!r}; choose from {_OBSERVABLE_CHOICES}")
        object.__setattr__(self, "observables", tuple(self.observables))

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def params_at(self, value: float) -> SystemParams:
        if self.variable == "delta_minus":
            return replace(self.base, delta_minus=value)
        if self.variable == "delta_plus_half":
            return replace(self.base, delta_plus=2.0 * value)
        if self.variable == "delta_eps":
            return replace(self.base, delta_eps=value)
        return replace(self.base, ell1=value, ell2=value)

    @property
    def axis_column(self) -> str:
        return f"{self.variable}_mhz"


@dataclass(frozen=True)
class SweepTable:
    """Rectangular numeric result table plus its provenance echo."""

    columns: tuple[str, ...]
    rows: np.ndarray
    provenance: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ParameterError("table rows must be rectangular and match columns")
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise PeakError(f"no column {name!r}; have {self.columns}") from None


def _provenance(spec: SweepSpec) -> tuple[tuple[str, str], ...]:
    base = spec.base
    items = [
        ("tool", f"dimergate {_version}"),
        ("sweep_var", spec.variable),
        ("sweep_start", repr(spec.start)),
        ("sweep_stop", repr(spec.stop)),
        ("sweep_points", str(spec.points)),
        ("delta_minus_mhz", repr(base.delta_minus)),
        ("delta_plus_half_mhz", repr(base.delta_plus / 2.0)),
        ("v12_mhz", repr(base.v12)),
        ("delta_eps_mhz", repr(base.delta_eps)),
        ("ell1_mhz", repr(base.ell1)),
        ("ell2_mhz", repr(base.ell2)),
        ("gamma1_mhz", repr(base.gamma1)),
        ("gamma2_mhz", repr(base.gamma2)),
        ("gamma12_mhz", repr(base.gamma12)),
    ]
    return tuple(items)


def _map_grid(func: Callable[[float], np.ndarray], grid: np.ndarray,
              max_workers: int) -> list[np.ndarray]:
    if max_workers == 1 or grid.size < 4:
        return [func(x) for x in grid]
    workers = max_workers if max_workers > 0 else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, grid))


def eigen_sweep(spec: SweepSpec, max_workers: int = 1) -> SweepTable:
    """Eigenenergies and basis coefficients across the sweep grid.

    Per row: the sweep value, the four sorted energies E1..E4 (MHz) and the
    sixteen coefficients a00_k..a11_k of eigenstate k = 1..4, phase fixed so
    the largest component of each eigenvector is real positive.  The swept
    configurations use a real drive, so the coefficients are real.
    """
    def point(value: float) -> np.ndarray:
        eig = eigensystem(build_hamiltonian(spec.params_at(value)))
        return np.concatenate(([value], eig.energies_mhz,
                               eig.states.real.T.reshape(-1)))

    rows = np.vstack(_map_grid(point, spec.grid(), max_workers))
    columns = [spec.axis_column]
    columns += [f"E{k}_mhz" for k in range(1, 5)]
    for k in range(1, 5):
        columns += [f"a00_{k}", f"a01_{k}", f"a10_{k}", f"a11_{k}"]
    return SweepTable(columns=tuple(columns), rows=rows, provenance=_provenance(spec))


def spectrum_sweep(spec: SweepSpec, max_workers: int = 1) -> SweepTable:
    """Steady-state occupations across the sweep grid (fluorescence structure).

    Per row: the sweep value and the diagonal populations p00, p01, p10,
    p11 of the unique steady state; with the "coherences" observable the six
    off-diagonal magnitudes are appended.  Requires a dissipative model
    (some decay rate > 0); degenerate steady states raise.
    """
    if spec.base.gamma1 <= 0.0 and spec.base.gamma2 <= 0.0:
        raise ParameterError("spectrum sweeps need a dissipative model (some gamma > 0)")
    want_coh = "coherences" in spec.observables
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    def point(value: float) -> np.ndarray:
        params = spec.params_at(value)
        rho = steady_state(build_liouvillian(params, build_hamiltonian(params)))
        row = [value] + [rho[i, i].real for i in range(4)]
        if want_coh:
            row += [abs(rho[i, j]) for i, j in pairs]
        return np.array(row)

    rows = np.vstack(_map_grid(point, spec.grid(), max_workers))
    columns = [spec.axis_column, "p00", "p01", "p10", "p11"]
    if want_coh:
        columns += [f"c{i}{j}" for i, j in pairs]
    return SweepTable(columns=tuple(columns), rows=rows, provenance=_provenance(spec))


class Peak(NamedTuple):
    location: float
    height: float
    fwhm: float


def peak_finder(table: SweepTable, column: str) -> Peak:
    """Locate the maximum of one column with sub-grid refinement.

    The discrete argmax is refined by a parabola through its neighbours and
    the FWHM is read off by linear interpolation of the half-height
    crossings.  Flat columns and peaks touching the grid edge raise
    ``PeakError``.
    """
    x = table.rows[:, 0]
    y = table.column(column)
    if x.size < 5:
        raise PeakError("peak finding needs at least 5 rows")
    if np.ptp(y) <= 0.0:
        raise PeakError(f"column {column!r} is flat; no peak")
    i = int(np.argmax(y))
    if i == 0 or i == x.size - 1:
        raise PeakError(f"peak of {column!r} touches the grid edge at {x[i]}")
    # parabolic refinement through (i-1, i, i+1)
    coeffs = np.polyfit(x[i - 1:i + 2], y[i - 1:i + 2], 2)
    if coeffs[0] == 0.0:
        location, height = float(x[i]), float(y[i])
    else:
        location = float(-coeffs[1] / (2.0 * coeffs[0]))
        height = float(np.polyval(coeffs, location))
    half = height / 2.0
    left = right = None
    for k in range(i, 0, -1):
        if y[k - 1] <= half <= y[k]:
            left = x[k - 1] + (half - y[k - 1]) / (y[k] - y[k - 1]) * (x[k] - x[k - 1])
            break
    for k in range(i, x.size - 1):
        if y[k + 1] <= half <= y[k]:
            right = x[k] + (y[k] - half) / (y[k] - y[k + 1]) * (x[k + 1] - x[k])
            break
    if left is None or right is None:
        raise PeakError(f"half height of {column!r} not bracketed inside the grid")
    return Peak(location=location, height=height, fwhm=float(right - left))
