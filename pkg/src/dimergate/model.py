"""Physical model of two laser-driven, dipole-dipole coupled two-level molecules.

Two closely spaced molecules, each with a ground state |g> = |0> and an
excited state |e> = |1>, are driven by a common coherent field and exchange
excitation through the near-field dipole-dipole interaction.  The pair is
treated as a single four-level system in the ordered product basis

    {|00>, |01>, |10>, |11>},   |q1 q2> = (molecule 1) x (molecule 2).

Unit conventions used throughout the package:

* user-facing frequencies and rates are cyclic MHz,
* time is in ns,
* Hamiltonians and Liouvillians are stored in angular units (rad/ns),
  obtained from cyclic MHz via ``ANGULAR_PER_MHZ = 2*pi*1e-3``.

With these conventions a resonant drive of amplitude ``ell`` (MHz) produces
the excited-state population ``sin^2(2*pi*ell*t*1e-3)`` at time ``t`` ns, so
a pi pulse lasts ``1/(4*ell)`` in GHz-consistent units (1.25 ns at 200 MHz).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ANGULAR_PER_MHZ",
    "BASIS_LABELS",
    "ParameterError",
    "SystemParams",
    "DipoleGeometry",
    "NearFieldValidityWarning",
    "EigenSystem",
    "DressedCoefficients",
    "ConditionalFrequencies",
    "NearFieldCoupling",
    "build_hamiltonian",
    "eigensystem",
    "dressed_coefficients",
    "near_field_coupling",
    "conditional_frequencies",
    "lowering_operator",
    "raising_operator",
]

#: rad/ns per cyclic MHz
ANGULAR_PER_MHZ = 2.0e-3 * np.pi

#: basis ordering; first digit is molecule 1, 0 = ground, 1 = excited
BASIS_LABELS = ("00", "01", "10", "11")

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
_I2 = np.eye(2, dtype=complex)

_S1_MINUS = np.kron(_SIGMA_MINUS, _I2)
_S2_MINUS = np.kron(_I2, _SIGMA_MINUS)
_S1_PLUS = _S1_MINUS.conj().T
_S2_PLUS = _S2_MINUS.conj().T

#: total excitation number operator, diag(0, 1, 1, 2)
NUMBER_OP = _S1_PLUS @ _S1_MINUS + _S2_PLUS @ _S2_MINUS


class ParameterError(ValueError):
    """A physical parameter violates one of its invariants."""


class NearFieldValidityWarning(UserWarning):
    """The separation is no longer deep in the near-field regime."""


def lowering_operator(molecule: int) -> np.ndarray:
    """Pseudo-spin lowering operator |g><e| of molecule 1 or 2 (4x4 copy)."""
    if molecule not in (1, 2):
        raise ValueError("molecule index must be 1 or 2")
    return (_S1_MINUS if molecule == 1 else _S2_MINUS).copy()


def raising_operator(molecule: int) -> np.ndarray:
    """Pseudo-spin raising operator |e><g| of molecule 1 or 2 (4x4 copy)."""
    return lowering_operator(molecule).conj().T


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """All rates and detunings of the two-molecule model, in cyclic MHz.

    Attributes
    ----------
    delta_minus : float
        Difference detuning w1 - w2 between the two transition frequencies.
    delta_plus : float
        Sum detuning w1 + w2 - 2*wL relative to the reference drive wL.
    v12 : float
        Coherent dipole-dipole exchange coupling (real).
    delta_eps : float
        Effective shift of the doubly-excited level |11> (signed).
    ell1, ell2 : float
        Laser couplings of molecule 1 and 2 (both written Omega when equal).
    gamma1, gamma2 : float
        Spontaneous emission rates, >= 0.
    gamma12 : float
        Collective (cross-damping) decay rate, |gamma12| <= sqrt(g1*g2).
    """

    delta_minus: float
    delta_plus: float
    v12: float
    delta_eps: float
    ell1: float
    ell2: float
    gamma1: float
    gamma2: float
    gamma12: float

    def __post_init__(self):
        for name in ("delta_minus", "delta_plus", "v12", "delta_eps",
                     "ell1", "ell2", "gamma1", "gamma2", "gamma12"):
            _require_finite(name, getattr(self, name))
        if self.gamma1 < 0.0:
            raise ParameterError(f"gamma1 must be >= 0, got {self.gamma1}")
        if self.gamma2 < 0.0:
            raise ParameterError(f"gamma2 must be >= 0, got {self.gamma2}")
        bound = math.sqrt(self.gamma1 * self.gamma2)
        # tiny float slack so the Dicke limit gamma12 == sqrt(g1 g2) is valid
        if abs(self.gamma12) > bound * (1.0 + 1e-12) + 1e-12:
            raise ParameterError(
                "complete positivity requires |gamma12| <= sqrt(gamma1*gamma2): "
                f"|{self.gamma12}| > {bound}")

    @property
    def delta1(self) -> float:
        """Detuning w1 - wL of molecule 1 from the reference drive."""
        return 0.5 * (self.delta_plus + self.delta_minus)

    @property
    def delta2(self) -> float:
        """Detuning w2 - wL of molecule 2 from the reference drive."""
        return 0.5 * (self.delta_plus - self.delta_minus)


@dataclass(frozen=True)
class DipoleGeometry:
    """Geometric description of the molecule pair for the near-field formulas.

    ``d1_hat`` and ``d2_hat`` are the unit dipole orientations, ``r12_hat``
    the unit vector along the intermolecular axis, ``r12_nm`` the separation,
    ``n_index`` the host refractive index and ``lambda0_nm`` the mean
    transition wavelength defining k0 = 2*pi/lambda0.  The near-field result
    assumes k0*r12 << 1; this is documented, not enforced (a
    ``NearFieldValidityWarning`` is emitted above k0*r12 = 0.3).
    """

    d1_hat: tuple[float, float, float]
    d2_hat: tuple[float, float, float]
    r12_hat: tuple[float, float, float]
    r12_nm: float
    n_index: float
    lambda0_nm: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("d1_hat", "d2_hat", "r12_hat"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ParameterError(f"{name} must be a 3-vector")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ParameterError(f"{name} must be a unit vector to 1e-12, "
                                     f"norm is {np.linalg.norm(v)!r}")
            object.__setattr__(self, name, tuple(float(x) for x in v))
        for name in ("r12_nm", "n_index", "lambda0_nm", "gamma1", "gamma2"):
            _require_finite(name, getattr(self, name))
        if self.r12_nm <= 0.0:
            raise ParameterError(f"r12_nm must be > 0, got {self.r12_nm}")
        if self.n_index < 1.0:
            raise ParameterError(f"n_index must be >= 1, got {self.n_index}")
        if self.lambda0_nm <= 0.0:
            raise ParameterError(f"lambda0_nm must be > 0, got {self.lambda0_nm}")
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            raise ParameterError("decay rates must be >= 0")

    @property
    def k0_r12(self) -> float:
        """Vacuum retardation parameter k0*r12 = 2*pi*r12/lambda0."""
        return 2.0 * np.pi * self.r12_nm / self.lambda0_nm

    @property
    def z(self) -> float:
        """In-medium distance parameter z = n*k0*r12."""
        return self.n_index * self.k0_r12


class NearFieldCoupling(NamedTuple):
    v12: float
    gamma12: float


def near_field_coupling(geom: DipoleGeometry) -> NearFieldCoupling:
    """Near-field coherent coupling and collective decay rate, cyclic MHz.

    With z = n*k0*r12 and the orientation factor
    kappa = d1.d2 - 3(d1.r12)(d2.r12):

        V12     = 3*sqrt(G1*G2) / (8*pi*z^3) * kappa
        Gamma12 = sqrt(G1*G2) * (d1.d2)

    The returned Gamma12 always satisfies the complete-positivity bound
    |Gamma12| <= sqrt(G1*G2), with equality only for parallel dipoles.
    """
    z = geom.z
    if z == 0.0:
        raise ParameterError("z = n*k0*r12 is zero; the 1/z^3 coupling diverges")
    if geom.k0_r12 > 0.3:
        warnings.warn(
            f"k0*r12 = {geom.k0_r12:.3f} > 0.3; near-field formulas lose accuracy",
            NearFieldValidityWarning, stacklevel=2)
    d1 = np.asarray(geom.d1_hat)
    d2 = np.asarray(geom.d2_hat)
    r = np.asarray(geom.r12_hat)
    kappa = float(d1 @ d2 - 3.0 * (d1 @ r) * (d2 @ r))
    root = math.sqrt(geom.gamma1 * geom.gamma2)
    v12 = 3.0 * root / (8.0 * np.pi * z**3) * kappa
    gamma12 = root * float(d1 @ d2)
    return NearFieldCoupling(v12=v12, gamma12=gamma12)


def build_hamiltonian(params: SystemParams,
                      drive_detuning_offset: float = 0.0,
                      drive_phase: float = 0.0) -> np.ndarray:
    """Time-independent 4x4 Hamiltonian in the frame co-rotating with the drive.

    The frame rotates at the drive frequency wL + offset; for the reference
    drive (offset 0) this is the fixed reference frame used throughout the
    package.  With o = drive_detuning_offset, p = drive_phase and the zero of
    energy at the mean single-excitation level, the matrix is (cyclic MHz,
    returned multiplied by ``ANGULAR_PER_MHZ``)::

                |00>            |01>            |10>            |11>
        |00>   -D+/2 + o        l2 e^{+ip}      l1 e^{+ip}      0
        |01>    l2 e^{-ip}     -D-/2            V12             l1 e^{+ip}
        |10>    l1 e^{-ip}      V12            +D-/2            l2 e^{+ip}
        |11>    0               l1 e^{-ip}      l2 e^{-ip}      D+/2 + eps - o

    Only the |00> and |11> diagonal entries pick up the offset because the
    frame rotation is generated by the total excitation number; the
    single-excitation splitting is frame independent.  V12 is taken real, so
    the |01> <-> |10> block is real symmetric.  Hermitian by construction.

    Parameters are in cyclic MHz and radians; the result is in rad/ns.
    """
    _require_finite("drive_detuning_offset", drive_detuning_offset)
    _require_finite("drive_phase", drive_phase)
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = -0.5 * params.delta_plus + drive_detuning_offset
    h[1, 1] = -0.5 * params.delta_minus
    h[2, 2] = +0.5 * params.delta_minus
    h[3, 3] = +0.5 * params.delta_plus + params.delta_eps - drive_detuning_offset
    phase = np.exp(-1j * drive_phase)
    h += params.ell1 * (phase * _S1_PLUS + np.conj(phase) * _S1_MINUS)
    h += params.ell2 * (phase * _S2_PLUS + np.conj(phase) * _S2_MINUS)
    h[1, 2] += params.v12
    h[2, 1] += params.v12
    return h * ANGULAR_PER_MHZ


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigendecomposition of the four-level Hamiltonian.

    ``energies_mhz[k]`` is the k-th eigenenergy in cyclic MHz (ascending) and
    ``states[:, k]`` the matching unit eigenvector with components
    (a00, a01, a10, a11).  Each eigenvector's largest-magnitude component is
    made real and positive (ties broken by lowest basis index) so that
    serialized coefficients are reproducible.
    """

    energies_mhz: np.ndarray
    states: np.ndarray

    def coefficients(self, k: int) -> np.ndarray:
        """Basis coefficients (a00, a01, a10, a11) of eigenstate k."""
        return self.states[:, k]


def eigensystem(hamiltonian: np.ndarray, herm_tol: float = 1e-12) -> EigenSystem:
    """Exact eigendecomposition of a Hermitian 4x4 matrix given in rad/ns.

    Raises ``ParameterError`` when the input deviates from Hermiticity by
    more than ``herm_tol`` relative to its largest element.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 matrix, got shape {h.shape}")
    scale = max(np.abs(h).max(), 1.0)
    dev = np.abs(h - h.conj().T).max()
    if dev > herm_tol * scale:
        raise ParameterError(
            f"matrix is not Hermitian: max |H - H^dag| = {dev:.3e} "
            f"exceeds {herm_tol:.1e} x {scale:.3e}")
    energies, vectors = np.linalg.eigh(h)
    vectors = vectors.copy()
    for k in range(4):
        col = vectors[:, k]
        mags = np.abs(col)
        # ties broken by lowest basis index: argmax returns the first maximum
        idx = int(np.argmax(np.round(mags, 12)))
        ref = col[idx]
        if np.abs(ref) > 0:
            vectors[:, k] = col * (np.abs(ref) / ref)
    return EigenSystem(energies_mhz=energies / ANGULAR_PER_MHZ, states=vectors)


class DressedCoefficients(NamedTuple):
    alpha1: float
    alpha2: float
    splitting: float
    degenerate: bool


def dressed_coefficients(delta_minus: float, v12: float) -> DressedCoefficients:
    """Closed-form single-excitation dressed-state coefficients.

    The symmetric/antisymmetric pair splits by X = sqrt(D-^2 + 4 V12^2); with
    Y = X / D- the coefficients are

        alpha1 = sqrt((Y + 1) / 2Y),    alpha2 = sqrt((Y - 1) / 2Y),

    normalized exactly: alpha1^2 + alpha2^2 = 1.  At D- = 0 the formula is
    replaced by its limit alpha1 = alpha2 = 1/sqrt(2) (maximally entangled
    sub/superradiant pair) and ``degenerate`` is set.
    """
    _require_finite("delta_minus", delta_minus)
    _require_finite("v12", v12)
    splitting = math.hypot(delta_minus, 2.0 * v12)
    if delta_minus == 0.0:
        r = math.sqrt(0.5)
        return DressedCoefficients(alpha1=r, alpha2=r, splitting=splitting,
                                   degenerate=True)
    y = splitting / delta_minus
    alpha1 = math.sqrt((y + 1.0) / (2.0 * y))
    alpha2 = math.sqrt((y - 1.0) / (2.0 * y))
    return DressedCoefficients(alpha1=alpha1, alpha2=alpha2,
                               splitting=splitting, degenerate=False)


class ConditionalFrequencies(NamedTuple):
    delta_shift: float
    omega12_offset: float
    omega21_offset: float


def conditional_frequencies(params: SystemParams) -> ConditionalFrequencies:
    """Drive-frequency offsets of the two conditional single-molecule lines.

    The exchange coupling repels the single-excitation levels by
    delta = V12^2 / D- (second order in V12/D-), so the molecule-2 transition
    conditioned on molecule 1 being excited sits at w2 - delta + eps, and the
    molecule-1 transition conditioned on molecule 2 at w1 + delta + eps.
    Offsets are returned relative to the reference drive wL:

        omega12_offset = D2 - delta + eps     (target = molecule 2)
        omega21_offset = D1 + delta + eps     (target = molecule 1)

    Valid in the regime V12/D- << 1; requires D- != 0.
    """
    if params.delta_minus == 0.0:
        raise ParameterError(
            "delta_minus is zero: the exchange shift V12^2/delta_minus is undefined")
    delta = params.v12**2 / params.delta_minus
    return ConditionalFrequencies(
        delta_shift=delta,
        omega12_offset=params.delta2 - delta + params.delta_eps,
        omega21_offset=params.delta1 + delta + params.delta_eps,
    )
