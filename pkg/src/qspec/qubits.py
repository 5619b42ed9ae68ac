"""Qubit and oscillator families: parameter records, Hamiltonians, operators,
wavefunctions, potentials, matrix-element tables, and single-qubit scans.

Each family is a frozen dataclass carrying circuit parameters in context
energy units (frequencies).  Hamiltonians are built in the family's natural
basis:

* transmon / tunable transmon: charge basis, -ncut..+ncut;
* fluxonium: harmonic-oscillator (ladder) basis of the inductor+capacitor
  mode, with the Josephson cosine entering through a matrix exponential;
* flux qubit: two-mode charge basis with an assembled inverse-capacitance
  charging matrix;
* 0-pi (symmetric and zeta-coupled): charge basis for theta, uniform phase
  grid for phi, ladder basis for the zeta mode;
* cos(2 phi): ladder (phi) x charge (theta) x ladder (zeta);
* harmonic / Kerr oscillators and the two-level generic qubit are diagonal
  in their number / energy bases.

The grid-based and three-mode families are represented sparsely and
diagonalized with the iterative lowest-k solver; everything else is dense.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Optional, Sequence, Union

import numpy as np
import scipy.sparse

from . import linalg
from .grids import NamedGridArray
from .linalg import (
    ChargeBasis,
    Eigensystem,
    GridBasis,
    HermitianOperator,
    LadderBasis,
    ProductBasis,
)

WAVEFUNCTION_MODES = ("real", "imag", "abs", "abs_sqr")


class SpecValidationError(ValueError):
    """Invalid qubit parameter; carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownOperatorError(KeyError):
    pass


class UnknownParameterError(KeyError):
    pass


class UnsupportedRepresentationError(ValueError):
    pass


class MissingOscillatorLengthError(ValueError):
    pass


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise SpecValidationError(field, message)


def min_ncut_estimate(EJ: float, EC: float) -> int:
    """Smallest recommended charge cutoff for low-lying transmon states,
    ceil(2 (EJ/EC)^(1/4))."""
    _require(EJ > 0, "EJ", "must be positive")
    _require(EC > 0, "EC", "must be positive")
    return math.ceil(2.0 * (EJ / EC) ** 0.25)


@dataclass(frozen=True)
class Wavefunction:
    """Eigenstate amplitudes over a basis or a real-space grid.

    Render modes (real / imag / abs / abs_sqr) are applied at output time,
    never stored.
    """

    amplitudes: np.ndarray
    support: Union[linalg.BasisDescriptor, np.ndarray]
    energy: float
    representation: str

    @property
    def support_values(self) -> np.ndarray:
        if isinstance(self.support, ChargeBasis):
            return self.support.charge_values
        if isinstance(self.support, GridBasis):
            return self.support.values
        if isinstance(self.support, LadderBasis):
            return np.arange(self.support.dim)
        if isinstance(self.support, np.ndarray):
            return self.support
        raise UnsupportedRepresentationError(
            f"wavefunction support {type(self.support).__name__} has no 1d coordinates"
        )


def wavefunction_component(amplitudes: np.ndarray, mode: str) -> np.ndarray:
    if mode == "real":
        return np.real(amplitudes)
    if mode == "imag":
        return np.imag(amplitudes)
    if mode == "abs":
        return np.abs(amplitudes)
    if mode == "abs_sqr":
        return np.abs(amplitudes) ** 2
    raise ValueError(f"unknown mode {mode!r}; supported: {WAVEFUNCTION_MODES}")


def _hermite_functions(xs: np.ndarray, count: int) -> np.ndarray:
    """Normalized harmonic-oscillator eigenfunctions h_k(x), k < count,
    via the stable three-term recurrence (rows: k, columns: x)."""
    out = np.zeros((count, len(xs)))
    out[0] = np.pi ** (-0.25) * np.exp(-0.5 * xs**2)
    if count > 1:
        out[1] = np.sqrt(2.0) * xs * out[0]
    for k in range(2, count):
        out[k] = np.sqrt(2.0 / k) * xs * out[k - 1] - np.sqrt((k - 1) / k) * out[k - 2]
    return out


# ---------------------------------------------------------------------------
# common behavior


@dataclass(frozen=True)
class QubitBase:
    """Shared behavior for all families; subclasses define the parameters,
    basis, and Hamiltonian."""

    family: ClassVar[str] = ""
    _operators: ClassVar[tuple[str, ...]] = ()

    # --- surface shared by every family

    def basis(self) -> linalg.BasisDescriptor:
        raise NotImplementedError

    def hamiltonian(self) -> HermitianOperator:
        raise NotImplementedError

    @property
    def hilbert_dim(self) -> int:
        return self.basis().dimension

    def eigensys(self, evals_count: int = 6) -> Eigensystem:
        return linalg.eigensolve(self.hamiltonian().matrix, evals_count)

    def eigenvals(self, evals_count: int = 6) -> np.ndarray:
        return self.eigensys(evals_count).evals

    def supported_operators(self) -> tuple[str, ...]:
        return self._operators

    def operator(self, name: str) -> np.ndarray:
        if name not in self._operators:
            raise UnknownOperatorError(
                f"{type(self).__name__} has no operator {name!r}; "
                f"supported: {self._operators}"
            )
        return getattr(self, name)()

    def matrixelement_table(self, operator_name: str, evals_count: int = 6) -> np.ndarray:
        """Table M[i, j] = <psi_i| O |psi_j> over phase-fixed eigenstates."""
        op = self.operator(operator_name)
        system = self.eigensys(evals_count)
        if scipy.sparse.issparse(op):
            return system.evecs.conj().T @ (op @ system.evecs)
        return system.evecs.conj().T @ np.asarray(op) @ system.evecs

    def potential(self, phi):
        raise UnsupportedRepresentationError(
            f"{type(self).__name__} does not define a 1d potential"
        )

    def wavefunction(
        self,
        which: Union[int, Sequence[int]] = 0,
        representation: str = "native",
        phi_grid: Optional[GridBasis] = None,
    ) -> list[Wavefunction]:
        indices = [which] if isinstance(which, int) else list(which)
        count = max(indices) + 1
        system = self.eigensys(count)
        return [
            self._wavefunction_from_vector(system.evecs[:, i], system.evals[i],
                                           representation, phi_grid)
            for i in indices
        ]

    def _wavefunction_from_vector(self, vector, energy, representation, phi_grid):
        if representation == "native":
            return Wavefunction(vector, self.basis(), energy, "native")
        raise UnsupportedRepresentationError(
            f"{type(self).__name__} does not support representation {representation!r}"
        )

    # --- parameter scans

    def updated(self, **changes) -> "QubitBase":
        fields = {f.name for f in dataclasses.fields(self)}
        for name in changes:
            if name not in fields:
                raise UnknownParameterError(
                    f"{type(self).__name__} has no parameter {name!r}"
                )
        return dataclasses.replace(self, **changes)

    def spectrum_vs_param(
        self, param: str, values: Sequence[float], evals_count: int = 6
    ) -> NamedGridArray:
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("parameter value array is empty")
        payload = np.empty((len(values), evals_count))
        for i, v in enumerate(values):
            payload[i] = self.updated(**{param: _coerce_field(self, param, v)}).eigenvals(
                evals_count
            )
        return NamedGridArray(((param, values),), payload)

    def matelem_vs_param(
        self,
        operator_name: str,
        param: str,
        values: Sequence[float],
        select_elems: int = 4,
    ) -> NamedGridArray:
        """Matrix elements <i|O|j> with 0 <= i, j < select_elems per value."""
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("parameter value array is empty")
        payload = np.empty((len(values), select_elems, select_elems), dtype=complex)
        for i, v in enumerate(values):
            spec = self.updated(**{param: _coerce_field(self, param, v)})
            payload[i] = spec.matrixelement_table(operator_name, select_elems)
        return NamedGridArray(((param, values),), payload)


def _coerce_field(spec: QubitBase, param: str, value: float):
    """Keep integer-typed fields (cutoffs) integral when swept."""
    for f in dataclasses.fields(spec):
        if f.name == param and f.type in ("int", int):
            return int(round(value))
    return value


def _validate_truncation(spec: QubitBase) -> None:
    _require(
        1 <= spec.truncated_dim <= spec.hilbert_dim,
        "truncated_dim",
        f"must be in [1, {spec.hilbert_dim}]",
    )


def _charge_phase_wavefunction(vector, ncut, energy, points=151):
    """Continuous-phase synthesis psi(phi) = sum_n c_n e^{i n phi}/sqrt(2 pi)
    on a periodic grid over [-pi, pi) (right end point excluded so the plain
    Riemann norm h*sum|psi|^2 is exact)."""
    phis = -np.pi + 2 * np.pi * np.arange(points) / points
    ns = np.arange(-ncut, ncut + 1)
    amplitudes = (vector[None, :] * np.exp(1j * np.outer(phis, ns))).sum(axis=1)
    amplitudes /= np.sqrt(2 * np.pi)
    return Wavefunction(amplitudes, phis, energy, "phase")


# ---------------------------------------------------------------------------
# transmon family


@dataclass(frozen=True)
class Transmon(QubitBase):
    """Cooper-pair box / transmon: 4 EC (n - ng)^2 - EJ cos(phi) in the
    charge basis."""

    EJ: float
    EC: float
    ng: float = 0.0
    ncut: int = 30
    truncated_dim: int = 6

    family: ClassVar[str] = "transmon"
    _operators: ClassVar[tuple[str, ...]] = (
        "n_operator",
        "cos_phi_operator",
        "sin_phi_operator",
    )

    def __post_init__(self):
        _require(self.EJ > 0, "EJ", "must be positive")
        _require(self.EC > 0, "EC", "must be positive")
        _require(self.ncut >= 1, "ncut", "must be >= 1")
        _validate_truncation(self)

    def basis(self) -> ChargeBasis:
        return ChargeBasis(self.ncut)

    def _effective_EJ(self) -> float:
        return self.EJ

    def hamiltonian(self) -> HermitianOperator:
        basis = self.basis()
        charging = 4.0 * self.EC * (basis.charge_values - self.ng) ** 2
        matrix = np.diag(charging) - self._effective_EJ() * linalg.cos_phase_op(self.ncut).matrix
        return HermitianOperator(matrix, basis)

    def n_operator(self) -> np.ndarray:
        return linalg.charge_number_op(self.ncut).matrix

    def cos_phi_operator(self) -> np.ndarray:
        return linalg.cos_phase_op(self.ncut).matrix

    def sin_phi_operator(self) -> np.ndarray:
        return linalg.sin_phase_op(self.ncut).matrix

    def potential(self, phi):
        return -self._effective_EJ() * np.cos(phi)

    def _wavefunction_from_vector(self, vector, energy, representation, phi_grid):
        if representation in ("native", "charge"):
            return Wavefunction(vector, self.basis(), energy, "charge")
        if representation == "phase":
            return _charge_phase_wavefunction(vector, self.ncut, energy)
        raise UnsupportedRepresentationError(
            f"{type(self).__name__} supports charge and phase representations"
        )


@dataclass(frozen=True)
class TunableTransmon(QubitBase):
    """Transmon with a flux-tunable SQUID junction of asymmetry d.

    The effective Josephson energy follows the standard asymmetric-SQUID
    form EJmax |cos(pi flux)| sqrt(1 + d^2 tan^2(pi flux)), evaluated in the
    numerically stable sqrt(cos^2 + d^2 sin^2) version.
    """

    EJmax: float
    EC: float
    d: float = 0.0
    flux: float = 0.0
    ng: float = 0.0
    ncut: int = 30
    truncated_dim: int = 6

    family: ClassVar[str] = "tunable_transmon"
    _operators: ClassVar[tuple[str, ...]] = Transmon._operators

    def __post_init__(self):
        _require(self.EJmax > 0, "EJmax", "must be positive")
        _require(self.EC > 0, "EC", "must be positive")
        _require(abs(self.d) < 1, "d", "junction asymmetry must satisfy 0 <= |d| < 1")
        _require(self.ncut >= 1, "ncut", "must be >= 1")
        _validate_truncation(self)

    def effective_EJ(self) -> float:
        c = math.cos(math.pi * self.flux)
        s = math.sin(math.pi * self.flux)
        return self.EJmax * math.sqrt(c * c + self.d * self.d * s * s)

    def basis(self) -> ChargeBasis:
        return ChargeBasis(self.ncut)

    def hamiltonian(self) -> HermitianOperator:
        # built directly rather than through Transmon: the effective EJ is
        # legitimately zero at the half-flux sweet spot of a symmetric SQUID
        basis = self.basis()
        charging = 4.0 * self.EC * (basis.charge_values - self.ng) ** 2
        matrix = np.diag(charging) - self.effective_EJ() * linalg.cos_phase_op(self.ncut).matrix
        return HermitianOperator(matrix, basis)

    def n_operator(self) -> np.ndarray:
        return linalg.charge_number_op(self.ncut).matrix

    def cos_phi_operator(self) -> np.ndarray:
        return linalg.cos_phase_op(self.ncut).matrix

    def sin_phi_operator(self) -> np.ndarray:
        return linalg.sin_phase_op(self.ncut).matrix

    def potential(self, phi):
        return -self.effective_EJ() * np.cos(phi)

    def _wavefunction_from_vector(self, vector, energy, representation, phi_grid):
        if representation in ("native", "charge"):
            return Wavefunction(vector, self.basis(), energy, "charge")
        if representation == "phase":
            return _charge_phase_wavefunction(vector, self.ncut, energy)
        raise UnsupportedRepresentationError(
            "TunableTransmon supports charge and phase representations"
        )


# ---------------------------------------------------------------------------
# fluxonium


@dataclass(frozen=True)
class Fluxonium(QubitBase):
    """Inductively shunted junction in the ladder basis of its LC mode:

        sqrt(8 EL EC) a^dag a
            - EJ/2 [ e^{-i phi_ext} exp(i phi_osc (a + a^dag)/sqrt(2)) + h.c. ]

    with phi_osc = (8 EC / EL)^(1/4) and phi_ext = 2 pi flux.
    """

    EJ: float
    EC: float
    EL: float
    flux: float = 0.0
    cutoff: int = 110
    truncated_dim: int = 6

    family: ClassVar[str] = "fluxonium"
    _operators: ClassVar[tuple[str, ...]] = (
        "n_operator",
        "phi_operator",
        "cos_phi_operator",
        "sin_phi_operator",
    )

    def __post_init__(self):
        _require(self.EJ > 0, "EJ", "must be positive")
        _require(self.EC > 0, "EC", "must be positive")
        _require(self.EL > 0, "EL", "must be positive")
        _require(self.cutoff >= 2, "cutoff", "must be >= 2")
        _validate_truncation(self)

    def basis(self) -> LadderBasis:
        return LadderBasis(self.cutoff)

    @property
    def phi_osc(self) -> float:
        return (8.0 * self.EC / self.EL) ** 0.25

    @property
    def plasma_energy(self) -> float:
        return math.sqrt(8.0 * self.EL * self.EC)

    def phi_operator(self) -> np.ndarray:
        a, adag = linalg.ladder_ops(self.cutoff)
        return self.phi_osc * (a + adag) / math.sqrt(2.0)

    def n_operator(self) -> np.ndarray:
        a, adag = linalg.ladder_ops(self.cutoff)
        return 1j * (adag - a) / (math.sqrt(2.0) * self.phi_osc)

    def _exp_i_phi(self) -> np.ndarray:
        return linalg.hermitian_matrix_function(self.phi_operator(), lambda x: np.exp(1j * x))

    def cos_phi_operator(self) -> np.ndarray:
        return linalg.hermitian_matrix_function(self.phi_operator(), np.cos)

    def sin_phi_operator(self) -> np.ndarray:
        return linalg.hermitian_matrix_function(self.phi_operator(), np.sin)

    def hamiltonian(self) -> HermitianOperator:
        phi_ext = 2.0 * math.pi * self.flux
        shifted = np.exp(-1j * phi_ext) * self._exp_i_phi()
        matrix = (
            self.plasma_energy * linalg.number_op(self.cutoff)
            - 0.5 * self.EJ * (shifted + shifted.conj().T)
        )
        return HermitianOperator(matrix, self.basis())

    def potential(self, phi):
        phi = np.asarray(phi, dtype=float)
        return -self.EJ * np.cos(phi - 2.0 * math.pi * self.flux) + 0.5 * self.EL * phi**2

    def _wavefunction_from_vector(self, vector, energy, representation, phi_grid):
        if representation == "native":
            return Wavefunction(vector, self.basis(), energy, "native")
        if representation == "phase":
            if phi_grid is None:
                span = 5.5 * self.phi_osc + abs(2 * math.pi * self.flux)
                phi_grid = GridBasis(-span, span, 301)
            phis = phi_grid.values
            hs = _hermite_functions(phis / self.phi_osc, self.cutoff) / math.sqrt(self.phi_osc)
            amplitudes = vector @ hs
            return Wavefunction(amplitudes, phi_grid, energy, "phase")
        raise UnsupportedRepresentationError(
            "Fluxonium supports native (ladder) and phase representations"
        )


# ---------------------------------------------------------------------------
# three-junction flux qubit


@dataclass(frozen=True)
class FluxQubit(QubitBase):
    """Three-junction persistent-current qubit in the two-mode charge basis.

    The 2x2 charging matrix is assembled from the individual capacitive
    energies: node capacitances (in units of e^2/2) are C11 = 1/ECJ1 +
    1/ECg1 + 1/ECJ3, C22 = 1/ECJ2 + 1/ECg2 + 1/ECJ3, C12 = C21 = -1/ECJ3,
    and the energy matrix is the inverse of that node matrix.
    """

    EJ1: float
    EJ2: float
    EJ3: float
    ECJ1: float
    ECJ2: float
    ECJ3: float
    ECg1: float
    ECg2: float
    ng1: float = 0.0
    ng2: float = 0.0
    flux: float = 0.0
    ncut: int = 10
    truncated_dim: int = 6

    family: ClassVar[str] = "flux_qubit"
    _operators: ClassVar[tuple[str, ...]] = ("n_1_operator", "n_2_operator")

    def __post_init__(self):
        for name in ("EJ1", "EJ2", "EJ3", "ECJ1", "ECJ2", "ECJ3", "ECg1", "ECg2"):
            _require(getattr(self, name) > 0, name, "must be positive")
        _require(self.ncut >= 1, "ncut", "must be >= 1")
        _validate_truncation(self)

    def basis(self) -> ProductBasis:
        return ProductBasis((ChargeBasis(self.ncut), ChargeBasis(self.ncut)))

    def charging_matrix(self) -> np.ndarray:
        node = np.array(
            [
                [1.0 / self.ECJ1 + 1.0 / self.ECg1 + 1.0 / self.ECJ3, -1.0 / self.ECJ3],
                [-1.0 / self.ECJ3, 1.0 / self.ECJ2 + 1.0 / self.ECg2 + 1.0 / self.ECJ3],
            ]
        )
        return np.linalg.inv(node)

    def n_1_operator(self) -> np.ndarray:
        n = linalg.charge_number_op(self.ncut).matrix
        return np.kron(n, np.eye(2 * self.ncut + 1))

    def n_2_operator(self) -> np.ndarray:
        n = linalg.charge_number_op(self.ncut).matrix
        return np.kron(np.eye(2 * self.ncut + 1), n)

    def hamiltonian(self) -> HermitianOperator:
        dim1 = 2 * self.ncut + 1
        ns = np.arange(-self.ncut, self.ncut + 1, dtype=float)
        n1 = np.repeat(ns, dim1) - self.ng1
        n2 = np.tile(ns, dim1) - self.ng2
        ec = self.charging_matrix()
        diag = 4.0 * (ec[0, 0] * n1**2 + ec[1, 1] * n2**2 + 2.0 * ec[0, 1] * n1 * n2)
        matrix = np.diag(diag).astype(complex)

        cos1 = linalg.cos_phase_op(self.ncut).matrix
        eye = np.eye(dim1)
        matrix -= self.EJ1 * np.kron(cos1, eye)
        matrix -= self.EJ2 * np.kron(eye, cos1)

        # cos(phi1 - phi2 + phi_ext): e^{i phi1} raises n1, e^{-i phi2} lowers n2
        raise1 = linalg.exp_i_phase_matrix(self.ncut)
        hop = np.kron(raise1, raise1.T)
        phi_ext = 2.0 * math.pi * self.flux
        matrix -= 0.5 * self.EJ3 * (np.exp(1j * phi_ext) * hop + np.exp(-1j * phi_ext) * hop.T)
        return HermitianOperator(matrix, self.basis())


# ---------------------------------------------------------------------------
# 0-pi qubit


def _zeropi_ecs(EC: float, ECJ: float) -> float:
    """Series combination 1/ECS = 1/EC + 1/ECJ."""
    return 1.0 / (1.0 / EC + 1.0 / ECJ)


@dataclass(frozen=True)
class ZeroPi(QubitBase):
    """Symmetric 0-pi qubit (theta: charge basis, phi: phase grid), with
    junction disorder dEJ / dCJ allowed:

        2 ECJ n_phi^2 + 2 ECS (n_theta + ng)^2
        - 2 EJ cos(theta) cos(phi - phi_ext/2) + EL phi^2
        - 2 ECS dCJ n_phi n_theta + EJ dEJ sin(theta) sin(phi - phi_ext/2)
    """

    EJ: float
    EL: float
    ECJ: float
    EC: float
    dEJ: float = 0.0
    dCJ: float = 0.0
    ng: float = 0.0
    flux: float = 0.0
    grid: GridBasis = GridBasis(-8 * math.pi, 8 * math.pi, 200)
    ncut: int = 30
    truncated_dim: int = 6

    family: ClassVar[str] = "zero_pi"
    _operators: ClassVar[tuple[str, ...]] = ("n_theta_operator", "phi_operator")

    def __post_init__(self):
        for name in ("EJ", "EL", "ECJ", "EC"):
            _require(getattr(self, name) > 0, name, "must be positive")
        for name in ("dEJ", "dCJ"):
            _require(abs(getattr(self, name)) < 1, name, "disorder must satisfy |dX| < 1")
        _require(self.ncut >= 1, "ncut", "must be >= 1")
        _validate_truncation(self)

    @property
    def ECS(self) -> float:
        return _zeropi_ecs(self.EC, self.ECJ)

    def basis(self) -> ProductBasis:
        return ProductBasis((ChargeBasis(self.ncut), self.grid))

    def n_theta_operator(self) -> scipy.sparse.spmatrix:
        n = scipy.sparse.diags(np.arange(-self.ncut, self.ncut + 1, dtype=float))
        return scipy.sparse.kron(n, scipy.sparse.identity(self.grid.points), format="csr")

    def phi_operator(self) -> scipy.sparse.spmatrix:
        phi = scipy.sparse.diags(self.grid.values)
        return scipy.sparse.kron(
            scipy.sparse.identity(2 * self.ncut + 1), phi, format="csr"
        )

    def hamiltonian(self) -> HermitianOperator:
        ncut, grid = self.ncut, self.grid
        dim_theta = 2 * ncut + 1
        eye_theta = scipy.sparse.identity(dim_theta)
        eye_phi = scipy.sparse.identity(grid.points)

        phi_vals = grid.values
        half_ext = math.pi * self.flux  # phi_ext / 2 with phi_ext = 2 pi flux
        cos_phi = scipy.sparse.diags(np.cos(phi_vals - half_ext))
        sin_phi = scipy.sparse.diags(np.sin(phi_vals - half_ext))
        phi_sq = scipy.sparse.diags(phi_vals**2)

        n_theta = scipy.sparse.diags(np.arange(-ncut, ncut + 1, dtype=float))
        charge_diag = scipy.sparse.diags(
            (np.arange(-ncut, ncut + 1, dtype=float) + self.ng) ** 2
        )
        cos_theta = scipy.sparse.csr_matrix(linalg.cos_phase_op(ncut).matrix)
        sin_theta = scipy.sparse.csr_matrix(linalg.sin_phase_op(ncut).matrix)

        kinetic_phi = linalg.grid_kinetic_op(grid).matrix  # -d^2/dphi^2
        n_phi = -1j * linalg.grid_first_derivative(grid)

        h = (
            2.0 * self.ECJ * scipy.sparse.kron(eye_theta, kinetic_phi)
            + 2.0 * self.ECS * scipy.sparse.kron(charge_diag, eye_phi)
            - 2.0 * self.EJ * scipy.sparse.kron(cos_theta, cos_phi)
            + self.EL * scipy.sparse.kron(eye_theta, phi_sq)
            - 2.0 * self.ECS * self.dCJ * scipy.sparse.kron(n_theta, n_phi)
            + self.EJ * self.dEJ * scipy.sparse.kron(sin_theta, sin_phi)
        )
        return HermitianOperator(h.tocsr(), self.basis())


@dataclass(frozen=True)
class FullZeroPi(ZeroPi):
    """0-pi qubit including the zeta mode that couples in through capacitive
    (dC) and inductive (dEL) disorder.

    The zeta mode is the harmonic oscillator 2 ECS n_zeta^2 + EL zeta^2 with
    frequency omega_zeta = sqrt(8 EL ECS) and oscillator length
    (2 ECS / EL)^(1/4); the disorder couplings are
    -2 ECS dC n_theta n_zeta + EL dEL phi zeta.
    """

    dC: float = 0.0
    dEL: float = 0.0
    zeta_cut: int = 30

    family: ClassVar[str] = "full_zero_pi"
    _operators: ClassVar[tuple[str, ...]] = ("n_theta_operator", "phi_operator")

    def __post_init__(self):
        super().__post_init__()
        for name in ("dC", "dEL"):
            _require(abs(getattr(self, name)) < 1, name, "disorder must satisfy |dX| < 1")
        _require(self.zeta_cut >= 2, "zeta_cut", "must be >= 2")

    @property
    def omega_zeta(self) -> float:
        return math.sqrt(8.0 * self.EL * self.ECS)

    @property
    def zeta_osc(self) -> float:
        return (2.0 * self.ECS / self.EL) ** 0.25

    def basis(self) -> ProductBasis:
        return ProductBasis(
            (ChargeBasis(self.ncut), self.grid, LadderBasis(self.zeta_cut))
        )

    def hamiltonian(self) -> HermitianOperator:
        core = ZeroPi(
            EJ=self.EJ, EL=self.EL, ECJ=self.ECJ, EC=self.EC, dEJ=self.dEJ,
            dCJ=self.dCJ, ng=self.ng, flux=self.flux, grid=self.grid,
            ncut=self.ncut, truncated_dim=self.truncated_dim,
        ).hamiltonian().matrix

        a, adag = linalg.ladder_ops(self.zeta_cut)
        number = scipy.sparse.csr_matrix(adag @ a)
        zeta_op = scipy.sparse.csr_matrix(self.zeta_osc * (a + adag) / math.sqrt(2.0))
        n_zeta = scipy.sparse.csr_matrix(
            1j * (adag - a) / (math.sqrt(2.0) * self.zeta_osc)
        )

        eye_core = scipy.sparse.identity(core.shape[0])
        eye_zeta = scipy.sparse.identity(self.zeta_cut)
        eye_theta = scipy.sparse.identity(2 * self.ncut + 1)
        n_theta = scipy.sparse.diags(np.arange(-self.ncut, self.ncut + 1, dtype=float))
        phi_diag = scipy.sparse.diags(self.grid.values)

        h = (
            scipy.sparse.kron(core, eye_zeta)
            + self.omega_zeta * scipy.sparse.kron(eye_core, number)
            - 2.0 * self.ECS * self.dC
            * scipy.sparse.kron(scipy.sparse.kron(n_theta, scipy.sparse.identity(self.grid.points)), n_zeta)
            + self.EL * self.dEL
            * scipy.sparse.kron(scipy.sparse.kron(eye_theta, phi_diag), zeta_op)
        )
        return HermitianOperator(h.tocsr(), self.basis())


# ---------------------------------------------------------------------------
# cos(2 phi) qubit


@dataclass(frozen=True)
class Cos2Phi(QubitBase):
    """cos(2 phi) qubit in the ladder (phi) x charge (theta) x ladder (zeta)
    basis, with disorder-renormalized energies ECJ' = ECJ / (1 - dCJ)^2 and
    EL' = EL / (1 - dL)^2 entering the Hamiltonian:

        2 ECJ' n_phi^2 + 2 ECJ' (n_theta - ng - n_zeta)^2 + 4 EC n_zeta^2
        + EL' (phi - pi flux)^2 + EL' zeta^2
        - 2 EJ cos(theta) cos(phi) + 2 dEJ EJ sin(theta) sin(phi)
        - 4 dCJ ECJ' n_phi (n_theta - ng - n_zeta)
        + dL EL' (2 phi - phi_ext) zeta
    """

    EJ: float
    ECJ: float
    EL: float
    EC: float
    dEJ: float = 0.0
    dCJ: float = 0.0
    dL: float = 0.0
    flux: float = 0.0
    ng: float = 0.0
    ncut: int = 7
    phi_cut: int = 7
    zeta_cut: int = 30
    truncated_dim: int = 6

    family: ClassVar[str] = "cos2phi"
    _operators: ClassVar[tuple[str, ...]] = (
        "n_theta_operator",
        "phi_operator",
        "zeta_operator",
    )

    def __post_init__(self):
        for name in ("EJ", "ECJ", "EL", "EC"):
            _require(getattr(self, name) > 0, name, "must be positive")
        for name in ("dEJ", "dCJ", "dL"):
            _require(abs(getattr(self, name)) < 1, name, "disorder must satisfy |dX| < 1")
        _require(self.ncut >= 1, "ncut", "must be >= 1")
        _require(self.phi_cut >= 2, "phi_cut", "must be >= 2")
        _require(self.zeta_cut >= 2, "zeta_cut", "must be >= 2")
        _validate_truncation(self)

    @property
    def ECJ_eff(self) -> float:
        return self.ECJ / (1.0 - self.dCJ) ** 2

    @property
    def EL_eff(self) -> float:
        return self.EL / (1.0 - self.dL) ** 2

    @property
    def phi_osc(self) -> float:
        return (2.0 * self.ECJ_eff / self.EL_eff) ** 0.25

    @property
    def zeta_osc(self) -> float:
        # the theta charging term contributes 2 ECJ' n_zeta^2 on top of
        # the explicit 4 EC n_zeta^2
        return ((2.0 * self.ECJ_eff + 4.0 * self.EC) / self.EL_eff) ** 0.25

    def basis(self) -> ProductBasis:
        return ProductBasis(
            (LadderBasis(self.phi_cut), ChargeBasis(self.ncut), LadderBasis(self.zeta_cut))
        )

    def _phi_block(self) -> tuple[np.ndarray, np.ndarray]:
        a, adag = linalg.ladder_ops(self.phi_cut)
        phi = self.phi_osc * (a + adag) / math.sqrt(2.0)
        n_phi = 1j * (adag - a) / (math.sqrt(2.0) * self.phi_osc)
        return phi, n_phi

    def _zeta_block(self) -> tuple[np.ndarray, np.ndarray]:
        a, adag = linalg.ladder_ops(self.zeta_cut)
        zeta = self.zeta_osc * (a + adag) / math.sqrt(2.0)
        n_zeta = 1j * (adag - a) / (math.sqrt(2.0) * self.zeta_osc)
        return zeta, n_zeta

    def phi_operator(self) -> scipy.sparse.spmatrix:
        phi, _ = self._phi_block()
        dim_theta = 2 * self.ncut + 1
        return scipy.sparse.kron(
            scipy.sparse.csr_matrix(phi),
            scipy.sparse.identity(dim_theta * self.zeta_cut),
            format="csr",
        )

    def n_theta_operator(self) -> scipy.sparse.spmatrix:
        n = scipy.sparse.diags(np.arange(-self.ncut, self.ncut + 1, dtype=float))
        return scipy.sparse.kron(
            scipy.sparse.identity(self.phi_cut),
            scipy.sparse.kron(n, scipy.sparse.identity(self.zeta_cut)),
            format="csr",
        )

    def zeta_operator(self) -> scipy.sparse.spmatrix:
        zeta, _ = self._zeta_block()
        dim_theta = 2 * self.ncut + 1
        return scipy.sparse.kron(
            scipy.sparse.identity(self.phi_cut * dim_theta),
            scipy.sparse.csr_matrix(zeta),
            format="csr",
        )

    def hamiltonian(self) -> HermitianOperator:
        phi, n_phi = self._phi_block()
        zeta, n_zeta = self._zeta_block()
        phi_ext = 2.0 * math.pi * self.flux

        cos_phi = linalg.hermitian_matrix_function(phi, np.cos)
        sin_phi = linalg.hermitian_matrix_function(phi, np.sin)
        phi_shifted_sq = (phi - math.pi * self.flux * np.eye(self.phi_cut)) @ (
            phi - math.pi * self.flux * np.eye(self.phi_cut)
        )

        dim_theta = 2 * self.ncut + 1
        n_theta_shift = np.diag(np.arange(-self.ncut, self.ncut + 1, dtype=float) - self.ng)
        cos_theta = linalg.cos_phase_op(self.ncut).matrix
        sin_theta = linalg.sin_phase_op(self.ncut).matrix

        def kron3(a, b, c):
            return scipy.sparse.kron(
                scipy.sparse.csr_matrix(a),
                scipy.sparse.kron(scipy.sparse.csr_matrix(b), scipy.sparse.csr_matrix(c)),
                format="csr",
            )

        eye_phi = np.eye(self.phi_cut)
        eye_theta = np.eye(dim_theta)
        eye_zeta = np.eye(self.zeta_cut)

        ecj = self.ECJ_eff
        el = self.EL_eff

        h = (
            2.0 * ecj * kron3(n_phi @ n_phi, eye_theta, eye_zeta)
            # 2 ECJ' (n_theta - ng - n_zeta)^2, expanded over the two modes
            + 2.0 * ecj * kron3(eye_phi, n_theta_shift @ n_theta_shift, eye_zeta)
            + 2.0 * ecj * kron3(eye_phi, eye_theta, n_zeta @ n_zeta)
            - 4.0 * ecj * kron3(eye_phi, n_theta_shift, n_zeta)
            + 4.0 * self.EC * kron3(eye_phi, eye_theta, n_zeta @ n_zeta)
            + el * kron3(phi_shifted_sq, eye_theta, eye_zeta)
            + el * kron3(eye_phi, eye_theta, zeta @ zeta)
            - 2.0 * self.EJ * kron3(cos_phi, cos_theta, eye_zeta)
            + 2.0 * self.dEJ * self.EJ * kron3(sin_phi, sin_theta, eye_zeta)
            - 4.0 * self.dCJ * ecj * (
                kron3(n_phi, n_theta_shift, eye_zeta) - kron3(n_phi, eye_theta, n_zeta)
            )
            + self.dL * el * (
                2.0 * kron3(phi, eye_theta, zeta)
                - phi_ext * kron3(eye_phi, eye_theta, zeta)
            )
        )
        return HermitianOperator(h.tocsr(), self.basis())


# ---------------------------------------------------------------------------
# oscillators and the generic two-level qubit


@dataclass(frozen=True)
class Oscillator(QubitBase):
    """Harmonic mode E_osc a^dag a, diagonal in its number basis."""

    E_osc: float
    l_osc: Optional[float] = None
    truncated_dim: int = 6

    family: ClassVar[str] = "oscillator"
    _operators: ClassVar[tuple[str, ...]] = (
        "annihilation_operator",
        "creation_operator",
        "number_operator",
        "phi_operator",
        "n_operator",
    )

    def __post_init__(self):
        _require(self.E_osc > 0, "E_osc", "must be positive")
        _require(self.l_osc is None or self.l_osc > 0, "l_osc", "must be positive when set")
        _require(self.truncated_dim >= 2, "truncated_dim", "must be >= 2")

    def basis(self) -> LadderBasis:
        return LadderBasis(self.truncated_dim)

    def _level_energies(self) -> np.ndarray:
        ks = np.arange(self.truncated_dim, dtype=float)
        return self.E_osc * ks

    def hamiltonian(self) -> HermitianOperator:
        return HermitianOperator(np.diag(self._level_energies()), self.basis())

    def annihilation_operator(self) -> np.ndarray:
        return linalg.ladder_ops(self.truncated_dim)[0]

    def creation_operator(self) -> np.ndarray:
        return linalg.ladder_ops(self.truncated_dim)[1]

    def number_operator(self) -> np.ndarray:
        return linalg.number_op(self.truncated_dim)

    def _require_l_osc(self) -> float:
        if self.l_osc is None:
            raise MissingOscillatorLengthError(
                "l_osc must be provided to define phase and charge operators"
            )
        return self.l_osc

    def phi_operator(self) -> np.ndarray:
        l_osc = self._require_l_osc()
        a, adag = linalg.ladder_ops(self.truncated_dim)
        return l_osc * (adag + a) / math.sqrt(2.0)

    def n_operator(self) -> np.ndarray:
        l_osc = self._require_l_osc()
        a, adag = linalg.ladder_ops(self.truncated_dim)
        return 1j * (adag - a) / (math.sqrt(2.0) * l_osc)


@dataclass(frozen=True)
class KerrOscillator(Oscillator):
    """Kerr-nonlinear mode E_osc a^dag a - K a^dag a^dag a a."""

    K: float = 0.0

    family: ClassVar[str] = "kerr_oscillator"

    def _level_energies(self) -> np.ndarray:
        ks = np.arange(self.truncated_dim, dtype=float)
        return self.E_osc * ks - self.K * ks * (ks - 1.0)


@dataclass(frozen=True)
class GenericQubit(QubitBase):
    """Two-level system (E/2) sigma_z with the standard Pauli set."""

    E: float

    family: ClassVar[str] = "generic_qubit"
    _operators: ClassVar[tuple[str, ...]] = (
        "sx_operator",
        "sy_operator",
        "sz_operator",
        "sp_operator",
        "sm_operator",
    )

    def __post_init__(self):
        _require(self.E > 0, "E", "must be positive")

    @property
    def truncated_dim(self) -> int:
        return 2

    def basis(self) -> LadderBasis:
        return LadderBasis(2)

    def hamiltonian(self) -> HermitianOperator:
        return HermitianOperator(0.5 * self.E * self.sz_operator(), self.basis())

    def sx_operator(self) -> np.ndarray:
        return np.array([[0.0, 1.0], [1.0, 0.0]])

    def sy_operator(self) -> np.ndarray:
        return np.array([[0.0, -1.0j], [1.0j, 0.0]])

    def sz_operator(self) -> np.ndarray:
        return np.array([[1.0, 0.0], [0.0, -1.0]])

    def sp_operator(self) -> np.ndarray:
        return np.array([[0.0, 1.0], [0.0, 0.0]])

    def sm_operator(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [1.0, 0.0]])


# ---------------------------------------------------------------------------
# family registry

FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (
        Transmon,
        TunableTransmon,
        Fluxonium,
        FluxQubit,
        ZeroPi,
        FullZeroPi,
        Cos2Phi,
        Oscillator,
        KerrOscillator,
        GenericQubit,
    )
}

QubitSpec = Union[
    Transmon,
    TunableTransmon,
    Fluxonium,
    FluxQubit,
    ZeroPi,
    FullZeroPi,
    Cos2Phi,
    Oscillator,
    KerrOscillator,
    GenericQubit,
]
