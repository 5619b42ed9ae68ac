"""Basis kernels, Hermitian eigensolvers, and Hermitian matrix functions.

Conventions fixed here and relied on everywhere else:

* charge basis: states |n> with n = -ncut..+ncut, and e^{i phi}|n> = |n+1>,
  which makes cos(phi) the symmetric nearest-neighbor hopping matrix and
  sin(phi) its antisymmetric +-i/2 partner;
* eigenvectors are returned phase-fixed (largest-magnitude component made
  real and positive) so matrix-element tables reproduce across solvers;
* matrix functions of Hermitian generators go through a full
  eigendecomposition, which keeps exp(i c X) exactly unitary to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

Matrix = Union[np.ndarray, scipy.sparse.spmatrix]

HERMITICITY_RTOL = 1e-12


class LinalgError(ValueError):
    pass


class InvalidCutoffError(LinalgError):
    pass


class InvalidDimensionError(LinalgError):
    pass


class InvalidGridError(LinalgError):
    pass


class InvalidCountError(LinalgError):
    pass


class HermiticityError(LinalgError):
    pass


class SolverFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# basis descriptors


@dataclass(frozen=True)
class ChargeBasis:
    """Cooper-pair number basis, n = -ncut..+ncut."""

    ncut: int

    def __post_init__(self):
        if self.ncut < 1:
            raise InvalidCutoffError(f"ncut must be >= 1, got {self.ncut}")

    @property
    def dimension(self) -> int:
        return 2 * self.ncut + 1

    @property
    def charge_values(self) -> np.ndarray:
        return np.arange(-self.ncut, self.ncut + 1)


@dataclass(frozen=True)
class LadderBasis:
    """Truncated harmonic-oscillator number basis."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(f"ladder dimension must be >= 2, got {self.dim}")

    @property
    def dimension(self) -> int:
        return self.dim


@dataclass(frozen=True)
class GridBasis:
    """Uniform 1d phase grid with hard-wall truncation beyond the end points."""

    min: float
    max: float
    points: int

    def __post_init__(self):
        if not self.min < self.max:
            raise InvalidGridError(f"grid requires min < max, got [{self.min}, {self.max}]")
        if self.points < 3:
            raise InvalidGridError(f"grid requires points >= 3, got {self.points}")

    @property
    def dimension(self) -> int:
        return self.points

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.points - 1)

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class ProductBasis:
    factors: tuple

    @property
    def dimension(self) -> int:
        d = 1
        for f in self.factors:
            d *= f.dimension
        return d


BasisDescriptor = Union[ChargeBasis, LadderBasis, GridBasis, ProductBasis]


@dataclass(frozen=True)
class HermitianOperator:
    """Matrix plus the basis it is expressed in.

    The matrix may be dense or scipy-sparse; hermiticity is checked on
    construction to HERMITICITY_RTOL relative to the matrix norm.
    """

    matrix: Matrix
    basis: BasisDescriptor

    def __post_init__(self):
        check_hermitian(self.matrix)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues and column-orthonormal eigenvectors."""

    evals: np.ndarray
    evecs: np.ndarray


def is_hermitian(matrix: Matrix, rtol: float = HERMITICITY_RTOL) -> bool:
    if scipy.sparse.issparse(matrix):
        diff = (matrix - matrix.conj().T).tocoo()
        scale = scipy.sparse.linalg.norm(matrix) or 1.0
        return (np.abs(diff.data).max() if diff.nnz else 0.0) <= rtol * scale
    matrix = np.asarray(matrix)
    scale = np.linalg.norm(matrix) or 1.0
    return np.abs(matrix - matrix.conj().T).max() <= rtol * scale


def check_hermitian(matrix: Matrix, rtol: float = HERMITICITY_RTOL) -> None:
    if matrix.shape[0] != matrix.shape[1]:
        raise HermiticityError(f"matrix is not square: shape {matrix.shape}")
    if not is_hermitian(matrix, rtol):
        raise HermiticityError("matrix is not Hermitian within tolerance")


# ---------------------------------------------------------------------------
# operator kernels


def charge_number_op(ncut: int) -> HermitianOperator:
    """Cooper-pair number operator diag(-ncut, ..., +ncut)."""
    basis = ChargeBasis(ncut)
    return HermitianOperator(np.diag(basis.charge_values.astype(float)), basis)


def cos_phase_op(ncut: int) -> HermitianOperator:
    """cos(phi) in the charge basis: 1/2 on both off-diagonals."""
    basis = ChargeBasis(ncut)
    dim = basis.dimension
    mat = np.zeros((dim, dim))
    idx = np.arange(dim - 1)
    mat[idx, idx + 1] = 0.5
    mat[idx + 1, idx] = 0.5
    return HermitianOperator(mat, basis)


def sin_phase_op(ncut: int) -> HermitianOperator:
    """sin(phi) in the charge basis, fixed by e^{i phi}|n> = |n+1>."""
    basis = ChargeBasis(ncut)
    dim = basis.dimension
    mat = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim - 1)
    mat[idx + 1, idx] = -0.5j
    mat[idx, idx + 1] = 0.5j
    return HermitianOperator(mat, basis)


def exp_i_phase_matrix(ncut: int) -> np.ndarray:
    """Charge-raising matrix for e^{i phi}: entries <n+1|e^{i phi}|n> = 1."""
    dim = 2 * ncut + 1
    mat = np.zeros((dim, dim))
    idx = np.arange(dim - 1)
    mat[idx + 1, idx] = 1.0
    return mat


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowering and raising operators on a dim-level number basis."""
    if dim < 2:
        raise InvalidDimensionError(f"ladder dimension must be >= 2, got {dim}")
    lowering = np.zeros((dim, dim))
    k = np.arange(1, dim)
    lowering[k - 1, k] = np.sqrt(k)
    return lowering, lowering.T.copy()


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def grid_kinetic_op(grid: GridBasis, prefactor: float = 1.0) -> HermitianOperator:
    """prefactor * (-d^2/dx^2) by central differences on the grid.

    Boundary rows keep the same stencil, truncated: the wavefunction is
    treated as zero one spacing beyond each end point (hard wall).
    """
    h = grid.spacing
    n = grid.points
    main = np.full(n, 2.0 * prefactor / h**2)
    off = np.full(n - 1, -prefactor / h**2)
    mat = scipy.sparse.diags([off, main, off], offsets=[-1, 0, 1], format="csr")
    return HermitianOperator(mat, grid)


def grid_first_derivative(grid: GridBasis) -> scipy.sparse.spmatrix:
    """Central-difference d/dx; antisymmetric, hard-wall truncated."""
    h = grid.spacing
    n = grid.points
    off = np.full(n - 1, 1.0 / (2 * h))
    return scipy.sparse.diags([-off, off], offsets=[-1, 1], format="csr")


def hermitian_matrix_function(matrix: Matrix, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f(H) for Hermitian H via full eigendecomposition.

    f is applied to the (real) eigenvalues and may return complex values,
    e.g. f = lambda x: exp(1j*c*x) yields the exactly unitary exp(i c H).
    """
    if scipy.sparse.issparse(matrix):
        matrix = matrix.toarray()
    check_hermitian(matrix)
    evals, evecs = np.linalg.eigh(matrix)
    fvals = np.asarray(f(evals))
    return (evecs * fvals) @ evecs.conj().T


# ---------------------------------------------------------------------------
# eigensolvers


def _phase_fix(evecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    fixed = np.array(evecs, dtype=complex)
    for j in range(fixed.shape[1]):
        col = fixed[:, j]
        k = np.argmax(np.abs(col))
        pivot = col[k]
        if np.abs(pivot) > 0:
            fixed[:, j] = col * (np.abs(pivot) / pivot)
    return fixed


def eigensolve(matrix: Matrix, count: int | None = None) -> Eigensystem:
    """Lowest `count` eigenpairs of a Hermitian matrix, ascending.

    Dense inputs take the direct LAPACK path; sparse inputs use the
    iterative lowest-k solver, falling back to the dense path when the
    requested count leaves fewer than two spare dimensions.
    """
    dim = matrix.shape[0]
    if count is None:
        count = dim
    if not 1 <= count <= dim:
        raise InvalidCountError(f"count must be in [1, {dim}], got {count}")

    if scipy.sparse.issparse(matrix):
        if count >= dim - 1:
            return eigensolve(matrix.toarray(), count)
        # fixed-seed start vector: deterministic, and generic enough not to
        # be orthogonal to any symmetry sector
        v0 = np.random.default_rng(7).standard_normal(dim)
        try:
            evals, evecs = scipy.sparse.linalg.eigsh(
                matrix.tocsc(), k=count, which="SA", v0=v0
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise SolverFailure(
                f"sparse eigensolver failed to converge: dim={dim}, k={count}; "
                f"{len(exc.eigenvalues)} eigenvalues converged"
            ) from exc
        order = np.argsort(evals, kind="stable")
        return Eigensystem(evals[order], _phase_fix(evecs[:, order]))

    matrix = np.asarray(matrix)
    check_hermitian(matrix)
    if count == dim:
        evals, evecs = scipy.linalg.eigh(matrix)
    else:
        evals, evecs = scipy.linalg.eigh(matrix, subset_by_index=[0, count - 1])
    return Eigensystem(evals, _phase_fix(evecs))


def eigenvalues_only(matrix: Matrix, count: int | None = None) -> np.ndarray:
    return eigensolve(matrix, count).evals
