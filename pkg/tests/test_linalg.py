import numpy as np
import pytest
import scipy.sparse

from qspec import linalg
from qspec.linalg import (
    ChargeBasis,
    GridBasis,
    HermiticityError,
    InvalidCountError,
    InvalidCutoffError,
    InvalidDimensionError,
    InvalidGridError,
    charge_number_op,
    cos_phase_op,
    eigensolve,
    grid_kinetic_op,
    hermitian_matrix_function,
    ladder_ops,
    sin_phase_op,
)


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


class TestChargeBasisOps:
    def test_charge_number_small(self):
        op = charge_number_op(1)
        assert np.array_equal(op.matrix, np.diag([-1.0, 0.0, 1.0]))

    @pytest.mark.parametrize("ncut", [1, 3, 10])
    def test_trace_zero_and_dimension(self, ncut):
        op = charge_number_op(ncut)
        assert np.trace(op.matrix) == 0.0
        assert op.matrix.shape == (2 * ncut + 1, 2 * ncut + 1)

    def test_invalid_cutoff(self):
        with pytest.raises(InvalidCutoffError):
            charge_number_op(0)

    def test_cos_phase_small(self):
        expected = np.array([[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])
        assert np.array_equal(cos_phase_op(1).matrix, expected)

    @pytest.mark.parametrize("ncut", [2, 6])
    def test_cos_spectrum_bounded(self, ncut):
        evals = np.linalg.eigvalsh(cos_phase_op(ncut).matrix)
        assert evals.min() >= -1 - 1e-12
        assert evals.max() <= 1 + 1e-12

    @pytest.mark.parametrize("ncut", [1, 2, 5])
    def test_cos_sq_plus_sin_sq_edge_correction(self, ncut):
        # derived oracle: with the shift operator S (S|n> = |n+1>, truncated),
        # cos^2 + sin^2 = (S S^dag + S^dag S)/2 = I - (P_first + P_last)/2
        cos = cos_phase_op(ncut).matrix
        sin = sin_phase_op(ncut).matrix
        dim = 2 * ncut + 1
        expected = np.eye(dim)
        expected[0, 0] -= 0.5
        expected[-1, -1] -= 0.5
        assert np.allclose(cos @ cos + sin @ sin, expected, atol=1e-14)

    def test_sin_phase_antisymmetric_tridiagonal(self):
        sin = sin_phase_op(2).matrix
        assert np.allclose(sin, sin.conj().T)
        assert np.allclose(np.diag(sin, 1), 0.5j)
        assert np.allclose(np.diag(sin, -1), -0.5j)


class TestLadderOps:
    def test_entries(self):
        a, adag = ladder_ops(3)
        assert a[0, 1] == pytest.approx(1.0)
        assert a[1, 2] == pytest.approx(np.sqrt(2))
        assert np.array_equal(adag, a.T)

    def test_number_operator(self):
        a, adag = ladder_ops(6)
        assert np.allclose(adag @ a, np.diag(np.arange(6.0)))

    def test_commutator_truncation(self):
        a, adag = ladder_ops(5)
        comm = a @ adag - adag @ a
        expected = np.eye(5)
        expected[-1, -1] = -4.0  # finite-truncation artifact in the last entry
        assert np.allclose(comm, expected)

    def test_invalid_dimension(self):
        with pytest.raises(InvalidDimensionError):
            ladder_ops(1)


class TestGridKinetic:
    def test_constant_vector_interior(self):
        grid = GridBasis(-1.0, 1.0, 41)
        op = grid_kinetic_op(grid).matrix
        result = op @ np.ones(41)
        assert np.allclose(result[1:-1], 0.0, atol=1e-10)

    def test_particle_in_box_lowest_eigenvalue(self):
        # derived oracle: hard-wall truncation places the effective walls one
        # spacing beyond the end grid points, so the analytic box spectrum is
        # k^2 with k = n pi / (span + 2h)
        grid = GridBasis(0.0, np.pi, 400)
        op = grid_kinetic_op(grid, prefactor=1.0)
        evals = eigensolve(op.matrix, 2).evals
        h = grid.spacing
        k1 = np.pi / (np.pi + 2 * h)
        assert evals[0] == pytest.approx(k1**2, rel=1e-3)
        # and the naive box value 1.0 is approached at O(h) accuracy
        assert evals[0] == pytest.approx(1.0, rel=2e-2)

    def test_symmetry_exact(self):
        grid = GridBasis(-2.0, 3.0, 51)
        mat = grid_kinetic_op(grid, prefactor=2.5).matrix.toarray()
        assert np.array_equal(mat, mat.T)

    def test_invalid_grid(self):
        with pytest.raises(InvalidGridError):
            GridBasis(0.0, 1.0, 2)
        with pytest.raises(InvalidGridError):
            GridBasis(1.0, 0.0, 10)


class TestMatrixFunction:
    def test_identity_function(self):
        h = random_hermitian(8, 0)
        assert np.allclose(hermitian_matrix_function(h, lambda x: x), h)

    def test_exp_of_zero(self):
        x = random_hermitian(6, 1)
        result = hermitian_matrix_function(0.0 * x, lambda v: np.exp(1j * v))
        assert np.allclose(result, np.eye(6))

    @pytest.mark.parametrize("theta", [0.3, 1.7, -2.2])
    def test_unitarity(self, theta):
        a, adag = ladder_ops(12)
        x = (a + adag) / np.sqrt(2)
        u = hermitian_matrix_function(x, lambda v: np.exp(1j * theta * v))
        assert np.max(np.abs(u @ u.conj().T - np.eye(12))) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(HermiticityError):
            hermitian_matrix_function(np.array([[0.0, 1.0], [0.0, 0.0]]), np.cos)


class TestEigensolve:
    def test_full_diagonal(self):
        system = eigensolve(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(system.evals, [1.0, 2.0, 3.0])

    def test_two_by_two(self):
        system = eigensolve(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(system.evals, [-1.0, 1.0])

    def test_sparse_matches_dense(self):
        h = random_hermitian(60, 42)
        dense = eigensolve(h, 5)
        sparse = eigensolve(scipy.sparse.csr_matrix(h), 5)
        assert np.max(np.abs(dense.evals - sparse.evals)) < 1e-8

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_residuals_and_orthonormality(self, seed):
        h = random_hermitian(40, seed)
        system = eigensolve(h, 7)
        norm = np.linalg.norm(h)
        for k in range(7):
            residual = h @ system.evecs[:, k] - system.evals[k] * system.evecs[:, k]
            assert np.linalg.norm(residual) <= 1e-8 * norm
        gram = system.evecs.conj().T @ system.evecs
        assert np.max(np.abs(gram - np.eye(7))) < 1e-10

    def test_unitary_conjugation_invariance(self):
        h = random_hermitian(25, 3)
        rng = np.random.default_rng(4)
        q, _ = np.linalg.qr(rng.standard_normal((25, 25)) + 1j * rng.standard_normal((25, 25)))
        rotated = q @ h @ q.conj().T
        a = eigensolve(h).evals
        b = eigensolve(rotated).evals
        assert np.max(np.abs(a - b)) < 1e-10 * np.linalg.norm(h)

    def test_degenerate_orthonormal(self):
        system = eigensolve(np.eye(6), 6)
        gram = system.evecs.conj().T @ system.evecs
        assert np.max(np.abs(gram - np.eye(6))) < 1e-12

    def test_count_out_of_range(self):
        with pytest.raises(InvalidCountError):
            eigensolve(np.eye(4), 5)
        with pytest.raises(InvalidCountError):
            eigensolve(np.eye(4), 0)

    def test_phase_fixing_deterministic(self):
        h = random_hermitian(12, 9)
        a = eigensolve(h, 4).evecs
        b = eigensolve(h, 4).evecs
        assert np.array_equal(a, b)
        for k in range(4):
            pivot = a[np.argmax(np.abs(a[:, k])), k]
            assert pivot.imag == pytest.approx(0.0, abs=1e-14)
            assert pivot.real > 0
