import numpy as np
import pytest
from hypothesis import given, strategies as st

from rdlab.exceptions import DomainError, NotHermitianError, StructuralError
from rdlab.linalg import (
    HermitianOperator,
    matrix_function,
    partial_trace,
    permute_subsystems,
    pinch,
    spec_count,
    spectral_decompose,
    tensor,
    trace_norm,
)

from oracles import ket, random_density_matrix, random_hermitian

seeds = st.integers(0, 2**32 - 1)


def test_hermitian_operator_rejects_asymmetric():
    with pytest.raises(NotHermitianError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_operator_factor_mismatch():
    with pytest.raises(StructuralError):
        HermitianOperator(np.eye(4), (2, 3))


class TestSpectralDecompose:
    def test_diagonal(self):
        sd = spectral_decompose(np.diag([2.0, 1.0]))
        assert np.allclose(sd.eigenvalues, [1.0, 2.0])
        assert np.allclose(np.abs(sd.eigenvectors), [[0, 1], [1, 0]])

    def test_pauli_x(self):
        assert np.allclose(spectral_decompose(np.array([[0.0, 1.0], [1.0, 0.0]])).eigenvalues, [-1, 1])

    def test_reconstruction(self, rng):
        h = random_hermitian(6, rng)
        assert np.linalg.norm(spectral_decompose(h).reconstruct() - h) <= 1e-9

    def test_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            spectral_decompose(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestMatrixFunction:
    def test_sqrt(self):
        assert np.allclose(matrix_function(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))

    def test_identity(self, rng):
        h = random_hermitian(4, rng)
        assert np.allclose(matrix_function(h, lambda t: t), h, atol=1e-12)

    def test_inverse_sqrt(self):
        out = matrix_function(np.diag([0.5, 0.25]), lambda t: t ** -0.5)
        assert np.allclose(out, np.diag([np.sqrt(2.0), 2.0]), atol=1e-12)

    def test_undefined_without_support_flag(self):
        with pytest.raises(DomainError):
            matrix_function(np.diag([1.0, 0.0]), np.log)

    def test_support_only_zero_outside(self):
        out = matrix_function(np.diag([np.e, 0.0]), np.log, support_only=True)
        assert np.allclose(out, np.diag([1.0, 0.0]))

    def test_keeps_factors(self):
        op = HermitianOperator(np.eye(4), (2, 2))
        assert matrix_function(op, np.sqrt).factors == (2, 2)

    @given(seeds)
    def test_composition(self, seed):
        h = random_hermitian(4, np.random.default_rng(seed))
        lhs = matrix_function(h, lambda t: np.cos(np.exp(t)))
        rhs = matrix_function(matrix_function(h, np.exp), np.cos)
        assert np.linalg.norm(lhs - rhs) <= 1e-8


class TestTensor:
    def test_scalar_unit(self, rng):
        b = random_hermitian(3, rng)
        assert np.allclose(tensor(np.ones((1, 1)), b), b)

    def test_diag(self):
        p = 0.3
        out = tensor(np.diag([1.0, 0.0]), np.diag([p, 1 - p]))
        assert np.allclose(out, np.diag([p, 1 - p, 0, 0]))

    def test_factor_lists_concatenate(self):
        a = HermitianOperator(np.eye(4), (2, 2))
        assert tensor(a, np.eye(3)).factors == (2, 2, 3)


class TestPartialTrace:
    def test_product(self, rng):
        rho, sigma = random_density_matrix(2, rng), random_density_matrix(3, rng)
        out = partial_trace(np.kron(rho, 2.5 * sigma), [0], (2, 3))
        assert np.allclose(out, 2.5 * rho, atol=1e-10)

    def test_trace_everything(self, rng):
        rho = HermitianOperator(random_density_matrix(4, rng), (2, 2))
        assert np.allclose(partial_trace(rho, []).entries, [[1.0]])

    def test_maximally_entangled(self):
        phi = ket(1, 0, 0, 1)
        for keep in ([0], [1]):
            assert np.allclose(partial_trace(phi, keep, (2, 2)), np.eye(2) / 2)

    def test_missing_dims(self):
        with pytest.raises(StructuralError):
            partial_trace(np.eye(4), [0])

    def test_permute_swaps_factors(self, rng):
        a, b = random_density_matrix(2, rng), random_density_matrix(3, rng)
        out = permute_subsystems(np.kron(a, b), [1, 0], (2, 3))
        assert np.allclose(out, np.kron(b, a))

    @given(seeds)
    def test_tensor_property(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_hermitian(2, rng), random_hermitian(3, rng)
        out = partial_trace(np.kron(a, b), [0], (2, 3))
        assert np.linalg.norm(out - np.trace(b) * a) <= 1e-10


class TestPinch:
    def test_identity_reference(self, rng):
        x = random_hermitian(3, rng)
        assert np.allclose(pinch(x, np.eye(3)), x)

    def test_distinct_diagonal(self, rng):
        x = random_hermitian(3, rng)
        assert np.allclose(pinch(x, np.diag([1.0, 2.0, 3.0])), np.diag(np.diag(x)))

    def test_commutes_with_reference(self, rng):
        x, ref = random_hermitian(4, rng), random_density_matrix(4, rng)
        y = pinch(x, ref)
        assert np.linalg.norm(y @ ref - ref @ y) <= 1e-10

    @given(seeds)
    def test_trace_and_positivity(self, seed):
        rng = np.random.default_rng(seed)
        x, ref = random_density_matrix(3, rng), random_hermitian(3, rng)
        y = pinch(x, ref)
        assert abs(np.trace(y) - np.trace(x)) <= 1e-10
        assert np.linalg.eigvalsh(y)[0] >= -1e-10


class TestTraceNorm:
    def test_state(self, rng):
        assert trace_norm(random_density_matrix(3, rng)) == pytest.approx(1.0, abs=1e-12)

    def test_diag(self):
        assert trace_norm(np.diag([1.0, -2.0])) == 3.0

    def test_orthogonal_pure(self):
        assert trace_norm(ket(1, 0) - ket(0, 1)) == pytest.approx(2.0, abs=1e-12)

    @given(seeds)
    def test_triangle(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_hermitian(3, rng), random_hermitian(3, rng)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9


class TestSpecCount:
    def test_identity(self):
        assert spec_count(np.eye(4)) == 1

    def test_diag(self):
        assert spec_count(np.diag([1.0, 2.0, 3.0])) == 3

    def test_product(self):
        rho = np.diag([0.3, 0.7])
        assert spec_count(np.kron(rho, rho)) == 3
