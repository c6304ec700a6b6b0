import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import linalg as sla

from rdlab import renyi
from rdlab.exceptions import ConvergenceError, DimensionError
from rdlab.linalg import pinch

from oracles import (
    classical_renyi,
    commuting_pair,
    ket,
    petz_oracle,
    random_density_matrix,
    random_hermitian,
    sandwiched_oracle,
)

seeds = st.integers(0, 2**32 - 1)
orders = st.sampled_from([0.5, 0.6, 0.75, 0.9])
KINDS = ("petz", "sandwiched", "measured")


class TestUmegaki:
    def test_self(self, rng):
        rho = random_density_matrix(3, rng)
        assert renyi.umegaki(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_pure_vs_mixed(self):
        assert renyi.umegaki(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)

    def test_support_violation(self):
        assert renyi.umegaki(ket(1, 1), np.diag([1.0, 0.0])) == math.inf

    def test_matches_logm(self, rng):
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        ref = np.trace(rho @ (sla.logm(rho) - sla.logm(sigma))).real / math.log(2)
        assert renyi.umegaki(rho, sigma) == pytest.approx(ref, abs=1e-9)


class TestPetz:
    def test_self(self, rng):
        rho = random_density_matrix(3, rng)
        assert renyi.petz_q(rho, rho, 0.7) == pytest.approx(1.0, abs=1e-12)

    def test_pure_vs_mixed(self):
        q = renyi.petz_q(np.diag([1.0, 0.0]), np.eye(2) / 2, 0.5)
        assert q == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert renyi.petz_divergence(np.diag([1.0, 0.0]), np.eye(2) / 2, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_is_infinite(self):
        assert renyi.petz_divergence(ket(1, 0), ket(0, 1), 0.5) == math.inf

    def test_matches_fractional_power(self, rng):
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        for a in (0.3, 0.7):
            assert renyi.petz_divergence(rho, sigma, a) == pytest.approx(petz_oracle(rho, sigma, a), abs=1e-9)


class TestSandwiched:
    def test_self(self, rng):
        rho = random_density_matrix(3, rng)
        assert renyi.sandwiched_q(rho, rho, 0.6) == pytest.approx(1.0, abs=1e-12)

    def test_commuting_equals_petz(self, rng):
        rho, sigma = commuting_pair(3, rng)
        assert renyi.sandwiched_q(rho, sigma, 0.7) == pytest.approx(renyi.petz_q(rho, sigma, 0.7), abs=1e-12)

    def test_strictly_below_petz(self, rng):
        rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
        assert renyi.sandwiched_divergence(rho, sigma, 0.7) < renyi.petz_divergence(rho, sigma, 0.7) - 1e-6

    def test_matches_fractional_power(self, rng):
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        val = renyi.sandwiched_divergence(rho, sigma, 0.65)
        assert val == pytest.approx(sandwiched_oracle(rho, sigma, 0.65), abs=1e-9)


class TestMeasured:
    def test_self(self, rng):
        rho = random_density_matrix(3, rng)
        sol = renyi.measured_q(rho, rho, 0.7)
        assert sol.value == pytest.approx(1.0, abs=1e-10)
        w = np.linalg.eigvalsh(sol.witness)
        assert w[-1] - w[0] <= 1e-6

    def test_classical(self):
        p, q = np.array([0.9, 0.1]), np.array([0.5, 0.5])
        sol = renyi.measured_q(np.diag(p), np.diag(q), 0.5)
        assert sol.value == pytest.approx(math.sqrt(0.45) + math.sqrt(0.05), abs=1e-9)
        assert sol.value == pytest.approx(0.894427, abs=1e-6)
        assert renyi.measured_divergence(np.diag(p), np.diag(q), 0.5) == pytest.approx(0.321928, abs=1e-6)
        assert np.allclose(sol.witness, np.diag((p / q) ** 0.5), atol=1e-6)

    def test_matches_qubit_oracle(self, rng):
        for _ in range(5):
            rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
            val = renyi.measured_q(rho, sigma, 0.7).value
            assert abs(val - renyi.measured_q_qubit_oracle(rho, sigma, 0.7, grid=720)) <= 1e-4

    def test_nonconvergence_carries_best(self, rng):
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        with pytest.raises(ConvergenceError) as info:
            renyi.measured_q(rho, sigma, 0.6, tol=1e-30, max_iter=3)
        assert info.value.best.value > 0

    def test_gradient_finite_difference(self, rng):
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        h = random_hermitian(3, rng) * 0.3
        _, g = renyi.measured_objective(h, rho, sigma, 0.7)
        for _ in range(20):
            e = random_hermitian(3, rng)
            e /= np.linalg.norm(e)
            fp = renyi.measured_objective(h + 1e-5 * e, rho, sigma, 0.7)[0]
            fm = renyi.measured_objective(h - 1e-5 * e, rho, sigma, 0.7)[0]
            fd = (fp - fm) / 2e-5
            an = np.trace(g @ e).real
            assert abs(fd - an) <= 1e-5 * max(abs(an), 1e-3)

    @given(seeds, orders)
    def test_convex_along_segments(self, seed, alpha):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
        y0, y1 = (random_density_matrix(3, rng) + 0.05 * np.eye(3) for _ in range(2))

        def f(y):
            return renyi.measured_objective(sla.logm(y), rho, sigma, alpha)[0]

        for t in (0.25, 0.5, 0.75):
            assert f((1 - t) * y0 + t * y1) <= (1 - t) * f(y0) + t * f(y1) + 1e-9


class TestQubitOracle:
    def test_equal_states(self, rng):
        rho = random_density_matrix(2, rng)
        assert renyi.measured_q_qubit_oracle(rho, rho, 0.6, grid=30) == pytest.approx(1.0, abs=1e-12)

    def test_classical_grid_point(self):
        p, q = np.array([0.8, 0.2]), np.array([0.3, 0.7])
        val = renyi.measured_q_qubit_oracle(np.diag(p), np.diag(q), 0.6, grid=60)
        assert val == pytest.approx(np.sum(p ** 0.6 * q ** 0.4), abs=1e-12)

    def test_grid_convergence(self, rng):
        rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
        a = renyi.measured_q_qubit_oracle(rho, sigma, 0.75, grid=720)
        b = renyi.measured_q_qubit_oracle(rho, sigma, 0.75, grid=180)
        assert abs(a - b) <= 1e-5

    def test_rejects_qutrit(self):
        with pytest.raises(DimensionError):
            renyi.measured_q_qubit_oracle(np.eye(3) / 3, np.eye(3) / 3, 0.5)


class TestProperties:
    @given(seeds, orders)
    def test_ordering_chain(self, seed, alpha):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 4))
        rho, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
        dm, ds, dp = (renyi.divergence(rho, sigma, alpha, k) for k in KINDS[::-1])
        assert dm <= ds + 1e-6
        assert ds <= dp + 1e-9

    @given(seeds, orders)
    def test_commuting_collapse(self, seed, alpha):
        rho, sigma = commuting_pair(3, np.random.default_rng(seed))
        dp = renyi.divergence(rho, sigma, alpha, "petz")
        assert abs(renyi.divergence(rho, sigma, alpha, "sandwiched") - dp) <= 1e-10
        assert abs(renyi.divergence(rho, sigma, alpha, "measured") - dp) <= 1e-6
        p, q = np.linalg.eigvalsh(rho), np.diag(np.linalg.eigh(rho)[1].conj().T @ sigma @ np.linalg.eigh(rho)[1]).real
        assert dp == pytest.approx(classical_renyi(p, q, alpha), abs=1e-9)

    @given(seeds, orders, st.sampled_from(KINDS))
    def test_pinching_data_processing(self, seed, alpha, kind):
        rng = np.random.default_rng(seed)
        rho, sigma, ref = (random_density_matrix(3, rng) for _ in range(3))
        lhs = renyi.divergence(pinch(rho, ref), pinch(sigma, ref), alpha, kind)
        assert lhs <= renyi.divergence(rho, sigma, alpha, kind) + 1e-8

    @given(seeds, orders, st.sampled_from(KINDS), st.floats(0.1, 10.0))
    def test_scaling(self, seed, alpha, kind, c):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
        lhs = renyi.divergence(rho, c * sigma, alpha, kind)
        assert lhs == pytest.approx(renyi.divergence(rho, sigma, alpha, kind) - math.log2(c), abs=1e-8)
