import numpy as np
import pytest

from rdlab import ea
from rdlab.channels import CQChannel, divergence_radius, mutual_info
from rdlab.exceptions import DimensionError, InvalidChannelError

from oracles import ket, random_density_matrix

PAULIS = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def compose(outer, inner):
    return ea.QuantumChannel([a @ b for a in outer.kraus for b in inner.kraus])


def superdense_reduction(N):
    """cq channel of the four Pauli-encoded copies of the maximally entangled output."""
    rho = ea.ea_joint_state(N, np.eye(2) / 2).entries
    return CQChannel.from_states([np.kron(np.eye(2), p) @ rho @ np.kron(np.eye(2), p).conj().T for p in PAULIS])


class TestChannels:
    def test_identity(self, rng):
        rho = random_density_matrix(2, rng)
        assert np.allclose(ea.identity_channel()(rho), rho)

    def test_fully_depolarizing(self, rng):
        assert np.allclose(ea.depolarizing_channel(1.0)(random_density_matrix(2, rng)), np.eye(2) / 2)

    def test_amplitude_damping(self):
        assert np.allclose(ea.amplitude_damping_channel(0.3)(np.diag([0.0, 1.0])), np.diag([0.3, 0.7]))

    def test_not_trace_preserving(self):
        with pytest.raises(InvalidChannelError):
            ea.QuantumChannel([0.5 * np.eye(2)])

    def test_choi_partial_trace(self):
        choi = ea.choi_matrix(ea.amplitude_damping_channel(0.4))
        tr_b = np.einsum("ajbj->ab", choi.reshape(2, 2, 2, 2))
        assert np.allclose(tr_b, np.eye(2))


class TestJointState:
    def test_identity_maximally_entangled(self):
        rho = ea.ea_joint_state(ea.identity_channel(), np.eye(2) / 2)
        assert rho.factors == (2, 2)
        assert np.allclose(rho.entries, ket(1, 0, 0, 1))

    def test_replacer_is_product(self, rng):
        sigma, rho_a = random_density_matrix(2, rng), random_density_matrix(2, rng)
        out = ea.ea_joint_state(ea.replacer_channel(sigma), rho_a).entries
        ref = np.diag(np.linalg.eigvalsh(rho_a))
        assert np.allclose(out, np.kron(ref, sigma), atol=1e-12)
        assert abs(mutual_info(out, 0.7, "sandwiched", dims=(2, 2))[0]) <= 1e-6

    def test_pure_input_is_product(self, rng):
        out = ea.ea_joint_state(ea.amplitude_damping_channel(0.3), ket(1, 1)).entries
        rank = np.sum(np.linalg.svd(out.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4),
                                    compute_uv=False) > 1e-10)
        assert rank == 1


class TestEAMutualInfo:
    def test_replacer(self, rng):
        value, _ = ea.ea_channel_mutual_info(ea.replacer_channel(random_density_matrix(2, rng)), 0.7, starts=0)
        assert abs(value) <= 1e-6

    def test_identity_half(self, rng):
        N = ea.identity_channel()
        value, rho = ea.ea_channel_mutual_info(N, 0.5)
        assert value == pytest.approx(2.0, abs=1e-6)
        assert np.allclose(rho, np.eye(2) / 2, atol=1e-3)
        for _ in range(5):
            tilt = random_density_matrix(2, rng)
            other = 0.9 * np.eye(2) / 2 + 0.1 * tilt
            assert mutual_info(ea.ea_joint_state(N, other), 0.5, "sandwiched")[0] <= value + 1e-9

    @pytest.mark.parametrize("p", [0.2, 0.3])
    def test_dephasing_matches_commuting_reduction(self, p):
        N = ea.dephasing_channel(p)
        value, _ = ea.ea_channel_mutual_info(N, 0.7)
        W = superdense_reduction(N)
        assert W.is_commuting()
        radius, _ = divergence_radius(W, 0.7, "sandwiched")
        assert value == pytest.approx(radius, abs=1e-6)

    def test_data_processing(self, rng):
        N = ea.amplitude_damping_channel(0.3)
        before, _ = ea.ea_channel_mutual_info(N, 0.7, starts=0)
        after, _ = ea.ea_channel_mutual_info(compose(ea.depolarizing_channel(0.4), N), 0.7, starts=0)
        assert after <= before + 1e-6

    def test_analytic_and_random_starts_agree(self):
        N = ea.amplitude_damping_channel(0.3)
        a, _ = ea.ea_channel_mutual_info(N, 0.7, starts=0)
        b, _ = ea.ea_channel_mutual_info(N, 0.7, starts=3, seed=4)
        assert a == pytest.approx(b, abs=1e-6)


class TestPositionBased:
    def test_single_message(self):
        assert ea.position_based_error(ea.identity_channel(), np.eye(2) / 2, 1, 0.7) == pytest.approx(0.0, abs=1e-10)

    def test_replacer(self, rng):
        N = ea.replacer_channel(random_density_matrix(2, rng))
        rho_a = random_density_matrix(2, rng)
        assert ea.position_based_error(N, rho_a, 2, 0.7) == pytest.approx(0.5, abs=1e-10)
        assert ea.theorem3_rhs(N, rho_a, 2, 0.7) >= 1.0 - 1e-9

    def test_identity_below_bound(self):
        N = ea.identity_channel()
        err = ea.position_based_error(N, np.eye(2) / 2, 2, 0.7)
        assert err <= ea.theorem3_rhs(N, np.eye(2) / 2, 2, 0.7) + 1e-6

    def test_single_message_bound(self):
        assert ea.theorem3_rhs(ea.amplitude_damping_channel(0.3), np.eye(2) / 2, 1, 0.7) <= 1.0

    @pytest.mark.parametrize("y_choice", ["power_alpha", "variational"])
    def test_decoder_valid(self, y_choice):
        dec = ea.position_based_decoder(ea.amplitude_damping_channel(0.3), np.eye(2) / 2, 3, 0.7, y_choice)
        assert dec.completeness_error() <= 1e-8
        assert dec.min_eigenvalue() >= -1e-8

    def test_variational_decoder_below_bound(self):
        N = ea.dephasing_channel(0.3)
        err = ea.position_based_error(N, np.eye(2) / 2, 3, 0.7, "variational")
        assert err <= min(1.0, ea.theorem3_rhs(N, np.eye(2) / 2, 3, 0.7)) + 1e-6

    def test_message_symmetry(self, rng):
        N, rho_a = ea.amplitude_damping_channel(0.3), random_density_matrix(2, rng)
        e0 = ea.position_based_error(N, rho_a, 2, 0.7, message=0)
        e1 = ea.position_based_error(N, rho_a, 2, 0.7, message=1)
        assert e0 == pytest.approx(e1, abs=1e-10)

    def test_dimension_ceiling(self):
        with pytest.raises(DimensionError):
            ea.position_based_error(ea.identity_channel(), np.eye(2) / 2, 6, 0.7)
