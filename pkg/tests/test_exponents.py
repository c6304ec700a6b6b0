import math

import numpy as np
import pytest

from rdlab import ea, exponents
from rdlab.channels import CQChannel, divergence_radius
from rdlab.exponents import ExponentCurve

from oracles import bsc_states, ket, random_density_matrix
from test_ea import superdense_reduction

BSC = np.array([[0.9, 0.1], [0.1, 0.9]])
BSC_HALF = 1.0 - 2.0 * math.log2(math.sqrt(0.1) + math.sqrt(0.9))
RATES = np.linspace(0.1, 0.6, 11)


@pytest.fixture(scope="module")
def bsc_curves():
    W = CQChannel.from_states(bsc_states())
    return {
        "new": exponents.new_lower_bound_curve(W, RATES),
        "sphere": exponents.sphere_packing_curve(W, RATES),
        "hayashi": exponents.hayashi_curve(W, RATES),
        "classical": exponents.classical_reference(BSC, RATES),
    }


def test_unknown_family():
    with pytest.raises(ValueError):
        ExponentCurve(np.zeros(1), np.zeros(1), "nope", np.zeros(1))


class TestClassicalReference:
    def test_bsc_half(self):
        assert exponents.classical_radius(BSC, 0.5) == pytest.approx(BSC_HALF, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 0.7, 0.95])
    def test_noiseless(self, alpha):
        assert exponents.classical_radius(np.eye(2), alpha) == pytest.approx(1.0, abs=1e-12)

    def test_noiseless_curve(self):
        curve = exponents.classical_reference(np.eye(2), [0.0, 0.5, 1.0], alphas=(0.5, 0.7))
        assert np.allclose(curve.values, [1.0, 0.5, 0.0], atol=1e-9)

    def test_bsc_zero(self):
        curve = exponents.classical_reference(np.eye(2), [0.2, 0.9, 1.0])
        assert np.all(curve.values[:2] > 0) and curve.values[2] == pytest.approx(0.0, abs=1e-12)

    def test_asymmetric_matches_quantum_solver(self):
        T = np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]])
        W = CQChannel.from_states([np.diag(row).astype(complex) for row in T])
        for alpha in (0.55, 0.8):
            ref, _ = divergence_radius(W, alpha, "petz")
            assert exponents.classical_radius(T, alpha) == pytest.approx(ref, abs=1e-6)

    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError):
            exponents.classical_radius(np.array([[0.5, 0.6], [0.5, 0.5]]), 0.7)


class TestNewLower:
    def test_single_order_grid(self):
        W = CQChannel.from_states(bsc_states())
        curve = exponents.new_lower_bound_curve(W, [0.0], alphas=(0.5,))
        assert curve.values[0] == pytest.approx(BSC_HALF, abs=1e-6)
        assert curve.alpha_argmax[0] == 0.5

    def test_zero_beyond_capacity_proxy(self):
        W = CQChannel.from_states(bsc_states())
        proxy, _ = divergence_radius(W, 0.999, "sandwiched")
        curve = exponents.new_lower_bound_curve(W, [proxy, proxy + 0.1])
        assert np.all(curve.values == 0.0)

    def test_matches_classical(self, bsc_curves):
        assert np.abs(bsc_curves["new"].values - bsc_curves["classical"].values).max() <= 1e-3

    def test_single_letter(self, rng):
        W = CQChannel.from_states([random_density_matrix(2, rng)])
        assert np.allclose(exponents.new_lower_bound_curve(W, [0.0, 0.5]).values, 0.0, atol=1e-9)


class TestSpherePacking:
    def test_coincides_where_argmax_high(self, bsc_curves):
        s, n = bsc_curves["sphere"], bsc_curves["new"]
        high = s.alpha_argmax >= 0.5
        assert high.any()
        assert np.abs(s.values[high] - n.values[high]).max() <= 1e-3

    def test_above_new_lower(self, rng):
        W = CQChannel.from_states([random_density_matrix(2, rng) for _ in range(2)])
        rates = np.linspace(0.0, 0.4, 5)
        s = exponents.sphere_packing_curve(W, rates)
        n = exponents.new_lower_bound_curve(W, rates)
        assert np.all(s.values - n.values >= -1e-3)

    def test_zero_beyond_capacity_proxy(self):
        W = CQChannel.from_states(bsc_states())
        proxy, _ = divergence_radius(W, 0.999, "petz")
        assert exponents.sphere_packing_curve(W, [proxy + 1e-3]).values[0] == 0.0


class TestHayashi:
    def test_single_letter(self, rng):
        W = CQChannel.from_states([random_density_matrix(2, rng)])
        assert np.allclose(exponents.hayashi_curve(W, [0.0, 0.3], alphas=(0.3, 0.6)).values, 0.0, atol=1e-9)

    def test_orthogonal_pure_matches_noiseless_reference(self):
        W = CQChannel.from_states([ket(1, 0), ket(0, 1)])
        rates = [0.0, 0.3, 0.8]
        h = exponents.hayashi_curve(W, rates, alphas=(0.0005, 0.25, 0.5))
        c = exponents.classical_reference(np.eye(2), rates)
        assert np.all(h.values > 0)
        assert np.abs(h.values - c.values).max() <= 1e-3

    def test_inner_is_capacity_like(self):
        value, P = exponents.hayashi_inner(CQChannel.from_states([ket(1, 0), ket(0, 1)]), 0.6)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(P, [0.5, 0.5], atol=1e-6)

    def test_below_new_lower(self, bsc_curves):
        assert np.all(bsc_curves["hayashi"].values <= bsc_curves["new"].values + 1e-9)


class TestEALower:
    def test_replacer(self, rng):
        N = ea.replacer_channel(random_density_matrix(2, rng))
        assert np.allclose(exponents.ea_lower_bound_curve(N, [0.0, 0.5]).values, 0.0, atol=1e-9)

    def test_identity(self):
        curve = exponents.ea_lower_bound_curve(ea.identity_channel(), [0.0, 1.0, 1.9, 2.0, 2.5])
        assert np.all(curve.values[:3] > 0)
        assert np.allclose(curve.values[3:], 0.0, atol=1e-9)

    def test_dephasing_matches_commuting_reduction(self):
        N = ea.dephasing_channel(0.3)
        rates = [0.2, 0.6, 1.0]
        alphas = (0.5, 0.6, 0.7, 0.8, 0.9)
        a = exponents.ea_lower_bound_curve(N, rates, alphas)
        b = exponents.new_lower_bound_curve(superdense_reduction(N), rates, alphas)
        assert np.abs(a.values - b.values).max() <= 1e-5


@pytest.mark.parametrize("name", ["new", "sphere", "hayashi", "classical"])
def test_curve_shape(bsc_curves, name):
    curve = bsc_curves[name]
    v = curve.values
    assert np.all(np.diff(v) <= 1e-12)
    assert np.all(v[:-2] - 2 * v[1:-1] + v[2:] >= -1e-9)
    assert np.all(np.diff(curve.alpha_argmax) >= -1e-9)


class TestCSV:
    def test_empty(self, tmp_path):
        path = tmp_path / "c.csv"
        exponents.emit_csv([], path)
        assert path.read_text() == "rate,family,value,alpha_argmax\n"

    def test_rows_and_round_trip(self, tmp_path, bsc_curves):
        path = tmp_path / "c.csv"
        curve = ExponentCurve(RATES[:3], bsc_curves["new"].values[:3], "new_lower", bsc_curves["new"].alpha_argmax[:3])
        exponents.emit_csv([curve], path, comments=["bsc"])
        rows = exponents.read_csv(path)
        assert len(rows) == 3
        assert [r["value"] for r in rows] == list(curve.values)
        assert [r["alpha_argmax"] for r in rows] == list(curve.alpha_argmax)
        assert [r["rate"] for r in rows] == list(curve.rates)

    def test_rate_order(self, tmp_path):
        curve = ExponentCurve(np.array([0.3, 0.1]), np.array([1.0, 2.0]), "new_lower", np.array([0.5, 0.6]))
        path = tmp_path / "c.csv"
        exponents.emit_csv([curve], path)
        assert [r["rate"] for r in exponents.read_csv(path)] == [0.1, 0.3]
