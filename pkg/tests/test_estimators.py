import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rdlab import coding
from rdlab.channels import CQChannel, channel_mutual_info, divergence_radius
from rdlab.coding import Codebook
from rdlab.estimators import ChannelMutualInformation, ErrorExponentCurve, QuotientPGM, RenyiRadius
from rdlab.exponents import new_lower_bound_curve

from oracles import bsc_states, random_density_matrix


@pytest.fixture
def states(rng):
    return np.stack([random_density_matrix(2, rng) for _ in range(3)])


def test_params_and_clone():
    est = RenyiRadius(alpha=0.6, kind="petz")
    assert est.get_params() == {"alpha": 0.6, "kind": "petz", "tol": 1e-7}
    copy = clone(est.set_params(alpha=0.8))
    assert copy.alpha == 0.8 and not hasattr(copy, "radius_")


def test_radius_matches_function(states):
    est = RenyiRadius(alpha=0.7).fit(states)
    ref, _ = divergence_radius(CQChannel.from_states(states), 0.7)
    assert est.radius_ == pytest.approx(ref, abs=1e-12)
    assert est.certificate_gap_ <= 1e-7


def test_mutual_information_matches_function(states):
    est = ChannelMutualInformation(alpha=0.7).fit(states)
    ref, P = channel_mutual_info(CQChannel.from_states(states), 0.7)
    assert est.value_ == pytest.approx(ref, abs=1e-12)
    assert np.allclose(est.input_distribution_, P)


class TestQuotientPGM:
    def test_matches_decoder(self, states):
        est = QuotientPGM(alpha=0.7).fit(states)
        ref = coding.build_quotient_pgm(CQChannel.from_states(states), Codebook((0, 1, 2)), 0.7)
        assert np.allclose(est.povm_, ref.elements)

    def test_predict_recovers_orthogonal_labels(self):
        X = np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]).astype(complex)
        est = QuotientPGM().fit(X, ["zero", "one"])
        assert list(est.predict(X)) == ["zero", "one"]
        assert est.score(X, ["zero", "one"]) == 1.0

    def test_probabilities_sum_to_one(self, states):
        proba = QuotientPGM(division="standard").fit(states).predict_proba(states)
        assert np.allclose(proba.sum(axis=1), 1.0)

    def test_not_fitted(self, states):
        with pytest.raises(NotFittedError):
            QuotientPGM().predict(states)

    def test_bad_division(self, states):
        with pytest.raises(ValueError):
            QuotientPGM(division="left").fit(states)

    def test_label_count(self, states):
        with pytest.raises(ValueError):
            QuotientPGM().fit(states, [0, 1])


def test_exponent_curve_matches_function():
    W = CQChannel.from_states(bsc_states())
    rates = np.linspace(0.1, 0.5, 5)
    est = ErrorExponentCurve().fit(np.stack(W.states))
    ref = new_lower_bound_curve(W, rates)
    assert np.allclose(est.predict(rates), ref.values, atol=1e-12)
    assert np.allclose(est.alpha_argmax_, ref.alpha_argmax)


def test_exponent_curve_unknown_family(states):
    with pytest.raises(ValueError):
        ErrorExponentCurve(family="ea_lower").fit(states)
