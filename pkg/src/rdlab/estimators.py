"""scikit-learn style wrappers around the solver-shaped parts of the library.

Inputs ``X`` are stacks of density matrices with shape ``(n, d, d)``; fitted
attributes end in an underscore. The functional API remains the primary
interface; these classes add parameter handling, ``get_params``/``set_params``
and cloning.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .channels import CQChannel, channel_mutual_info_solution, divergence_radius_solution
from .coding import _divide
from .exponents import DEFAULT_ALPHAS, FULL_ALPHAS, _Table, _renyi_prefactor, _sup_curve, hayashi_inner
from .linalg import _mpow
from .utils.validation import check_alpha, check_states


def _channel(X):
    if isinstance(X, CQChannel):
        return X
    return CQChannel.from_states(check_states(X))


class RenyiRadius(BaseEstimator):
    """Divergence radius ``min_sigma max_x D_alpha(rho_x || sigma)`` of a set of states.

    Attributes
    ----------
    radius_ : float
        Radius in bits.
    center_ : ndarray
        Optimal center state.
    weights_ : ndarray
        Dual letter weights certifying the radius.
    certificate_gap_ : float
    """

    def __init__(self, alpha=0.75, kind="sandwiched", tol=1e-7):
        self.alpha = alpha
        self.kind = kind
        self.tol = tol

    def fit(self, X, y=None):
        sol = divergence_radius_solution(_channel(X), self.alpha, self.kind, tol=self.tol)
        self.radius_ = sol.value
        self.center_ = sol.sigma
        self.weights_ = sol.weights
        self.certificate_gap_ = sol.gap
        return self


class ChannelMutualInformation(BaseEstimator):
    """Rényi mutual information of a cq channel maximised over input distributions.

    Attributes
    ----------
    value_ : float
    input_distribution_ : ndarray
    center_ : ndarray
    """

    def __init__(self, alpha=0.75, kind="sandwiched", tol=1e-7):
        self.alpha = alpha
        self.kind = kind
        self.tol = tol

    def fit(self, X, y=None):
        sol = channel_mutual_info_solution(_channel(X), self.alpha, self.kind, tol=self.tol)
        self.value_ = sol.value
        self.input_distribution_ = sol.P
        self.center_ = sol.sigma
        return self


class QuotientPGM(ClassifierMixin, BaseEstimator):
    """Pretty good measurement for a list of codeword states.

    ``fit`` takes the codeword states (and optional labels, one per
    codeword) and builds ``Pi_m = rho_m^alpha / sum_m' rho_m'^alpha`` with the
    logarithmic quotient (``division="log"``) or the symmetric division
    (``division="standard"``). ``predict`` returns the most likely codeword
    label for each input state.

    Attributes
    ----------
    povm_ : ndarray, shape (M, d, d)
    failure_ : ndarray
        Projector onto the kernel of the denominator.
    classes_ : ndarray
    """

    def __init__(self, alpha=0.75, division="log"):
        self.alpha = alpha
        self.division = division

    def fit(self, X, y=None):
        if self.division not in ("log", "standard"):
            raise ValueError(f"division must be 'log' or 'standard', got {self.division!r}")
        alpha = check_alpha(self.alpha, include_high=True)
        states = check_states(X)
        ys = np.stack([_mpow(s, alpha) for s in states])
        self.povm_, self.failure_ = _divide(ys, ys.sum(axis=0), self.division)
        self.classes_ = np.arange(len(states)) if y is None else np.asarray(y)
        if self.classes_.shape != (len(states),):
            raise ValueError("need exactly one label per codeword state")
        return self

    def predict_proba(self, X):
        """Outcome probabilities ``tr[rho Pi_m]``; rows sum to one minus the failure mass."""
        check_is_fitted(self, "povm_")
        states = check_states(X)
        return np.clip(np.einsum("nij,mji->nm", states, self.povm_).real, 0.0, None)

    def predict(self, X):
        check_is_fitted(self, "povm_")
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class ErrorExponentCurve(BaseEstimator):
    """Error-exponent lower bound of a cq channel as a function of the rate.

    ``family`` is ``"new_lower"`` (sandwiched radius), ``"sphere_packing_upper"``
    (Petz radius) or ``"hayashi_lower"``. ``fit`` evaluates the Rényi
    quantity on the order grid; ``predict`` maps rates to exponents.

    Attributes
    ----------
    radii_ : dict
        Cached ``alpha -> chi(alpha)`` values, including refinement points.
    """

    _PREFACTORS = {
        "new_lower": _renyi_prefactor,
        "sphere_packing_upper": _renyi_prefactor,
        "hayashi_lower": lambda a: 1.0 - a,
    }

    def __init__(self, family="new_lower", alphas=None):
        self.family = family
        self.alphas = alphas

    def _grid(self):
        if self.alphas is not None:
            return tuple(self.alphas)
        return DEFAULT_ALPHAS if self.family == "new_lower" else FULL_ALPHAS

    def fit(self, X, y=None):
        if self.family not in self._PREFACTORS:
            raise ValueError(f"unknown family {self.family!r}")
        W = _channel(X)
        if self.family == "hayashi_lower":
            fn = lambda a: hayashi_inner(W, a)[0]
        else:
            kind = "sandwiched" if self.family == "new_lower" else "petz"
            fn = lambda a: divergence_radius_solution(W, a, kind, strict=False).value
        self._table = _Table(fn)
        for a in self._grid():
            self._table(a)
        self.radii_ = self._table.cache
        return self

    def predict(self, rates):
        check_is_fitted(self, "radii_")
        curve = _sup_curve(self._table, np.asarray(rates, dtype=float), self._grid(),
                           self._PREFACTORS[self.family], self.family)
        self.alpha_argmax_ = curve.alpha_argmax
        return curve.values


__all__ = ["ChannelMutualInformation", "ErrorExponentCurve", "QuotientPGM", "RenyiRadius"]
