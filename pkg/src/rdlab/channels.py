"""Classical-quantum channels, Rényi mutual informations and divergence radii.

For ``alpha < 1`` every quantity here is the maximum of a concave functional
``Q`` of a density matrix ``sigma``:

* mutual information ``I(A;B) = min_sigma D(rho_AB || rho_A x sigma)``,
* divergence radius ``chi(W) = min_sigma max_x D(rho_x || sigma)``,
* channel mutual information ``I(W) = max_P I(X;B)``.

The radius is solved on the ``sigma`` side with a softmin smoothing of the
pointwise minimum. The channel mutual information is solved on the input
side: ``g(P) = max_sigma sum_x P(x) Q(rho_x || sigma)`` is convex in ``P`` and
is minimised over the simplex. The two routes are independent, so comparing
them checks both solvers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from scipy import optimize

from ._solvers import maximize_density, minimize_simplex, project_density
from .exceptions import ConvergenceError, DimensionError, StructuralError
from .linalg import (
    HermitianOperator,
    _eigh,
    _from_eig,
    _mpow,
    _pack,
    _power_kernel,
    _ptrace,
    _support_basis,
    _unpack,
    _unwrap,
    permute_subsystems,
    support_cutoff,
)
from .renyi import KINDS, _petz_q, _sandwiched_q, _to_divergence, measured_q
from .utils.validation import MAX_DIM, check_alpha, check_density_matrix, check_probability_vector, check_states

# stopping rule on the concave Q functional (Frank-Wolfe gap)
Q_TOL = 1e-10
OUTER_MAX_ITER = 500
# iteration cap and gradient tolerance of each warm-started inner solve for the
# measured kind; the outer certificate is only as sharp as the inner witness
INNER_MAX_ITER = 400
INNER_GRAD_TOL = 1e-11
MAX_LETTERS = 8


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


@dataclass(frozen=True)
class CQChannel:
    """Classical-quantum channel: one density operator per input letter.

    Parameters
    ----------
    alphabet : sequence
        Distinct letter labels, in order.
    states : array_like, shape (n_letters, d, d)
        ``states[i]`` is the output state for ``alphabet[i]``.
    """

    alphabet: tuple
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        states = check_states(self.states)
        alphabet = tuple(self.alphabet)
        if len(alphabet) != states.shape[0]:
            raise StructuralError(f"{len(alphabet)} labels for {states.shape[0]} states")
        if len(set(alphabet)) != len(alphabet):
            raise StructuralError("alphabet labels must be distinct")
        states.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_states(cls, states, alphabet=None):
        states = list(states)
        if alphabet is None:
            alphabet = tuple(range(len(states)))
        return cls(tuple(alphabet), states)

    @property
    def size(self):
        return len(self.alphabet)

    @property
    def dim(self):
        return self.states.shape[1]

    def index(self, label):
        return self.alphabet.index(label)

    def output_state(self, P):
        """Average output ``sum_x P(x) rho_x``."""
        P = check_probability_vector(P, self.size)
        return np.tensordot(P, self.states, axes=1)

    def is_commuting(self, atol=1e-10):
        s = self.states
        return all(
            np.abs(s[i] @ s[j] - s[j] @ s[i]).max() <= atol
            for i in range(self.size)
            for j in range(i + 1, self.size)
        )

    def stochastic_matrix(self, atol=1e-10):
        """Row-stochastic matrix of a commuting channel in a common eigenbasis.

        Raises ValueError when the states do not commute.
        """
        if not self.is_commuting(atol):
            raise ValueError("channel states do not commute")
        # a generic combination separates the joint eigenspaces
        weights = np.linspace(1.0, 2.0, self.size) ** 0.5
        _, u = _eigh(np.tensordot(weights, self.states, axes=1))
        rows = np.array([np.diag(u.conj().T @ s @ u).real for s in self.states])
        return np.clip(rows, 0.0, None)


def joint_state(W, P):
    """cq state ``sum_x P(x) |x><x| (x) rho_x`` with factors ``(|X|, d)``."""
    P = check_probability_vector(P, W.size)
    n, d = W.size, W.dim
    m = np.zeros((n * d, n * d), dtype=complex)
    for x in range(n):
        m[x * d:(x + 1) * d, x * d:(x + 1) * d] = P[x] * W.states[x]
    return HermitianOperator(m, (n, d))


# Q functionals and their gradients in the second argument ------------------


class _QTerm:
    """``tau -> Q(rho || tau)`` with its gradient, for one fixed ``rho``.

    The measured kind keeps the last variational witness as a warm start, so
    an instance must not be shared between threads.
    """

    def __init__(self, rho, alpha, kind, inner_max_iter=INNER_MAX_ITER):
        self.rho = rho
        self.alpha = alpha
        self.kind = _check_kind(kind)
        self.inner_max_iter = inner_max_iter
        self.h = None
        self.inner_gradient = 0.0
        if kind == "petz":
            self.rho_a = _mpow(rho, alpha)
        elif kind == "sandwiched":
            self.rho_half = _mpow(rho, 0.5)

    def __call__(self, tau, need_grad=True):
        a = self.alpha
        if self.kind == "measured":
            sol = measured_q(self.rho, tau, a, tol=INNER_GRAD_TOL, max_iter=self.inner_max_iter, h0=self.h,
                             strict=False)
            self.h = sol.log_witness
            self.inner_gradient = sol.gradient_norm
            return sol.value, (1.0 - a) * sol.witness
        w, u = _eigh(tau)
        w = np.maximum(w, support_cutoff(w))
        if self.kind == "petz":
            rt = u.conj().T @ self.rho_a @ u
            q = float(np.sum(np.diag(rt).real * w ** (1.0 - a)))
            if not need_grad:
                return q, None
            return q, u @ (_power_kernel(w, 1.0 - a, positive=True) * rt) @ u.conj().T
        r = (1.0 - a) / a
        s = self.rho_half
        z = s @ _from_eig(w ** r, u) @ s
        wz, uz = _eigh(0.5 * (z + z.conj().T))
        on = wz > support_cutoff(wz)
        q = float(np.sum(wz[on] ** a))
        if not need_grad:
            return q, None
        zp = (uz[:, on] * wz[on] ** (a - 1.0)) @ uz[:, on].conj().T
        m = u.conj().T @ (s @ zp @ s) @ u
        return q, a * (u @ (_power_kernel(w, r, positive=True) * m) @ u.conj().T)


def _split_dims(rho_ab, dims):
    m, factors = _unwrap(rho_ab)
    dims = tuple(dims) if dims is not None else factors
    if not dims or len(dims) != 2 or dims[0] * dims[1] != m.shape[0]:
        raise StructuralError(f"need a bipartite split [dA, dB], got {dims}")
    return check_density_matrix(m, "rho_AB"), int(dims[0]), int(dims[1])


class _MutualInfoObjective:
    """``sigma -> Q(rho_AB || rho_A (x) sigma)`` after compressing A to supp(rho_A)."""

    def __init__(self, rho_ab, da, db, alpha, kind, inner_max_iter=INNER_MAX_ITER):
        rho_a = _ptrace(rho_ab, (da, db), [0])
        v, wa = _support_basis(rho_a)
        k = wa.size
        iso = np.kron(v, np.eye(db))
        self.rho = iso.conj().T @ rho_ab @ iso
        self.rho_a = np.diag(wa).astype(complex)
        self.dims = (k, db)
        self.alpha = alpha
        self.kind = kind
        if kind == "petz":
            # Q = tr[X sigma^(1-alpha)], X = tr_A[rho^alpha (rho_A^(1-alpha) (x) 1)]
            ra = _mpow(self.rho, alpha)
            wpow = np.kron(np.diag(wa ** (1.0 - alpha)), np.eye(db))
            x = _ptrace(ra @ wpow, self.dims, [1])
            self.x = 0.5 * (x + x.conj().T)
        else:
            self.term = _QTerm(self.rho, alpha, kind, inner_max_iter)
            self.lift = np.kron(np.diag(np.sqrt(wa)), np.eye(db))

    def __call__(self, sigma, need_grad=True):
        a = self.alpha
        if self.kind == "petz":
            w, u = _eigh(sigma)
            w = np.maximum(w, support_cutoff(w))
            xt = u.conj().T @ self.x @ u
            q = float(np.sum(np.diag(xt).real * w ** (1.0 - a)))
            if not need_grad:
                return q, None
            return q, u @ (_power_kernel(w, 1.0 - a, positive=True) * xt) @ u.conj().T
        tau = np.kron(self.rho_a, sigma)
        q, g = self.term(tau, need_grad)
        if g is None:
            return q, None
        # adjoint of sigma -> rho_A (x) sigma
        gs = _ptrace(self.lift @ g @ self.lift, self.dims, [1])
        return q, 0.5 * (gs + gs.conj().T)

    def marginal_b(self):
        return _ptrace(self.rho, self.dims, [1])


@dataclass
class InfoSolution:
    """Optimum of a concave ``Q`` program together with its certificate.

    ``q`` is the attained value and ``gap`` bounds ``max Q - q``; ``value``
    is the corresponding quantity in bits.
    """

    value: float
    sigma: np.ndarray
    q: float
    gap: float
    iterations: int
    converged: bool


def _finish(res, alpha, what, strict):
    sol = InfoSolution(_to_divergence(res.value, alpha), res.x, res.value, res.gap, res.iterations, res.converged)
    if strict and not res.converged:
        raise ConvergenceError(
            f"{what}: gap {res.gap:.3g} above tolerance after {res.iterations} iterations", best=sol
        )
    return sol


def mutual_info_solution(rho_ab, alpha, kind="sandwiched", dims=None, tol=Q_TOL, max_iter=OUTER_MAX_ITER,
                         sigma0=None, method="projected", strict=True, inner_max_iter=INNER_MAX_ITER):
    """Rényi mutual information with solver diagnostics; see :func:`mutual_info`."""
    alpha = check_alpha(alpha)
    rho, da, db = _split_dims(rho_ab, dims)
    obj = _MutualInfoObjective(rho, da, db, alpha, _check_kind(kind), inner_max_iter)
    start = obj.marginal_b() if sigma0 is None else _unwrap(sigma0)[0]
    res = maximize_density(obj, start, tol=tol, max_iter=max_iter, method=method)
    return _finish(res, alpha, "mutual_info", strict)


def mutual_info(rho_ab, alpha, kind="sandwiched", dims=None, **opts):
    """Rényi mutual information ``min_sigma D(rho_AB || rho_A (x) sigma)`` in bits.

    Parameters
    ----------
    rho_ab : HermitianOperator or array_like
        Bipartite state; the split comes from its factors or from ``dims``.
    alpha : float
        Order in ``[1/2, 1)``.
    kind : {"petz", "sandwiched", "measured"}

    Returns
    -------
    value : float
    sigma : ndarray
        The optimising state on ``B``.
    """
    sol = mutual_info_solution(rho_ab, alpha, kind, dims, **opts)
    return sol.value, sol.sigma


# Divergence radius ------------------------------------------------------------


def _letter_terms(W, alpha, kind, inner_max_iter=INNER_MAX_ITER):
    return [_QTerm(np.array(s), alpha, kind, inner_max_iter) for s in W.states]


def _evaluate(terms, sigma, need_grad=True):
    out = [t(sigma, need_grad) for t in terms]
    return np.array([o[0] for o in out]), [o[1] for o in out]


class _WeightedSum:
    """``sigma -> sum_x P(x) Q_x(sigma)``; letters with ``P(x) = 0`` are skipped."""

    def __init__(self, terms, P):
        self.terms = terms
        self.P = P
        self.last = None

    def __call__(self, sigma, need_grad=True):
        on = [i for i, p in enumerate(self.P) if p > 0]
        q = np.full(len(self.terms), np.nan)
        val = 0.0
        grad = 0.0
        for i in on:
            qi, gi = self.terms[i](sigma, need_grad)
            q[i] = qi
            val += self.P[i] * qi
            if need_grad:
                grad = grad + self.P[i] * gi
        self.last = q
        return val, (grad if need_grad else None)


def _weighted_max(terms, P, sigma0, tol, max_iter):
    fun = _WeightedSum(terms, P)
    return maximize_density(fun, sigma0, tol=tol, max_iter=max_iter)


class _Epigraph:
    """Cached constraint values ``Q_x(sigma(X)) - t`` for the radius program.

    The center is parameterised as ``sigma = X^2 / tr X^2`` with ``X``
    Hermitian, which reaches singular centers without a barrier.
    """

    def __init__(self, terms, d):
        self.terms = terms
        self.d = d
        self.key = None

    def sigma(self, z):
        x = _unpack(z[:-1], self.d)
        x2 = x @ x
        return x, x2 / np.trace(x2).real, np.trace(x2).real

    def __call__(self, z):
        key = z.tobytes()
        if key != self.key:
            x, sigma, s = self.sigma(z)
            q, grads = _evaluate(self.terms, sigma)
            eye = np.eye(self.d)
            rows = []
            for g in grads:
                gm = g - np.vdot(g, sigma).real * eye
                rows.append(_pack((x @ gm + gm @ x) / s))
            self.key, self.q, self.jac, self.center = key, q, np.array(rows), sigma
        return self

    def values(self, z):
        return self(z).q - z[-1]

    def jacobian(self, z):
        j = self(z).jac
        return np.hstack([j, -np.ones((j.shape[0], 1))])


def _kkt_weights(jac, q, tol):
    """Letter weights ``pi`` on the simplex minimising ``||sum_x pi_x grad Q_x||``.

    Letters whose value exceeds the minimum by more than ``tol`` are
    inactive and get weight zero.
    """
    active = np.flatnonzero(q <= q.min() + tol)
    pi = np.zeros(q.size)
    if active.size == 1:
        pi[active] = 1.0
        return pi
    j = jac[active].T
    scale = max(float(np.abs(j).max()), 1e-300)
    a = np.vstack([j / scale, 1e3 * np.ones((1, active.size))])
    b = np.concatenate([np.zeros(j.shape[0]), [1e3]])
    w, _ = optimize.nnls(a, b)
    if w.sum() <= 0:
        w = np.ones(active.size)
    pi[active] = w / w.sum()
    return pi


@dataclass
class RadiusSolution(InfoSolution):
    """Radius optimum; ``weights`` are the dual letter weights of the certificate."""

    weights: np.ndarray = None


def divergence_radius_solution(W, alpha, kind="sandwiched", tol=1e-7, max_iter=OUTER_MAX_ITER,
                               sigma0=None, strict=True, inner_max_iter=INNER_MAX_ITER):
    """Divergence radius with solver diagnostics; see :func:`divergence_radius`.

    Solves ``max t`` subject to ``Q_x(sigma) >= t`` for every letter with
    SLSQP. Dual weights ``pi`` are recovered from the stationarity condition
    and ``U = max_sigma sum_x pi_x Q_x(sigma)`` is computed separately; since
    ``U`` bounds the optimum from above and ``min_x Q_x(sigma)`` from below,
    ``gap = U - min_x Q_x(sigma)`` certifies the returned center.
    The Petz kind also accepts orders in ``(0, 1/2)``.
    """
    alpha = check_alpha(alpha, low=1e-6 if kind == "petz" else 0.5)
    terms = _letter_terms(W, alpha, _check_kind(kind), inner_max_iter)
    n, d = W.size, W.dim
    start = W.output_state(np.full(n, 1.0 / n)) if sigma0 is None else _unwrap(sigma0)[0]
    start = project_density(start)
    epi = _Epigraph(terms, d)
    q0, _ = _evaluate(terms, start, need_grad=False)
    z0 = np.concatenate([_pack(_mpow(start, 0.5)), [q0.min()]])
    res = optimize.minimize(
        lambda z: (-z[-1], np.concatenate([np.zeros(z.size - 1), [-1.0]])),
        z0, jac=True, method="SLSQP",
        constraints=[{"type": "ineq", "fun": epi.values, "jac": epi.jacobian}],
        options={"ftol": 1e-15, "maxiter": max_iter},
    )
    epi(res.x)
    sigma = project_density(epi.center)
    q, grads = _evaluate(terms, sigma)
    lo = float(q.min())
    x = _mpow(sigma, 0.5)
    eye = np.eye(d)
    jac = np.array([_pack(x @ (g - np.vdot(g, sigma).real * eye) + (g - np.vdot(g, sigma).real * eye) @ x)
                    for g in grads])
    pi = _kkt_weights(jac, q, max(1e3 * tol, 1e-6 * abs(lo)))
    cert = _weighted_max(terms, pi, sigma, 0.1 * tol, OUTER_MAX_ITER)
    upper = cert.value + cert.gap
    gap = max(upper - lo, 0.0)
    sol = RadiusSolution(_to_divergence(lo, alpha), sigma, lo, gap, int(res.nit) + cert.iterations,
                         gap <= tol, pi)
    if strict and not sol.converged:
        raise ConvergenceError(f"divergence_radius: certificate gap {gap:.3g} above {tol:.3g}", best=sol)
    return sol


def divergence_radius(W, alpha, kind="sandwiched", **opts):
    """Rényi divergence radius ``min_sigma max_x D(rho_x || sigma)`` in bits.

    Returns the value and the optimal center ``sigma``.
    """
    sol = divergence_radius_solution(W, alpha, kind, **opts)
    return sol.value, sol.sigma


# Channel mutual information ----------------------------------------------------


@dataclass
class ChannelInfoSolution:
    """Optimum over input distributions.

    ``gap`` is the simplex Frank-Wolfe gap ``g(P) - min_x Q_x(sigma)``, which
    bounds ``g(P) - min_P g`` for the convex function
    ``g(P) = max_sigma sum_x P(x) Q_x(sigma)``.
    """

    value: float
    P: np.ndarray
    sigma: np.ndarray
    q: float
    letter_q: np.ndarray
    gap: float
    iterations: int
    converged: bool


def channel_mutual_info_solution(W, alpha, kind="sandwiched", tol=1e-7, max_iter=200, inner_tol=None,
                                 strict=True, inner_max_iter=INNER_MAX_ITER):
    """Channel mutual information with solver diagnostics; see :func:`channel_mutual_info`.

    For a cq state ``Q(rho_XB || rho_X (x) sigma) = sum_x P(x) Q_x(sigma)``
    for all three kinds, so ``g(P)`` is evaluated letter by letter with warm
    starts. Its gradient is ``(Q_x(sigma*(P)))_x`` where ``sigma*(P)`` is the
    inner maximiser.
    """
    alpha = check_alpha(alpha)
    _check_kind(kind)
    if W.size > MAX_LETTERS:
        raise DimensionError(f"channel_mutual_info supports at most {MAX_LETTERS} letters")
    inner_tol = 0.01 * tol if inner_tol is None else inner_tol
    terms = _letter_terms(W, alpha, kind, inner_max_iter)
    cache = {"sigma": W.output_state(np.full(W.size, 1.0 / W.size))}

    def g(P):
        res = _weighted_max(terms, P, cache["sigma"], inner_tol, OUTER_MAX_ITER)
        cache["sigma"] = res.x
        q, _ = _evaluate(terms, res.x, need_grad=False)
        cache[P.tobytes()] = (res, q)
        return res.value, q

    P0 = np.full(W.size, 1.0 / W.size)
    res = minimize_simplex(g, P0, tol=tol, max_iter=max_iter)
    inner, q = cache[res.x.tobytes()]
    value = _to_divergence(res.value, alpha)
    out = ChannelInfoSolution(value, res.x, inner.x, res.value, q, res.gap, res.iterations, res.converged)
    if strict and not res.converged:
        raise ConvergenceError(f"channel_mutual_info: gap {res.gap:.3g} above {tol:.3g}", best=out)
    return out


def channel_mutual_info(W, alpha, kind="sandwiched", **opts):
    """Rényi channel mutual information ``max_P I(X;B)`` in bits.

    Returns the value and the optimising input distribution.
    """
    sol = channel_mutual_info_solution(W, alpha, kind, **opts)
    return sol.value, sol.P


def check_radius_equals_mi(W, alpha, kind="sandwiched", **opts):
    """Solve the radius and the channel mutual information independently.

    Returns ``(radius, cmi, |radius - cmi|)``.
    """
    radius, _ = divergence_radius(W, alpha, kind, **opts)
    cmi, _ = channel_mutual_info(W, alpha, kind, **opts)
    return radius, cmi, abs(radius - cmi)


# n copies ----------------------------------------------------------------------


def n_copy_measured_mi(rho_ab, alpha, n, dims=None, **opts):
    """Measured mutual information of ``rho_AB^(x)n`` divided by ``n``.

    The copies are regrouped as ``A_1..A_n B_1..B_n`` before solving.
    """
    rho, da, db = _split_dims(rho_ab, dims)
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    if (da * db) ** n > MAX_DIM:
        raise DimensionError(f"(dA dB)^n = {(da * db) ** n} exceeds {MAX_DIM}")
    big = rho
    for _ in range(n - 1):
        big = np.kron(big, rho)
    legs = (da, db) * n
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    big = permute_subsystems(big, perm, legs)
    value, _ = mutual_info(big, alpha, "measured", dims=(da ** n, db ** n), **opts)
    return value / n


# Duality identities ---------------------------------------------------------------


def _purified_register(W, P):
    """``rho_XX'C`` from the purification ``sum_x sqrt(P(x)) |x>|x>|rho_x>_BC``."""
    n, d = W.size, W.dim
    kets = []
    for s in W.states:
        w, u = _eigh(s)
        w = np.clip(w, 0.0, None)
        # |rho_x> = sum_i sqrt(w_i) |u_i>_B |i>_C
        kets.append((u * np.sqrt(w)).reshape(d * d))
    psi = np.zeros((n, n, d, d), dtype=complex)
    for x in range(n):
        psi[x, x] = math.sqrt(P[x]) * kets[x].reshape(d, d)
    # trace out B: rho_{(x x' c), (y y' c')}
    t = np.einsum("abic,dfie->abcdfe", psi, psi.conj())
    return t.reshape(n * n * d, n * n * d)


def duality_identities(W, P, alpha, **opts):
    """Both sides of the two purification duality identities.

    Returns ``(lhs1, rhs1, lhs2, rhs2)`` where

    * ``lhs1 = min_sigma Dpetz_alpha(rho_XB || rho_X (x) sigma)``,
    * ``rhs1 = -Dsandwiched_{1/alpha}(rho_XX'C || rho_X^{-1} (x) rho_X'C)``,
    * ``lhs2 = Dpetz_{2 - 1/alpha}(rho_XB || rho_X (x) rho_B)``,
    * ``rhs2 = -Dpetz_{1/alpha}(rho_XX'C || rho_X^{-1} (x) rho_X'C)``.

    The second arguments on the right are not normalised; the trace formulas
    are applied to them as they stand.
    """
    alpha = check_alpha(alpha)
    if alpha == 0.5:
        raise ValueError("duality identities need alpha in (1/2, 1)")
    P = check_probability_vector(P, W.size)
    if np.any(P <= 0):
        raise ValueError("every letter needs positive probability")
    n, d = W.size, W.dim
    rho_xb = joint_state(W, P)
    lhs1, _ = mutual_info(rho_xb, alpha, "petz", **opts)
    rho_x = np.diag(P).astype(complex)
    rho_b = W.output_state(P)
    beta2 = 2.0 - 1.0 / alpha
    lhs2 = _to_divergence(_petz_q(rho_xb.entries, np.kron(rho_x, rho_b), beta2), beta2)

    reg = _purified_register(W, P)
    rho_xc = _ptrace(reg, (n, n * d), [1])
    second = np.kron(np.diag(1.0 / P).astype(complex), rho_xc)
    beta = 1.0 / alpha
    rhs1 = -_to_divergence(_sandwiched_q(reg, second, beta), beta)
    rhs2 = -_to_divergence(_petz_q(reg, second, beta), beta)
    return lhs1, rhs1, lhs2, rhs2


__all__ = [
    "CQChannel",
    "ChannelInfoSolution",
    "InfoSolution",
    "RadiusSolution",
    "channel_mutual_info",
    "channel_mutual_info_solution",
    "check_radius_equals_mi",
    "divergence_radius",
    "divergence_radius_solution",
    "duality_identities",
    "joint_state",
    "mutual_info",
    "mutual_info_solution",
    "n_copy_measured_mi",
]
