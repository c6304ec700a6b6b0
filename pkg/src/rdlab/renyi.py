"""Quantum Rényi divergences.

Umegaki relative entropy plus the Petz, sandwiched and measured Rényi
families. Every divergence is reported in bits. For ``alpha < 1`` the
quantities ``Q`` are the trace functionals and ``D = log2(Q) / (alpha - 1)``;
``Q = 0`` (orthogonal arguments) maps to ``D = +inf``.

The measured quantity is computed from its variational form

    Q = inf_{Y > 0}  alpha tr[rho Y^{-r}] + (1 - alpha) tr[sigma Y],
    r = (1 - alpha) / alpha,

minimised over ``Y = exp(H)``. For rank-deficient ``rho`` the infimum is
approached only as ``Y`` degenerates and convergence is slow. For qubits a brute-force
search over projective measurements gives an independent value.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .exceptions import ConvergenceError, DimensionError
from .linalg import (
    _eigh,
    _exp_kernel,
    _from_eig,
    _mpow,
    _pack,
    _support_basis,
    _unpack,
    _unwrap,
    support_cutoff,
)
from .utils.validation import check_alpha

KINDS = ("petz", "sandwiched", "measured")

# Armijo constant and default stopping rule of the variational solver
ARMIJO = 1e-4
GRAD_TOL = 1e-9
MAX_ITER = 5000


@dataclass
class VariationalSolution:
    """Result of the measured-divergence variational program.

    ``log_witness`` is ``H`` with ``witness = exp(H)``; pass it back as
    ``h0`` to warm-start a nearby problem.
    """

    value: float
    witness: np.ndarray
    iterations: int
    gradient_norm: float
    log_witness: np.ndarray = None

    @property
    def divergence(self):
        return self.value


def _order(alpha):
    alpha = float(alpha)
    if not alpha > 0 or alpha == 1.0:
        raise ValueError(f"Rényi order must be positive and != 1, got {alpha}")
    return alpha


def _to_divergence(q, alpha):
    if q <= 0.0:
        return math.inf
    return math.log2(q) / (alpha - 1.0)


def _supported(rho, sigma):
    """True when supp(rho) is contained in supp(sigma)."""
    v, w = _support_basis(sigma)
    tr = np.trace(rho).real
    inside = np.trace(v.conj().T @ rho @ v).real if w.size else 0.0
    return tr - inside <= 1e-10 * max(abs(tr), 1e-300)


def umegaki(rho, sigma):
    """Umegaki relative entropy ``tr[rho (log2 rho - log2 sigma)]``."""
    rho, _ = _unwrap(rho)
    sigma, _ = _unwrap(sigma)
    if not _supported(rho, sigma):
        return math.inf
    wr, ur = _eigh(rho)
    on = wr > support_cutoff(wr)
    h = float(np.sum(wr[on] * np.log2(wr[on])))
    v, ws = _support_basis(sigma)
    log_sigma = (v * np.log2(ws)) @ v.conj().T
    return h - float(np.trace(rho @ log_sigma).real)


# Petz -----------------------------------------------------------------------


def _petz_q(rho, sigma, alpha):
    if alpha > 1 and not _supported(rho, sigma):
        return math.inf
    return float(np.trace(_mpow(rho, alpha) @ _mpow(sigma, 1.0 - alpha)).real)


def petz_q(rho, sigma, alpha):
    """Petz trace functional ``tr[rho^alpha sigma^(1 - alpha)]``.

    Powers are taken on supports. For ``alpha > 1`` the functional is
    ``inf`` unless supp(rho) lies inside supp(sigma).
    """
    alpha = _order(alpha)
    return _petz_q(_unwrap(rho)[0], _unwrap(sigma)[0], alpha)


def petz_divergence(rho, sigma, alpha):
    alpha = _order(alpha)
    return _to_divergence(petz_q(rho, sigma, alpha), alpha)


# Sandwiched -----------------------------------------------------------------


def _sandwiched_q(rho, sigma, alpha):
    if alpha > 1 and not _supported(rho, sigma):
        return math.inf
    s = _mpow(sigma, (1.0 - alpha) / (2.0 * alpha))
    inner = s @ rho @ s
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    w = w[w > support_cutoff(w)]
    return float(np.sum(w ** alpha))


def sandwiched_q(rho, sigma, alpha):
    """Sandwiched functional ``tr[(sigma^s rho sigma^s)^alpha]``, ``s = (1-alpha)/(2 alpha)``."""
    alpha = _order(alpha)
    return _sandwiched_q(_unwrap(rho)[0], _unwrap(sigma)[0], alpha)


def sandwiched_divergence(rho, sigma, alpha):
    alpha = _order(alpha)
    return _to_divergence(sandwiched_q(rho, sigma, alpha), alpha)


# Measured -------------------------------------------------------------------


def _objective(h, rho, sigma, alpha, need_grad=True):
    r = (1.0 - alpha) / alpha
    w, u = _eigh(h)
    rt = u.conj().T @ rho @ u
    st = u.conj().T @ sigma @ u
    f = alpha * float(np.sum(np.diag(rt).real * np.exp(-r * w)))
    f += (1.0 - alpha) * float(np.sum(np.diag(st).real * np.exp(w)))
    if not need_grad:
        return f, None
    g = alpha * _exp_kernel(w, -r) * rt + (1.0 - alpha) * _exp_kernel(w, 1.0) * st
    g = u @ g @ u.conj().T
    return f, 0.5 * (g + g.conj().T)


def measured_objective(h, rho, sigma, alpha):
    """Variational objective and its gradient with respect to ``H``.

    ``f(H) = alpha tr[rho exp(-r H)] + (1 - alpha) tr[sigma exp(H)]``. The
    gradient is the Hermitian matrix ``G`` with ``df = Re tr[G dH]``.
    """
    return _objective(np.asarray(h, dtype=complex), _unwrap(rho)[0], _unwrap(sigma)[0], alpha)


def _initial_h(rho, sigma, alpha):
    # exact optimum of the problem after pinching rho in sigma's eigenbasis
    q, v = _eigh(sigma)
    p = np.diag(v.conj().T @ rho @ v).real
    floor = 1e-12
    p = np.maximum(p, floor * max(p.max(), 1e-300))
    q = np.maximum(q, floor * max(q.max(), 1e-300))
    h = np.clip(alpha * (np.log(p) - np.log(q)), -30.0, 30.0)
    return _from_eig(h, v)


def _quasi_newton(rho, sigma, alpha, h0, tol, max_iter):
    d = h0.shape[0]

    def fg(x):
        f, g = _objective(_unpack(x, d), rho, sigma, alpha)
        return f, _pack(g)

    x0 = _pack(h0)
    res = optimize.minimize(
        fg, x0, jac=True, method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": tol / math.sqrt(x0.size), "ftol": 0.0, "maxcor": 30},
    )
    return _unpack(res.x, d), int(res.nit)


def _minimise(rho, sigma, alpha, h0, tol, max_iter):
    h, it = _quasi_newton(rho, sigma, alpha, h0, tol, max_iter)
    h, f, gnorm, more = _descend(rho, sigma, alpha, h, tol, max_iter - it)
    return h, f, gnorm, it + more


def _descend(rho, sigma, alpha, h0, tol, max_iter):
    h = h0
    f, g = _objective(h, rho, sigma, alpha)
    gnorm = np.linalg.norm(g)
    step = 1.0
    prev = None
    it = 0
    while gnorm > tol and it < max_iter:
        it += 1
        if prev is not None:
            dh, dg = h - prev[0], g - prev[1]
            curv = float(np.vdot(dh, dg).real)
            if curv > 0:
                step = float(np.vdot(dh, dh).real) / curv
        step = min(max(step, 1e-12), 1e12)
        g2 = gnorm ** 2
        # near the optimum the Armijo decrease falls below the rounding of f
        slack = 8 * np.finfo(float).eps * abs(f)
        while True:
            trial = h - step * g
            ft, _ = _objective(trial, rho, sigma, alpha, need_grad=False)
            if ft <= f - ARMIJO * step * g2 + slack or step < 1e-14:
                break
            step *= 0.5
        if step < 1e-14:
            break
        prev = (h, g)
        h = trial
        f, g = _objective(h, rho, sigma, alpha)
        gnorm = np.linalg.norm(g)
    return h, f, gnorm, it


def measured_q(rho, sigma, alpha, tol=GRAD_TOL, max_iter=MAX_ITER, h0=None, strict=True):
    """Measured Rényi functional from the variational program.

    Minimises ``f(exp(H))`` with a limited-memory quasi-Newton method, then
    polishes with Barzilai-Borwein-scaled gradient steps and Armijo
    backtracking until the gradient norm drops below ``tol``. ``max_iter``
    bounds the iterations of both phases together. The
    returned value is an upper estimate of the infimum that converges from
    above. When ``max_iter`` is exhausted a ConvergenceError carrying the best
    :class:`VariationalSolution` is raised (unless ``strict`` is false).

    Parameters
    ----------
    rho, sigma : array_like
        Density operators of equal dimension.
    alpha : float
        Order in ``[1/2, 1)``.
    h0 : array_like, optional
        Starting log-witness; defaults to the commuting-case optimum after
        pinching ``rho`` in the eigenbasis of ``sigma``.
    """
    alpha = check_alpha(alpha)
    rho, _ = _unwrap(rho)
    sigma, _ = _unwrap(sigma)
    if h0 is None:
        h0 = _initial_h(rho, sigma, alpha)
    h, f, gnorm, it = _minimise(rho, sigma, alpha, np.asarray(h0, dtype=complex), tol, max_iter)
    w, u = _eigh(h)
    sol = VariationalSolution(f, _from_eig(np.exp(w), u), it, float(gnorm), h)
    if gnorm > tol and strict:
        raise ConvergenceError(
            f"measured_q: gradient norm {gnorm:.3g} > {tol:.3g} after {it} iterations", best=sol
        )
    return sol


def measured_divergence(rho, sigma, alpha, **opts):
    alpha = check_alpha(alpha)
    return _to_divergence(measured_q(rho, sigma, alpha, **opts).value, alpha)


def _golden(f, a, b, tol=1e-12, max_iter=200):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _bloch(m):
    return np.array(
        [2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real]
    ), float(np.trace(m).real)


def measured_q_qubit_oracle(rho, sigma, alpha, grid=720, sweeps=4):
    """Brute-force measured functional for qubits.

    Minimises ``sum_j (tr rho L_j)^alpha (tr sigma L_j)^(1-alpha)`` over
    rank-one projective measurements ``{L(theta, phi), 1 - L(theta, phi)}``
    on a ``grid x grid`` mesh of the Bloch sphere, then refines the best mesh
    point by coordinate-wise golden-section search within one mesh cell.
    """
    alpha = check_alpha(alpha)
    rho, _ = _unwrap(rho)
    sigma, _ = _unwrap(sigma)
    if rho.shape != (2, 2) or sigma.shape != (2, 2):
        raise DimensionError("measured_q_qubit_oracle supports dimension 2 only")
    rv, rt = _bloch(rho)
    sv, st = _bloch(sigma)

    def value(theta, phi):
        theta, phi = np.broadcast_arrays(theta, phi)
        n = np.stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
        )
        pr = n @ rv
        ps = n @ sv
        a1, a2 = np.maximum(0.5 * (rt + pr), 0), np.maximum(0.5 * (rt - pr), 0)
        b1, b2 = np.maximum(0.5 * (st + ps), 0), np.maximum(0.5 * (st - ps), 0)
        return a1 ** alpha * b1 ** (1 - alpha) + a2 ** alpha * b2 ** (1 - alpha)

    thetas = np.linspace(0.0, np.pi, grid)
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = value(thetas[:, None], phis[None, :])
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    th, ph = thetas[i], phis[j]
    best = float(vals[i, j])
    dth, dph = np.pi / (grid - 1), 2 * np.pi / grid
    for _ in range(sweeps):
        th, _v = _golden(lambda t: float(value(t, ph)), th - dth, th + dth)
        ph, v = _golden(lambda p: float(value(th, p)), ph - dph, ph + dph)
        best = min(best, v)
    return best


# Dispatch -------------------------------------------------------------------


def q_value(rho, sigma, alpha, kind, **opts):
    """Trace functional of the requested divergence kind."""
    if kind == "petz":
        return petz_q(rho, sigma, alpha)
    if kind == "sandwiched":
        return sandwiched_q(rho, sigma, alpha)
    if kind == "measured":
        return measured_q(rho, sigma, alpha, **opts).value
    raise ValueError(f"unknown divergence kind {kind!r}")


def divergence(rho, sigma, alpha, kind, **opts):
    """Rényi divergence in bits; ``alpha == 1`` (or kind ``umegaki``) gives Umegaki."""
    if kind == "umegaki" or float(alpha) == 1.0:
        return umegaki(rho, sigma)
    alpha = _order(alpha)
    return _to_divergence(q_value(rho, sigma, alpha, kind, **opts), alpha)


def commutes(a, b, atol=1e-10):
    a, _ = _unwrap(a)
    b, _ = _unwrap(b)
    return np.linalg.norm(a @ b - b @ a) <= atol * max(1.0, np.linalg.norm(a) * np.linalg.norm(b))


__all__ = [
    "KINDS",
    "VariationalSolution",
    "commutes",
    "divergence",
    "measured_divergence",
    "measured_objective",
    "measured_q",
    "measured_q_qubit_oracle",
    "petz_divergence",
    "petz_q",
    "q_value",
    "sandwiched_divergence",
    "sandwiched_q",
    "umegaki",
]
