"""Entanglement-assisted coding over quantum channels.

Channels are given by Kraus operators. The shared state of position-based
coding is ``M`` copies of a purification ``|rho>_{A'A}``; message ``m`` is
sent by feeding the ``m``-th ``A`` share through the channel. Bob holds
``B_1 .. B_M`` (copies of ``A'``) and the channel output ``B``, always stored
in that order, and decodes with ``Pi_m = Y^m / sum_m' Y^m'`` where ``Y^m``
acts as ``Y_{A'B}`` on ``(B_m, B)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import quotient
from .channels import mutual_info, mutual_info_solution
from .exceptions import DimensionError, InvalidChannelError
from .linalg import (
    HermitianOperator,
    _eigh,
    _exp_kernel,
    _from_eig,
    _mpow,
    _pack,
    _power_kernel,
    _ptrace,
    _support_basis,
    _unpack,
    permute_subsystems,
    random_density_matrix,
    support_cutoff,
)
from .renyi import measured_q
from .utils.validation import MAX_DIM, check_alpha, check_density_matrix

KRAUS_ATOL = 1e-10


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map ``rho -> sum_k K_k rho K_k^dagger`` from ``A`` to ``B``."""

    kraus: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise InvalidChannelError("kraus must be a non-empty list of matrices")
        total = np.einsum("kji,kjl->il", k.conj(), k)
        if np.abs(total - np.eye(k.shape[2])).max() > KRAUS_ATOL:
            raise InvalidChannelError("Kraus operators are not trace preserving")
        if max(k.shape[1:]) > MAX_DIM:
            raise DimensionError("channel dimension exceeds the ceiling")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @property
    def d_in(self):
        return self.kraus.shape[2]

    @property
    def d_out(self):
        return self.kraus.shape[1]

    def __call__(self, rho):
        return apply_channel(self, rho)


def apply_channel(N, rho):
    """``sum_k K_k rho K_k^dagger``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (N.d_in, N.d_in):
        raise DimensionError(f"input of shape {rho.shape} for a channel on dimension {N.d_in}")
    out = np.einsum("kij,jl,kml->im", N.kraus, rho, N.kraus.conj())
    return 0.5 * (out + out.conj().T)


def identity_channel(d=2):
    return QuantumChannel(np.eye(d)[None])


def dephasing_channel(p):
    """Qubit dephasing: ``Z`` applied with probability ``p``."""
    z = np.diag([1.0, -1.0])
    return QuantumChannel([math.sqrt(1.0 - p) * np.eye(2), math.sqrt(p) * z])


def amplitude_damping_channel(gamma):
    """Qubit amplitude damping with decay probability ``gamma`` (``|1> -> |0>``)."""
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]])
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]])
    return QuantumChannel([k0, k1])


def depolarizing_channel(p, d=2):
    """``rho -> (1 - p) rho + p tr[rho] I/d`` via the ``d^2`` clock-and-shift operators."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for a in range(d):
        for b in range(d):
            w = 1.0 - p + p / d ** 2 if a == b == 0 else p / d ** 2
            ops.append(math.sqrt(w) * np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b))
    return QuantumChannel(ops)


def replacer_channel(sigma, d_in=2):
    """Discards the input and prepares ``sigma``."""
    sigma = check_density_matrix(sigma, "sigma")
    w, u = _eigh(sigma)
    w = np.clip(w, 0.0, None)
    ops = []
    for i in range(w.size):
        if w[i] > 0:
            for j in range(d_in):
                k = np.zeros((sigma.shape[0], d_in), dtype=complex)
                k[:, j] = math.sqrt(w[i]) * u[:, i]
                ops.append(k)
    return QuantumChannel(ops)


def purification(rho_a):
    """Eigen-purification ``sum_i sqrt(l_i) |i>_{A'} |u_i>_A`` as a vector on ``A' (x) A``."""
    rho_a = check_density_matrix(rho_a, "rho_A")
    w, u = _eigh(rho_a)
    w = np.clip(w, 0.0, None)
    # coefficient matrix c[i, a] = sqrt(l_i) u_i[a]
    return (np.sqrt(w)[:, None] * u.T).reshape(-1)


def ea_joint_state(N, rho_a):
    """``(id (x) N)(|rho><rho|)`` with factors ``(dA', dB)``."""
    psi = purification(rho_a)
    d = N.d_in
    c = psi.reshape(d, d)
    # rows of each K c^T are indexed by B, columns by A'
    out = np.zeros((d * N.d_out, d * N.d_out), dtype=complex)
    for k in N.kraus:
        v = (k @ c.T).T.reshape(-1)
        out += np.outer(v, v.conj())
    return HermitianOperator(0.5 * (out + out.conj().T), (d, N.d_out))


def choi_matrix(N):
    """Unnormalised Choi operator ``sum_ij |i><j| (x) N(|i><j|)`` on ``A' (x) B``."""
    d = N.d_in * N.d_out
    out = np.zeros((d, d), dtype=complex)
    for k in N.kraus:
        v = k.T.reshape(-1)
        out += np.outer(v, v.conj())
    return 0.5 * (out + out.conj().T)


def _state_from_params(x, d):
    # rho = exp(K) / tr exp(K) for Hermitian K packed in x
    k = _unpack(x, d)
    w, u = _eigh(k)
    e = np.exp(w - w.max())
    return _from_eig(e / e.sum(), u), w, u


class _SandwichedInput:
    """``rho -> max_sigma Qsandwiched(rho_A'B || rho_A' (x) sigma)`` with its gradient in ``rho``.

    With ``omega = rho^T`` the joint state is ``(omega^1/2 (x) 1) J (omega^1/2 (x) 1)``,
    so ``Q = tr[(J^1/2 (omega^(1/alpha) (x) sigma^r) J^1/2)^alpha]``. The gradient
    in ``rho`` is taken at the optimal ``sigma`` (the maximiser of a smooth
    concave program), which is valid by Danskin's theorem.
    """

    def __init__(self, N, alpha, tol):
        self.N = N
        self.alpha = alpha
        self.tol = tol
        self.j_half = _mpow(choi_matrix(N), 0.5)

    def __call__(self, rho):
        a, N = self.alpha, self.N
        da, db = N.d_in, N.d_out
        # cold start from the output marginal: warm starts can sit near the
        # boundary, where the inner gap estimate is unreliable
        sol = mutual_info_solution(ea_joint_state(N, rho), a, "sandwiched", tol=self.tol, strict=False)
        r = (1.0 - a) / a
        omega = rho.T
        wo, uo = _eigh(omega)
        wo = np.clip(wo, 0.0, None)
        sig_r = _mpow(sol.sigma, r)
        lam = np.kron(_from_eig(wo ** (1.0 / a), uo), sig_r)
        m = self.j_half @ lam @ self.j_half
        wm, um = _eigh(0.5 * (m + m.conj().T))
        on = wm > support_cutoff(wm)
        q = float(np.sum(wm[on] ** a))
        mp = (um[:, on] * wm[on] ** (a - 1.0)) @ um[:, on].conj().T
        g_lam = a * self.j_half @ mp @ self.j_half
        t = _ptrace(g_lam @ np.kron(np.eye(da), sig_r), (da, db), [0])
        g_omega = uo @ (_power_kernel(wo, 1.0 / a) * (uo.conj().T @ t @ uo)) @ uo.conj().T
        g = g_omega.T
        return q, 0.5 * (g + g.conj().T)


def ea_channel_mutual_info(N, alpha, kind="sandwiched", starts=4, seed=0, **opts):
    """Maximise the mutual information of ``ea_joint_state(N, rho)`` over inputs ``rho``.

    Quasi-Newton ascent over ``rho = exp(K) / tr exp(K)``, started from the
    maximally mixed state and ``starts`` random states. The sandwiched kind
    uses an exact gradient; the other kinds use finite differences and are
    considerably slower. Returns ``(value, rho_opt)``; the value is the best
    found, a lower bound on the maximum up to the inner solver's tolerance.
    """
    alpha = check_alpha(alpha)
    d = N.d_in
    if d > 4:
        raise DimensionError("ea_channel_mutual_info supports input dimension up to 4")
    tol = opts.pop("tol", 1e-13)

    if kind == "sandwiched":
        obj = _SandwichedInput(N, alpha, tol)

        def fun(x):
            rho, w, u = _state_from_params(x, d)
            q, g = obj(rho)
            # chain rule through rho = exp(K) / tr exp(K)
            e = np.exp(w - w.max())
            z = e.sum()
            gk = _exp_kernel(w - w.max()) * (u.conj().T @ g @ u) / z
            grad = u @ gk @ u.conj().T - np.vdot(g, rho).real * rho
            return q, _pack(0.5 * (grad + grad.conj().T))

        to_bits = lambda q: math.log2(q) / (alpha - 1.0)
        jac = True
    else:
        def fun(x):
            rho = _state_from_params(x, d)[0]
            return -mutual_info(ea_joint_state(N, rho), alpha, kind, tol=tol, strict=False, **opts)[0]

        to_bits = lambda v: -v
        jac = False

    rng = np.random.default_rng(seed)
    inits = [np.zeros(d * d)]
    for _ in range(starts):
        rho = random_density_matrix(d, rng)
        w, u = _eigh(rho)
        inits.append(_pack(_from_eig(np.log(np.maximum(w, 1e-6)), u)))
    best_val, best_rho = -math.inf, None
    for x0 in inits:
        res = optimize.minimize(fun, x0, jac=jac, method="L-BFGS-B", options={"maxiter": 200})
        val = to_bits(float(res.fun))
        if val > best_val:
            best_val, best_rho = val, _state_from_params(res.x, d)[0]
    return best_val, best_rho


# Position-based coding -------------------------------------------------------------


def _embed(op, m, M, d_ref, d_b):
    """Place an operator on ``(B_m, B)`` into the ordering ``(B_1..B_M, B)``; 0-based ``m``."""
    others = [i for i in range(M) if i != m]
    rest = np.eye(d_ref ** (M - 1))
    big = np.kron(op, rest)
    # current legs: B_m, B, then the other copies in increasing order
    legs = [m, M] + others
    dims = [d_ref, d_b] + [d_ref] * (M - 1)
    perm = [legs.index(i) for i in range(M + 1)]
    return permute_subsystems(big, perm, dims)


def _message_state(rho_ab, rho_ref, m, M, d_ref, d_b):
    rest = np.ones((1, 1))
    for _ in range(M - 1):
        rest = np.kron(rest, rho_ref)
    others = [i for i in range(M) if i != m]
    legs = [m, M] + others
    dims = [d_ref, d_b] + [d_ref] * (M - 1)
    perm = [legs.index(i) for i in range(M + 1)]
    return permute_subsystems(np.kron(rho_ab, rest), perm, dims)


@dataclass
class PositionBasedDecoder:
    """Decoder elements on ``(B_1..B_M, B)`` plus the kernel projector."""

    elements: np.ndarray
    failure: np.ndarray
    y: np.ndarray

    def completeness_error(self):
        d = self.failure.shape[0]
        return float(np.linalg.norm(self.elements.sum(axis=0) + self.failure - np.eye(d)))

    def min_eigenvalue(self):
        return float(min(np.linalg.eigvalsh(e)[0] for e in self.elements))


def decoder_operator(N, rho_a, alpha, y_choice="power_alpha", **opts):
    """The operator ``Y_{A'B}`` of the position-based decoder.

    ``"power_alpha"`` gives ``rho_{A'B}^alpha``; ``"variational"`` gives the
    minimiser ``Y`` of the variational program for
    ``Qmeas(rho_{A'B} || rho_{A'} (x) sigma*)`` where ``sigma*`` maximises it.
    """
    rho_ab = ea_joint_state(N, rho_a)
    m = rho_ab.entries
    if y_choice == "power_alpha":
        w, u = _eigh(m)
        return _from_eig(np.clip(w, 0.0, None) ** alpha, u)
    if y_choice == "variational":
        sol = mutual_info_solution(rho_ab, alpha, "measured", strict=False, **opts)
        rho_ref = _ptrace(m, rho_ab.factors, [0])
        tau = np.kron(rho_ref, sol.sigma)
        return measured_q(m, tau, alpha, strict=False).witness
    raise ValueError(f"unknown Y choice {y_choice!r}")


def position_based_decoder(N, rho_a, M, alpha, y_choice="power_alpha", **opts):
    alpha = check_alpha(alpha)
    M = int(M)
    d_ref, d_b = N.d_in, N.d_out
    if M < 1:
        raise ValueError("M must be at least 1")
    if d_ref ** M * d_b > MAX_DIM:
        raise DimensionError(f"joint dimension {d_ref ** M * d_b} exceeds {MAX_DIM}")
    y = decoder_operator(N, rho_a, alpha, y_choice, **opts)
    ys = np.stack([_embed(y, m, M, d_ref, d_b) for m in range(M)])
    total = ys.sum(axis=0)
    v, w = _support_basis(total)
    yt = np.einsum("ia,mij,jb->mab", v.conj(), ys, v)
    # through the module attribute so that the quotient can be swapped in tests
    elems = np.stack([v @ (quotient.log_kernel(w) * t) @ v.conj().T for t in yt])
    elems = 0.5 * (elems + np.conj(np.swapaxes(elems, 1, 2)))
    failure = np.eye(total.shape[0]) - v @ v.conj().T
    return PositionBasedDecoder(elems, failure, y)


def position_based_error(N, rho_a, M, alpha, y_choice="power_alpha", message=0, **opts):
    """Exact average error of position-based coding with the quotient decoder.

    By symmetry every message has the same error; ``message`` (0-based)
    selects which one is computed.
    """
    dec = position_based_decoder(N, rho_a, M, alpha, y_choice, **opts)
    M = int(M)
    if not 0 <= message < M:
        raise ValueError("message index out of range")
    rho_ab = ea_joint_state(N, rho_a).entries
    rho_ref = _ptrace(rho_ab, (N.d_in, N.d_out), [0])
    state = _message_state(rho_ab, rho_ref, message, M, N.d_in, N.d_out)
    return float(1.0 - np.vdot(dec.elements[message], state).real)


def theorem3_rhs(N, rho_a, M, alpha, **opts):
    """``2^(r (log2 M - Imeas(A';B)))`` with ``r = (1 - alpha) / alpha``."""
    alpha = check_alpha(alpha)
    r = (1.0 - alpha) / alpha
    opts.setdefault("strict", False)
    info, _ = mutual_info(ea_joint_state(N, rho_a), alpha, "measured", **opts)
    return 2.0 ** (r * (math.log2(int(M)) - info))


__all__ = [
    "PositionBasedDecoder",
    "QuantumChannel",
    "amplitude_damping_channel",
    "apply_channel",
    "choi_matrix",
    "decoder_operator",
    "dephasing_channel",
    "depolarizing_channel",
    "ea_channel_mutual_info",
    "ea_joint_state",
    "identity_channel",
    "position_based_decoder",
    "position_based_error",
    "purification",
    "replacer_channel",
    "theorem3_rhs",
]
