"""Matrix quotients.

Two ways of dividing a PSD matrix ``A`` by a positive definite ``B``:

* the symmetric division ``B^{-1/2} A B^{-1/2}`` used by the usual pretty
  good measurement, and
* the logarithmic quotient ``int_0^inf (t + B)^{-1} A (t + B)^{-1} dt``, which
  is the Fréchet derivative of ``log`` at ``B`` in direction ``A``.

Both reduce to ``A B^{-1}`` when the operands commute. The logarithmic quotient
is computed in closed form from divided differences of ``log`` in the
eigenbasis of ``B``; :func:`log_quotient_quadrature` evaluates the integral
directly and serves as an independent check.
"""

import math

import numpy as np

from .exceptions import SingularDivisorError
from .linalg import (
    SUPPORT_RTOL,
    _eigh,
    _from_eig,
    _support_basis,
    _unwrap,
    _wrap,
    divided_differences,
    support_cutoff,
    trace_norm,
)


def _log_quotient_stable(a, b):
    return np.log1p((a - b) / b) / (a - b)


def log_kernel(b):
    """Divided differences of the natural logarithm at the positive points ``b``."""
    return divided_differences(b, np.log, lambda t: 1.0 / t, quotient=_log_quotient_stable)


def _check_pd(w, what="divisor"):
    if w.size == 0 or w[0] <= support_cutoff(w):
        raise SingularDivisorError(f"{what} is not positive definite (min eigenvalue {w[0] if w.size else 'n/a'})")


def _log_quotient(a, b):
    w, u = _eigh(b)
    _check_pd(w)
    at = u.conj().T @ a @ u
    return u @ (log_kernel(w) * at) @ u.conj().T


def _log_quotient_on_support(a, b):
    """Logarithmic quotient with ``B`` inverted on its support only."""
    v, w = _support_basis(b)
    if w.size == 0:
        return np.zeros_like(a)
    at = v.conj().T @ a @ v
    return v @ (log_kernel(w) * at) @ v.conj().T


def _standard_division_on_support(a, b):
    v, w = _support_basis(b)
    if w.size == 0:
        return np.zeros_like(a)
    s = v * (w ** -0.5)
    return s @ (v.conj().T @ a @ v) @ s.conj().T


def standard_division(a, b):
    """Symmetric division ``B^{-1/2} A B^{-1/2}``.

    Raises SingularDivisorError unless ``B`` is positive definite.
    """
    ma, factors = _unwrap(a)
    mb, _ = _unwrap(b)
    w, u = _eigh(mb)
    _check_pd(w)
    s = _from_eig(w ** -0.5, u)
    return _wrap(s @ ma @ s, factors)


def log_quotient(a, b):
    """Logarithmic quotient ``A / B`` (Fréchet derivative of ``log`` at ``B``).

    In the eigenbasis of ``B`` with eigenvalues ``b_i`` the result has entries
    ``A_ij * (ln b_i - ln b_j) / (b_i - b_j)`` (``1 / b_i`` on the diagonal).

    >>> log_quotient(np.diag([1.0, 2.0]), np.diag([4.0, 5.0])).real.round(3)
    array([[0.25, 0.  ],
           [0.  , 0.4 ]])
    """
    ma, factors = _unwrap(a)
    mb, _ = _unwrap(b)
    return _wrap(_log_quotient(ma, mb), factors)


def log_quotient_quadrature(a, b, panels=256):
    """Evaluate the logarithmic quotient by Gauss-Legendre quadrature.

    The half line is mapped to ``(0, 1)`` by ``t = x / (1 - x)`` and integrated
    with a ``panels``-node Gauss-Legendre rule. The divisor is first rescaled
    by ``c = sqrt(||B|| ||B^{-1}||^{-1})`` using the exact identity
    ``A / B = (A / (B / c)) / c`` so that the integrand's peak sits inside the
    interval. Resolvents are formed with dense linear solves, independently of
    any eigen-decomposition.
    """
    ma, factors = _unwrap(a)
    mb, _ = _unwrap(b)
    d = mb.shape[0]
    eye = np.eye(d)
    lo = 1.0 / np.linalg.norm(np.linalg.inv(mb), 2)
    hi = np.linalg.norm(mb, 2)
    if not lo > SUPPORT_RTOL * hi:
        raise SingularDivisorError("divisor is not positive definite")
    c = math.sqrt(lo * hi)
    bs = mb / c
    x, wts = np.polynomial.legendre.leggauss(int(panels))
    x = 0.5 * (x + 1.0)
    wts = 0.5 * wts
    t = x / (1.0 - x)
    res = np.linalg.inv(t[:, None, None] * eye + bs[None])
    integrand = res @ ma[None] @ res
    jac = wts / (1.0 - x) ** 2
    out = np.tensordot(jac, integrand, axes=1) / c
    out = 0.5 * (out + out.conj().T)
    return _wrap(out, factors)


def collision_divergence(a, b):
    """Collision divergence ``log2 tr[A (A / B)]`` built on the log quotient.

    Returns ``inf`` when the support of ``A`` is not contained in the support
    of ``B``; otherwise ``A`` is compressed to the support of ``B`` and the
    quotient is taken there.
    """
    ma, _ = _unwrap(a)
    mb, _ = _unwrap(b)
    v, w = _support_basis(mb)
    tra = np.trace(ma).real
    inside = np.trace(v.conj().T @ ma @ v).real if w.size else 0.0
    if tra - inside > SUPPORT_RTOL * max(tra, 1e-300):
        return math.inf
    at = v.conj().T @ ma @ v
    q = float(np.sum(np.abs(at) ** 2 * log_kernel(w)).real) if w.size else 0.0
    if q <= 0.0:
        return -math.inf
    return math.log2(q)


def check_quotient_dominance(a, b):
    """Largest eigenvalue of ``A/(A+B) - A/B``.

    For ``A >= 0`` and ``B > 0`` this is never positive (up to rounding); the
    signed value is returned so callers can track the margin.
    """
    ma, _ = _unwrap(a)
    mb, _ = _unwrap(b)
    diff = _log_quotient(ma, ma + mb) - _log_quotient(ma, mb)
    return float(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))[-1])


def cheng_gap(a, b):
    """Both sides of the one-shot error inequality for the log quotient.

    Returns ``(lhs, rhs)`` with ``lhs = tr[A (B / (A + B))]`` and
    ``rhs = (tr[A + B] - ||A - B||_1) / 2``; the quotient is taken on the
    support of ``A + B`` when that sum is singular.
    """
    ma, _ = _unwrap(a)
    mb, _ = _unwrap(b)
    q = _log_quotient_on_support(mb, ma + mb)
    lhs = float(np.trace(ma @ q).real)
    rhs = 0.5 * (float(np.trace(ma + mb).real) - trace_norm(ma - mb))
    return lhs, rhs


__all__ = [
    "check_quotient_dominance",
    "cheng_gap",
    "collision_divergence",
    "log_kernel",
    "log_quotient",
    "log_quotient_quadrature",
    "standard_division",
]
