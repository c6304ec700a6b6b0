"""Dense Hermitian linear algebra.

Spectral decompositions, support-aware matrix functions, tensor products,
partial traces, pinching and norms. Public functions accept either a plain
``numpy`` array or a :class:`HermitianOperator` and return the same kind of
object they were given. The underscore-prefixed helpers skip validation and
are what the solvers call in their inner loops.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, StructuralError
from .utils.validation import MAX_DIM, check_hermitian

SUPPORT_RTOL = 1e-10
CLUSTER_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A Hermitian matrix together with its tensor-factor dimensions.

    ``factors`` lists subsystem dimensions in tensor order; an empty tuple
    means the operator carries no subsystem structure.
    """

    entries: np.ndarray
    factors: tuple = field(default=())

    def __post_init__(self):
        entries = check_hermitian(self.entries, "entries")
        factors = tuple(int(f) for f in self.factors)
        if factors and int(np.prod(factors)) != entries.shape[0]:
            raise StructuralError(
                f"factors {factors} do not multiply to dim {entries.shape[0]}"
            )
        if any(f < 1 for f in factors):
            raise StructuralError(f"factors must be positive, got {factors}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, factors={list(self.factors)})"


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _unwrap(a):
    if isinstance(a, HermitianOperator):
        return a.entries, a.factors
    return check_hermitian(a), None


def _wrap(m, factors):
    if factors is None:
        return m
    return HermitianOperator(m, factors)


def support_cutoff(eigenvalues):
    """Absolute threshold below which eigenvalues count as zero."""
    top = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return SUPPORT_RTOL * max(top, 1e-300)


def _eigh(a):
    w, u = np.linalg.eigh(a)
    return w, u


def _from_eig(w, u):
    return (u * w) @ u.conj().T


def _mfunc(a, f, support_only=True):
    """Unchecked ``U f(w) U^dagger``; zero outside the support when requested."""
    w, u = _eigh(a)
    if support_only:
        on = np.abs(w) > support_cutoff(w)
        fw = np.zeros_like(w)
        with np.errstate(all="ignore"):
            fw[on] = f(w[on])
    else:
        with np.errstate(all="ignore"):
            fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("matrix function undefined at an eigenvalue")
    return _from_eig(fw, u)


def _mpow(a, p):
    """Power of a PSD matrix, taken on its support (negative ``p`` allowed)."""
    w, u = _eigh(a)
    on = w > support_cutoff(w)
    fw = np.zeros_like(w)
    fw[on] = w[on] ** p
    return _from_eig(fw, u)


def _support_projector(a):
    w, u = _eigh(a)
    v = u[:, np.abs(w) > support_cutoff(w)]
    return v @ v.conj().T


def _support_basis(a):
    """Orthonormal columns spanning the support, and the positive eigenvalues."""
    w, u = _eigh(a)
    on = np.abs(w) > support_cutoff(w)
    return u[:, on], w[on]


def _pack(h):
    # Hermitian matrix -> real vector, isometric for the Frobenius inner product
    d = h.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate([np.diag(h).real, math.sqrt(2) * h[iu].real, math.sqrt(2) * h[iu].imag])


def _unpack(x, d):
    iu = np.triu_indices(d, 1)
    m = iu[0].size
    h = np.diag(x[:d]).astype(complex)
    z = (x[d:d + m] + 1j * x[d + m:]) / math.sqrt(2)
    h[iu] = z
    h[iu[1], iu[0]] = z.conj()
    return h


def spectral_decompose(h):
    """Eigen-decomposition with ascending eigenvalues.

    >>> spectral_decompose(np.diag([2.0, 1.0])).eigenvalues
    array([1., 2.])
    """
    m, _ = _unwrap(h)
    w, u = _eigh(m)
    return SpectralDecomposition(w, u)


def matrix_function(h, f, support_only=False):
    """Apply a real scalar function through the spectral decomposition.

    With ``support_only`` set, ``f`` is evaluated only on eigenvalues whose
    magnitude exceeds the support cutoff and zero is used elsewhere; this is
    how inverse powers and logarithms of singular operators are taken.
    Raises DomainError when ``f`` is not finite at an evaluated eigenvalue.
    """
    m, factors = _unwrap(h)
    return _wrap(_mfunc(m, f, support_only), factors)


def divided_differences(x, f, df, quotient=None, rtol=CLUSTER_RTOL):
    """First divided-difference matrix of ``f`` at the points ``x``.

    Entry ``(i, j)`` is ``(f(x_i) - f(x_j)) / (x_i - x_j)``. Pairs closer than
    ``rtol`` relative to their magnitude use ``df`` at the midpoint.
    ``quotient(a, b)``, if given, must compute the off-diagonal entries in a
    cancellation-free way.
    """
    x = np.asarray(x, dtype=float)
    a, b = x[:, None], x[None, :]
    diff = a - b
    close = np.abs(diff) <= rtol * np.maximum(np.abs(a), np.abs(b))
    safe = np.where(close, 1.0, diff)
    with np.errstate(all="ignore"):
        if quotient is None:
            k = (f(a) - f(b)) / safe
        else:
            k = quotient(a, np.where(close, a + 1.0, b))
        k = np.where(close, df(0.5 * (a + b)), k)
    return k


def _exp_kernel(h, c=1.0):
    """Divided differences of ``t -> exp(c t)`` at the points ``h``."""
    h = np.asarray(h, dtype=float)
    a, b = h[:, None], h[None, :]
    d = a - b
    with np.errstate(all="ignore"):
        k = np.exp(c * b) * np.expm1(c * d) / np.where(d == 0, 1.0, d)
    return np.where(d == 0, c * np.exp(c * 0.5 * (a + b)), k)


def _power_kernel(x, p, positive=False):
    """Divided differences of ``t -> t^p`` on the support of ``x`` (zero off it).

    With ``positive=True`` every point counts as on the support; callers that
    floor eigenvalues use this to keep the (large) derivative at tiny ones.
    """
    x = np.asarray(x, dtype=float)
    on = np.ones(x.size, dtype=bool) if positive else x > support_cutoff(x)
    k = np.zeros((x.size, x.size))
    xs = x[on]
    la = np.log(xs)[:, None]
    lb = np.log(xs)[None, :]
    d = la - lb
    with np.errstate(all="ignore"):
        ratio = np.expm1(p * d) / np.expm1(d)
    ratio = np.where(np.abs(d) <= CLUSTER_RTOL, p, ratio)
    # tj^(p-1) (u^p - 1) / (u - 1), u = ti / tj
    sub = np.exp((p - 1.0) * lb) * ratio
    idx = np.flatnonzero(on)
    k[np.ix_(idx, idx)] = sub
    # one eigenvalue on the support, the other zero: t^p / t
    zero = np.flatnonzero(~on)
    if zero.size and idx.size:
        k[np.ix_(idx, zero)] = (xs ** (p - 1.0))[:, None]
        k[np.ix_(zero, idx)] = (xs ** (p - 1.0))[None, :]
    return k


def _frechet(w, u, kernel, direction):
    """Daleckii-Krein formula ``U (K o U^dagger E U) U^dagger``."""
    e = u.conj().T @ direction @ u
    return u @ (kernel * e) @ u.conj().T


def _default_factors(dim, factors):
    if factors:
        return tuple(factors)
    return (dim,) if dim > 1 else ()


def tensor(a, b):
    """Kronecker product; factor lists are concatenated."""
    if isinstance(a, HermitianOperator) or isinstance(b, HermitianOperator):
        ma, fa = _unwrap(a)
        mb, fb = _unwrap(b)
        factors = _default_factors(ma.shape[0], fa) + _default_factors(mb.shape[0], fb)
        return HermitianOperator(np.kron(ma, mb), factors)
    return np.kron(np.asarray(a), np.asarray(b))


def _ptrace(m, dims, keep):
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # einsum labels: rows 0..n-1, columns n..2n-1; traced legs share a label
    row = list(range(n))
    col = [i if i in traced else n + i for i in range(n)]
    out = keep + [n + i for i in keep]
    r = np.einsum(t, row + col, out)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return r.reshape(dk, dk)


def partial_trace(a, keep, dims=None):
    """Trace out every subsystem not listed in ``keep``.

    Subsystem dimensions come from ``a.factors`` or the ``dims`` argument;
    StructuralError is raised when neither is available.
    """
    if isinstance(a, HermitianOperator):
        m, factors = a.entries, a.factors
    else:
        m, factors = np.asarray(a), None
    dims = tuple(dims) if dims is not None else factors
    if not dims:
        raise StructuralError("partial_trace needs subsystem dimensions")
    if int(np.prod(dims)) != m.shape[0]:
        raise StructuralError(f"dims {dims} inconsistent with matrix of size {m.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise StructuralError(f"keep={keep} out of range for {len(dims)} factors")
    r = _ptrace(m, dims, keep)
    if isinstance(a, HermitianOperator):
        return HermitianOperator(r, tuple(dims[k] for k in keep))
    return r


def permute_subsystems(a, perm, dims=None):
    """Reorder tensor factors so that new factor ``i`` is old factor ``perm[i]``."""
    if isinstance(a, HermitianOperator):
        m, factors = a.entries, a.factors
    else:
        m, factors = np.asarray(a), None
    dims = tuple(dims) if dims is not None else factors
    if not dims or sorted(perm) != list(range(len(dims))):
        raise StructuralError(f"invalid permutation {perm} for dims {dims}")
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(list(perm) + [n + p for p in perm])
    r = t.reshape(m.shape)
    new = tuple(dims[p] for p in perm)
    if isinstance(a, HermitianOperator):
        return HermitianOperator(r, new)
    return r


def _clusters(w, rtol=CLUSTER_RTOL):
    """Group ascending eigenvalues into runs of (relatively) equal values."""
    if len(w) == 0:
        return []
    floor = 1e-13 * max(float(np.max(np.abs(w))), 1e-300)
    groups, start = [], 0
    for k in range(1, len(w)):
        gap = w[k] - w[k - 1]
        if gap > rtol * max(abs(w[k]), abs(w[k - 1])) + floor:
            groups.append(slice(start, k))
            start = k
    groups.append(slice(start, len(w)))
    return groups


def pinch(x, ref):
    """Pinching of ``x`` by the eigenprojectors of ``ref``.

    The result is block diagonal in the eigenspaces of ``ref`` and therefore
    commutes with it.
    """
    mx, factors = _unwrap(x)
    mr, _ = _unwrap(ref)
    if mx.shape != mr.shape:
        raise ValueError("pinch: operands differ in dimension")
    w, u = _eigh(mr)
    xt = u.conj().T @ mx @ u
    out = np.zeros_like(xt)
    for s in _clusters(w):
        out[s, s] = xt[s, s]
    return _wrap(u @ out @ u.conj().T, factors)


def trace_norm(a):
    """Schatten 1-norm of a Hermitian matrix."""
    m, _ = _unwrap(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def spec_count(a):
    """Number of distinct eigenvalues under the clustering tolerance."""
    m, _ = _unwrap(a)
    return len(_clusters(np.linalg.eigvalsh(m)))


def ket_to_dm(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def random_density_matrix(d, rng, rank=None):
    """Random state from the induced (Hilbert-Schmidt for full rank) measure."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


__all__ = [
    "MAX_DIM",
    "HermitianOperator",
    "SpectralDecomposition",
    "divided_differences",
    "ket_to_dm",
    "matrix_function",
    "partial_trace",
    "permute_subsystems",
    "pinch",
    "random_density_matrix",
    "random_unitary",
    "spec_count",
    "spectral_decompose",
    "support_cutoff",
    "tensor",
    "trace_norm",
]
