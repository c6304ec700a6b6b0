"""Input validation helpers, in the spirit of ``sklearn.utils.validation``."""

import numpy as np

from ..exceptions import DimensionError, NotHermitianError

MAX_DIM = 64
HERMITIAN_ATOL = 1e-12
STATE_ATOL = 1e-10


def check_square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"{name} has dimension {a.shape[0]} > {MAX_DIM}")
    return a


def check_hermitian(a, name="matrix", atol=HERMITIAN_ATOL):
    """Return ``a`` as a complex Hermitian array, symmetrised.

    Raises NotHermitianError when any entry of ``a - a^dagger`` exceeds
    ``atol`` (scaled by the largest entry when that exceeds one).
    """
    a = check_square(a, name).astype(complex)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.conj().T)) > atol * scale:
        raise NotHermitianError(f"{name} is not Hermitian")
    return 0.5 * (a + a.conj().T)


def check_psd(a, name="matrix", atol=STATE_ATOL):
    a = check_hermitian(a, name)
    if a.size and np.linalg.eigvalsh(a)[0] < -atol * max(1.0, np.abs(a).max()):
        raise ValueError(f"{name} is not positive semidefinite")
    return a


def check_density_matrix(rho, name="rho", atol=STATE_ATOL):
    """Validate a density operator: Hermitian, PSD and unit trace."""
    rho = check_psd(rho, name, atol)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"{name} has trace {tr}, expected 1")
    return rho


def check_states(states, name="states"):
    """Validate a stack of density operators with a common dimension.

    Returns a complex array of shape ``(n_states, d, d)``.
    """
    arr = [check_density_matrix(s, f"{name}[{i}]") for i, s in enumerate(states)]
    if not arr:
        raise ValueError(f"{name} must contain at least one state")
    dims = {s.shape[0] for s in arr}
    if len(dims) != 1:
        raise ValueError(f"{name} do not share a common dimension: {sorted(dims)}")
    return np.stack(arr)


def check_probability_vector(p, n=None, name="P", atol=1e-12):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector")
    if n is not None and p.size != n:
        raise ValueError(f"{name} has {p.size} entries, expected {n}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > atol:
        raise ValueError(f"{name} is not a probability vector")
    return p


def check_alpha(alpha, low=0.5, high=1.0, include_high=False):
    """Validate a Rényi order in ``[low, high)`` (or ``[low, high]``)."""
    alpha = float(alpha)
    ok = low <= alpha < high or (include_high and alpha == high)
    if not ok:
        bracket = "]" if include_high else ")"
        raise ValueError(f"alpha={alpha} outside [{low}, {high}{bracket}")
    return alpha
