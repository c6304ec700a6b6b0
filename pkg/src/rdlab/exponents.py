"""Error-exponent curves.

Every lower and upper bound here has the form
``E(R) = sup_alpha c(alpha) (chi(alpha) - R)`` for some Rényi radius or mutual
information ``chi`` and prefactor ``c``. The supremum is taken over a grid of
orders and refined around the grid maximiser by bounded scalar minimisation;
``chi`` is cached per order, and curves are clamped at zero.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channels import divergence_radius
from .ea import ea_channel_mutual_info
from .linalg import _eigh, _from_eig, _power_kernel, support_cutoff
from ._solvers import minimize_simplex, project_simplex

FAMILIES = ("new_lower", "hayashi_lower", "sphere_packing_upper", "ea_lower", "classical_reference")
DEFAULT_ALPHAS = tuple(np.round(np.arange(0.50, 0.951, 0.05), 2)) + (0.99,)
# orders spanning (0, 1), for the bounds defined below 1/2 as well
FULL_ALPHAS = tuple(np.round(np.arange(0.05, 0.951, 0.05), 2)) + (0.99,)
ALPHA_RESOLUTION = 1e-4


@dataclass(frozen=True)
class ExponentCurve:
    """Sampled bound ``R -> E(R)`` with the maximising order per rate."""

    rates: np.ndarray
    values: np.ndarray
    family: str
    alpha_argmax: np.ndarray

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


class _Table:
    """Memoised ``alpha -> chi(alpha)``."""

    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, alpha):
        key = round(float(alpha), 12)
        if key not in self.cache:
            self.cache[key] = float(self.fn(key))
        return self.cache[key]


def _sup_curve(table, rates, alphas, prefactor, family, refine=True):
    rates = np.asarray(rates, dtype=float)
    alphas = np.sort(np.asarray(alphas, dtype=float))
    lo_a, hi_a = float(alphas[0]), float(alphas[-1])
    chis = np.array([table(a) for a in alphas])
    c = np.array([prefactor(a) for a in alphas])
    values, argmax = [], []
    for R in rates:
        f = c * (chis - R)
        k = int(np.argmax(f))
        best_a, best = float(alphas[k]), float(f[k])
        if refine and alphas.size > 1:
            lo = float(alphas[max(k - 1, 0)])
            hi = float(alphas[min(k + 1, alphas.size - 1)])
            res = optimize.minimize_scalar(
                lambda a: -prefactor(a) * (table(a) - R), bounds=(lo, hi), method="bounded",
                options={"xatol": ALPHA_RESOLUTION},
            )
            a = float(np.clip(res.x, lo_a, hi_a))
            val = prefactor(a) * (table(a) - R)
            if val > best:
                best_a, best = a, val
        values.append(max(best, 0.0))
        argmax.append(best_a)
    return ExponentCurve(rates, np.array(values), family, np.array(argmax))


def _renyi_prefactor(a):
    return (1.0 - a) / a


def radius_table(W, kind):
    """Cached divergence radius of ``W`` as a function of the order."""
    return _Table(lambda a: divergence_radius(W, a, kind, strict=False)[0])


def new_lower_bound_curve(W, rates, alphas=DEFAULT_ALPHAS, table=None):
    """``sup_alpha (1-alpha)/alpha (chi_sandwiched(alpha) - R)`` over orders in ``[1/2, 1)``."""
    table = table or radius_table(W, "sandwiched")
    return _sup_curve(table, rates, alphas, _renyi_prefactor, "new_lower")


def sphere_packing_curve(W, rates, alphas=FULL_ALPHAS, table=None):
    """``sup_alpha (1-alpha)/alpha (chi_petz(alpha) - R)`` over orders in ``(0, 1)``."""
    table = table or radius_table(W, "petz")
    return _sup_curve(table, rates, alphas, _renyi_prefactor, "sphere_packing_upper")


def ea_lower_bound_curve(N, rates, alphas=DEFAULT_ALPHAS, table=None, **opts):
    """``sup_alpha (1-alpha)/alpha (I_sandwiched(N, alpha) - R)`` for entanglement-assisted codes.

    The input-state search starts from the maximally mixed state only
    (``starts=0``) unless ``opts`` says otherwise; extra random starts
    did not change the optimum on sampled qubit channels but cost far more
    near ``alpha = 1/2``.
    """
    opts.setdefault("starts", 0)
    table = table or _Table(lambda a: ea_channel_mutual_info(N, a, "sandwiched", **opts)[0])
    return _sup_curve(table, rates, alphas, _renyi_prefactor, "ea_lower")


# Hayashi ---------------------------------------------------------------------------


def _hayashi_objective(W, alpha):
    """``h(P) = sum_x P(x) tr[rho_x^alpha rho_B^(1-alpha)]`` and its gradient in ``P``."""
    powers = np.stack([_power(s, alpha) for s in W.states])

    def h(P):
        rho_b = np.tensordot(P, W.states, axes=1)
        w, u = _eigh(rho_b)
        w = np.maximum(w, support_cutoff(w))
        avg = np.tensordot(P, powers, axes=1)
        at = u.conj().T @ avg @ u
        val = float(np.sum(np.diag(at).real * _safe_pow(w, 1.0 - alpha)))
        rb = _from_eig(_safe_pow(w, 1.0 - alpha), u)
        direct = np.einsum("xij,ji->x", powers, rb).real
        # derivative of rho_B^(1-alpha) in direction rho_x, paired with avg
        k = _power_kernel(w, 1.0 - alpha, positive=True)
        frechet = u @ (k * at) @ u.conj().T
        chain = np.einsum("xij,ji->x", W.states, frechet).real
        return val, direct + chain

    return h


def _power(a, p):
    w, u = _eigh(a)
    return _from_eig(_safe_pow(np.clip(w, 0.0, None), p), u)


def _safe_pow(w, p):
    out = np.zeros_like(w)
    on = w > 1e-10 * max(w.max(), 1e-300)
    out[on] = w[on] ** p
    return out


def _simplex_grid(n, steps):
    if n == 1:
        yield np.ones(1)
        return
    for i in range(steps + 1):
        for rest in _simplex_grid(n - 1, steps - i):
            yield np.concatenate([[i / steps], rest * (steps - i) / steps if steps > i else rest * 0])


def hayashi_inner(W, alpha, grid_steps=16):
    """``max_P Dpetz_alpha(rho_XB || rho_X (x) rho_B)`` in bits, with the maximiser.

    The minimisation of ``h(P)`` starts from the best point of a simplex grid
    of resolution ``1/grid_steps`` (alphabets of at most three letters) or from
    the uniform distribution.
    """
    h = _hayashi_objective(W, alpha)
    n = W.size
    start = np.full(n, 1.0 / n)
    if n <= 3:
        pts = list(_simplex_grid(n, grid_steps))
        start = min(pts, key=lambda p: h(p)[0])
    res = minimize_simplex(h, start, tol=1e-12, max_iter=500)
    return math.log2(res.value) / (alpha - 1.0), res.x


def hayashi_curve(W, rates, alphas=FULL_ALPHAS, table=None):
    """``sup_alpha (1-alpha) (max_P Dpetz_alpha(rho_XB || rho_X (x) rho_B) - R)``."""
    table = table or _Table(lambda a: hayashi_inner(W, a)[0])
    return _sup_curve(table, rates, alphas, lambda a: 1.0 - a, "hayashi_lower")


# Classical reference ---------------------------------------------------------------


def _is_symmetric(T, atol=1e-12):
    rows = np.sort(T, axis=1)
    cols = np.sort(T, axis=0)
    return bool(np.allclose(rows, rows[0], atol=atol) and np.allclose(cols, cols[:, :1], atol=atol))


def classical_radius(T, alpha):
    """Rényi radius ``min_q max_x D_alpha(T_x || q)`` of a stochastic matrix, in bits.

    Symmetric channels use the closed form ``log2|Y| - H_alpha(row)``.
    Otherwise the radius is ``alpha/(alpha-1) log2 min_P F(P)`` with the convex
    ``F(P) = sum_y (sum_x P(x) T(y|x)^alpha)^(1/alpha)``, minimised by SLSQP.
    """
    T = np.asarray(T, dtype=float)
    if np.any(T < 0) or not np.allclose(T.sum(axis=1), 1.0, atol=1e-10):
        raise ValueError("rows of the stochastic matrix must be distributions")
    if _is_symmetric(T):
        row = T[0]
        h = math.log2(np.sum(row[row > 0] ** alpha)) / (1.0 - alpha)
        return math.log2(T.shape[1]) - h
    Ta = T ** alpha

    def F(P):
        inner = P @ Ta
        val = float(np.sum(inner ** (1.0 / alpha)))
        grad = Ta @ ((1.0 / alpha) * inner ** (1.0 / alpha - 1.0))
        return val, grad

    n = T.shape[0]
    res = optimize.minimize(
        F, np.full(n, 1.0 / n), jac=True, method="SLSQP", bounds=[(0.0, 1.0)] * n,
        constraints=[{"type": "eq", "fun": lambda P: P.sum() - 1.0, "jac": lambda P: np.ones_like(P)}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    P = project_simplex(res.x)
    return alpha / (alpha - 1.0) * math.log2(F(P)[0])


def classical_reference(T, rates, alphas=DEFAULT_ALPHAS):
    """Classical random-coding curve ``sup_alpha (1-alpha)/alpha (chi_alpha - R)`` of a stochastic matrix."""
    table = _Table(lambda a: classical_radius(T, a))
    return _sup_curve(table, rates, alphas, _renyi_prefactor, "classical_reference")


def stochastic_matrix(W):
    """Stochastic matrix of a commuting cq channel, or ``None`` if the states do not commute."""
    try:
        return W.stochastic_matrix()
    except ValueError:
        return None


# CSV ---------------------------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def emit_csv(curves, path, comments=()):
    """Write ``rate,family,value,alpha_argmax`` rows, curve by curve in rate order.

    Numbers use 17 significant digits so doubles round-trip exactly.
    ``comments`` are written first as ``#`` lines.
    """
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rate", "family", "value", "alpha_argmax"])
        for curve in curves:
            order = np.argsort(curve.rates, kind="stable")
            for i in order:
                writer.writerow([_fmt(curve.rates[i]), curve.family, _fmt(curve.values[i]), _fmt(curve.alpha_argmax[i])])


def read_csv(path):
    """Parse a file written by :func:`emit_csv` into a list of row dicts."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = []
    for row in csv.DictReader(lines):
        rows.append({"rate": float(row["rate"]), "family": row["family"],
                     "value": float(row["value"]), "alpha_argmax": float(row["alpha_argmax"])})
    return rows


__all__ = [
    "DEFAULT_ALPHAS",
    "ExponentCurve",
    "FULL_ALPHAS",
    "classical_radius",
    "classical_reference",
    "ea_lower_bound_curve",
    "emit_csv",
    "hayashi_curve",
    "hayashi_inner",
    "new_lower_bound_curve",
    "radius_table",
    "read_csv",
    "sphere_packing_curve",
    "stochastic_matrix",
]
