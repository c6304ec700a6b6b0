"""First-order solvers over the probability simplex and the set of density matrices.

Both feasible sets are handled by Euclidean projection (eigenvalues are
projected onto the simplex for density matrices). Step sizes follow the
Barzilai-Borwein rule with Armijo backtracking along the projection arc.
Optimality is certified by the Frank-Wolfe gap, which bounds the distance of
the current value to the optimum for concave (resp. convex) objectives.
"""

from typing import NamedTuple

import numpy as np
from scipy import optimize

from .linalg import _eigh, _from_eig

ARMIJO = 1e-4
# eigenvalue floor keeping iterates strictly positive definite (divided by d)
DENSITY_FLOOR = 1e-12


class SolverResult(NamedTuple):
    x: np.ndarray
    value: float
    gradient: np.ndarray
    gap: float
    iterations: int
    converged: bool


def project_simplex(v, total=1.0):
    """Euclidean projection of ``v`` onto ``{p >= 0, sum p = total}``."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    k = np.flatnonzero(u - css / idx > 0)[-1]
    return np.maximum(v - css[k] / (k + 1), 0.0)


def project_density(x, floor=DENSITY_FLOOR):
    """Projection onto density matrices whose eigenvalues are at least ``floor / d``."""
    x = np.asarray(x)
    d = x.shape[0]
    w, u = _eigh(0.5 * (x + x.conj().T))
    lo = floor / d
    w = lo + project_simplex(w - lo, 1.0 - floor)
    return _from_eig(w, u)


def density_gap(x, g):
    """Frank-Wolfe gap ``lambda_max(G) - tr[G X]`` for maximisation over states."""
    return float(np.linalg.eigvalsh(g)[-1] - np.vdot(g, x).real)


def simplex_gap(p, g):
    """Frank-Wolfe gap ``<g, p> - min g`` for minimisation over the simplex."""
    return float(np.dot(g, p) - np.min(g))


def _inner(a, b):
    return float(np.vdot(a, b).real)


def _projected(fun, x0, project, gap_fn, sign, tol, max_iter):
    # sign = +1 maximises, -1 minimises; fun returns (value, gradient)
    x = project(x0)
    f, g = fun(x)
    gap = gap_fn(x, g)
    scale = max(float(np.abs(g).max()), 1e-300)
    step = 1.0 / scale
    prev = None
    it = 0
    while gap > tol and it < max_iter:
        it += 1
        if prev is not None:
            s, y = x - prev[0], g - prev[1]
            curv = -sign * _inner(s, y)
            if curv > 0:
                step = _inner(s, s) / curv
        step = min(max(step, 1e-14 / scale), 1e14 / scale)
        slack = 8 * np.finfo(float).eps * max(abs(f), 1.0)
        while True:
            trial = project(x + sign * step * g)
            d = trial - x
            ft, gt = fun(trial)
            if sign * (ft - f) >= ARMIJO * sign * _inner(g, d) - slack:
                break
            step *= 0.5
            if step < 1e-14 / scale:
                trial = None
                break
        if trial is None:
            break
        prev = (x, g)
        x, f, g = trial, ft, gt
        gap = gap_fn(x, g)
    return SolverResult(x, f, g, gap, it, gap <= tol)


def maximize_density(fun, x0, tol=1e-10, max_iter=500, method="projected", floor=DENSITY_FLOOR):
    """Maximise a smooth concave function over density matrices.

    Parameters
    ----------
    fun : callable
        ``fun(x) -> (value, gradient)`` with a Hermitian gradient such that
        ``d value = Re tr[gradient dx]``.
    x0 : ndarray
        Starting point; projected onto the feasible set first.
    method : {"projected", "frank-wolfe"}
        Projected gradient with Barzilai-Borwein steps, or Frank-Wolfe with
        a top-eigenvector linear oracle and exact line search.

    Returns
    -------
    SolverResult
        ``gap`` is the Frank-Wolfe gap at the returned point; the optimum
        lies in ``[value, value + gap]``.
    """
    project = lambda x: project_density(x, floor)
    if method == "projected":
        return _projected(fun, x0, project, density_gap, 1.0, tol, max_iter)
    if method == "frank-wolfe":
        return _frank_wolfe(fun, project(x0), floor, tol, max_iter)
    raise ValueError(f"unknown method {method!r}")


def _frank_wolfe(fun, x, floor, tol, max_iter):
    d = x.shape[0]
    mix = floor * np.eye(d) / d
    f, g = fun(x)
    w, u = _eigh(g)
    gap = float(w[-1] - np.vdot(g, x).real)
    it = 0
    while gap > tol and it < max_iter:
        it += 1
        v = u[:, -1:]
        vertex = (1.0 - floor) * (v @ v.conj().T) + mix
        direction = vertex - x
        res = optimize.minimize_scalar(
            lambda t: -fun(x + t * direction)[0], bounds=(0.0, 1.0), method="bounded",
            options={"xatol": 1e-12},
        )
        t = float(res.x)
        ft, gt = fun(x + t * direction)
        if ft < f:
            break
        x, f, g = x + t * direction, ft, gt
        w, u = _eigh(g)
        gap = float(w[-1] - np.vdot(g, x).real)
    return SolverResult(x, f, g, gap, it, gap <= tol)


def minimize_simplex(fun, p0, tol=1e-10, max_iter=500):
    """Minimise a convex function over the probability simplex.

    ``fun(p) -> (value, gradient)``; see :func:`maximize_density` for the
    returned fields.
    """
    return _projected(fun, np.asarray(p0, dtype=float), project_simplex, simplex_gap, -1.0, tol, max_iter)


__all__ = [
    "SolverResult",
    "density_gap",
    "maximize_density",
    "minimize_simplex",
    "project_density",
    "project_simplex",
    "simplex_gap",
]
