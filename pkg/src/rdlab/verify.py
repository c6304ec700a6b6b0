"""Seeded property suites over random instances.

Each suite draws instance ``i`` from ``numpy.random.default_rng([seed, i])``,
so a failing instance can be regenerated from its index alone. Every check is
a signed quantity that must not exceed its threshold; the report keeps the
worst value per check and the indices of violating instances.
"""

from dataclasses import dataclass, field

import numpy as np

from . import channels, quotient, renyi
from .channels import CQChannel
from .exceptions import RdlabError
from .linalg import random_density_matrix, random_unitary

SUITES = ("quotient", "renyi", "duality", "radius")
RENYI_ALPHAS = (0.5, 0.6, 0.75, 0.9)
DUALITY_ALPHAS = (0.6, 0.8)
RADIUS_ALPHAS = (0.5, 0.75)
RADIUS_TOL = {"sandwiched": 1e-4, "measured": 1e-3}


@dataclass
class SuiteResult:
    """Outcome of one suite.

    ``worst`` maps a check name to ``(largest observed value, threshold)``;
    ``failures`` lists ``(instance index, check name, value)``.
    """

    name: str
    n: int
    worst: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def record(self, index, check, value, threshold):
        value = float(value)
        prev = self.worst.get(check)
        if prev is None or value > prev[0] or np.isnan(value):
            self.worst[check] = (value, threshold)
        if not value <= threshold:
            self.failures.append((index, check, value))

    def lines(self):
        status = "PASS" if self.passed else "FAIL"
        out = [f"{self.name}: {status} ({self.n} instances)"]
        for check, (value, threshold) in self.worst.items():
            out.append(f"  {check}: worst {value:.3e} (threshold {threshold:.1e})")
        for index, check, value in self.failures[:10]:
            out.append(f"  violation at instance {index}: {check} = {value:.3e}")
        return out


def _rng(seed, i):
    return np.random.default_rng([seed, i])


def random_psd_pair(rng, dims=(2, 6), max_condition=1e4):
    """``(A, B)`` with ``A`` PSD of random rank and ``B`` positive definite."""
    d = int(rng.integers(dims[0], dims[1] + 1))
    rank = int(rng.integers(1, d + 1))
    a = random_density_matrix(d, rng, rank=rank) * rng.uniform(0.1, 10.0)
    lam = 10.0 ** rng.uniform(-np.log10(max_condition), 0.0, size=d)
    u = random_unitary(d, rng)
    b = (u * lam) @ u.conj().T * rng.uniform(0.1, 10.0)
    return a, 0.5 * (b + b.conj().T)


def _quotient_instance(res, i, rng):
    """Quotient dominance, the one-shot trace inequality, and closed form vs quadrature."""
    a, b = random_psd_pair(rng)
    res.record(i, "dominance max eigenvalue", quotient.check_quotient_dominance(a, b), 1e-9)
    lhs, rhs = quotient.cheng_gap(a, b)
    res.record(i, "trace inequality lhs - rhs", lhs - rhs, 1e-9)
    diff = quotient.log_quotient(a, b) - quotient.log_quotient_quadrature(a, b, 256)
    res.record(i, "closed form vs quadrature", np.linalg.norm(diff), 1e-6)


def _renyi_instance(res, i, rng):
    """Measured <= sandwiched <= Petz on a random qubit/qutrit pair; equality when commuting."""
    d = int(rng.integers(2, 4))
    alpha = RENYI_ALPHAS[i % len(RENYI_ALPHAS)]
    rho, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
    dm = renyi.divergence(rho, sigma, alpha, "measured")
    ds = renyi.divergence(rho, sigma, alpha, "sandwiched")
    dp = renyi.divergence(rho, sigma, alpha, "petz")
    res.record(i, "measured - sandwiched", dm - ds, 1e-6)
    res.record(i, "sandwiched - petz", ds - dp, 1e-6)
    u = random_unitary(d, rng)
    p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
    rc, sc = (u * p) @ u.conj().T, (u * q) @ u.conj().T
    dmc = renyi.divergence(rc, sc, alpha, "measured")
    dpc = renyi.divergence(rc, sc, alpha, "petz")
    res.record(i, "commuting |measured - petz|", abs(dmc - dpc), 1e-6)


def _random_qubit_channel(rng, letters=2):
    return CQChannel.from_states([random_density_matrix(2, rng) for _ in range(letters)])


def _duality_instance(res, i, rng):
    """Both duality identities on a random qubit channel with uniform input."""
    W = _random_qubit_channel(rng)
    alpha = DUALITY_ALPHAS[i % len(DUALITY_ALPHAS)]
    l1, r1, l2, r2 = channels.duality_identities(W, np.full(W.size, 1.0 / W.size), alpha)
    res.record(i, "first identity |lhs - rhs|", abs(l1 - r1), 1e-6)
    res.record(i, "second identity |lhs - rhs|", abs(l2 - r2), 1e-6)


def _radius_instance(res, i, rng):
    """Divergence radius equals channel mutual information (sandwiched and measured)."""
    W = _random_qubit_channel(rng)
    alpha = RADIUS_ALPHAS[i % len(RADIUS_ALPHAS)]
    for kind, tol in RADIUS_TOL.items():
        _, _, gap = channels.check_radius_equals_mi(W, alpha, kind, strict=False)
        res.record(i, f"{kind} |radius - mutual information|", gap, tol)


_INSTANCES = {
    "quotient": _quotient_instance,
    "renyi": _renyi_instance,
    "duality": _duality_instance,
    "radius": _radius_instance,
}


def run_suite(name, n, seed):
    """Run one suite over instances ``0 .. n-1``.

    A solver error on an instance counts as a violation of that instance.
    """
    if name not in _INSTANCES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    body = _INSTANCES[name]
    res = SuiteResult(name, int(n))
    for i in range(int(n)):
        try:
            body(res, i, _rng(seed, i))
        except RdlabError as exc:
            res.failures.append((i, f"solver error ({exc})", float("nan")))
    return res


def run(suite="all", n=100, seed=0):
    """Run ``suite`` (or every suite for ``"all"``) and return the results in order."""
    names = SUITES if suite == "all" else (suite,)
    return [run_suite(name, n, seed) for name in names]


__all__ = ["SUITES", "SuiteResult", "random_psd_pair", "run", "run_suite"]
