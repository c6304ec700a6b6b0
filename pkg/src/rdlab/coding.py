"""Random cq codes decoded with quotient-based pretty good measurements.

A decoder fixes one operator ``Y_x`` per letter and measures with
``Pi_m = Y_{x_m} / sum_m' Y_{x_m'}``. The division is either the logarithmic
quotient or the symmetric division ``S^{-1/2} Y S^{-1/2}``. When the
denominator ``S`` is singular the division is taken on its support and the
projector onto the kernel becomes an extra failure outcome, so the elements
always sum to the identity.

The error of a codebook depends only on how often each letter occurs in it,
which the Monte Carlo driver exploits by caching per letter composition.
"""

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import quotient
from .channels import _letter_terms, _weighted_max, divergence_radius, joint_state, mutual_info
from .exceptions import StructuralError
from .linalg import _eigh, _mpow, _support_basis
from .renyi import _petz_q
from .utils.validation import check_alpha, check_probability_vector

DECODERS = ("quotient", "standard", "hayashi")


@dataclass(frozen=True)
class DecoderSpec:
    """Which decoder to build.

    ``kind`` is ``"quotient"`` (``Y_x = rho_x^alpha`` with the logarithmic
    quotient), ``"standard"`` (same ``Y_x``, symmetric division) or
    ``"hayashi"`` (``Y_x = rho_x`` with the logarithmic quotient; ``alpha``
    is ignored).
    """

    kind: str = "quotient"
    alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.kind!r}")
        if self.kind != "hayashi":
            check_alpha(self.alpha, include_high=True)

    def operators(self, W):
        power = 1.0 if self.kind == "hayashi" else self.alpha
        return np.stack([_mpow(s, power) for s in W.states])

    @property
    def division(self):
        return "standard" if self.kind == "standard" else "log"


@dataclass(frozen=True)
class Codebook:
    """Codewords as letter indices into the channel alphabet (repeats allowed)."""

    codewords: tuple

    def __post_init__(self):
        cw = tuple(int(c) for c in self.codewords)
        if not cw:
            raise ValueError("a codebook needs at least one codeword")
        object.__setattr__(self, "codewords", cw)

    @classmethod
    def from_labels(cls, W, labels):
        return cls(tuple(W.index(lab) for lab in labels))

    @property
    def M(self):
        return len(self.codewords)

    def counts(self, n_letters):
        return np.bincount(self.codewords, minlength=n_letters)

    def check(self, W):
        if max(self.codewords) >= W.size or min(self.codewords) < 0:
            raise StructuralError("codeword outside the channel alphabet")


@dataclass
class POVM:
    """Measurement with one element per message plus a failure element.

    ``failure`` is the projector onto the kernel of the decoder's denominator
    (zero when that denominator is invertible).
    """

    elements: np.ndarray
    failure: np.ndarray = field(default=None)

    def __post_init__(self):
        self.elements = np.asarray(self.elements)
        if self.failure is None:
            self.failure = np.zeros_like(self.elements[0])

    @property
    def M(self):
        return self.elements.shape[0]

    def completeness_error(self):
        d = self.elements.shape[1]
        total = self.elements.sum(axis=0) + self.failure
        return float(np.linalg.norm(total - np.eye(d)))

    def min_eigenvalue(self):
        return float(min(np.linalg.eigvalsh(e)[0] for e in self.elements))

    def probabilities(self, rho):
        """Outcome probabilities ``tr[rho Pi_m]`` for each message."""
        return np.einsum("ij,mji->m", rho, self.elements).real


def _divide(ys, denominator, division):
    """Divide every ``ys[m]`` by ``denominator`` on its support."""
    v, w = _support_basis(denominator)
    d = denominator.shape[0]
    failure = np.eye(d) - v @ v.conj().T
    yt = np.einsum("ia,mij,jb->mab", v.conj(), ys, v)
    if division == "log":
        k = quotient.log_kernel(w)
        out = yt * k
    else:
        s = w ** -0.5
        out = yt * np.outer(s, s)
    elems = np.einsum("ia,mab,jb->mij", v, out, v.conj())
    elems = 0.5 * (elems + np.conj(np.swapaxes(elems, 1, 2)))
    return elems, 0.5 * (failure + failure.conj().T)


def _build(ops, codebook, division):
    ys = ops[list(codebook.codewords)]
    return POVM(*_divide(ys, ys.sum(axis=0), division))


def build_quotient_pgm(W, codebook, alpha):
    """Decoder with ``Pi_m = rho_{x_m}^alpha / sum_m' rho_{x_m'}^alpha`` (logarithmic quotient)."""
    codebook.check(W)
    return _build(DecoderSpec("quotient", alpha).operators(W), codebook, "log")


def build_standard_pgm(W, codebook, alpha):
    """Pretty good measurement ``S^{-1/2} rho_{x_m}^alpha S^{-1/2}``, ``S = sum_m rho_{x_m}^alpha``."""
    codebook.check(W)
    return _build(DecoderSpec("standard", alpha).operators(W), codebook, "standard")


def build_decoder(W, codebook, spec):
    codebook.check(W)
    return _build(spec.operators(W), codebook, spec.division)


def average_error(W, codebook, povm):
    """Average error ``1 - (1/M) sum_m tr[rho_{x_m} Pi_m]``."""
    if povm.M != codebook.M:
        raise StructuralError(f"POVM has {povm.M} elements for {codebook.M} codewords")
    states = W.states[list(codebook.codewords)]
    hit = np.einsum("mij,mji->", states, povm.elements).real
    return float(1.0 - hit / codebook.M)


def _composition_error(W, ops, counts, division):
    """Error of any codebook with the given letter counts."""
    M = int(counts.sum())
    used = np.flatnonzero(counts)
    denominator = np.tensordot(counts.astype(float), ops, axes=1)
    elems, _ = _divide(ops[used], denominator, division)
    hit = sum(counts[x] * np.vdot(elems[i], W.states[x]).real for i, x in enumerate(used))
    return float(1.0 - hit / M)


def _trial_counts(P, M, seed, trial):
    # each trial owns a counter-based stream keyed by (seed, trial)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))
    cdf = np.cumsum(P)
    idx = np.searchsorted(cdf, rng.random(M) * cdf[-1], side="right")
    return np.minimum(idx, P.size - 1)


def sample_codebook(P, M, seed, trial):
    """Codebook of trial ``trial``: ``M`` i.i.d. letters drawn by inverse CDF."""
    P = check_probability_vector(P)
    return Codebook(tuple(_trial_counts(P, M, seed, trial)))


def _workers():
    env = os.environ.get("RDL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class MonteCarloResult:
    errors: np.ndarray
    mean: float
    stderr: float
    minimum: float


def simulate(W, P, M, spec, trials, seed):
    """Per-trial errors of ``trials`` random codebooks.

    Trial ``t`` draws its codebook from its own stream keyed by
    ``(seed, t)``, so the result does not depend on evaluation order or on
    the number of worker threads.
    """
    P = check_probability_vector(P, W.size)
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    M = int(M)
    if M < 1:
        raise ValueError("M must be at least 1")
    ops = spec.operators(W)
    comps = np.array([np.bincount(_trial_counts(P, M, seed, t), minlength=W.size) for t in range(trials)])
    unique, inverse = np.unique(comps, axis=0, return_inverse=True)
    job = lambda c: _composition_error(W, ops, c, spec.division)
    n = min(_workers(), len(unique))
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            values = list(pool.map(job, unique))
    else:
        values = [job(c) for c in unique]
    errors = np.asarray(values)[np.ravel(inverse)]
    mean = float(np.sum(errors) / trials)
    stderr = float(np.std(errors, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloResult(errors, mean, stderr, float(errors.min()))


def expected_error_mc(W, P, M, spec, trials, seed):
    """Monte Carlo estimate ``(mean, stderr)`` of the random-coding error."""
    res = simulate(W, P, M, spec, trials, seed)
    return res.mean, res.stderr


def expected_error_exact(W, P, M, spec):
    """Exact random-coding error by summing over all letter compositions.

    The number of compositions is ``C(M + |X| - 1, |X| - 1)``; intended for
    small alphabets and codebooks.
    """
    P = check_probability_vector(P, W.size)
    ops = spec.operators(W)
    n = W.size
    total = 0.0
    logP = np.log(np.where(P > 0, P, 1.0))
    for cut in itertools.combinations(range(M + n - 1), n - 1):
        bounds = (-1,) + cut + (M + n - 1,)
        counts = np.array([bounds[i + 1] - bounds[i] - 1 for i in range(n)])
        if np.any((counts > 0) & (P == 0)):
            continue
        logw = gammaln(M + 1) - np.sum(gammaln(counts + 1)) + np.sum(counts * logP)
        total += math.exp(logw) * _composition_error(W, ops, counts, spec.division)
    return total


# Right-hand sides of the achievability bounds ------------------------------------


@dataclass(frozen=True)
class Theorem1Bound:
    """The three forms of the one-shot random-coding bound.

    ``tight`` uses the optimised ``max_sigma E_x Q(rho_x || sigma)``,
    ``mi_form`` the measured mutual information of the cq state and
    ``radius_form`` the measured divergence radius of the channel.
    """

    tight: float
    mi_form: float
    radius_form: float


def theorem1_rhs(W, P, M, alpha, **opts):
    """Right-hand sides of the one-shot bound for ``M`` codewords drawn from ``P``.

    With ``r = (1 - alpha) / alpha``:

    * ``tight = (M - 1)^r (max_sigma sum_x P(x) Qmeas(rho_x || sigma))^(1/alpha)``
    * ``mi_form = 2^(r (log2 M - Imeas(X;B)))``
    * ``radius_form = 2^(r (log2 M - chimeas(W)))``
    """
    alpha = check_alpha(alpha)
    P = check_probability_vector(P, W.size)
    M = int(M)
    r = (1.0 - alpha) / alpha
    terms = _letter_terms(W, alpha, "measured")
    best = _weighted_max(terms, P, W.output_state(P), 1e-12, 500)
    g = best.value + best.gap
    tight = float((M - 1) ** r * g ** (1.0 / alpha))
    info, _ = mutual_info(joint_state(W, P), alpha, "measured", **opts)
    chi, _ = divergence_radius(W, alpha, "measured", **opts)
    mi_form = 2.0 ** (r * (math.log2(M) - info))
    radius_form = 2.0 ** (r * (math.log2(M) - chi))
    return Theorem1Bound(tight, mi_form, radius_form)


def hayashi_rhs(W, P, M, alpha):
    """``(M - 1)^(1 - alpha) sum_x P(x) tr[rho_x^alpha rho_B^(1 - alpha)]``, ``rho_B = sum_x P(x) rho_x``."""
    alpha = check_alpha(alpha, low=0.0)
    if alpha == 0.0:
        raise ValueError("alpha must be positive")
    P = check_probability_vector(P, W.size)
    rho_b = W.output_state(P)
    s = sum(p * _petz_q(rho, rho_b, alpha) for p, rho in zip(P, W.states) if p > 0)
    return float((int(M) - 1) ** (1.0 - alpha) * s)


def commuting_tight_bound(W, P, M, alpha):
    """``(M - 1)^r tr[(sum_x P(x) rho_x^alpha)^(1 + r)]``, the tight form for commuting states."""
    alpha = check_alpha(alpha)
    P = check_probability_vector(P, W.size)
    r = (1.0 - alpha) / alpha
    avg = sum(p * _mpow(rho, alpha) for p, rho in zip(P, W.states))
    w = np.clip(np.linalg.eigvalsh(avg), 0.0, None)
    return float((int(M) - 1) ** r * np.sum(w ** (1.0 + r)))


__all__ = [
    "Codebook",
    "DecoderSpec",
    "MonteCarloResult",
    "POVM",
    "Theorem1Bound",
    "average_error",
    "build_decoder",
    "build_quotient_pgm",
    "build_standard_pgm",
    "commuting_tight_bound",
    "expected_error_exact",
    "expected_error_mc",
    "hayashi_rhs",
    "sample_codebook",
    "simulate",
    "theorem1_rhs",
]
