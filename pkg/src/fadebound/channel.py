"""Correlated Rayleigh block-fading channel.

The squared channel norm X = ||h||^2 of a correlated Rayleigh vector is a
weighted sum of independent unit-mean exponentials, one per eigenvalue of
the correlation matrix.  Its hypoexponential density and distribution are
evaluated from the eigenvalues and partial-fraction coefficients; fading
vectors are sampled through the symmetric matrix square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Eigenvalues closer than this (relative) are treated as a cluster and
# spread apart so the partial-fraction coefficients stay finite.
_CLUSTER_GAP = 1e-9
_PERTURB_STEP = 1e-6


class ChannelError(ValueError):
    """Invalid channel configuration."""


@dataclass(frozen=True)
class CorrelationMatrix:
    """Hermitian PSD matrix with unit diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        R = self.entries
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ChannelError("correlation matrix must be square")
        if np.max(np.abs(R - R.conj().T)) > 1e-12:
            raise ChannelError("correlation matrix must be Hermitian")
        if np.max(np.abs(np.diag(R) - 1.0)) > 1e-12:
            raise ChannelError("correlation matrix must have unit diagonal")
        if np.min(np.linalg.eigvalsh(R)) < -1e-10:
            raise ChannelError("invalid correlation matrix")

    @property
    def order_N(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class RayleighChannel:
    """Eigen data of a correlation matrix, ready for pdf/cdf evaluation and
    fading-vector sampling."""

    order_N: int
    eigenvalues: np.ndarray  # descending, strictly distinct after perturbation
    coeffs: np.ndarray  # partial-fraction coefficients b_j
    sqrt_factor: np.ndarray  # symmetric square root of R
    perturbed: bool


def exponential_correlation(N: int, rho: float) -> CorrelationMatrix:
    """Exponential correlation model: entry (i, j) is rho^|i-j|."""
    if not 0.0 <= rho < 1.0:
        raise ChannelError("rho must be in [0, 1)")
    idx = np.arange(N)
    R = rho ** np.abs(idx[:, None] - idx[None, :])
    return CorrelationMatrix(entries=R.astype(complex))


def _spread_clusters(lams: np.ndarray):
    """Split near-equal eigenvalues with symmetric multiplicative offsets.

    Offsets within a cluster sum to zero so the trace is preserved to
    rounding error.  Returns (new_eigenvalues, was_perturbed).
    """
    out = lams.astype(float).copy()
    perturbed = False
    scale = max(float(np.max(np.abs(lams))), 1.0)
    i = 0
    n = len(out)
    while i < n:
        j = i + 1
        while j < n and abs(out[j - 1] - out[j]) < _CLUSTER_GAP * scale:
            j += 1
        size = j - i
        if size > 1:
            perturbed = True
            for k in range(size):
                out[i + k] *= 1.0 + _PERTURB_STEP * (size - 1 - 2 * k)
        i = j
    return np.sort(out)[::-1], perturbed


def build_rayleigh(R: CorrelationMatrix) -> RayleighChannel:
    """Eigen-decompose R and precompute the hypoexponential coefficients."""
    lams, V = np.linalg.eigh(R.entries)
    order = np.argsort(lams)[::-1]
    lams = lams[order]
    V = V[:, order]
    if lams[-1] < -1e-10:
        raise ChannelError("invalid correlation matrix")
    sqrt_factor = (V * np.sqrt(np.clip(lams, 0.0, None))) @ V.conj().T

    spread, perturbed = _spread_clusters(lams)
    if np.any(spread <= 0.0):
        raise ChannelError("invalid correlation matrix")

    # Extended precision: the b_j cancel heavily when eigenvalues are close.
    lam_l = spread.astype(np.longdouble)
    N = len(lam_l)
    b = np.empty(N, dtype=np.longdouble)
    for j in range(N):
        prod = lam_l[j] ** (N - 1)
        for n in range(N):
            if n != j:
                prod /= lam_l[j] - lam_l[n]
        b[j] = prod
    return RayleighChannel(
        order_N=R.order_N,
        eigenvalues=spread,
        coeffs=np.asarray(b, dtype=float),
        sqrt_factor=sqrt_factor,
        perturbed=perturbed,
    )


def gain_pdf(ch: RayleighChannel, x):
    """Density of X = ||h||^2: sum_j (b_j / lambda_j) exp(-x / lambda_j)."""
    x = np.asarray(x, dtype=float)
    lam = ch.eigenvalues.astype(np.longdouble)
    b = _coeffs_long(ch)
    val = np.zeros(x.shape, dtype=np.longdouble)
    pos = x >= 0.0
    xl = x[pos].astype(np.longdouble)
    acc = np.zeros(xl.shape, dtype=np.longdouble)
    for j in range(ch.order_N):
        acc += (b[j] / lam[j]) * np.exp(-xl / lam[j])
    val[pos] = acc
    out = np.asarray(val, dtype=float)
    out[(out < 0.0) & (out > -1e-9)] = 0.0
    if out.ndim == 0:
        return float(out)
    return out


def gain_cdf(ch: RayleighChannel, x):
    """Distribution of X: sum_j b_j (1 - exp(-x / lambda_j)), clipped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    lam = ch.eigenvalues.astype(np.longdouble)
    b = _coeffs_long(ch)
    val = np.zeros(x.shape, dtype=np.longdouble)
    pos = x > 0.0
    xl = x[pos].astype(np.longdouble)
    acc = np.zeros(xl.shape, dtype=np.longdouble)
    for j in range(ch.order_N):
        acc += b[j] * (1.0 - np.exp(-xl / lam[j]))
    val[pos] = acc
    out = np.clip(np.asarray(val, dtype=float), 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def _coeffs_long(ch: RayleighChannel) -> np.ndarray:
    # Recompute in longdouble so pdf/cdf sums cancel cleanly when perturbed.
    lam = ch.eigenvalues.astype(np.longdouble)
    N = ch.order_N
    b = np.empty(N, dtype=np.longdouble)
    for j in range(N):
        prod = lam[j] ** (N - 1)
        for n in range(N):
            if n != j:
                prod /= lam[j] - lam[n]
        b[j] = prod
    return b


def sample_fading(ch: RayleighChannel, rng: np.random.Generator, count: int | None = None):
    """Draw correlated fading vectors h = R^(1/2) u with u ~ CN(0, I).

    Returns an (N,) vector, or a (count, N) matrix when ``count`` is given.
    """
    n = count if count is not None else 1
    u = (
        rng.standard_normal((n, ch.order_N)) + 1j * rng.standard_normal((n, ch.order_N))
    ) / math.sqrt(2.0)
    h = u @ ch.sqrt_factor.T
    if count is None:
        return h[0]
    return h
