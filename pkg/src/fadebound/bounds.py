"""Union bound, deep-fade objective, and the tightened error bound.

The tightened bound assumes a block error whenever the channel gain falls
below a threshold gamma and minimizes

    G(gamma) = Pr[X < gamma] + (1/M) sum_i sum_d A_i(d) * T(d, gamma)

over gamma >= 0, where T is the pairwise error probability restricted to
gains above gamma.  The objective is unimodal and its minimizer solves a
monotone stationarity equation, so a plain bisection finds it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from .channel import RayleighChannel, gain_cdf
from .constellation import DistanceSpectrum

# The eigenvalue partial fractions alternate in sign; when their sum
# cancels by more than this factor the scalar path recomputes in high
# precision.
_CANCEL_LIMIT = 1e4
_REFINE_DPS = 40


class NumericError(ArithmeticError):
    """Numerical failure inside a bound evaluation."""


@dataclass(frozen=True)
class LinkParams:
    """Signal-to-noise ratio E / sigma^2 with sigma^2 fixed to 1."""

    snr: float

    def __post_init__(self):
        if not self.snr > 0.0:
            raise ValueError("snr must be positive")

    @staticmethod
    def from_db(snr_db: float) -> "LinkParams":
        return LinkParams(snr=10.0 ** (snr_db / 10.0))

    @staticmethod
    def from_received_db(snr_db: float, order_N: int) -> "LinkParams":
        """Map a total average received SNR in dB to E / sigma^2.

        The mean channel gain E[X] equals the number of receive antennas N
        (trace of a unit-diagonal correlation matrix), so the received SNR
        is N E / sigma^2.  Sweep dB axes use this convention.
        """
        return LinkParams(snr=10.0 ** (snr_db / 10.0) / order_N)


@dataclass(frozen=True)
class BoundPoint:
    snr_db: float
    union_bound: float
    new_bound: float
    gamma_star: float


def qfunc(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def _pep_terms(d: np.ndarray, link: LinkParams, ch: RayleighChannel, gamma: float):
    """Per-eigenvalue tail PEP contributions, shape (P, N).

    Integrating the finite-interval Q-function representation in closed
    form gives, per eigenvalue lambda with partial-fraction weight b and
    c = d^2 E / 4, beta = c + 1/lambda:

        b/2 * exp(-(c + 1/lambda) gamma)
            * [erfcx(sqrt(c gamma)) - sqrt(c/beta) erfcx(sqrt(beta gamma))]

    which at gamma = 0 reduces to b / (2 lambda beta (1 + sqrt(c/beta))).
    The scaled-erfc form avoids cancellation between the two tail terms.
    """
    d2 = np.asarray(d, dtype=float) ** 2
    c = d2[:, None] * (link.snr / 4.0)  # sigma^2 = 1
    lam = ch.eigenvalues[None, :]
    b = ch.coeffs[None, :]
    beta = c + 1.0 / lam
    ratio = np.sqrt(c / beta)
    if gamma > 0.0:
        bracket = erfcx(np.sqrt(c * gamma)) - ratio * erfcx(np.sqrt(beta * gamma))
        return 0.5 * b * np.exp(-beta * gamma) * bracket
    return b / (2.0 * lam * beta * (1.0 + ratio))


def _pep_tail_array(d: np.ndarray, link: LinkParams, ch: RayleighChannel, gamma: float):
    terms = _pep_terms(d, link, ch, gamma)
    vals = terms.sum(axis=1)
    if not np.all(np.isfinite(vals)):
        raise NumericError("non-finite tail PEP")
    return np.clip(vals, 0.0, None)


def _pep_tail_refined(d: float, link: LinkParams, ch: RayleighChannel, gamma: float) -> float:
    """High-precision evaluation for badly cancelling eigenvalue sums."""
    import mpmath as mp

    with mp.workdps(_REFINE_DPS):
        lam = [mp.mpf(float(x)) for x in ch.eigenvalues]
        N = len(lam)
        b = [
            lam[j] ** (N - 1) / mp.fprod(lam[j] - lam[n] for n in range(N) if n != j)
            for j in range(N)
        ]
        c = mp.mpf(float(d)) ** 2 * mp.mpf(link.snr) / 4
        g = mp.mpf(float(gamma))
        total = mp.mpf(0)
        for lj, bj in zip(lam, b):
            beta = c + 1 / lj
            t1 = mp.mpf(0.5) * mp.erfc(mp.sqrt(c * g)) * mp.exp(-g / lj)
            t2 = mp.mpf(0.5) * mp.sqrt(c / beta) * mp.erfc(mp.sqrt(beta * g))
            total += bj * (t1 - t2)
        return max(0.0, float(total))


def pep_tail(d: float, link: LinkParams, ch: RayleighChannel, gamma: float = 0.0) -> float:
    """Integral of Q(d sqrt(x E / 2)) against the gain density over [gamma, inf)."""
    if not d > 0.0:
        raise ValueError("distance must be positive")
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    terms = _pep_terms(np.array([d]), link, ch, gamma)[0]
    total = float(terms.sum())
    mag = float(np.abs(terms).sum())
    if mag > 0.0 and (total <= 0.0 or mag / max(abs(total), 1e-300) > _CANCEL_LIMIT):
        return _pep_tail_refined(d, link, ch, gamma)
    return max(0.0, total)


def _tail_sum(spec: DistanceSpectrum, link: LinkParams, ch: RayleighChannel, gamma: float) -> float:
    d, w = spec.flattened()
    return float(w @ _pep_tail_array(d, link, ch, gamma))


def union_bound(spec: DistanceSpectrum, link: LinkParams, ch: RayleighChannel) -> float:
    """Classical union bound; may exceed 1."""
    return _tail_sum(spec, link, ch, 0.0)


def objective_G(
    spec: DistanceSpectrum, link: LinkParams, ch: RayleighChannel, gamma: float
) -> float:
    """Deep-fade objective; equals the union bound at gamma = 0."""
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    return float(gain_cdf(ch, gamma)) + _tail_sum(spec, link, ch, gamma)


def stationarity_h(spec: DistanceSpectrum, link: LinkParams, gamma) -> float:
    """Bracketed factor of dG/dgamma:
    1 - (1/M) sum_i sum_d A_i(d) Q(d sqrt(E gamma / 2)).

    Strictly increasing in gamma; its root is the optimal threshold.
    """
    d, w = spec.flattened()
    g = np.asarray(gamma, dtype=float)
    arg = d[..., :] * np.sqrt(link.snr * g[..., None] / 2.0)
    val = 1.0 - qfunc(arg) @ w
    if val.ndim == 0:
        return float(val)
    return val


def find_gamma_star(spec: DistanceSpectrum, link: LinkParams) -> float:
    """Optimal deep-fade threshold: root of the stationarity equation, or 0
    when no deep-fade threshold helps (h(0) >= 0)."""
    if stationarity_h(spec, link, 0.0) >= 0.0:
        return 0.0
    hi = 1.0
    for _ in range(61):
        if stationarity_h(spec, link, hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NumericError("stationarity root not bracketed")
    lo = 0.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        hm = stationarity_h(spec, link, mid)
        if hm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < max(1e-12, 1e-10 * mid) and abs(hm) < 1e-9:
            return mid
    return 0.5 * (lo + hi)


def new_bound(spec: DistanceSpectrum, link: LinkParams, ch: RayleighChannel):
    """Tightened bound and its threshold: (G(gamma*), gamma*)."""
    gamma_star = find_gamma_star(spec, link)
    return objective_G(spec, link, ch, gamma_star), gamma_star


def bound_point(
    spec: DistanceSpectrum, link: LinkParams, ch: RayleighChannel, snr_db: float
) -> BoundPoint:
    ub = union_bound(spec, link, ch)
    nb, gs = new_bound(spec, link, ch)
    return BoundPoint(snr_db=snr_db, union_bound=ub, new_bound=nb, gamma_star=gs)
