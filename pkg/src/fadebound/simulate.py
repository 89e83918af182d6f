"""Seeded Monte Carlo estimation of the exact ML block error probability.

Each trial draws its randomness from a Philox stream keyed by the run seed
and counter-offset by the trial index, so results are bit-identical for a
given (config, seed) no matter how trials are chunked or parallelized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import LinkParams
from .channel import RayleighChannel
from .constellation import Constellation

_CHUNK = 2048
# Each trial owns a disjoint 2^128-block slice of the Philox counter space.
_TRIAL_STRIDE = 1 << 128

MAX_SIM_M = 10**4


@dataclass(frozen=True)
class McEstimate:
    trials: int
    errors: int
    bler: float
    ci_low: float
    ci_high: float
    seed: int


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    # clamping keeps the interval inside [0, 1] and around p even when the
    # center-half arithmetic rounds past an endpoint (e.g. p = 0)
    return min(max(0.0, center - half), p), max(min(1.0, center + half), p)


def ml_detect(r: np.ndarray, h: np.ndarray, c: Constellation, E: float) -> int:
    """Exhaustive ML decision: argmax_k 2 Re{r^H H s_k} - sqrt(E)||s_k||^2 sum|h_n|^2.

    Ties break toward the lowest signal index.
    """
    N = h.shape[0]
    K = c.dim_K
    r = np.asarray(r, dtype=complex)
    if r.shape != (N * K,):
        raise ValueError("dimension mismatch")
    rb = r.reshape(N, K)
    # r^H H s_k = sum_n h_n (r_n^H s_k)
    cross = rb.conj() @ c.signals.T  # (N, M)
    z = h @ cross  # (M,)
    energies = np.sum(np.abs(c.signals) ** 2, axis=1)
    xi = 2.0 * z.real - math.sqrt(E) * energies * float(np.sum(np.abs(h) ** 2))
    return int(np.argmax(xi))


def _trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=trial * _TRIAL_STRIDE))


def _run_chunk(c, ch, E, seed, start, count):
    """Simulate trials [start, start+count); returns per-trial error flags."""
    N = ch.order_N
    M, K = c.count_M, c.dim_K
    h = np.empty((count, N), dtype=complex)
    noise = np.empty((count, N, K), dtype=complex)
    idx = np.empty(count, dtype=np.int64)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for t in range(count):
        rng = _trial_generator(seed, start + t)
        u = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) * inv_sqrt2
        h[t] = ch.sqrt_factor @ u
        idx[t] = rng.integers(0, M)
        noise[t] = (
            rng.standard_normal((N, K)) + 1j * rng.standard_normal((N, K))
        ) * inv_sqrt2

    sent = c.signals[idx]  # (count, K)
    r = math.sqrt(E) * h[:, :, None] * sent[:, None, :] + noise  # (count, N, K)
    cross = np.einsum("tnk,mk->tnm", r.conj(), c.signals)
    z = np.einsum("tn,tnm->tm", h, cross)
    energies = np.sum(np.abs(c.signals) ** 2, axis=1)
    gain = np.sum(np.abs(h) ** 2, axis=1)
    xi = 2.0 * z.real - math.sqrt(E) * energies[None, :] * gain[:, None]
    decided = np.argmax(xi, axis=1)
    return decided != idx


def mc_bler(
    c: Constellation,
    ch: RayleighChannel,
    link: LinkParams,
    trials: int,
    seed: int,
    min_errors: int = 0,
) -> McEstimate:
    """Estimate the block error rate of exact ML detection.

    With ``min_errors > 0`` the run stops at the first trial where at least
    ``min_errors`` errors have accumulated and at least ``10 * min_errors``
    trials have run; the stopping point is a per-trial decision, so the
    result is independent of chunking.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if c.count_M > MAX_SIM_M:
        raise ValueError(f"simulation limited to M <= {MAX_SIM_M}")
    E = link.snr
    done = 0
    errors = 0
    while done < trials:
        count = min(_CHUNK, trials - done)
        flags = _run_chunk(c, ch, E, seed, done, count)
        if min_errors > 0:
            cum = errors + np.cumsum(flags)
            trial_no = done + np.arange(1, count + 1)
            stop = (cum >= min_errors) & (trial_no >= 10 * min_errors)
            if np.any(stop):
                k = int(np.argmax(stop))
                errors = int(cum[k])
                done = int(trial_no[k])
                break
        errors += int(np.sum(flags))
        done += count
    lo, hi = wilson_interval(errors, done)
    return McEstimate(
        trials=done, errors=errors, bler=errors / done, ci_low=lo, ci_high=hi, seed=seed
    )
