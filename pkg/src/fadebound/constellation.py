"""Signalling schemes and their distance spectra.

Constellations are stored as M-by-K complex matrices normalized to unit
average energy.  Distance spectra can be computed by brute-force pairwise
enumeration or, for orthogonal and permutation schemes, from closed-form
combinatorics.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

# Squared distances are grouped to the nearest multiple of this before
# counting; exact-rational spectra (orthogonal, permutation) land on the
# same bins as brute force, and generic Gaussian codes are unaffected.
DEFAULT_BIN_TOL = 1e-9

_MAX_DERANGEMENT_N = 20
_INT64_MAX = 2**63 - 1


class ConstellationError(ValueError):
    """Invalid or degenerate signalling scheme."""


@dataclass(frozen=True)
class Constellation:
    """An M-signal scheme of complex dimension K with unit average energy."""

    signals: np.ndarray  # (M, K) complex128
    label: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def count_M(self) -> int:
        return self.signals.shape[0]

    @property
    def dim_K(self) -> int:
        return self.signals.shape[1]

    def average_energy(self) -> float:
        return float(np.mean(np.sum(np.abs(self.signals) ** 2, axis=1)))

    def to_json(self) -> str:
        flat = self.signals.reshape(-1)
        return json.dumps(
            {
                "label": self.label,
                "K": self.dim_K,
                "M": self.count_M,
                "signals": [[float(z.real), float(z.imag)] for z in flat],
            }
        )

    @staticmethod
    def from_json(text: str) -> "Constellation":
        doc = json.loads(text)
        pairs = np.asarray(doc["signals"], dtype=float)
        sig = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(doc["M"], doc["K"])
        return Constellation(signals=sig, label=doc.get("label", ""))


@dataclass(frozen=True)
class DistanceSpectrum:
    """Per-signal (distance, count) multisets.

    When ``symmetric`` is true every signal shares the same spectrum and a
    single entry list is stored; otherwise one list per signal.
    """

    num_signals: int
    entries: tuple  # tuple of per-signal tuples of (distance, count)
    symmetric: bool

    def __post_init__(self):
        expect = 1 if self.symmetric else self.num_signals
        if len(self.entries) != expect:
            raise ConstellationError("spectrum entry count mismatch")
        for sig_entries in self.entries:
            total = 0
            prev = 0.0
            for d, count in sig_entries:
                if d <= prev:
                    raise ConstellationError("distances must be strictly increasing")
                if count < 0 or count > _INT64_MAX:
                    raise ConstellationError("count overflow")
                prev = d
                total += count
            if total != self.num_signals - 1:
                raise ConstellationError(
                    f"per-signal counts sum to {total}, expected {self.num_signals - 1}"
                )

    def entries_for(self, i: int):
        return self.entries[0] if self.symmetric else self.entries[i]

    def flattened(self):
        """Aggregate to (distances, weights) with weight = count / M summed
        over signals; this is the only form the bound evaluators need."""
        cached = getattr(self, "_flat_cache", None)
        if cached is not None:
            return cached
        flat = self._flatten()
        object.__setattr__(self, "_flat_cache", flat)
        return flat

    def _flatten(self):
        if self.symmetric:
            d = np.array([e[0] for e in self.entries[0]], dtype=float)
            w = np.array([float(e[1]) for e in self.entries[0]], dtype=float)
            return d, w
        acc: dict[float, float] = {}
        for sig_entries in self.entries:
            for d, count in sig_entries:
                acc[d] = acc.get(d, 0.0) + count / self.num_signals
        items = sorted(acc.items())
        return (
            np.array([d for d, _ in items], dtype=float),
            np.array([w for _, w in items], dtype=float),
        )

    def to_json(self) -> str:
        per_signal = [
            [{"d": float(d), "count": int(c)} for d, c in self.entries_for(i)]
            for i in range(self.num_signals)
        ]
        return json.dumps({"symmetric": self.symmetric, "per_signal": per_signal})

    @staticmethod
    def from_json(text: str) -> "DistanceSpectrum":
        doc = json.loads(text)
        lists = [
            tuple((float(e["d"]), int(e["count"])) for e in sig)
            for sig in doc["per_signal"]
        ]
        symmetric = bool(doc["symmetric"])
        if symmetric:
            return DistanceSpectrum(len(lists), (lists[0],), True)
        return DistanceSpectrum(len(lists), tuple(lists), False)


def _bin_key(d2: float, bin_tol: float) -> int:
    return int(round(d2 / bin_tol))


def _binned_distance(d2: float, bin_tol: float) -> float:
    return math.sqrt(_bin_key(d2, bin_tol) * bin_tol)


def normalize(raw_signals, label: str = "", metadata: dict | None = None) -> Constellation:
    """Scale a raw M-by-K signal matrix uniformly to unit average energy."""
    sig = np.array(raw_signals, dtype=complex)
    if sig.ndim == 1:
        sig = sig[:, None]
    if sig.shape[0] < 2:
        raise ConstellationError("need at least two signals")
    mean_energy = np.mean(np.sum(np.abs(sig) ** 2, axis=1))
    if mean_energy <= 0.0:
        raise ConstellationError("degenerate constellation")
    sig = sig / math.sqrt(mean_energy)
    if _min_pairwise_distance(sig) <= 1e-9:
        raise ConstellationError("repeated signal")
    return Constellation(signals=sig, label=label, metadata=metadata or {})


def _min_pairwise_distance(sig: np.ndarray) -> float:
    diff = sig[:, None, :] - sig[None, :, :]
    d = np.sqrt(np.sum(np.abs(diff) ** 2, axis=2))
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def distance_spectrum(c: Constellation, bin_tol: float = DEFAULT_BIN_TOL) -> DistanceSpectrum:
    """Brute-force per-signal distance spectrum, binned on squared distance."""
    sig = c.signals
    M = c.count_M
    diff = sig[:, None, :] - sig[None, :, :]
    d2 = np.sum(np.abs(diff) ** 2, axis=2)
    per_signal = []
    for i in range(M):
        counts: dict[int, int] = {}
        for k in range(M):
            if k == i:
                continue
            key = _bin_key(float(d2[i, k]), bin_tol)
            counts[key] = counts.get(key, 0) + 1
        per_signal.append(
            tuple((math.sqrt(key * bin_tol), n) for key, n in sorted(counts.items()))
        )
    symmetric = all(s == per_signal[0] for s in per_signal[1:])
    if symmetric:
        return DistanceSpectrum(M, (per_signal[0],), True)
    return DistanceSpectrum(M, tuple(per_signal), False)


def gen_orthogonal(M: int) -> Constellation:
    """Standard-basis orthogonal signalling; K = M, each signal unit energy."""
    if M < 2:
        raise ConstellationError("need at least two signals")
    return Constellation(signals=np.eye(M, dtype=complex), label=f"orthogonal M={M}")


def gen_permutation(L: int) -> Constellation:
    """Binary permutation code: one 1 per length-L slot, K = L^2, M = L!.

    Codeword for permutation pi sets element pi(l)+1 of slot l; each row has
    exactly L ones and is scaled by 1/sqrt(L).  Permutations are enumerated
    in lexicographic order.
    """
    if not 2 <= L <= 10:
        raise ConstellationError("permutation size unsupported")
    M = math.factorial(L)
    sig = np.zeros((M, L * L), dtype=complex)
    scale = 1.0 / math.sqrt(L)
    for i, perm in enumerate(itertools.permutations(range(L))):
        for l, n in enumerate(perm):
            sig[i, l * L + n] = scale
    return Constellation(signals=sig, label=f"permutation L={L}")


def gen_qpsk() -> Constellation:
    """QPSK test fixture {1, j, -1, -j}; already unit energy."""
    return Constellation(
        signals=np.array([[1.0], [1.0j], [-1.0], [-1.0j]], dtype=complex),
        label="qpsk",
    )


def gen_gaussian(K: int, M: int, seed: int) -> Constellation:
    """M random signals drawn i.i.d. circularly symmetric Gaussian in C^K,
    then normalized.  Deterministic in the seed; on a (measure-zero)
    duplicate draw the seed is incremented and the retry recorded."""
    if M < 2:
        raise ConstellationError("need at least two signals")
    attempt_seed = seed
    for attempt in range(16):
        rng = np.random.default_rng(attempt_seed)
        raw = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / math.sqrt(2.0)
        try:
            c = normalize(raw, label=f"gaussian K={K} M={M} seed={seed}")
        except ConstellationError:
            attempt_seed += 1
            continue
        meta = {"seed": seed, "seed_used": attempt_seed}
        if attempt_seed != seed:
            meta["regenerated"] = attempt
        return Constellation(signals=c.signals, label=c.label, metadata=meta)
    raise ConstellationError("degenerate constellation")


def derangements(n: int) -> int:
    """Exact count of fixed-point-free permutations of n elements."""
    if n < 0:
        raise ConstellationError("negative n")
    if n > _MAX_DERANGEMENT_N:
        raise ConstellationError("count overflow")
    if n == 0:
        return 1
    if n == 1:
        return 0
    prev2, prev1 = 1, 0  # !0, !1
    for k in range(2, n + 1):
        prev2, prev1 = prev1, (k - 1) * (prev1 + prev2)
    return prev1


def analytic_spectrum_orthogonal(M: int) -> DistanceSpectrum:
    """Closed-form orthogonal spectrum: all M-1 neighbours at distance sqrt(2)."""
    if M < 2:
        raise ConstellationError("need at least two signals")
    d = _binned_distance(2.0, DEFAULT_BIN_TOL)
    return DistanceSpectrum(M, (((d, M - 1),),), True)


def analytic_spectrum_permutation(L: int) -> DistanceSpectrum:
    """Closed-form permutation-code spectrum: !m * C(L, m) codewords at
    squared distance 2m/L for m = 2..L."""
    if not 2 <= L <= _MAX_DERANGEMENT_N:
        raise ConstellationError("permutation size unsupported")
    entries = []
    for m in range(2, L + 1):
        count = derangements(m) * math.comb(L, m)
        if count > _INT64_MAX:
            raise ConstellationError("count overflow")
        entries.append((_binned_distance(2.0 * m / L, DEFAULT_BIN_TOL), count))
    return DistanceSpectrum(math.factorial(L), (tuple(entries),), True)
