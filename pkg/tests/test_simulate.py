import math

import numpy as np
import pytest

import fadebound.simulate as simulate
from fadebound.bounds import LinkParams, union_bound
from fadebound.channel import build_rayleigh, exponential_correlation
from fadebound.constellation import (
    Constellation,
    distance_spectrum,
    gen_orthogonal,
    gen_qpsk,
)
from fadebound.simulate import MAX_SIM_M, mc_bler, ml_detect, wilson_interval


@pytest.fixture(scope="module")
def ch_n1():
    return build_rayleigh(exponential_correlation(1, 0.0))


@pytest.fixture(scope="module")
def ch_n2():
    return build_rayleigh(exponential_correlation(2, 0.1))


class TestWilsonInterval:
    def test_against_direct_formula(self):
        z = 1.959963984540054
        for errors, trials in ((0, 100), (7, 100), (50, 100), (100, 100)):
            lo, hi = wilson_interval(errors, trials)
            p = errors / trials
            center = (p + z * z / (2 * trials)) / (1 + z * z / trials)
            half = (
                z
                * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
                / (1 + z * z / trials)
            )
            assert lo == pytest.approx(max(0.0, center - half))
            assert hi == pytest.approx(min(1.0, center + half))
            assert 0.0 <= lo <= p <= hi <= 1.0

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)


class TestMlDetect:
    def test_noiseless_recovery(self, ch_n2):
        c = gen_orthogonal(4)
        E = 10.0
        rng = np.random.default_rng(5)
        for k in range(4):
            h = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / math.sqrt(2)
            r = (math.sqrt(E) * h[:, None] * c.signals[k][None, :]).reshape(-1)
            assert ml_detect(r, h, c, E) == k

    def test_tie_breaks_to_lowest_index(self):
        c = gen_orthogonal(4)
        h = np.zeros(2, dtype=complex)
        r = np.zeros(8, dtype=complex)
        assert ml_detect(r, h, c, 1.0) == 0

    def test_dimension_mismatch(self):
        c = gen_orthogonal(4)
        with pytest.raises(ValueError, match="dimension mismatch"):
            ml_detect(np.zeros(5, dtype=complex), np.zeros(2, dtype=complex), c, 1.0)


class TestMcBler:
    def test_deterministic(self, ch_n2):
        c = gen_orthogonal(4)
        link = LinkParams.from_received_db(8.0, 2)
        a = mc_bler(c, ch_n2, link, trials=5000, seed=123)
        b = mc_bler(c, ch_n2, link, trials=5000, seed=123)
        assert a == b

    def test_seed_changes_result(self, ch_n2):
        c = gen_orthogonal(4)
        link = LinkParams.from_received_db(8.0, 2)
        a = mc_bler(c, ch_n2, link, trials=5000, seed=1)
        b = mc_bler(c, ch_n2, link, trials=5000, seed=2)
        assert a.errors != b.errors

    def test_independent_of_chunking(self, ch_n2, monkeypatch):
        c = gen_orthogonal(4)
        link = LinkParams.from_received_db(8.0, 2)
        base = mc_bler(c, ch_n2, link, trials=3000, seed=9)
        monkeypatch.setattr(simulate, "_CHUNK", 257)
        assert mc_bler(c, ch_n2, link, trials=3000, seed=9) == base

    def test_early_stop_independent_of_chunking(self, ch_n2, monkeypatch):
        c = gen_orthogonal(16)
        link = LinkParams.from_received_db(10.0, 2)
        base = mc_bler(c, ch_n2, link, trials=50_000, seed=4, min_errors=100)
        assert base.errors >= 100
        assert base.trials >= 10 * 100
        assert base.trials < 50_000
        monkeypatch.setattr(simulate, "_CHUNK", 333)
        assert mc_bler(c, ch_n2, link, trials=50_000, seed=4, min_errors=100) == base

    def test_pure_noise_error_rate(self, ch_n2):
        # with snr ~ 0 the decision is uniform: BLER = (M-1)/M
        c = gen_orthogonal(16)
        est = mc_bler(c, ch_n2, LinkParams(snr=1e-12), trials=100_000, seed=21)
        assert est.ci_low <= 15.0 / 16.0 <= est.ci_high

    def test_high_snr_error_free(self, ch_n2):
        c = gen_orthogonal(4)
        est = mc_bler(c, ch_n2, LinkParams.from_db(80.0), trials=10_000, seed=2)
        assert est.errors == 0
        assert est.bler == 0.0

    def test_qpsk_band_against_union_bound(self, ch_n1):
        c = gen_qpsk()
        spec = distance_spectrum(c)
        for snr_db in (10.0, 20.0):
            link = LinkParams.from_received_db(snr_db, 1)
            ub = union_bound(spec, link, ch_n1)
            est = mc_bler(c, ch_n1, link, trials=100_000, seed=31)
            assert ub / 4.0 < est.bler < ub

    def test_estimate_invariants(self, ch_n2):
        c = gen_orthogonal(4)
        est = mc_bler(c, ch_n2, LinkParams.from_received_db(5.0, 2), trials=2000, seed=8)
        assert est.trials == 2000
        assert est.bler == est.errors / est.trials
        assert est.ci_low <= est.bler <= est.ci_high
        assert est.seed == 8

    def test_trials_guard(self, ch_n2):
        c = gen_orthogonal(4)
        with pytest.raises(ValueError):
            mc_bler(c, ch_n2, LinkParams(snr=1.0), trials=0, seed=1)

    def test_scheme_size_guard(self, ch_n2):
        big = Constellation(
            signals=np.ones((MAX_SIM_M + 1, 1), dtype=complex), label="too big"
        )
        with pytest.raises(ValueError, match="limited to M"):
            mc_bler(big, ch_n2, LinkParams(snr=1.0), trials=10, seed=1)
