"""Tests for the link simulation: pilots, LMMSE estimation, batching, and
per-stream ZF SINR, including an exact finite-size distributional oracle."""

import numpy as np
import pytest
from scipy import integrate, special

from mimo_ee import analytic, channel
from mimo_ee.channel import SystemConfig
from mimo_ee.errors import DimensionMismatch, InvalidConfig
from mimo_ee.linalg import RngStream


def lmmse_oracle(y_p, s_p, snr, impairment):
    """Independent LMMSE computation via an explicit matrix inverse."""
    n_t, t_p = s_p.shape
    a = snr / n_t
    reg = a * (s_p.conj().T @ s_p) + (impairment**2 * snr + 1.0) * np.eye(t_p)
    return np.sqrt(a) * y_p @ np.linalg.inv(reg) @ s_p.conj().T


class TestSystemConfig:
    def test_properties(self):
        cfg = SystemConfig(n_t=4, n_r=10, coherence=64, training_len=8, snr=1.0)
        assert cfg.beta == 2.5
        assert cfg.data_len == 56

    @pytest.mark.parametrize("kwargs", [
        dict(n_t=0, n_r=4, coherence=64, training_len=8, snr=1.0),
        dict(n_t=4, n_r=8, coherence=64, training_len=2, snr=1.0),   # T_p < N_t
        dict(n_t=4, n_r=8, coherence=6, training_len=8, snr=1.0),    # T_p > T
        dict(n_t=4, n_r=4, coherence=64, training_len=8, snr=1.0),   # N_r <= N_t
        dict(n_t=4, n_r=8, coherence=64, training_len=8, snr=0.0),
        dict(n_t=4, n_r=8, coherence=64, training_len=8, snr=1.0, impairment=1.0),
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(InvalidConfig):
            SystemConfig(**kwargs)


class TestPilots:
    @pytest.mark.parametrize("n_t,t_p", [(1, 1), (2, 2), (3, 7), (8, 8), (16, 40)])
    def test_row_gram_is_scaled_identity(self, n_t, t_p):
        cfg = SystemConfig(n_t=n_t, n_r=n_t + 1, coherence=2 * max(t_p, 2),
                           training_len=t_p, snr=1.0)
        s_p = channel.build_pilots(cfg)
        assert s_p.shape == (n_t, t_p)
        assert np.allclose(s_p @ s_p.conj().T, t_p * np.eye(n_t), atol=1e-10 * t_p)

    def test_unit_modulus_entries(self):
        cfg = SystemConfig(n_t=5, n_r=6, coherence=64, training_len=11, snr=1.0)
        assert np.allclose(np.abs(channel.build_pilots(cfg)), 1.0)


class TestLmmse:
    def test_two_by_two_hand_case(self):
        # fully worked 1-antenna, 2-pilot example: s_p = [1, 1], y_p = [2, 0]
        # reg = a*ones(2) + r*I with a = snr, r = d^2 snr + 1
        # inv(reg) @ s_p^H has entries 1/(2a + r) each, so
        # h_hat = sqrt(a) * (y11 + y12) / (2a + r)
        snr, d = 4.0, 0.5
        s_p = np.array([[1.0, 1.0]], dtype=complex)
        y_p = np.array([[2.0, 0.0]], dtype=complex)
        a, r = snr, d**2 * snr + 1.0
        expected = np.sqrt(a) * 2.0 / (2 * a + r)
        got = channel.lmmse_estimate(y_p, s_p, snr, d)
        assert got.shape == (1, 1)
        assert got[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_matches_inverse_oracle_orthogonal_pilots(self):
        cfg = SystemConfig(n_t=4, n_r=6, coherence=64, training_len=12,
                           snr=7.0, impairment=0.12)
        s_p = channel.build_pilots(cfg)
        gen = np.random.Generator(np.random.Philox(key=[3, 0]))
        y_p = gen.standard_normal((6, 12)) + 1j * gen.standard_normal((6, 12))
        got = channel.lmmse_estimate(y_p, s_p, cfg.snr, cfg.impairment)
        assert np.allclose(got, lmmse_oracle(y_p, s_p, cfg.snr, cfg.impairment),
                           rtol=1e-10)

    def test_matches_inverse_oracle_general_pilots(self):
        # a non-orthogonal pilot matrix exercises the full regularized solve
        gen = np.random.Generator(np.random.Philox(key=[4, 0]))
        s_p = gen.standard_normal((3, 5)) + 1j * gen.standard_normal((3, 5))
        y_p = gen.standard_normal((8, 5)) + 1j * gen.standard_normal((8, 5))
        got = channel.lmmse_estimate(y_p, s_p, 2.5, 0.1)
        assert np.allclose(got, lmmse_oracle(y_p, s_p, 2.5, 0.1), rtol=1e-10)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            channel.lmmse_estimate(np.ones((2, 5)), np.ones((2, 4)), 1.0, 0.0)


class TestTrainingSimulation:
    CFG = SystemConfig(n_t=4, n_r=8, coherence=64, training_len=8,
                       snr=10.0, impairment=0.1)

    def test_observation_consistency(self):
        blk = channel.simulate_training(self.CFG, RngStream(5))
        a = np.sqrt(self.CFG.snr / self.CFG.n_t)
        rebuilt = a * blk.h @ (blk.s_p + blk.delta_p) + blk.v_p
        assert np.allclose(blk.y_p, rebuilt, rtol=1e-12)

    def test_estimate_matches_lmmse_function(self):
        blk = channel.simulate_training(self.CFG, RngStream(5))
        expected = channel.lmmse_estimate(blk.y_p, blk.s_p, self.CFG.snr,
                                          self.CFG.impairment)
        assert np.allclose(blk.h_hat, expected, rtol=1e-10)

    def test_normalization_uses_standard_deviation(self):
        blk = channel.simulate_training(self.CFG, RngStream(5))
        sigma = np.sqrt(analytic.estimation_variances(self.CFG).var_estimate)
        assert np.allclose(blk.h_bar * sigma, blk.h_hat, rtol=1e-12)

    def test_batch_matches_single_blocks(self):
        streams = [RngStream(9, i) for i in range(5)]
        h, _, _, _, h_hat, h_bar = channel.simulate_training_batch(self.CFG, streams)
        for i, stream in enumerate(streams):
            blk = channel.simulate_training(self.CFG, stream)
            assert np.array_equal(h[i], blk.h)
            assert np.array_equal(h_hat[i], blk.h_hat)
            assert np.array_equal(h_bar[i], blk.h_bar)

    def test_estimate_variance_matches_formula(self):
        streams = [RngStream(21, i) for i in range(1500)]
        _, _, _, _, h_hat, _ = channel.simulate_training_batch(self.CFG, streams)
        var = float(np.mean(np.abs(h_hat) ** 2))
        expected = analytic.estimation_variances(self.CFG).var_estimate
        assert abs(var - expected) / expected < 0.02

    def test_error_variance_matches_formula(self):
        streams = [RngStream(22, i) for i in range(1500)]
        h, _, _, _, h_hat, _ = channel.simulate_training_batch(self.CFG, streams)
        var = float(np.mean(np.abs(h - h_hat) ** 2))
        expected = analytic.estimation_variances(self.CFG).var_error
        assert abs(var - expected) / expected < 0.05

    def test_estimate_and_error_uncorrelated(self):
        # orthogonality principle: E[h_hat * conj(h - h_hat)] = 0
        streams = [RngStream(23, i) for i in range(2000)]
        h, _, _, _, h_hat, _ = channel.simulate_training_batch(self.CFG, streams)
        cross = np.mean(h_hat * np.conj(h - h_hat))
        assert abs(cross) < 0.01

    def test_reduced_batch_second_moments(self):
        # the fast path is distribution-equivalent: unit entry variance and
        # the same per-column Gram mean as the full path
        streams = [RngStream(31, i) for i in range(1500)]
        h_bar = channel.reduced_h_bar_batch(self.CFG, streams)
        assert abs(np.mean(np.abs(h_bar) ** 2) - 1.0) < 0.02
        _, _, _, _, _, h_bar_full = channel.simulate_training_batch(
            self.CFG, [RngStream(32, i) for i in range(1500)])
        g_fast = np.mean([np.abs(b.conj().T @ b).mean() for b in h_bar])
        g_full = np.mean([np.abs(b.conj().T @ b).mean() for b in h_bar_full])
        assert abs(g_fast - g_full) / g_full < 0.03


class TestZfSinr:
    def test_ceiling_never_violated(self):
        cfg = SystemConfig(n_t=4, n_r=12, coherence=64, training_len=8,
                           snr=1e4, impairment=0.175)
        for i in range(100):
            sinr = channel.simulate_data_sinr(cfg, RngStream(100, i))
            assert sinr.shape == (4,)
            assert np.all(sinr < 1.0 / 0.175**2)

    def test_sinr_positive(self):
        cfg = SystemConfig(n_t=4, n_r=8, coherence=64, training_len=8, snr=0.1)
        sinr = channel.simulate_data_sinr(cfg, RngStream(101), debug_data=True)
        assert np.all(sinr > 0)

    def test_mean_rate_matches_finite_size_gamma_oracle(self):
        # For ideal hardware the normalized-estimate Gram is complex Wishart,
        # so 1 / [(W^-1)_kk] is Gamma(n_r - n_t + 1, 1) and the exact
        # finite-size mean rate is a one-dimensional integral.
        cfg = SystemConfig(n_t=4, n_r=8, coherence=64, training_len=8, snr=10.0)
        c0 = analytic.zf_interference_coeff(cfg)
        k = cfg.n_r - cfg.n_t + 1

        def integrand(g):
            return np.log2(1.0 + g / c0) * g ** (k - 1) * np.exp(-g) / special.gamma(k)

        expected_per_stream, _ = integrate.quad(integrand, 0.0, np.inf)
        expected = cfg.data_len / cfg.coherence * cfg.n_t * expected_per_stream

        trials = 4000
        prefactor = cfg.data_len / cfg.coherence
        rates = np.empty(trials)
        chunk = 500
        for start in range(0, trials, chunk):
            streams = [RngStream(200, i) for i in range(start, start + chunk)]
            h_bar = channel.reduced_h_bar_batch(cfg, streams)
            for j in range(chunk):
                gram = h_bar[j].conj().T @ h_bar[j]
                inv_diag = np.real(np.diag(np.linalg.inv(gram)))
                rates[start + j] = prefactor * np.sum(np.log2(1.0 + 1.0 / (c0 * inv_diag)))
        se = rates.std(ddof=1) / np.sqrt(trials)
        assert abs(rates.mean() - expected) < 3 * se
