"""Closed-form expressions: estimation variances, deterministic SINR/rate,
power consumption, and deterministic energy efficiency.

Every function here is pure and accepts numpy arrays wherever a scalar is
shown, which the grid-search oracle relies on.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BetaOutOfRange, InvalidConfig


@dataclass(frozen=True)
class EstimationStats:
    """LMMSE channel-estimation quality at one operating point."""

    epsilon: float          # effective training SNR
    var_estimate: float     # per-entry variance of the channel estimate
    var_error: float        # per-entry variance of the estimation error
    error_floor: float      # limit of var_error as SNR -> inf


@dataclass(frozen=True)
class PowerModel:
    """Circuit and RF power consumption, all in Joule per channel use."""

    p_tx: float             # per transmit RF chain
    p_rx: float             # per receive RF chain
    p_static: float         # static circuit consumption
    amp_efficiency: float   # power amplifier efficiency, in (0, 1]
    noise_energy: float     # receiver noise energy; maps SNR to RF power
    symbol_time: float      # seconds per channel use

    def __post_init__(self):
        if min(self.p_tx, self.p_rx, self.p_static) < 0:
            raise InvalidConfig("powers must be nonnegative")
        if not 0 < self.amp_efficiency <= 1:
            raise InvalidConfig("amp_efficiency must be in (0, 1]")
        if self.noise_energy <= 0 or self.symbol_time <= 0:
            raise InvalidConfig("noise_energy and symbol_time must be positive")

    @classmethod
    def reference(cls) -> "PowerModel":
        """Macro-cell reference parameter set (powers in watts times symbol time)."""
        s = 1.0 / 9e6
        return cls(
            p_tx=1.0 * s,
            p_rx=0.3 * s,
            p_static=2.0 * s,
            amp_efficiency=0.3,
            noise_energy=1e-20,
            symbol_time=s,
        )


@dataclass(frozen=True)
class DeterministicPoint:
    """Closed-form SINR, rate, power, and energy efficiency at one point."""

    sinr: float     # dimensionless
    rate: float     # bits per channel use
    power: float    # Joule per channel use
    ee: float       # bits per Joule; always rate / power


def _epsilon(snr, impairment, n_t, training_len):
    return snr * training_len / (n_t * (snr * impairment**2 + 1.0))


def estimation_variances(cfg) -> EstimationStats:
    """Variance split between the LMMSE estimate and its error.

    The estimate and error variances always sum to one. For nonzero
    impairment the error variance has a nonzero floor as SNR grows.
    """
    eps = _epsilon(cfg.snr, cfg.impairment, cfg.n_t, cfg.training_len)
    var_est = eps / (1.0 + eps)
    if cfg.impairment > 0:
        floor = 1.0 / (1.0 + cfg.training_len / (cfg.n_t * cfg.impairment**2))
    else:
        floor = 0.0
    return EstimationStats(
        epsilon=eps,
        var_estimate=var_est,
        var_error=1.0 - var_est,
        error_floor=floor,
    )


def _sinr_de(n_t, n_r, training_len, snr, impairment):
    """Large-system SINR of the ZF receiver (array friendly, unvalidated)."""
    d2 = impairment**2
    eps = _epsilon(snr, impairment, n_t, training_len)
    c1 = (snr + snr * d2 + 1.0 + eps) / (snr * eps)
    return (n_r - n_t) / (d2 * n_r + (c1 - d2) * n_t)


def zf_interference_coeff(cfg) -> float:
    """Coefficient multiplying the inverse-Gram diagonal in the per-stream SINR."""
    d2 = cfg.impairment**2
    eps = _epsilon(cfg.snr, cfg.impairment, cfg.n_t, cfg.training_len)
    return cfg.n_t * (cfg.snr + cfg.snr * d2 + 1.0 + eps) / (cfg.snr * eps)


def deterministic_sinr(cfg) -> float:
    """Deterministic equivalent of the per-stream ZF SINR."""
    if cfg.n_r <= cfg.n_t:
        raise BetaOutOfRange(f"need n_r > n_t, got n_r={cfg.n_r}, n_t={cfg.n_t}")
    return float(_sinr_de(cfg.n_t, cfg.n_r, cfg.training_len, cfg.snr, cfg.impairment))


def deterministic_rate(cfg) -> float:
    """Deterministic equivalent of the ZF spectral efficiency, bits per c.u."""
    if cfg.training_len > cfg.coherence:
        raise InvalidConfig("training_len exceeds coherence length")
    gamma = deterministic_sinr(cfg)
    return (1.0 - cfg.training_len / cfg.coherence) * cfg.n_t * np.log2(1.0 + gamma)


def power_total(n_t, n_r, snr, pm: PowerModel):
    """Total consumed power: per-chain RF, static, and amplifier terms.

    The amplifier term converts the target receive SNR to transmit RF energy
    through the receiver noise energy (unit path gain); alternate mappings
    can be injected by rescaling ``pm.noise_energy``.
    """
    return n_t * pm.p_tx + n_r * pm.p_rx + pm.p_static + snr * pm.noise_energy / pm.amp_efficiency


def _ee_value(n_t, beta, t_a, snr, impairment, coherence, pm: PowerModel):
    """Reparameterized deterministic energy efficiency (array friendly)."""
    d2 = impairment**2
    inv_rho = 1.0 / snr
    t_p = n_t + t_a
    sinr = (beta - 1.0) / (
        d2 * (beta - 1.0)
        + (n_t / t_p) * (d2 + inv_rho) * (d2 + inv_rho + 1.0)
        + inv_rho
    )
    rate = (1.0 - t_p / coherence) * n_t * np.log2(1.0 + sinr)
    power = power_total(n_t, beta * n_t, snr, pm)
    return rate / power


def ee_deterministic(n_t, beta, t_a, snr, impairment, coherence, pm: PowerModel) -> float:
    """Deterministic energy efficiency in bits/Joule.

    ``n_t`` and ``t_a`` may be non-integer; the optimizer relaxes both to
    reals and rounds afterwards.
    """
    if beta <= 1.0:
        raise BetaOutOfRange(f"beta must exceed 1, got {beta}")
    if not 1 <= n_t <= coherence:
        raise InvalidConfig(f"n_t={n_t} outside [1, {coherence}]")
    if not 0 <= t_a <= coherence - n_t:
        raise InvalidConfig(f"t_a={t_a} outside [0, {coherence - n_t}]")
    return float(_ee_value(n_t, beta, t_a, snr, impairment, coherence, pm))


def ee_high_snr_approx(n_t, beta, t_a, snr, impairment, coherence, pm: PowerModel) -> float:
    """High-SNR energy efficiency with fourth-order impairment and
    second-order inverse-SNR terms dropped.

    Accurate to ~1% for SNR around 1e4 and above; at 0 dB the gap can exceed
    10%, so treat low-SNR outputs as qualitative only.
    """
    if beta <= 1.0:
        raise BetaOutOfRange(f"beta must exceed 1, got {beta}")
    if not 1 <= n_t <= coherence:
        raise InvalidConfig(f"n_t={n_t} outside [1, {coherence}]")
    if not 0 <= t_a <= coherence - n_t:
        raise InvalidConfig(f"t_a={t_a} outside [0, {coherence - n_t}]")
    d2 = impairment**2
    inv_rho = 1.0 / snr
    t_p = n_t + t_a
    sinr = (beta - 1.0) / (d2 * (beta - 1.0) + (n_t / t_p) * (d2 + inv_rho) + inv_rho)
    rate = (1.0 - t_p / coherence) * n_t * np.log2(1.0 + sinr)
    return float(rate / power_total(n_t, beta * n_t, snr, pm))


def deterministic_point(cfg, pm: PowerModel) -> DeterministicPoint:
    """Bundle SINR, rate, power, and EE for one system configuration."""
    sinr = deterministic_sinr(cfg)
    rate = deterministic_rate(cfg)
    power = float(power_total(cfg.n_t, cfg.n_r, cfg.snr, pm))
    return DeterministicPoint(sinr=sinr, rate=rate, power=power, ee=rate / power)
