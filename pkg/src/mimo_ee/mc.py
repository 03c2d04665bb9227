"""Monte Carlo orchestration: ergodic rate estimation, deterministic-limit
agreement sweeps, and the Haar-column concentration experiment."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, channel
from .errors import NotPositiveDefinite
from .linalg import RngStream, haar_column, hermitian_inverse_diagonal

# trials are processed in fixed-size batches regardless of worker count so
# results never depend on the degree of parallelism
_CHUNK = 64

# resampled trials draw from stream ids above this base so they can never
# collide with the per-trial streams
_RESAMPLE_BASE = 1 << 32
_MAX_RESAMPLE = 64


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error."""

    mean: float
    std_error: float
    trials: int
    seed: int
    resampled: int = 0  # trials redrawn after a singular Gram matrix


def _resample_rate(cfg: channel.SystemConfig, seed: int, index: int):
    """Redraw one trial from dedicated substreams after a singular Gram."""
    resampled = 0
    for attempt in range(_MAX_RESAMPLE):
        resampled += 1
        stream = RngStream(seed, _RESAMPLE_BASE + index * _MAX_RESAMPLE + attempt)
        try:
            sinr = channel.simulate_data_sinr(cfg, stream)
        except NotPositiveDefinite:
            continue
        rate = (cfg.data_len / cfg.coherence) * np.sum(np.log2(1.0 + sinr))
        return float(rate), resampled
    raise NotPositiveDefinite(f"trial {index} kept producing singular Gram matrices")


def _chunk_rates(cfg: channel.SystemConfig, seed: int, indices):
    """Per-block spectral efficiencies for one batch of trial indices."""
    streams = [RngStream(seed, i) for i in indices]
    h_bar = channel.reduced_h_bar_batch(cfg, streams)
    grams = np.matmul(h_bar.conj().transpose(0, 2, 1), h_bar)
    c0 = analytic.zf_interference_coeff(cfg)
    d2 = cfg.impairment**2
    prefactor = cfg.data_len / cfg.coherence
    rates = np.empty(len(indices))
    resampled = 0
    for j, index in enumerate(indices):
        try:
            inv_diag = hermitian_inverse_diagonal(grams[j])
            sinr = 1.0 / (d2 + c0 * inv_diag)
            rates[j] = prefactor * np.sum(np.log2(1.0 + sinr))
        except NotPositiveDefinite:
            rates[j], extra = _resample_rate(cfg, seed, index)
            resampled += extra
    return rates, resampled


def ergodic_rate(cfg: channel.SystemConfig, trials: int, seed: int,
                 workers: int = 1) -> McEstimate:
    """Estimate the ergodic ZF spectral efficiency by block averaging.

    Trial ``i`` always consumes stream (seed, i) and trials are batched and
    reduced in a fixed order, so the estimate is identical for any worker
    count. Blocks whose estimated-channel Gram is numerically singular are
    resampled from reserved substreams and counted in ``resampled``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    chunks = [range(start, min(start + _CHUNK, trials))
              for start in range(0, trials, _CHUNK)]
    rates = np.empty(trials)
    resampled = 0
    if workers <= 1:
        results = map(lambda c: _chunk_rates(cfg, seed, c), chunks)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(lambda c: _chunk_rates(cfg, seed, c), chunks)
    for chunk, (chunk_rates, extra) in zip(chunks, results):
        rates[chunk.start:chunk.stop] = chunk_rates
        resampled += extra
    if workers > 1:
        pool.shutdown()
    std_error = float(np.std(rates, ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return McEstimate(mean=float(np.mean(rates)), std_error=std_error,
                      trials=trials, seed=seed, resampled=resampled)


@dataclass(frozen=True)
class SweepRow:
    n_t: int
    n_r: int
    mc_rate: float
    mc_stderr: float
    det_rate: float
    rel_error: float


def convergence_sweep(template: channel.SystemConfig, n_t_list, beta: float,
                      trials: int, seed: int, workers: int = 1):
    """Monte Carlo vs deterministic rate across antenna counts at fixed ratio.

    The training length scales with n_t, keeping the template's
    training_len / n_t ratio.
    """
    ratio = template.training_len / template.n_t
    rows = []
    for n_t in n_t_list:
        n_t = int(n_t)
        if n_t < 2:
            raise ValueError("n_t sweep values must be >= 2")
        n_r = int(round(beta * n_t))
        if n_r <= n_t:
            raise ValueError(f"beta={beta} gives n_r <= n_t at n_t={n_t}")
        cfg = replace(template, n_t=n_t, n_r=n_r,
                      training_len=int(round(ratio * n_t)))
        det = analytic.deterministic_rate(cfg)
        mc = ergodic_rate(cfg, trials, seed, workers=workers)
        rows.append(SweepRow(n_t=n_t, n_r=n_r, mc_rate=mc.mean,
                             mc_stderr=mc.std_error, det_rate=det,
                             rel_error=abs(mc.mean - det) / det))
    return rows


def lemma1_experiment(n: int, draws: int, seed: int) -> float:
    """Fraction of Haar-column quadratic forms within 10% of the trace mean.

    Uses A = diag(1..n), for which E[x^H A x] = (n + 1) / 2 exactly.
    """
    if n < 16:
        raise ValueError("n must be >= 16 for a meaningful concentration check")
    diag = np.arange(1, n + 1, dtype=float)
    target = diag.mean()
    hits = 0
    for i in range(draws):
        x = haar_column(RngStream(seed, i), n)
        q = float(np.sum(diag * np.abs(x) ** 2))
        if abs(q - target) / target < 0.1:
            hits += 1
    return hits / draws
