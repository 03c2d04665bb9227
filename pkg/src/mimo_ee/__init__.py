"""Energy-efficiency evaluation and optimization for training-based
point-to-point large-scale MIMO links with residual transmit RF impairments."""

from .analytic import (
    DeterministicPoint,
    EstimationStats,
    PowerModel,
    deterministic_point,
    deterministic_rate,
    deterministic_sinr,
    ee_deterministic,
    ee_high_snr_approx,
    estimation_variances,
    power_total,
)
from .channel import (
    ChannelBlock,
    SystemConfig,
    build_pilots,
    lmmse_estimate,
    simulate_data_sinr,
    simulate_training,
    zf_sinr_per_stream,
)
from .linalg import RngStream, haar_column, hermitian_inverse_diagonal, sample_cscg_matrix
from .mc import McEstimate, convergence_sweep, ergodic_rate, lemma1_experiment
from .optimize import (
    EeContext,
    OptimizationResult,
    OptimizerSettings,
    grid_search,
    iterate,
    optimize_beta,
    optimize_nt,
    optimize_ta,
)

__version__ = "0.1.0"
