"""Complex-Gaussian sampling and the few matrix decompositions the simulator needs.

All randomness flows through :class:`RngStream`, a thin (seed, stream_id)
wrapper around a counter-based Philox generator, so a given stream produces
the same samples regardless of how many trials run in parallel.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NotPositiveDefinite

# pivot <= PIVOT_RTOL * trace(A)/n marks the Gram matrix as numerically singular
PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class RngStream:
    """Named substream of a counter-based PRNG.

    Identical (seed, stream_id) pairs yield identical sample sequences on
    every run and under any degree of parallelism. A single stream must not
    be shared between threads; distinct streams are independent.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def sample_cscg_matrix(rng, rows: int, cols: int, variance: float = 1.0) -> np.ndarray:
    """Draw a rows x cols matrix of i.i.d. CN(0, variance) entries.

    Real and imaginary parts are independent Gaussians with variance
    ``variance / 2`` each. ``variance == 0`` returns the zero matrix.
    """
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"matrix shape must be positive, got {rows}x{cols}")
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if variance == 0.0:
        return np.zeros((rows, cols), dtype=complex)
    gen = _as_generator(rng)
    scale = np.sqrt(variance / 2.0)
    re = gen.standard_normal((rows, cols))
    im = gen.standard_normal((rows, cols))
    return scale * (re + 1j * im)


def haar_column(rng, n: int) -> np.ndarray:
    """Unit vector distributed as one column of an n x n Haar-random unitary.

    A single normalized CSCG vector has exactly this distribution (the CSCG
    law is unitarily invariant), so no QR step is needed for one column.
    """
    if n < 1:
        raise DimensionMismatch("n must be >= 1")
    gen = _as_generator(rng)
    z = (gen.standard_normal(n) + 1j * gen.standard_normal(n)) / np.sqrt(2.0)
    return z / np.linalg.norm(z)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.all(np.abs(a - a.conj().T) <= tol)


def hermitian_inverse_diagonal(a: np.ndarray) -> np.ndarray:
    """Diagonal of A^-1 for Hermitian positive definite A.

    Uses a Cholesky factorization A = L L^H and a triangular solve:
    diag(A^-1)_k = || column k of L^-1 ||^2. Raises NotPositiveDefinite
    when the factorization fails or any pivot falls below
    ``PIVOT_RTOL * trace(A)/n``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization failed") from exc
    pivots = np.real(np.diagonal(chol)) ** 2
    threshold = PIVOT_RTOL * np.real(np.trace(a)) / n
    if np.min(pivots) <= threshold:
        raise NotPositiveDefinite(
            f"pivot {np.min(pivots):.3e} below threshold {threshold:.3e}"
        )
    inv_l = solve_triangular(chol, np.eye(n, dtype=complex), lower=True)
    return np.sum(np.abs(inv_l) ** 2, axis=0)
