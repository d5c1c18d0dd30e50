"""Stacked real observation model at adjacent subcarrier pairs.

For a pair (k, k+1) the received block Y_k(n) = [y_k(n), y_{k+1}(n)] is
an N_r x 2 complex matrix.  Splitting real and imaginary parts and
vectorizing column-major gives the length 4*N_r real vector

    v = [Re(y_k); Im(y_k); Re(y_{k+1}); Im(y_{k+1})].

Under the flat-pair approximation H_{k+1} ~= H_k =: H, the transmitted
pair is a real-linear map of the symbol components (codebook generator
matrices), so

    v = (I_2 (x) H_bar) M_k x_tilde + noise,
    H_bar = [[Re H, -Im H], [Im H, Re H]],

and the exact covariance with unit-energy proper symbols is

    Sigma_k = 1/2 (I_2 (x) H_bar) M_k M_k^T (I_2 (x) H_bar)^T
              + sigma_w^2 / 2 * I_{4 N_r}.

Its smallest 4*N_r - 2*m_k eigenvalues all equal sigma_w^2 / 2: the
signal subspace dimension 2*m_k is readable from the spectrum, which is
what the detector exploits.  This module computes the sample version
R_k, its eigenvalues, and the per-step test statistics

    U_q = l_q / mean(l_q, ..., l_{4 N_r}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import SfbcScheme, generator_matrices

__all__ = [
    "PairCovariance",
    "TestStatistics",
    "stack",
    "stack_all",
    "pair_covariance",
    "statistics",
    "real_channel",
    "exact_pair_covariance",
]


@dataclass(frozen=True)
class PairCovariance:
    """Sample covariance R_k of the stacked pair and its spectrum."""

    r: np.ndarray     # (4*N_r, 4*N_r) symmetric
    eigs: np.ndarray  # descending


@dataclass(frozen=True)
class TestStatistics:
    """U_q for q = 1..4*N_r-1; u[q-1] is the statistic at step q."""

    u: np.ndarray


def _grid_array(grid) -> np.ndarray:
    y = np.asarray(getattr(grid, "y", grid))
    if y.ndim != 3:
        raise ValueError(f"expected (n_symbols, n_fft, n_rx) grid, got {y.shape}")
    return y


def stack(grid, k: int, n: int) -> np.ndarray:
    """Stacked real vector for pair k of OFDM symbol n.

    Args:
        grid: ReceivedGrid or (n_symbols, n_fft, n_rx) complex array.
        k: 1-based pair index (subcarriers k and k+1).
        n: 0-based OFDM symbol index.

    Returns:
        Real vector of length 4*n_rx ordered
        [Re(y_k); Im(y_k); Re(y_{k+1}); Im(y_{k+1})].
    """
    y = _grid_array(grid)
    if not 1 <= k <= y.shape[1] - 1:
        raise IndexError(f"pair index {k} out of range 1..{y.shape[1] - 1}")
    a, b = y[n, k - 1], y[n, k]
    return np.concatenate([a.real, a.imag, b.real, b.imag])


def stack_all(grid, k: int) -> np.ndarray:
    """Stacked vectors for every OFDM symbol at once, (n_symbols, 4*n_rx)."""
    y = _grid_array(grid)
    if not 1 <= k <= y.shape[1] - 1:
        raise IndexError(f"pair index {k} out of range 1..{y.shape[1] - 1}")
    a, b = y[:, k - 1, :], y[:, k, :]
    return np.concatenate([a.real, a.imag, b.real, b.imag], axis=1)


def pair_covariance(grid, k: int) -> PairCovariance:
    """Sample second-moment matrix of the stacked pair, eigenvalues sorted.

    No mean removal: constellations are zero mean by construction, so the
    raw second moment is the covariance.  Eigenvalues come from the
    symmetric eigensolver and are returned descending (equal values keep
    the solver's deterministic order).
    """
    v = stack_all(grid, k)
    n_b = v.shape[0]
    if n_b < 2:
        raise ValueError(f"need at least 2 OFDM symbols, got {n_b}")
    r = v.T @ v / n_b
    r = 0.5 * (r + r.T)  # symmetrize away accumulation dust
    eigs = np.linalg.eigvalsh(r)[::-1]
    return PairCovariance(r=r, eigs=eigs)


def statistics(cov: PairCovariance) -> TestStatistics:
    """Serial test statistics U_q = l_q / mean(l_q..l_{4 N_r}).

    U_q is the statistic under the hypothesis that q-1 signal
    eigenvalues precede l_q.  A tail of exact zeros yields U_q = 1 there
    (ratio of equals); an all-zero spectrum has no defined statistic.
    """
    eigs = cov.eigs
    if not np.any(eigs > 0):
        raise ValueError("all eigenvalues zero: statistic undefined")
    n = len(eigs)
    suffix_mean = np.cumsum(eigs[::-1])[::-1] / np.arange(n, 0, -1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(suffix_mean[:-1] > 0, eigs[:-1] / suffix_mean[:-1], 1.0)
    return TestStatistics(u=u)


def real_channel(h: np.ndarray) -> np.ndarray:
    """Real 2*N_r x 2*N_t form H_bar = [[Re H, -Im H], [Im H, Re H]]."""
    h = np.asarray(h)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def exact_pair_covariance(
    scheme: SfbcScheme, k: int, h: np.ndarray, noise_var: float
) -> np.ndarray:
    """Analytic covariance Sigma_k for a known common channel.

    Args:
        scheme: transmitted scheme.
        k: 1-based pair index.
        h: (n_rx, n_t) channel shared by both subcarriers of the pair.
        noise_var: complex noise variance sigma_w^2 per subcarrier.

    Returns:
        (4*n_rx, 4*n_rx) real covariance of the stacked pair for
        unit-energy proper symbols.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[1] != scheme.n_t:
        raise ValueError(
            f"channel must be (n_rx, {scheme.n_t}) for {scheme.name}, "
            f"got {h.shape}"
        )
    hbar = real_channel(h)
    big = np.kron(np.eye(2), hbar)
    m = generator_matrices(scheme, k).m
    core = big @ m
    return 0.5 * core @ core.T + 0.5 * noise_var * np.eye(4 * h.shape[0])
