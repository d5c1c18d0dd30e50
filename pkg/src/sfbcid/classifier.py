"""Serial dimension test, template distance, and the two-level decision tree.

The front half turns per-pair eigenvalue statistics into dimension
estimates q_hat(k); the back half scores those estimates against the
per-scheme templates with a corrected overestimation count and walks the
tree: four branch constants on the odd subcarrier pairs, then one
member-vs-member comparison on the even pairs the surviving subset
disagrees on.  Also houses the analytic success ceiling and the flop
counts used for the cost comparison between algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, comb
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .codebook import SCHEMES, FeatureTemplate, SfbcScheme, template
from .rmt import threshold_table
from .subspace import TestStatistics

__all__ = [
    "DetectorConfig",
    "FeatureVector",
    "SubsetDecision",
    "IdentificationResult",
    "LEVEL1_BRANCHES",
    "LEVEL2_MEMBERS",
    "estimate_dimension",
    "feature_vector",
    "distance",
    "level1_indices",
    "level2_indices",
    "level1_decision",
    "level2_decision",
    "identify",
    "upper_bound",
    "flops",
]

#: Level-1 branches in tree order: (subset name, shared template value on
#: odd pairs).  Ascending template value, which is also the tie order.
LEVEL1_BRANCHES: tuple[tuple[str, int], ...] = (
    ("SFC1", 4),
    ("SFC2", 6),
    ("SFC3", 8),
    ("SM3", 12),
)

#: Members of each non-leaf subset, smaller template first so that a
#: min() over this order implements the smallest-q tie rule.
LEVEL2_MEMBERS: Mapping[str, tuple[str, str]] = {
    "SFC1": ("SA", "AL"),
    "SFC2": ("SFBC2", "SFBC3"),
    "SFC3": ("SM2", "SFBC1"),
}

_LEVEL2_STEP = {"SFC1": 2, "SFC2": 4, "SFC3": 8}


@dataclass(frozen=True)
class DetectorConfig:
    """Dimensions and false alarm probability of the serial test.

    Mirrors the OFDM grid geometry so a config can be built from the
    same numbers that shaped the capture.
    """

    pr_f: float
    n_r: int
    n_b: int
    n_fft: int

    def __post_init__(self):
        if not 0.0 < self.pr_f < 0.5:
            raise ValueError(f"pr_f must be in (0, 0.5), got {self.pr_f}")
        if self.n_r <= 3:
            raise ValueError(f"need more than 3 receive antennas, got {self.n_r}")
        if self.n_b < 2:
            raise ValueError(f"need at least 2 received symbols, got {self.n_b}")
        n = self.n_fft
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_fft must be a power of two >= 8, got {n}")


@dataclass(frozen=True)
class FeatureVector:
    """Estimated q_hat per tested pair index, sparse over k."""

    entries: Mapping[int, int]


@dataclass(frozen=True)
class SubsetDecision:
    """Outcome of one tree level: winner, all distances, pair count."""

    chosen: str
    distances: Mapping[str, int]
    tested_pairs: int


@dataclass(frozen=True)
class IdentificationResult:
    scheme: SfbcScheme
    level1: SubsetDecision
    level2: Optional[SubsetDecision]  # absent when level 1 ends at a leaf


@lru_cache(maxsize=128)
def _thresholds(n_r: int, n_b: int, pr_f: float) -> np.ndarray:
    gammas = threshold_table(n_r, n_b, pr_f)
    gammas.setflags(write=False)  # cached across calls, keep it immutable
    return gammas


def estimate_dimension(stats: TestStatistics, cfg: DetectorConfig) -> int:
    """Signal subspace dimension from the serial eigenvalue test.

    Walks q = 1, 2, ... and accepts the first q whose scaled statistic
    n_b * U_q falls at or below gamma_q; acceptance at q means q - 1
    signal eigenvalues precede the noise floor.  If every candidate is
    rejected the estimate saturates at 4*n_r - 1.
    """
    u = np.asarray(stats.u, dtype=float)
    gammas = _thresholds(cfg.n_r, cfg.n_b, cfg.pr_f)
    if u.shape != gammas.shape:
        raise ValueError(
            f"statistics cover {u.shape[0]} candidate dimensions, "
            f"config with n_r={cfg.n_r} implies {gammas.shape[0]}"
        )
    accept = cfg.n_b * u <= gammas
    if not accept.any():
        return 4 * cfg.n_r - 1
    return int(np.argmax(accept))


def feature_vector(grid, cfg: DetectorConfig, indices: Iterable[int]) -> FeatureVector:
    """Dimension estimates for every requested pair index.

    Equivalent to pair_covariance + statistics + estimate_dimension per
    index, but the Gram matrices and eigenvalues are batched across
    pairs because the tree visits up to n_fft/2 of them per level.
    """
    y = np.asarray(getattr(grid, "y", grid))
    if y.ndim != 3:
        raise ValueError(f"grid must be (n_symbols, n_fft, n_rx), got {y.shape}")
    if y.shape != (cfg.n_b, cfg.n_fft, cfg.n_r):
        raise ValueError(
            f"grid shape {y.shape} does not match config "
            f"({cfg.n_b}, {cfg.n_fft}, {cfg.n_r})"
        )
    idx = np.fromiter(indices, dtype=int)
    if idx.size == 0:
        raise ValueError("no pair indices to test")
    if idx.min() < 1 or idx.max() > cfg.n_fft - 1:
        raise IndexError(f"pair indices must lie in 1..{cfg.n_fft - 1}")

    a = y[:, idx - 1, :]
    b = y[:, idx, :]
    v = np.concatenate([a.real, a.imag, b.real, b.imag], axis=2)
    v = np.ascontiguousarray(v.transpose(1, 0, 2))  # (K, n_b, 4 n_r)
    grams = np.einsum("kna,knb->kab", v, v) / cfg.n_b
    grams = 0.5 * (grams + grams.transpose(0, 2, 1))
    eigs = np.linalg.eigvalsh(grams)[:, ::-1]

    dead = ~(eigs > 0).any(axis=1)
    if dead.any():
        k_bad = int(idx[int(np.argmax(dead))])
        raise ValueError(f"all eigenvalues zero at pair {k_bad}: statistic undefined")
    suffix = np.cumsum(eigs[:, ::-1], axis=1)[:, ::-1]
    suffix /= np.arange(eigs.shape[1], 0, -1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(suffix[:, :-1] > 0, eigs[:, :-1] / suffix[:, :-1], 1.0)

    accept = cfg.n_b * u <= _thresholds(cfg.n_r, cfg.n_b, cfg.pr_f)
    q_hat = np.where(accept.any(axis=1), accept.argmax(axis=1), 4 * cfg.n_r - 1)
    return FeatureVector(entries={int(k): int(q) for k, q in zip(idx, q_hat)})


def distance(
    estimates: FeatureVector,
    targets: Union[FeatureTemplate, int],
    indices: Iterable[int],
    n_fft: int,
    pr_f: float,
) -> int:
    """Corrected overestimation count between q_hat and a template.

    d = | #{k : q_hat(k) > q(k)} - ceil(n_fft * pr_f) |.  Only strict
    overestimates count, so arbitrarily deep underestimation at some
    pair contributes nothing.  The correction term uses the full FFT
    size however many indices are sampled, which is why a perfect match
    scores ceil(n_fft * pr_f) rather than 0.

    ``targets`` is either a per-pair template or one constant applied at
    every sampled index.
    """
    entries = estimates.entries
    if isinstance(targets, FeatureTemplate):
        q = targets.q
        over = sum(1 for k in indices if entries[k] > q[k - 1])
    else:
        over = sum(1 for k in indices if entries[k] > targets)
    return abs(over - ceil(n_fft * pr_f))


def level1_indices(n_fft: int) -> range:
    """Odd pairs 1, 3, ..., n_fft - 1: every template is constant there."""
    return range(1, n_fft, 2)


def level2_indices(subset: str, n_fft: int) -> range:
    """Pairs where the members of ``subset`` have different templates."""
    if subset not in _LEVEL2_STEP:
        raise ValueError(f"no level-2 test for {subset!r}")
    step = _LEVEL2_STEP[subset]
    return range(step, n_fft - step + 1, step)


def level1_decision(estimates: FeatureVector, cfg: DetectorConfig) -> SubsetDecision:
    """Pick the subset whose branch constant is closest, smallest q on ties."""
    idx = level1_indices(cfg.n_fft)
    dists = {
        name: distance(estimates, const, idx, cfg.n_fft, cfg.pr_f)
        for name, const in LEVEL1_BRANCHES
    }
    chosen, _ = min(LEVEL1_BRANCHES, key=lambda branch: (dists[branch[0]], branch[1]))
    return SubsetDecision(chosen=chosen, distances=dists, tested_pairs=len(idx))


def level2_decision(
    subset: str, estimates: FeatureVector, cfg: DetectorConfig
) -> SubsetDecision:
    """Separate the two members of a subset on their disagreement pairs."""
    members = LEVEL2_MEMBERS[subset]
    idx = level2_indices(subset, cfg.n_fft)
    dists = {
        name: distance(
            estimates, template(SCHEMES[name], cfg.n_fft), idx, cfg.n_fft, cfg.pr_f
        )
        for name in members
    }
    # members are ordered by template value, so min() ties break small.
    chosen = min(members, key=lambda name: dists[name])
    return SubsetDecision(chosen=chosen, distances=dists, tested_pairs=len(idx))


def identify(grid, cfg: DetectorConfig) -> IdentificationResult:
    """Full blind identification of the space-frequency code in a grid.

    Level 1 tests the odd pairs against the four branch constants; SM3
    is a leaf there, every other outcome is a subset of two schemes that
    level 2 separates on the pairs where their templates differ.
    """
    if cfg.n_fft < 16:
        raise ValueError(
            f"need n_fft >= 16 so every tree level samples a pair, got {cfg.n_fft}"
        )
    lvl1 = level1_decision(feature_vector(grid, cfg, level1_indices(cfg.n_fft)), cfg)
    if lvl1.chosen == "SM3":
        return IdentificationResult(scheme=SCHEMES["SM3"], level1=lvl1, level2=None)
    lvl2 = level2_decision(
        lvl1.chosen, feature_vector(grid, cfg, level2_indices(lvl1.chosen, cfg.n_fft)), cfg
    )
    return IdentificationResult(scheme=SCHEMES[lvl2.chosen], level1=lvl1, level2=lvl2)


def upper_bound(pr_o: float, k_tests: int, n_fft: int, pr_f: float) -> float:
    """Ceiling on the correct-identification probability.

    With per-pair overestimation probability pr_o, identification can
    only succeed when at most ceil(n_fft * pr_f) of the k_tests pairs
    overestimate; the bound is that binomial tail.  pr_o -> 0 gives 1,
    pr_o -> 1 gives 0 whenever the correction is below k_tests.
    """
    if not 0.0 <= pr_o <= 1.0:
        raise ValueError(f"pr_o must be in [0, 1], got {pr_o}")
    if k_tests < 1:
        raise ValueError(f"k_tests must be positive, got {k_tests}")
    cap = min(ceil(n_fft * pr_f), k_tests)
    return float(
        sum(
            comb(k_tests, i) * pr_o**i * (1.0 - pr_o) ** (k_tests - i)
            for i in range(cap + 1)
        )
    )


def flops(
    algorithm: str,
    n_fft: int,
    n_r: int,
    n_b: int,
    cp_len: int = 10,
    card_xi: Optional[int] = None,
    card_upsilon: int = 7,
) -> int:
    """Dominant flop count of an identification algorithm.

    "proposed" covers the per-pair Gram and eigenvalue work here;
    "ref19" is the cyclostatistics search over antenna pairs (card_xi,
    default n_r choose 2) and candidate set (card_upsilon); "ref20" is
    the complex-valued subspace variant with twice the covariance size.
    """
    if min(n_fft, n_r, n_b) <= 0 or cp_len < 0:
        raise ValueError("dimensions must be positive and cp_len nonnegative")
    if algorithm == "proposed":
        return 48 * n_fft * n_r**3 + 24 * n_fft * n_b * n_r**2
    if algorithm == "ref19":
        xi = n_r * (n_r - 1) // 2 if card_xi is None else card_xi
        return 8 * n_b * xi * (n_fft + cp_len) * (card_upsilon + 1)
    if algorithm == "ref20":
        return 64 * n_fft * n_r**3 + 32 * n_fft * n_b * n_r**2
    raise ValueError(f"unknown algorithm {algorithm!r}")
