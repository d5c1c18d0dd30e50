"""Runtime Tracy-Widom (beta=1) engine: table, corrected CDF, thresholds.

The serial eigenvalue test needs, per candidate noise dimension, the
probability law of the largest eigenvalue of a u x p real white Wishart
matrix.  For finite (u, p) the Tracy-Widom limit is sharpened by a
second-order correction:

    F(z; u, p) = F1(z) - (1 / (u p)) (mu / xi)^2 F1''(z),

with the centering and scaling constants

    mu = (sqrt(u - 1/2) + sqrt(p - 1/2))^2
    xi = sqrt(mu) * (1/sqrt(u - 1/2) + 1/sqrt(p - 1/2))^(1/3),

so that (l_max - mu) / xi is approximately F(.; u, p) distributed.  The
detection threshold for false-alarm probability Pr_f inverts that law at
1 - Pr_f and maps back: gamma = F^{-1}(1 - Pr_f) * xi + mu.

F1 and F1'' come from a table shipped with the package (z in [-10, 6],
step 0.005) queried through monotone PCHIP interpolation; the table is
generated offline by scripts/generate_tw_table.py from the independent
Fredholm-determinant route in `sfbcid.rmt.fredholm`.  The correction
term can dip below earlier values in the far tails, so quantiles are
taken on the running-max hull of the corrected curve, which preserves
the false-alarm semantics and keeps the inverse well defined.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "CenteringScaling",
    "TracyWidomTable",
    "load_table",
    "tw1_cdf",
    "tw1_d2cdf",
    "tw1_quantile",
    "centering_scaling",
    "corrected_cdf",
    "corrected_quantile",
    "threshold",
    "threshold_table",
]


@dataclass(frozen=True)
class CenteringScaling:
    """Centering mu and scaling xi for a u x p white Wishart ensemble."""

    mu: float
    xi: float
    u: int
    p: int


class TracyWidomTable:
    """Immutable (z, cdf, d2cdf) table with monotone interpolation.

    The stored CDF column is forced nondecreasing on load and queried
    through a PCHIP interpolant, which is shape preserving, so the
    interpolated CDF is monotone everywhere on the grid.  Queries
    outside the grid clamp to the endpoint values.
    """

    def __init__(self, z: np.ndarray, cdf: np.ndarray, d2cdf: np.ndarray):
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or len(z) < 4 or np.any(np.diff(z) <= 0):
            raise ValueError("table grid must be 1-D strictly increasing")
        cdf = np.maximum.accumulate(np.clip(np.asarray(cdf, float), 0.0, 1.0))
        d2cdf = np.asarray(d2cdf, dtype=float)
        if cdf.shape != z.shape or d2cdf.shape != z.shape:
            raise ValueError("table columns must share the grid length")
        self.z = z
        self.cdf_values = cdf
        self.d2_values = d2cdf
        self._cdf = PchipInterpolator(z, cdf)
        self._d2 = PchipInterpolator(z, d2cdf)

    def cdf(self, z):
        zc = np.clip(z, self.z[0], self.z[-1])
        out = np.clip(self._cdf(zc), 0.0, 1.0)
        return float(out) if np.isscalar(z) else out

    def d2cdf(self, z):
        zc = np.clip(z, self.z[0], self.z[-1])
        out = self._d2(zc)
        return float(out) if np.isscalar(z) else out


def load_table(path=None) -> TracyWidomTable:
    """Load a (z, cdf, d2cdf) table, verifying its checksum.

    Args:
        path: file to read; defaults to the packaged asset.

    Raises:
        ValueError: malformed file or checksum mismatch.
    """
    if path is None:
        ref = resources.files("sfbcid.rmt").joinpath("data/tw1_table.txt")
        text = ref.read_text(encoding="ascii")
    else:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    header, body = [], []
    for line in text.splitlines(keepends=True):
        (header if line.startswith("#") else body).append(line)
    stated = None
    for line in header:
        if line.startswith("# sha256:"):
            stated = line.split(":", 1)[1].strip()
    if stated is None:
        raise ValueError("table file has no checksum header")
    digest = hashlib.sha256("".join(body).encode("ascii")).hexdigest()
    if digest != stated:
        raise ValueError(
            f"table checksum mismatch: header says {stated[:12]}..., "
            f"data hashes to {digest[:12]}..."
        )
    data = np.array(
        [[float(tok) for tok in line.split()] for line in body if line.strip()]
    )
    if data.shape[1] != 3:
        raise ValueError(f"expected 3 columns, got {data.shape[1]}")
    return TracyWidomTable(data[:, 0], data[:, 1], data[:, 2])


_TABLE: TracyWidomTable | None = None


def _table() -> TracyWidomTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = load_table()
    return _TABLE


def tw1_cdf(z):
    """Tracy-Widom (beta=1) CDF, interpolated from the packaged table."""
    return _table().cdf(z)


def tw1_d2cdf(z):
    """Second derivative of the Tracy-Widom (beta=1) CDF."""
    return _table().d2cdf(z)


def centering_scaling(u: int, p: int) -> CenteringScaling:
    """Centering and scaling constants for a u x p white Wishart matrix."""
    if u < 1 or p < 1:
        raise ValueError(f"need u, p >= 1, got u={u}, p={p}")
    ru, rp = np.sqrt(u - 0.5), np.sqrt(p - 0.5)
    mu = (ru + rp) ** 2
    xi = np.sqrt(mu) * (1.0 / ru + 1.0 / rp) ** (1.0 / 3.0)
    return CenteringScaling(mu=float(mu), xi=float(xi), u=u, p=p)


def _correction_factor(u: int, p: int) -> float:
    cs = centering_scaling(u, p)
    return (cs.mu / cs.xi) ** 2 / (u * p)


def corrected_cdf(z, u: int, p: int):
    """Finite-size corrected CDF of the scaled largest eigenvalue.

    Approximates P[(l_max - mu_{u,p}) / xi_{u,p} <= z] for a u x p real
    standard Gaussian matrix Y with l_max the largest eigenvalue of
    Y Y^T.  Clamped to [0, 1].
    """
    if u < 2 or p < 2:
        raise ValueError(f"correction needs u, p >= 2, got u={u}, p={p}")
    t = _table()
    out = np.clip(
        t.cdf(np.asarray(z, float)) - _correction_factor(u, p) * t.d2cdf(np.asarray(z, float)),
        0.0,
        1.0,
    )
    return float(out) if np.isscalar(z) else out


def _hull_quantile(prob: float, values: np.ndarray, point_fn) -> float:
    """Invert a possibly locally non-monotone CDF via its running-max hull.

    ``values`` are the curve samples on the table grid; ``point_fn``
    evaluates the curve at arbitrary z.  Returns the smallest grid-range
    z with hull(z) >= prob (endpoints clamp).
    """
    t = _table()
    hull = np.maximum.accumulate(values)
    idx = int(np.searchsorted(hull, prob, side="left"))
    if idx == 0:
        return float(t.z[0])
    if idx == len(hull):
        return float(t.z[-1])
    lo, hi = t.z[idx - 1], t.z[idx]
    floor = hull[idx - 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if max(floor, point_fn(mid)) >= prob:
            hi = mid
        else:
            lo = mid
    return float(hi)


def tw1_quantile(prob: float) -> float:
    """Inverse of `tw1_cdf` (clamped to the table range)."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"probability out of range: {prob}")
    t = _table()
    return _hull_quantile(prob, t.cdf_values, t.cdf)


def corrected_quantile(prob: float, u: int, p: int) -> float:
    """Inverse of `corrected_cdf` on its monotone hull."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"probability out of range: {prob}")
    if u < 2 or p < 2:
        raise ValueError(f"correction needs u, p >= 2, got u={u}, p={p}")
    t = _table()
    factor = _correction_factor(u, p)
    values = np.clip(t.cdf_values - factor * t.d2_values, 0.0, 1.0)

    def point(zz):
        return float(np.clip(t.cdf(zz) - factor * t.d2cdf(zz), 0.0, 1.0))

    return _hull_quantile(prob, values, point)


def threshold(q: int, n_r: int, n_b: int, pr_f: float) -> float:
    """Detection threshold gamma_q for the q-th serial eigenvalue test.

    The test at step q treats eigenvalues q..4*n_r as noise, so the
    relevant ensemble is (u, p) = (4*n_r - q + 1, n_b).
    """
    if not 0.0 < pr_f < 0.5:
        raise ValueError(f"pr_f must be in (0, 0.5), got {pr_f}")
    if not 1 <= q <= 4 * n_r:
        raise ValueError(f"q must be in 1..{4 * n_r}, got {q}")
    u, p = 4 * n_r - q + 1, n_b
    cs = centering_scaling(u, p)
    if u >= 2:
        z = corrected_quantile(1.0 - pr_f, u, p)
    else:
        # Degenerate last step: no corrected law for a 1-row ensemble.
        z = tw1_quantile(1.0 - pr_f)
    return z * cs.xi + cs.mu


def threshold_table(n_r: int, n_b: int, pr_f: float) -> np.ndarray:
    """gamma_q for q = 1..4*n_r-1 (the range the serial test visits)."""
    return np.array([threshold(q, n_r, n_b, pr_f) for q in range(1, 4 * n_r)])
