"""Reference evaluation of the Tracy-Widom (beta=1) CDF.

The limiting distribution of the scaled largest eigenvalue of a real
white Wishart matrix has CDF

    F1(s) = det(I - K_s),

where K_s is the integral operator on L2(s, oo) with kernel

    K(x, y) = Ai((x + y) / 2) / 2

and Ai is the Airy function.  The determinant is evaluated by Nystrom
discretization: Gauss-Legendre nodes on (-1, 1) are mapped to (s, oo)
through phi(xi) = s + scale * tan(pi (xi + 1) / 4), and

    F1(s) ~= det( delta_ij - sqrt(w_i) K(x_i, x_j) sqrt(w_j) )

with the transformed weights w_i.  Convergence in the node count is
spectral; ~100 nodes give close to machine precision over the range of
interest here (s >= -10).

This is the slow, independent route.  It exists to build and audit the
interpolation table shipped with the package (see
scripts/generate_tw_table.py and `sfbcid.rmt.tw`); the detector never
calls it.
"""

from __future__ import annotations

import numpy as np
from scipy.special import airy

__all__ = ["tw1_cdf_oracle"]


def tw1_cdf_oracle(s: float, n_nodes: int = 120, scale: float = 10.0) -> float:
    """Evaluate F1(s) by a Fredholm determinant.

    Args:
        s: evaluation point.
        n_nodes: Gauss-Legendre node count of the Nystrom rule.
        scale: stretch of the tan change of variables.

    Returns:
        F1(s) as a float in [0, 1] (up to discretization error).
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    t = np.pi * (nodes + 1.0) / 4.0
    x = s + scale * np.tan(t)
    w = weights * scale * (np.pi / 4.0) / np.cos(t) ** 2
    sw = np.sqrt(w)
    kernel = 0.5 * airy(0.5 * (x[:, None] + x[None, :]))[0]
    a = np.eye(n_nodes) - sw[:, None] * kernel * sw[None, :]
    sign, logdet = np.linalg.slogdet(a)
    return float(sign * np.exp(logdet))
