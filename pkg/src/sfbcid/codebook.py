"""The seven space-frequency block codes and their pair signatures.

A scheme maps ``n_s`` data symbols onto an ``n_t x l`` codeword matrix;
row ``v`` feeds transmit antenna ``v`` and column ``c`` of block ``b``
occupies subcarrier ``b*l + c + 1`` of the OFDM grid (subcarriers are
1-based, codewords start at subcarrier 1).  The pool:

    name    n_t  n_s  l   structure
    SA       1    1   1   single antenna
    SM2      2    2   1   spatial multiplexing, two streams
    SM3      3    3   1   spatial multiplexing, three streams
    AL       2    2   2   Alamouti pair
    SFBC1    3    4   8   rate-1/2 orthogonal design
    SFBC2    3    3   4   rate-3/4 orthogonal design
    SFBC3    3    3   4   rate-3/4 orthogonal design, variant layout

Codeword entries are 0 or ``+/- x_i`` or ``+/- conj(x_i)``, so for a pair
of adjacent subcarriers (k, k+1) the two transmitted columns are a
real-linear map of

    x_tilde = [Re(x_bar); Im(x_bar)],

where ``x_bar`` stacks the distinct symbols feeding the pair, ordered by
(codeword block, symbol index).  With ``m_k = |x_bar|``, the map has
2*m_k independent real inputs; that count, as a function of k, is
periodic with period ``l`` and differs between schemes on suitable index
sets.  It is the discriminating feature estimated blindly by the rest of
the package.  `template` returns the exact sequence and
`generator_matrices` the maps themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SfbcScheme",
    "FeatureTemplate",
    "GeneratorMatrices",
    "SCHEMES",
    "POOL",
    "get_scheme",
    "codeword",
    "layout_symbol",
    "generator_matrices",
    "template",
    "average_column_power",
]


@dataclass(frozen=True)
class SfbcScheme:
    """Structural constants of one scheme."""

    name: str
    n_t: int
    n_s: int
    l: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FeatureTemplate:
    """Theoretical subspace dimensions 2*m_k for pairs k = 1..N-1."""

    scheme: SfbcScheme
    q: np.ndarray  # int, length N-1; q[k-1] is the value at pair k


@dataclass(frozen=True)
class GeneratorMatrices:
    """Linear maps producing the transmitted pair from x_tilde.

    ``a1`` and ``a2`` are complex ``n_t x 2m_k`` matrices with
    ``s_k = a1 @ x_tilde`` and ``s_{k+1} = a2 @ x_tilde``; ``m`` is the
    real ``4*n_t x 2m_k`` stacked form
    ``[Re(a1); Im(a1); Re(a2); Im(a2)]`` mapping x_tilde directly to
    [Re(s_k); Im(s_k); Re(s_{k+1}); Im(s_{k+1})].
    """

    a1: np.ndarray
    a2: np.ndarray
    m: np.ndarray


SCHEMES: dict[str, SfbcScheme] = {
    "SA": SfbcScheme("SA", 1, 1, 1),
    "SM2": SfbcScheme("SM2", 2, 2, 1),
    "SM3": SfbcScheme("SM3", 3, 3, 1),
    "AL": SfbcScheme("AL", 2, 2, 2),
    "SFBC1": SfbcScheme("SFBC1", 3, 4, 8),
    "SFBC2": SfbcScheme("SFBC2", 3, 3, 4),
    "SFBC3": SfbcScheme("SFBC3", 3, 3, 4),
}

#: Canonical pool ordering used by the harness and for tie breaking.
POOL: tuple[SfbcScheme, ...] = tuple(SCHEMES.values())


def get_scheme(name: str) -> SfbcScheme:
    """Look up a scheme by its serialized name (exact, e.g. "SFBC2")."""
    try:
        return SCHEMES[name]
    except KeyError:
        raise ValueError(
            f"unknown scheme {name!r}; expected one of {', '.join(SCHEMES)}"
        ) from None


# Symbolic codeword tables.  Entry: None for 0, else (i, sign, conj)
# meaning sign * x_i or sign * conj(x_i).  Rows are antennas, columns are
# subcarriers within the block.
_E = tuple[int, int, bool]
_CODEWORDS: dict[str, tuple[tuple[_E | None, ...], ...]] = {
    "SA": (((0, 1, False),),),
    "SM2": (
        ((0, 1, False),),
        ((1, 1, False),),
    ),
    "SM3": (
        ((0, 1, False),),
        ((1, 1, False),),
        ((2, 1, False),),
    ),
    "AL": (
        ((0, 1, False), (1, 1, False)),
        ((1, -1, True), (0, 1, True)),
    ),
    "SFBC1": (
        ((0, 1, False), (1, -1, False), (2, -1, False), (3, -1, False),
         (0, 1, True), (1, -1, True), (2, -1, True), (3, -1, True)),
        ((1, 1, False), (0, 1, False), (3, 1, False), (2, -1, False),
         (1, 1, True), (0, 1, True), (3, 1, True), (2, -1, True)),
        ((2, 1, False), (3, -1, False), (0, 1, False), (1, 1, False),
         (2, 1, True), (3, -1, True), (0, 1, True), (1, 1, True)),
    ),
    "SFBC2": (
        ((0, 1, False), None, (1, 1, False), (2, -1, False)),
        (None, (0, 1, False), (2, 1, True), (1, 1, True)),
        ((1, -1, True), (2, -1, False), (0, 1, True), None),
    ),
    "SFBC3": (
        ((0, 1, False), (1, -1, True), (2, 1, True), None),
        ((1, 1, False), (0, 1, True), None, (2, -1, True)),
        ((2, 1, False), None, (0, -1, True), (1, 1, True)),
    ),
}


def codeword(scheme: SfbcScheme, symbols) -> np.ndarray:
    """Build the scheme's n_t x l codeword matrix from ``n_s`` symbols.

    Args:
        scheme: one of `SCHEMES`.
        symbols: sequence of exactly ``scheme.n_s`` complex data symbols.

    Returns:
        Complex array of shape (n_t, l).  SA/SM schemes return a single
        column.
    """
    x = np.asarray(symbols, dtype=complex)
    if x.shape != (scheme.n_s,):
        raise ValueError(
            f"{scheme.name} takes {scheme.n_s} symbols, got shape {x.shape}"
        )
    rows = _CODEWORDS[scheme.name]
    out = np.zeros((scheme.n_t, scheme.l), dtype=complex)
    for v, row in enumerate(rows):
        for c, entry in enumerate(row):
            if entry is None:
                continue
            i, sign, conj = entry
            out[v, c] = sign * (np.conj(x[i]) if conj else x[i])
    return out


def layout_symbol(scheme: SfbcScheme, data, n_fft: int) -> np.ndarray:
    """Lay one OFDM symbol's worth of data onto the frequency grid.

    Args:
        scheme: one of `SCHEMES`.
        data: ``n_fft * n_s / l`` complex data symbols, consumed in
            blocks of ``n_s``.
        n_fft: number of subcarriers N.

    Returns:
        Complex array of shape (n_t, n_fft); column j-1 is subcarrier j.
    """
    if n_fft % scheme.l:
        raise ValueError(
            f"n_fft={n_fft} not divisible by {scheme.name} code length {scheme.l}"
        )
    x = np.asarray(data, dtype=complex)
    want = n_fft * scheme.n_s // scheme.l
    if x.shape != (want,):
        raise ValueError(
            f"{scheme.name} over {n_fft} subcarriers takes {want} symbols, "
            f"got shape {x.shape}"
        )
    grid = np.empty((scheme.n_t, n_fft), dtype=complex)
    for b in range(n_fft // scheme.l):
        blk = codeword(scheme, x[b * scheme.n_s:(b + 1) * scheme.n_s])
        grid[:, b * scheme.l:(b + 1) * scheme.l] = blk
    return grid


def _pair_entries(scheme: SfbcScheme, k: int):
    """Symbolic entries of the two columns at pair k.

    Returns (cols, xbar): ``cols[j]`` is the list of per-antenna entries
    of subcarrier k+j as ((block_offset, i), sign, conj) or None, and
    ``xbar`` the ordered distinct (block_offset, i) symbol labels.
    """
    if k < 1:
        raise ValueError(f"pair index must be >= 1, got {k}")
    rows = _CODEWORDS[scheme.name]
    b0 = (k - 1) // scheme.l
    cols = []
    labels: set[tuple[int, int]] = set()
    for j in (k, k + 1):
        b, c = (j - 1) // scheme.l, (j - 1) % scheme.l
        col = []
        for row in rows:
            entry = row[c]
            if entry is None:
                col.append(None)
            else:
                i, sign, conj = entry
                col.append(((b - b0, i), sign, conj))
                labels.add((b - b0, i))
        cols.append(col)
    return cols, sorted(labels)


def generator_matrices(scheme: SfbcScheme, k: int) -> GeneratorMatrices:
    """Symbol generator matrices for pair k (1-based).

    The complex entry conventions: a symbol ``+x_i`` contributes
    coefficients (1, j) to the (Re x_i, Im x_i) columns, ``-x_i`` gives
    (-1, -j), ``+conj(x_i)`` gives (1, -j) and ``-conj(x_i)`` gives
    (-1, j).
    """
    cols, xbar = _pair_entries(scheme, k)
    m = len(xbar)
    pos = {label: i for i, label in enumerate(xbar)}
    mats = []
    for col in cols:
        a = np.zeros((scheme.n_t, 2 * m), dtype=complex)
        for v, entry in enumerate(col):
            if entry is None:
                continue
            label, sign, conj = entry
            i = pos[label]
            a[v, i] += sign
            a[v, m + i] += sign * (-1j if conj else 1j)
        mats.append(a)
    a1, a2 = mats
    stacked = np.vstack([a1.real, a1.imag, a2.real, a2.imag])
    return GeneratorMatrices(a1=a1, a2=a2, m=stacked)


def template(scheme: SfbcScheme, n_fft: int) -> FeatureTemplate:
    """Theoretical feature vector q over pairs k = 1..n_fft-1."""
    if n_fft % scheme.l:
        raise ValueError(
            f"n_fft={n_fft} not divisible by {scheme.name} code length {scheme.l}"
        )
    q = np.empty(n_fft - 1, dtype=int)
    # One period suffices; the pair structure repeats every l subcarriers.
    period = [2 * len(_pair_entries(scheme, k)[1]) for k in range(1, scheme.l + 1)]
    for k in range(1, n_fft):
        q[k - 1] = period[(k - 1) % scheme.l]
    return FeatureTemplate(scheme=scheme, q=q)


def average_column_power(scheme: SfbcScheme) -> float:
    """Mean transmitted power per subcarrier for unit-energy symbols.

    Zeros in the codeword are transmitted as true zeros (no row
    re-normalization), so this is the nonzero-entry count over l.
    """
    rows = _CODEWORDS[scheme.name]
    nonzero = sum(e is not None for row in rows for e in row)
    return nonzero / scheme.l
