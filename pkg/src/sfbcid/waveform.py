"""OFDM front end: modulation, fading channel, impairments, demodulation.

The transmit side draws constellation symbols, lays them out on the
frequency grid per scheme, and converts each OFDM symbol to time domain
with a cyclic prefix.  `propagate` runs the samples through a
frequency-selective MIMO channel by honest linear convolution over the
concatenated stream, applies optional sample timing offset, carrier
frequency offset and Doppler, adds white Gaussian noise in the time
domain, and demodulates back to the per-subcarrier grid the detector
consumes.  Noise power is set from the measured transmit power, never
the other way around, so the received samples are self-consistent and an
IQ capture written from them carries the impairments for real.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass

import numpy as np

from .codebook import SfbcScheme, layout_symbol

__all__ = [
    "OfdmConfig",
    "ChannelRealization",
    "Impairments",
    "ReceivedGrid",
    "exponential_profile",
    "draw_channel",
    "constellation",
    "modulated_grid",
    "ofdm_modulate",
    "transmit",
    "demodulate",
    "jakes_taps",
    "propagate",
    "write_capture",
    "read_capture",
]

MAX_SCHEME_TX = 3          # largest transmit array in the scheme pool
DEFAULT_TAPS = 6
CAPTURE_MAGIC = b"SFBCIQ1"
_HEADER = struct.Struct("<7s4Id")


@dataclass(frozen=True)
class OfdmConfig:
    """Receiver-side frame geometry and observation length."""

    n_fft: int = 128
    cp_len: int = 10
    n_rx: int = 8
    n_symbols: int = 100

    def __post_init__(self) -> None:
        n = self.n_fft
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_fft must be a power of two >= 8, got {n}")
        if not 0 <= self.cp_len < n:
            raise ValueError(f"cp_len must be in [0, {n}), got {self.cp_len}")
        if self.n_rx <= MAX_SCHEME_TX:
            raise ValueError(
                f"need more than {MAX_SCHEME_TX} receive antennas, got {self.n_rx}"
            )
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be positive")

    @property
    def frame_len(self) -> int:
        return self.n_fft + self.cp_len


@dataclass(frozen=True)
class ChannelRealization:
    """One static channel draw with its frequency response.

    taps: (n_rx, n_t, n_taps) complex impulse responses.
    freq_response: (n_fft, n_rx, n_t); entry k is H_k.
    """

    taps: np.ndarray
    freq_response: np.ndarray
    cfg: OfdmConfig


@dataclass(frozen=True)
class Impairments:
    """Synchronization and mobility errors; all zero means ideal."""

    sto: int = 0        # FFT window offset, samples
    cfo: float = 0.0    # carrier offset as a fraction of subcarrier spacing
    doppler: float = 0.0  # max Doppler normalized to the sampling rate


@dataclass(frozen=True)
class ReceivedGrid:
    """Demodulated per-subcarrier observations.

    y: (n_symbols, n_fft, n_rx) complex.
    noise_var: the sigma_w^2 actually injected.  Ground truth for
    diagnostics and tests only; the detector never reads it.
    """

    y: np.ndarray
    noise_var: float


def exponential_profile(n_taps: int = DEFAULT_TAPS) -> np.ndarray:
    """Power delay profile e^(-t/5), t = 0..n_taps-1, unnormalized."""
    return np.exp(-np.arange(n_taps) / 5.0)


def draw_channel(
    cfg: OfdmConfig, n_t: int, rng: np.random.Generator, n_taps: int = DEFAULT_TAPS
) -> ChannelRealization:
    """Draw independent Rayleigh taps with the exponential profile.

    Each H_k must be full rank for the subspace dimensions to come out
    right; rank deficiency has probability zero but the draw is checked
    and repeated anyway so a degenerate realization can never escape.
    """
    scale = np.sqrt(exponential_profile(n_taps) / 2.0)
    while True:
        g = rng.standard_normal((2, cfg.n_rx, n_t, n_taps))
        taps = scale * (g[0] + 1j * g[1])
        freq = np.fft.fft(taps, n=cfg.n_fft, axis=-1)  # (n_rx, n_t, n_fft)
        freq = np.moveaxis(freq, -1, 0)
        if np.all(np.linalg.matrix_rank(freq) == min(cfg.n_rx, n_t)):
            return ChannelRealization(taps=taps, freq_response=freq, cfg=cfg)


_MOD_RE = re.compile(r"^\s*(\d+)\s*[-_ ]?\s*(PSK|QAM)\s*$", re.IGNORECASE)


def constellation(modulation: str) -> np.ndarray:
    """Unit-average-energy alphabet for names like "4-PSK" or "16-QAM".

    Real-only alphabets (BPSK and friends) are rejected: the stacked
    pair model needs proper constellations, and identification provably
    breaks without them.
    """
    m = _MOD_RE.match(modulation)
    if not m:
        raise ValueError(f"unrecognized modulation {modulation!r}")
    order, kind = int(m.group(1)), m.group(2).upper()
    if order < 4:
        raise ValueError(
            f"{modulation}: real-only constellations are not supported (need M >= 4)"
        )
    if kind == "PSK":
        return np.exp(2j * np.pi * (np.arange(order) + 0.5) / order)
    side = round(np.sqrt(order))
    if side * side != order:
        raise ValueError(f"{modulation}: QAM order must be a perfect square")
    levels = 2.0 * np.arange(side) - (side - 1)
    re_, im_ = np.meshgrid(levels, levels)
    points = (re_ + 1j * im_).ravel()
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


def modulated_grid(
    scheme: SfbcScheme, cfg: OfdmConfig, modulation: str, rng: np.random.Generator
) -> np.ndarray:
    """Random-data frequency grids, (n_symbols, n_t, n_fft)."""
    points = constellation(modulation)
    per_symbol = scheme.n_s * (cfg.n_fft // scheme.l)
    data = points[rng.integers(0, len(points), size=(cfg.n_symbols, per_symbol))]
    return np.stack([layout_symbol(scheme, row, cfg.n_fft) for row in data])


def ofdm_modulate(grid: np.ndarray, cp_len: int) -> np.ndarray:
    """IDFT each symbol, prepend the cyclic prefix, concatenate in time.

    grid: (n_symbols, n_t, n_fft) -> samples (n_t, n_symbols*(n_fft+cp_len)).
    """
    body = np.fft.ifft(grid, axis=-1)
    frames = np.concatenate([body[..., body.shape[-1] - cp_len :], body], axis=-1)
    return np.concatenate(list(frames), axis=-1)


def transmit(
    scheme: SfbcScheme, cfg: OfdmConfig, modulation: str, rng: np.random.Generator
) -> np.ndarray:
    """Time-domain transmit stream, (n_t, n_symbols*frame_len)."""
    return ofdm_modulate(modulated_grid(scheme, cfg, modulation, rng), cfg.cp_len)


def demodulate(samples: np.ndarray, n_fft: int, cp_len: int) -> np.ndarray:
    """Strip prefixes and DFT, (n_rx, total) -> (n_symbols, n_fft, n_rx)."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise ValueError(f"expected (n_rx, n_samples), got {samples.shape}")
    frame = n_fft + cp_len
    if samples.shape[1] % frame:
        raise ValueError(
            f"sample count {samples.shape[1]} is not a whole number of "
            f"{frame}-sample frames"
        )
    n_b = samples.shape[1] // frame
    windows = samples.reshape(samples.shape[0], n_b, frame)[:, :, cp_len:]
    return np.fft.fft(windows, axis=-1).transpose(1, 2, 0)


def jakes_taps(
    profile: np.ndarray,
    n_samples: int,
    f_d: float,
    rng: np.random.Generator,
    size: tuple = (),
    n_osc: int = 16,
) -> np.ndarray:
    """Sum-of-sinusoids Rayleigh tap processes, (*size, n_taps, n_samples).

    Each tap is a sum of n_osc equal-power complex oscillators with
    uniform random arrival angles and phases, scaled so the marginal
    power follows `profile`.  Marginals are approximately complex
    Gaussian; temporal correlation follows the classic Doppler model.
    """
    profile = np.asarray(profile, dtype=float)
    shape = (*size, len(profile), n_osc)
    alpha = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    n = np.arange(n_samples)
    acc = np.zeros((*size, len(profile), n_samples), dtype=complex)
    for m in range(n_osc):  # one oscillator at a time to bound memory
        rate = 2.0 * np.pi * f_d * np.cos(alpha[..., m])
        acc += np.exp(1j * (rate[..., None] * n + phi[..., m, None]))
    return acc * np.sqrt(profile[:, None] / n_osc)


def propagate(
    tx: np.ndarray,
    ch: ChannelRealization,
    snr_db: float,
    imp: Impairments,
    rng: np.random.Generator,
) -> ReceivedGrid:
    """Channel, impairments, noise, and demodulation in one pass.

    The FFT window for symbol n starts at n*frame + cp_len + sto over
    the concatenated received stream, so timing offsets pull in real
    inter-symbol samples (or silence before the burst) rather than a
    modeled approximation.  Noise is injected per time-domain sample at
    sigma_w^2 / n_fft so the post-DFT noise variance per subcarrier is
    exactly sigma_w^2, including inside any misplaced window.
    """
    tx = np.asarray(tx)
    cfg = ch.cfg
    n_rx, n_t, n_taps = ch.taps.shape
    if tx.ndim != 2 or tx.shape[0] != n_t:
        raise ValueError(f"transmit stream must be ({n_t}, total), got {tx.shape}")
    total = tx.shape[1]
    frame = cfg.frame_len
    if total != cfg.n_symbols * frame:
        raise ValueError(
            f"expected {cfg.n_symbols} frames of {frame} samples, got {total}"
        )
    if abs(imp.sto) >= frame:
        raise ValueError(
            f"window offset {imp.sto} exceeds one frame ({frame} samples)"
        )

    conv_len = total + n_taps - 1
    rx = np.zeros((n_rx, conv_len), dtype=complex)
    if imp.doppler > 0:
        profile = exponential_profile(n_taps)
        series = jakes_taps(
            profile, total, imp.doppler, rng, size=(n_rx, n_t)
        )
        for tau in range(n_taps):
            rx[:, tau : tau + total] += np.einsum(
                "rtn,tn->rn", series[:, :, tau, :], tx
            )
    else:
        for r in range(n_rx):
            for t in range(n_t):
                rx[r] += np.convolve(tx[t], ch.taps[r, t])

    # per-receive-antenna SNR: channel gain (profile mass, an ensemble
    # average) times transmit power per subcarrier, over sigma_w^2
    useful = tx.reshape(n_t, cfg.n_symbols, frame)[:, :, cfg.cp_len :]
    p_col = float(np.sum(np.abs(useful) ** 2)) / cfg.n_symbols
    gain = float(exponential_profile(n_taps).sum())
    noise_var = gain * p_col * 10.0 ** (-snr_db / 10.0)

    if imp.cfo != 0.0:
        rx = rx * np.exp(2j * np.pi * imp.cfo * np.arange(conv_len) / cfg.n_fft)

    margin = frame  # covers any legal window offset
    buf = np.zeros((n_rx, margin + conv_len + margin), dtype=complex)
    buf[:, margin : margin + conv_len] = rx
    if noise_var > 0:
        g = rng.standard_normal((2, n_rx, buf.shape[1]))
        buf = buf + np.sqrt(noise_var / cfg.n_fft / 2.0) * (g[0] + 1j * g[1])

    starts = margin + np.arange(cfg.n_symbols) * frame + cfg.cp_len + imp.sto
    idx = starts[:, None] + np.arange(cfg.n_fft)[None, :]
    windows = buf[:, idx]  # (n_rx, n_symbols, n_fft)
    y = np.fft.fft(windows, axis=-1).transpose(1, 2, 0)
    return ReceivedGrid(y=y, noise_var=noise_var)


def write_capture(
    path, samples: np.ndarray, n_fft: int, cp_len: int, sample_rate: float = 1.0
) -> None:
    """Write an IQ capture: header + interleaved float32, antenna-major."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise ValueError(f"expected (n_rx, n_samples), got {samples.shape}")
    frame = n_fft + cp_len
    if samples.shape[1] % frame:
        raise ValueError("sample count is not a whole number of frames")
    n_rx, n_b = samples.shape[0], samples.shape[1] // frame
    header = _HEADER.pack(CAPTURE_MAGIC, n_fft, cp_len, n_rx, n_b, sample_rate)
    iq = np.empty((n_rx, samples.shape[1], 2), dtype="<f4")
    iq[..., 0] = samples.real
    iq[..., 1] = samples.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(iq.tobytes())


def read_capture(path):
    """Read an IQ capture; returns (samples, meta dict).

    samples: (n_rx, n_samples) complex128 rebuilt from the float32 I/Q
    payload.  Raises on a bad magic, a truncated or oversized payload,
    and on captures with too few antennas for identification to work.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size or raw[:7] != CAPTURE_MAGIC:
        raise ValueError("not an IQ capture (bad magic)")
    _, n_fft, cp_len, n_rx, n_b, sample_rate = _HEADER.unpack(raw[: _HEADER.size])
    if n_rx <= MAX_SCHEME_TX:
        raise ValueError(
            f"capture has {n_rx} receive antennas; need more than {MAX_SCHEME_TX}"
        )
    n_samples = n_b * (n_fft + cp_len)
    expect = _HEADER.size + 8 * n_rx * n_samples
    if len(raw) != expect:
        raise ValueError(
            f"payload size mismatch: expected {expect} bytes, file has {len(raw)}"
        )
    iq = np.frombuffer(raw[_HEADER.size :], dtype="<f4").reshape(n_rx, n_samples, 2)
    samples = iq[..., 0].astype(np.float64) + 1j * iq[..., 1].astype(np.float64)
    meta = {
        "n_fft": n_fft,
        "cp_len": cp_len,
        "n_rx": n_rx,
        "n_symbols": n_b,
        "sample_rate": sample_rate,
    }
    return samples, meta
