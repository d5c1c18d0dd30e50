"""Blind identification of space-frequency block codes in MIMO-OFDM.

The package decides which of seven transmit schemes (SA, SM2, SM3, AL,
SFBC1, SFBC2, SFBC3) produced an intercepted multi-antenna OFDM signal,
using only the received samples: no channel knowledge, no noise power, no
pilot symbols.  The discriminating feature is the dimension of the signal
subspace of the stacked real-valued observation at adjacent subcarrier
pairs, estimated per pair by a serial eigenvalue test against Tracy-Widom
thresholds and matched to per-scheme templates through a two-level
decision tree.

Modules
-------
codebook    scheme definitions, codeword matrices, feature templates
waveform    OFDM modulation, fading channel, impairments, demodulation
rmt         Tracy-Widom (beta=1) numerics and detection thresholds
subspace    stacked pair model, sample covariance, test statistics
classifier  serial dimension test, distance metric, decision tree, bounds
harness     Monte Carlo sweeps, CSV output, IQ capture handling
cli         command line front end
"""

from .classifier import DetectorConfig, IdentificationResult, identify
from .codebook import SCHEMES, SfbcScheme, get_scheme
from .harness import ExperimentConfig, identify_capture, run, run_to_csv

__version__ = "0.1.0"

__all__ = [
    "SCHEMES",
    "SfbcScheme",
    "get_scheme",
    "DetectorConfig",
    "IdentificationResult",
    "identify",
    "ExperimentConfig",
    "identify_capture",
    "run",
    "run_to_csv",
    "__version__",
]
