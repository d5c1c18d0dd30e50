"""Monte Carlo experiment runner: sweeps, CSV tables, capture handling.

One trial is waveform synthesis -> channel -> impairments -> noise ->
identification, drawn from a substream keyed by (master seed, sweep
point, scheme, trial index) so any row of any table can be regenerated
in isolation.  Tables come in three schemas: per-trial rows, per-sweep
summaries with the full confusion matrix, and dimension-estimate
histograms.  Figure presets bundle the parameter sweeps of the usual
performance studies (symbol count, false alarm level, FFT size, antenna
count, modulation, timing, frequency offset, Doppler).
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from math import sqrt
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from . import waveform as wf
from .classifier import (
    LEVEL2_MEMBERS,
    DetectorConfig,
    IdentificationResult,
    feature_vector,
    identify,
    level1_indices,
    level2_indices,
    upper_bound,
)
from .codebook import SCHEMES, template

__all__ = [
    "SCHEMA_TRIALS",
    "SCHEMA_SUMMARY",
    "SCHEMA_HIST",
    "TRIAL_COLUMNS",
    "SUMMARY_COLUMNS",
    "HIST_COLUMNS",
    "ExperimentConfig",
    "SweepResult",
    "ResultTable",
    "run_trial",
    "run",
    "run_to_csv",
    "measure_pr_o",
    "tree_upper_bound",
    "identify_capture",
    "histogram_rows",
    "write_histogram_csv",
    "PRESETS",
    "resolve_preset",
    "preset_configs",
    "sweep_figures",
    "parse_config_file",
]

SCHEMA_TRIALS = "sfbcid-trials-v1"
SCHEMA_SUMMARY = "sfbcid-summary-v1"
SCHEMA_HIST = "sfbcid-hist-v1"

#: Metadata comment written into every table after the schema line.
SNR_NOTE = (
    "snr_db = mean received signal power per receive antenna / noise power "
    "per receive antenna, averaged over channel draws"
)

TRIAL_COLUMNS = [
    "scheme_true", "scheme_est", "snr_db", "n_b", "n_fft", "n_r", "pr_f",
    "modulation", "sto", "cfo", "doppler", "trial", "level1_subset",
    "d_sfc1", "d_sfc2", "d_sfc3", "d_sm3", "level2_pair", "d_l2_low",
    "d_l2_high", "seed",
]

SUMMARY_COLUMNS = [
    "snr_db", "n_b", "n_fft", "n_r", "cp_len", "pr_f", "modulation", "sto",
    "cfo", "doppler", "trials", "seed",
    *[f"c_{t}_{e}" for t in SCHEMES for e in SCHEMES],
    "pr", "ci_low", "ci_high", "pr_o", "pr_u",
]

HIST_COLUMNS = ["scheme", "snr_db", "n_b", "n_fft", "n_r", "pr_f", "q_true", "q", "count"]

#: Position of each scheme in the canonical pool; part of the seeding
#: contract, so trials stay re-runnable when the pool is a subset.
_CANONICAL = {name: i for i, name in enumerate(SCHEMES)}

_SUBSET_OF = {
    "SA": "SFC1", "AL": "SFC1",
    "SFBC2": "SFC2", "SFBC3": "SFC2",
    "SM2": "SFC3", "SFBC1": "SFC3",
    "SM3": None,
}

#: spawn_key prefix reserved for the pure-noise calibration stream so it
#: can never collide with a trial key (sweep indices are small).
_CALIBRATION_KEY = 1_000_000


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one sweep: fixed parameters plus an SNR grid."""

    pool: tuple[str, ...] = tuple(SCHEMES)
    snr_grid: tuple[float, ...] = (-4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    trials: int = 200
    n_b: int = 100
    n_fft: int = 128
    n_r: int = 8
    cp_len: int = 10
    pr_f: float = 1e-4
    modulation: str = "4-PSK"
    sto: int = 0
    cfo: float = 0.0
    doppler: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.pool:
            raise ValueError("pool must not be empty")
        unknown = [s for s in self.pool if s not in SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes in pool: {unknown}")
        if len(set(self.pool)) != len(self.pool):
            raise ValueError("pool contains duplicates")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_grid:
            raise ValueError("snr_grid must not be empty")
        for name in self.pool:
            if self.n_fft % SCHEMES[name].l:
                raise ValueError(
                    f"{name} code length {SCHEMES[name].l} does not divide "
                    f"n_fft={self.n_fft}"
                )
        if self.n_fft < 16:
            raise ValueError("need n_fft >= 16 so every tree level samples a pair")
        # constructing these surfaces dimension errors at config time
        self.detector()
        self.ofdm()

    def detector(self) -> DetectorConfig:
        return DetectorConfig(
            pr_f=self.pr_f, n_r=self.n_r, n_b=self.n_b, n_fft=self.n_fft
        )

    def ofdm(self) -> wf.OfdmConfig:
        return wf.OfdmConfig(
            n_fft=self.n_fft, cp_len=self.cp_len, n_rx=self.n_r,
            n_symbols=self.n_b,
        )

    def impairments(self) -> wf.Impairments:
        return wf.Impairments(sto=self.sto, cfo=self.cfo, doppler=self.doppler)


@dataclass(frozen=True)
class SweepResult:
    """Aggregate of one sweep point over the whole pool."""

    snr_db: float
    correct: Mapping[str, int]
    confusion: Mapping[tuple[str, str], int]
    pr: float
    ci_low: float
    ci_high: float
    wall_s: float


@dataclass(frozen=True)
class ResultTable:
    cfg: ExperimentConfig
    sweeps: tuple[SweepResult, ...]


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def trial_rng(cfg: ExperimentConfig, sweep_idx: int, scheme_name: str,
              trial: int) -> np.random.Generator:
    """The substream feeding one trial; disjoint across all key tuples."""
    key = (sweep_idx, _CANONICAL[scheme_name], trial)
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=key))
    )


def run_trial(cfg: ExperimentConfig, sweep_idx: int, scheme_name: str,
              trial: int) -> dict[str, str]:
    """One complete trial, returned as its CSV row.

    Fresh channel, data, and noise come from the keyed substream, so the
    same arguments always reproduce the same row byte for byte.
    """
    if not 0 <= sweep_idx < len(cfg.snr_grid):
        raise ValueError(f"sweep_idx {sweep_idx} outside snr_grid")
    if scheme_name not in cfg.pool:
        raise ValueError(f"{scheme_name!r} not in pool")
    scheme = SCHEMES[scheme_name]
    snr_db = float(cfg.snr_grid[sweep_idx])
    rng = trial_rng(cfg, sweep_idx, scheme_name, trial)
    ocfg = cfg.ofdm()
    ch = wf.draw_channel(ocfg, scheme.n_t, rng)
    tx = wf.transmit(scheme, ocfg, cfg.modulation, rng)
    grid = wf.propagate(tx, ch, snr_db, cfg.impairments(), rng)
    result = identify(grid, cfg.detector())

    row = {
        "scheme_true": scheme_name,
        "scheme_est": result.scheme.name,
        "snr_db": _fmt(snr_db),
        "n_b": _fmt(cfg.n_b),
        "n_fft": _fmt(cfg.n_fft),
        "n_r": _fmt(cfg.n_r),
        "pr_f": _fmt(cfg.pr_f),
        "modulation": cfg.modulation,
        "sto": _fmt(cfg.sto),
        "cfo": _fmt(cfg.cfo),
        "doppler": _fmt(cfg.doppler),
        "trial": _fmt(trial),
        "level1_subset": result.level1.chosen,
        "d_sfc1": _fmt(result.level1.distances["SFC1"]),
        "d_sfc2": _fmt(result.level1.distances["SFC2"]),
        "d_sfc3": _fmt(result.level1.distances["SFC3"]),
        "d_sm3": _fmt(result.level1.distances["SM3"]),
        "level2_pair": "",
        "d_l2_low": "",
        "d_l2_high": "",
        "seed": _fmt(cfg.seed),
    }
    if result.level2 is not None:
        low, high = LEVEL2_MEMBERS[result.level1.chosen]
        row["level2_pair"] = f"{low}/{high}"
        row["d_l2_low"] = _fmt(result.level2.distances[low])
        row["d_l2_high"] = _fmt(result.level2.distances[high])
    return row


def _trial_args(args) -> dict[str, str]:
    return run_trial(*args)


def run(cfg: ExperimentConfig, *, workers: Optional[int] = None,
        trial_writer: Optional[Callable[[dict[str, str]], None]] = None
        ) -> ResultTable:
    """Execute the full sweep and aggregate per sweep point.

    Trials are independent; with workers > 1 they run in a process pool
    but results are always reduced in deterministic key order.
    ``trial_writer`` receives every row in that order as it is produced,
    which is what keeps partially written tables valid on interrupt.
    """
    if workers is None:
        workers = int(os.environ.get("SFBCID_WORKERS", "1"))
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    sweeps = []
    for sweep_idx, snr_db in enumerate(cfg.snr_grid):
        t0 = time.monotonic()
        keys = [
            (cfg, sweep_idx, scheme, trial)
            for scheme in cfg.pool
            for trial in range(cfg.trials)
        ]
        correct = {scheme: 0 for scheme in cfg.pool}
        confusion = {(t, e): 0 for t in cfg.pool for e in SCHEMES}

        def reduce(rows) -> None:
            for row in rows:
                if trial_writer is not None:
                    trial_writer(row)
                pair = (row["scheme_true"], row["scheme_est"])
                confusion[pair] += 1
                if pair[0] == pair[1]:
                    correct[pair[0]] += 1

        if workers == 1:
            reduce(map(_trial_args, keys))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reduce(pool.map(_trial_args, keys, chunksize=8))
        for scheme in cfg.pool:
            total = sum(confusion[(scheme, e)] for e in SCHEMES)
            if total != cfg.trials:
                raise AssertionError(f"trial count mismatch for {scheme}")
        pr = float(np.mean([correct[s] / cfg.trials for s in cfg.pool]))
        var = sum(
            (correct[s] / cfg.trials) * (1 - correct[s] / cfg.trials) / cfg.trials
            for s in cfg.pool
        ) / len(cfg.pool) ** 2
        half = 1.96 * sqrt(var)
        sweeps.append(
            SweepResult(
                snr_db=float(snr_db),
                correct=correct,
                confusion=confusion,
                pr=pr,
                ci_low=max(0.0, pr - half),
                ci_high=min(1.0, pr + half),
                wall_s=time.monotonic() - t0,
            )
        )
    return ResultTable(cfg=cfg, sweeps=tuple(sweeps))


def measure_pr_o(n_r: int, n_b: int, pr_f: float, *, n_tests: int = 20_000,
                 seed: int = 0) -> float:
    """Overestimation rate of the first serial test on pure noise.

    This is the empirical Pr_o that the analytic success ceiling is
    evaluated with; it should track pr_f.
    """
    n_fft = 64
    det = DetectorConfig(pr_f=pr_f, n_r=n_r, n_b=n_b, n_fft=n_fft)
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_CALIBRATION_KEY,)))
    )
    per_grid = len(level1_indices(n_fft))
    hits = seen = 0
    while seen < n_tests:
        shape = (n_b, n_fft, n_r)
        grid = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        fv = feature_vector(grid, det, level1_indices(n_fft))
        take = min(per_grid, n_tests - seen)
        values = list(fv.entries.values())[:take]
        hits += sum(q > 0 for q in values)
        seen += take
    return hits / n_tests


def tree_upper_bound(pr_o: float, *, pool: Iterable[str] = tuple(SCHEMES),
                     n_fft: int = 128, pr_f: float = 1e-4) -> float:
    """Success ceiling of the whole tree, averaged over the pool.

    Each scheme must survive the level-1 test over n_fft/2 pairs and,
    unless it is the immediate leaf, the level-2 test of its subset; the
    per-level ceilings multiply.
    """
    total = 0.0
    pool = tuple(pool)
    for name in pool:
        bound = upper_bound(pr_o, n_fft // 2, n_fft, pr_f)
        subset = _SUBSET_OF[name]
        if subset is not None:
            k2 = len(level2_indices(subset, n_fft))
            bound *= upper_bound(pr_o, k2, n_fft, pr_f)
        total += bound
    return total / len(pool)


def run_to_csv(cfg: ExperimentConfig, out_dir, stem: str, *,
               workers: Optional[int] = None, with_bound: bool = False,
               append: bool = False) -> dict[str, Path]:
    """Run a sweep and write the trial and summary tables.

    Trial rows are flushed as they are produced, so an interrupted run
    leaves a valid prefix on disk.  ``with_bound`` adds the measured
    pure-noise Pr_o and the tree ceiling Pr_u to every summary row.
    ``append`` continues existing tables (used by multi-config presets).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials_path = out_dir / f"{stem}_trials.csv"
    summary_path = out_dir / f"{stem}_summary.csv"

    pr_o = pr_u = ""
    if with_bound:
        measured = measure_pr_o(cfg.n_r, cfg.n_b, cfg.pr_f, seed=cfg.seed)
        pr_o = f"{measured:.6f}"
        pr_u = f"{tree_upper_bound(measured, pool=cfg.pool, n_fft=cfg.n_fft, pr_f=cfg.pr_f):.6f}"

    mode = "a" if append else "w"
    with open(trials_path, mode, newline="") as f:
        if not append:
            f.write(f"# {SCHEMA_TRIALS}\n# {SNR_NOTE}\n")
            csv.writer(f).writerow(TRIAL_COLUMNS)
        writer = csv.writer(f)

        def sink(row: dict[str, str]) -> None:
            writer.writerow([row[c] for c in TRIAL_COLUMNS])
            f.flush()

        table = run(cfg, workers=workers, trial_writer=sink)

    with open(summary_path, mode, newline="") as f:
        if not append:
            f.write(f"# {SCHEMA_SUMMARY}\n# {SNR_NOTE}\n")
            csv.writer(f).writerow(SUMMARY_COLUMNS)
        writer = csv.writer(f)
        for sweep in table.sweeps:
            row = {
                "snr_db": _fmt(sweep.snr_db),
                "n_b": _fmt(cfg.n_b),
                "n_fft": _fmt(cfg.n_fft),
                "n_r": _fmt(cfg.n_r),
                "cp_len": _fmt(cfg.cp_len),
                "pr_f": _fmt(cfg.pr_f),
                "modulation": cfg.modulation,
                "sto": _fmt(cfg.sto),
                "cfo": _fmt(cfg.cfo),
                "doppler": _fmt(cfg.doppler),
                "trials": _fmt(cfg.trials),
                "seed": _fmt(cfg.seed),
                "pr": f"{sweep.pr:.6f}",
                "ci_low": f"{sweep.ci_low:.6f}",
                "ci_high": f"{sweep.ci_high:.6f}",
                "pr_o": pr_o,
                "pr_u": pr_u,
            }
            for t in SCHEMES:
                for e in SCHEMES:
                    row[f"c_{t}_{e}"] = _fmt(sweep.confusion.get((t, e), 0))
            writer.writerow([row[c] for c in SUMMARY_COLUMNS])
    return {"trials": trials_path, "summary": summary_path}


def identify_capture(path, pr_f: float = 1e-4) -> IdentificationResult:
    """Run the detector on an interleaved IQ capture file."""
    samples, meta = wf.read_capture(path)
    grid = wf.demodulate(samples, meta["n_fft"], meta["cp_len"])
    det = DetectorConfig(
        pr_f=pr_f, n_r=meta["n_rx"], n_b=meta["n_symbols"], n_fft=meta["n_fft"]
    )
    return identify(grid, det)


def histogram_rows(*, scheme: str = "AL", snr_db: float = -1.0, n_b: int = 400,
                   n_fft: int = 128, n_r: int = 8, pr_f: float = 1e-4,
                   estimates: int = 1000, seed: int = 0) -> list[dict[str, str]]:
    """Dimension-estimate counts at the odd pairs of repeated captures.

    The odd pairs of the chosen scheme share one template value (4 for
    the defaults), so pooling them gives the error histogram of the
    serial test around a known true dimension.
    """
    sch = SCHEMES[scheme]
    det = DetectorConfig(pr_f=pr_f, n_r=n_r, n_b=n_b, n_fft=n_fft)
    ocfg = wf.OfdmConfig(n_fft=n_fft, cp_len=10, n_rx=n_r, n_symbols=n_b)
    q_true = int(template(sch, n_fft).q[0])  # value at k=1, an odd pair
    values: list[int] = []
    grid_idx = 0
    while len(values) < estimates:
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(grid_idx,)))
        )
        ch = wf.draw_channel(ocfg, sch.n_t, rng)
        tx = wf.transmit(sch, ocfg, "4-PSK", rng)
        grid = wf.propagate(tx, ch, snr_db, wf.Impairments(), rng)
        fv = feature_vector(grid, det, level1_indices(n_fft))
        values.extend(fv.entries.values())
        grid_idx += 1
    values = values[:estimates]
    rows = []
    for q in sorted(set(values)):
        rows.append({
            "scheme": scheme,
            "snr_db": _fmt(float(snr_db)),
            "n_b": _fmt(n_b),
            "n_fft": _fmt(n_fft),
            "n_r": _fmt(n_r),
            "pr_f": _fmt(pr_f),
            "q_true": _fmt(q_true),
            "q": _fmt(q),
            "count": _fmt(values.count(q)),
        })
    return rows


def write_histogram_csv(rows: list[dict[str, str]], out_path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as f:
        f.write(f"# {SCHEMA_HIST}\n# {SNR_NOTE}\n")
        writer = csv.writer(f)
        writer.writerow(HIST_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in HIST_COLUMNS])
    return out_path


# ---------------------------------------------------------------------------
# figure presets

_PRESET_ALIASES = {
    "fig4": "histogram",
    "fig6": "nb",
    "fig7": "prf",
    "fig8": "nfft",
    "fig9": "nr",
    "fig10": "modulation",
    "fig11": "sto",
    "fig12": "cfo",
    "fig13": "doppler",
}

_SHORT_SNR = (6.0,)


def _base(overrides: Optional[Mapping] = None, **fixed) -> ExperimentConfig:
    cfg = ExperimentConfig(trials=50, **fixed)
    if overrides:
        cfg = replace(cfg, **dict(overrides))
    return cfg


def _axis(cfg: ExperimentConfig, field_name: str, values) -> list[ExperimentConfig]:
    return [replace(cfg, **{field_name: v}) for v in values]


def _preset_nb(ov):
    return _axis(_base(ov), "n_b", (50, 100, 200, 400))


def _preset_prf(ov):
    return _axis(_base(ov, snr_grid=_SHORT_SNR), "pr_f", (1e-1, 1e-2, 1e-3, 1e-4))


def _preset_nfft(ov):
    return _axis(_base(ov), "n_fft", (64, 128, 256))


def _preset_nr(ov):
    return _axis(_base(ov), "n_r", (6, 8, 10))


def _preset_modulation(ov):
    return _axis(_base(ov), "modulation", ("4-PSK", "16-QAM"))


def _preset_sto(ov):
    out = []
    for n_fft in (64, 128, 256):
        base = _base(ov, snr_grid=_SHORT_SNR)
        out.extend(_axis(replace(base, n_fft=n_fft), "sto", (0, -3, -30, 20)))
    return out


def _preset_cfo(ov):
    out = []
    for n_b in (50, 100):
        base = _base(ov, snr_grid=(4.0, 6.0))
        out.extend(_axis(replace(base, n_b=n_b), "cfo", (0.0, 1e-5, 1e-4, 1e-3)))
    return out


def _preset_doppler(ov):
    out = []
    for n_b in (50, 100):
        base = _base(ov, snr_grid=(4.0, 6.0))
        out.extend(_axis(replace(base, n_b=n_b), "doppler", (0.0, 1e-6, 1e-5, 1e-4)))
    return out


PRESETS: dict[str, str] = {
    "histogram": "dimension-estimate error histogram at low SNR (true value 4)",
    "nb": "identification probability vs SNR for N_b in {50,100,200,400}",
    "prf": "identification probability and tree ceiling vs false alarm level",
    "nfft": "identification probability vs SNR for N in {64,128,256}",
    "nr": "identification probability vs SNR for N_r in {6,8,10}",
    "modulation": "identification probability vs SNR for 4-PSK and 16-QAM",
    "sto": "timing-offset study over the four FFT-window cases",
    "cfo": "carrier-frequency-offset study at SNR 4 and 6 dB",
    "doppler": "Doppler-spread study at SNR 4 and 6 dB",
}

_PRESET_BUILDERS = {
    "nb": _preset_nb,
    "prf": _preset_prf,
    "nfft": _preset_nfft,
    "nr": _preset_nr,
    "modulation": _preset_modulation,
    "sto": _preset_sto,
    "cfo": _preset_cfo,
    "doppler": _preset_doppler,
}


def resolve_preset(name: str) -> str:
    resolved = _PRESET_ALIASES.get(name, name)
    if resolved not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return resolved


def preset_configs(name: str, overrides: Optional[Mapping] = None
                   ) -> list[ExperimentConfig]:
    """The experiment configs a preset sweeps, without running anything."""
    resolved = resolve_preset(name)
    if resolved == "histogram":
        raise ValueError("the histogram preset does not sweep experiment configs")
    return _PRESET_BUILDERS[resolved](overrides)


def sweep_figures(name: str, out_dir, *, overrides: Optional[Mapping] = None,
                  workers: Optional[int] = None) -> dict[str, Path]:
    """Run one figure preset and write its CSV bundle.

    ``overrides`` patches the base ExperimentConfig of every run (for
    example smaller ``trials``); the axis the preset sweeps stays fixed.
    For the histogram preset the recognized overrides are the
    ``histogram_rows`` keyword arguments.
    """
    resolved = resolve_preset(name)
    out_dir = Path(out_dir)
    if resolved == "histogram":
        rows = histogram_rows(**dict(overrides or {}))
        path = write_histogram_csv(rows, out_dir / "histogram.csv")
        return {"histogram": path}
    paths: dict[str, Path] = {}
    for i, cfg in enumerate(preset_configs(resolved, overrides)):
        paths = run_to_csv(
            cfg, out_dir, resolved, workers=workers,
            with_bound=(resolved == "prf"), append=(i > 0),
        )
    return paths


# ---------------------------------------------------------------------------
# config files


def _coerce(name: str, text: str):
    spec = {f.name: f for f in fields(ExperimentConfig)}.get(name)
    if spec is None:
        raise ValueError(f"unknown config key {name!r}")
    if name == "pool":
        return tuple(part.strip() for part in text.split(",") if part.strip())
    if name == "snr_grid":
        return tuple(float(part) for part in text.split(",") if part.strip())
    if name == "modulation":
        return text.strip()
    if name in ("pr_f", "cfo", "doppler"):
        return float(text)
    return int(text)


def parse_config_file(path) -> dict:
    """Plain-text key = value experiment description.

    Blank lines and # comments are ignored; keys are ExperimentConfig
    field names; pool and snr_grid take comma-separated lists.
    """
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        try:
            values[key] = _coerce(key, text.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return values
