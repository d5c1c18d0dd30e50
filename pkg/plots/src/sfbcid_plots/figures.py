"""Render one figure per harness preset from its CSV bundle.

The contract is deliberately narrow: a figure is a pure function of the
input CSV and the preset name.  Rendering the same file twice must produce
byte-identical output, so the backend is pinned to Agg and every format's
timestamp-like metadata is stripped or fixed.  Statistics are drawn exactly
as found in the table; nothing is recomputed here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["PRESETS", "FigureSpec", "render", "resolve_preset"]

SCHEMA_SUMMARY = "sfbcid-summary-v1"
SCHEMA_HIST = "sfbcid-hist-v1"

# Fixed look shared by every figure; part of the determinism contract.
_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "sfbcid-plots",
}
_MARKERS = ["o", "s", "^", "D", "v", "P", "X", "*"]

_PR_LABEL = "probability of correct identification"


@dataclass(frozen=True)
class _Preset:
    schema: str
    x_col: str
    x_scale: str            # "linear" | "log" | "categorical"
    group_cols: tuple[str, ...]
    description: str


PRESETS: dict[str, _Preset] = {
    "nb": _Preset(SCHEMA_SUMMARY, "snr_db", "linear", ("n_b",),
                  "Pr vs SNR, one curve per block count"),
    "prf": _Preset(SCHEMA_SUMMARY, "pr_f", "log", (),
                   "Pr vs false-alarm rate, with the tree ceiling overlaid"),
    "nfft": _Preset(SCHEMA_SUMMARY, "snr_db", "linear", ("n_fft",),
                    "Pr vs SNR, one curve per FFT size"),
    "nr": _Preset(SCHEMA_SUMMARY, "snr_db", "linear", ("n_r",),
                  "Pr vs SNR, one curve per receive-antenna count"),
    "modulation": _Preset(SCHEMA_SUMMARY, "snr_db", "linear", ("modulation",),
                          "Pr vs SNR, one curve per constellation"),
    "sto": _Preset(SCHEMA_SUMMARY, "sto", "linear", ("n_fft", "snr_db"),
                   "Pr vs timing offset, one curve per FFT size"),
    "cfo": _Preset(SCHEMA_SUMMARY, "cfo", "categorical", ("n_b", "snr_db"),
                   "Pr vs carrier offset, one curve per (blocks, SNR)"),
    "doppler": _Preset(SCHEMA_SUMMARY, "doppler", "categorical", ("n_b", "snr_db"),
                       "Pr vs Doppler rate, one curve per (blocks, SNR)"),
    "histogram": _Preset(SCHEMA_HIST, "q", "linear", (),
                         "Rank-estimate counts for a single configuration"),
}

_ALIASES = {
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

_FORMATS = (".png", ".svg", ".pdf")


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: preset plus input table plus output file.

    ``group_by`` overrides the preset's default series grouping; axis
    limits are applied only when set.
    """

    preset: str
    csv_path: str | Path
    out_path: str | Path
    group_by: tuple[str, ...] | None = None
    x_min: float | None = None
    x_max: float | None = None
    y_min: float | None = None
    y_max: float | None = None


def resolve_preset(name: str) -> str:
    key = _ALIASES.get(name, name)
    if key not in PRESETS:
        raise ValueError(f"unknown preset {name!r}")
    return key


def _read_table(path: Path) -> tuple[str, list[dict[str, str]], list[str]]:
    """Return (schema token, data rows, column names) from a harness CSV."""
    with open(path, newline="") as f:
        first = f.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing schema line")
        schema = first[2:].strip()
        pos = f.tell()
        while True:
            line = f.readline()
            if not line.startswith("#"):
                f.seek(pos)
                break
            pos = f.tell()
        reader = csv.DictReader(f)
        columns = list(reader.fieldnames or [])
        rows = list(reader)
    return schema, rows, columns


def _require_columns(columns: Sequence[str], needed: Sequence[str], path: Path) -> None:
    missing = [c for c in needed if c not in columns]
    if missing:
        raise ValueError(f"{path}: missing columns {', '.join(missing)}")


def _sort_key(value: str):
    # numeric-aware ordering so "400" does not sort before "50"
    try:
        return (0, float(value), "")
    except ValueError:
        return (1, 0.0, value)


def _fmt_value(value: str) -> str:
    try:
        x = float(value)
    except ValueError:
        return value
    if x == int(x) and abs(x) < 1e6:
        return str(int(x))
    return f"{x:g}"


def _series_label(cols: Sequence[str], key: tuple[str, ...]) -> str:
    return ", ".join(f"{c}={_fmt_value(v)}" for c, v in zip(cols, key))


def _groups(rows: list[dict[str, str]],
            cols: tuple[str, ...]) -> Iterator[tuple[tuple[str, ...], list[dict[str, str]]]]:
    keys = sorted({tuple(r[c] for c in cols) for r in rows},
                  key=lambda k: tuple(_sort_key(v) for v in k))
    for key in keys:
        yield key, [r for r in rows if tuple(r[c] for c in cols) == key]


def _apply_limits(ax, spec: FigureSpec) -> None:
    if spec.x_min is not None or spec.x_max is not None:
        ax.set_xlim(left=spec.x_min, right=spec.x_max)
    if spec.y_min is not None or spec.y_max is not None:
        ax.set_ylim(bottom=spec.y_min, top=spec.y_max)


def _save(fig, out_path: Path) -> None:
    suffix = out_path.suffix.lower()
    if suffix not in _FORMATS:
        raise ValueError(
            f"unsupported output format {suffix!r}; use one of {', '.join(_FORMATS)}")
    # Strip or pin everything that would vary between runs.
    if suffix == ".png":
        metadata = {"Software": "sfbcid-plots"}
    elif suffix == ".svg":
        metadata = {"Date": None}
    else:
        metadata = {"CreationDate": None}
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata=metadata)


def _render_summary(spec: FigureSpec, preset: _Preset, rows, columns, path: Path):
    group_cols = preset.group_cols if spec.group_by is None else tuple(spec.group_by)
    needed = [preset.x_col, "pr", "ci_low", "ci_high", *group_cols]
    _require_columns(columns, needed, path)

    fig, ax = plt.subplots()
    categorical = preset.x_scale == "categorical"
    if categorical:
        levels = sorted({r[preset.x_col] for r in rows}, key=_sort_key)
        position = {v: i for i, v in enumerate(levels)}

    for i, (key, chunk) in enumerate(_groups(rows, group_cols)):
        chunk = sorted(chunk, key=lambda r: _sort_key(r[preset.x_col]))
        if categorical:
            xs = [position[r[preset.x_col]] for r in chunk]
        else:
            xs = [float(r[preset.x_col]) for r in chunk]
        ys = [float(r["pr"]) for r in chunk]
        lo = [y - float(r["ci_low"]) for y, r in zip(ys, chunk)]
        hi = [float(r["ci_high"]) - y for y, r in zip(ys, chunk)]
        label = _series_label(group_cols, key) if group_cols else "measured"
        ax.errorbar(xs, ys, yerr=[lo, hi], marker=_MARKERS[i % len(_MARKERS)],
                    markersize=4, capsize=2, linewidth=1.2, label=label)
        if "pr_u" in columns:
            bound = [(x, float(r["pr_u"])) for x, r in zip(xs, chunk) if r["pr_u"]]
            if bound:
                ax.plot([b[0] for b in bound], [b[1] for b in bound],
                        linestyle="--", linewidth=1.0, color="black",
                        label="ceiling" if i == 0 else None)

    if preset.x_scale == "log":
        ax.set_xscale("log")
    elif categorical:
        ax.set_xticks(range(len(levels)))
        ax.set_xticklabels([_fmt_value(v) for v in levels])
    ax.set_xlabel(preset.x_col)
    ax.set_ylabel(_PR_LABEL)
    ax.set_title(preset.description)
    ax.legend(loc="best", fontsize=8)
    return fig


def _render_histogram(spec: FigureSpec, preset: _Preset, rows, columns, path: Path):
    needed = ["scheme", "snr_db", "n_b", "n_fft", "n_r", "pr_f", "q_true", "q", "count"]
    _require_columns(columns, needed, path)
    config_cols = needed[:7]
    configs = {tuple(r[c] for c in config_cols) for r in rows}
    if len(configs) > 1:
        raise ValueError(f"{path}: histogram table mixes {len(configs)} configurations")
    (config,) = configs

    fig, ax = plt.subplots()
    rows = sorted(rows, key=lambda r: _sort_key(r["q"]))
    qs = [int(r["q"]) for r in rows]
    counts = [int(r["count"]) for r in rows]
    ax.bar(qs, counts, width=0.8, color="#4878cf", edgecolor="black", linewidth=0.5)
    q_true = int(rows[0]["q_true"])
    ax.axvline(q_true, color="black", linestyle="--", linewidth=1.2)
    ax.text(q_true, max(counts) * 1.01, " true rank", fontsize=8, va="bottom")
    ax.set_xticks(qs)
    ax.set_xlabel("estimated rank")
    ax.set_ylabel("count")
    scheme, snr_db = config[0], config[1]
    ax.set_title(f"{scheme} rank estimates at {_fmt_value(snr_db)} dB")
    return fig


def render(spec: FigureSpec) -> Path:
    """Draw the figure described by ``spec`` and return the output path.

    Raises ValueError before touching the output file when the CSV's schema
    token does not match the preset, a referenced column is missing, or the
    table has no data rows.
    """
    name = resolve_preset(spec.preset)
    preset = PRESETS[name]
    csv_path = Path(spec.csv_path)
    out_path = Path(spec.out_path)

    schema, rows, columns = _read_table(csv_path)
    if schema != preset.schema:
        raise ValueError(
            f"{csv_path}: schema mismatch: preset {name!r} needs "
            f"{preset.schema!r}, file declares {schema!r}")
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")

    with plt.rc_context(_STYLE):
        if preset.schema == SCHEMA_HIST:
            fig = _render_histogram(spec, preset, rows, columns, csv_path)
        else:
            fig = _render_summary(spec, preset, rows, columns, csv_path)
        try:
            _apply_limits(fig.axes[0], spec)
            fig.tight_layout()
            _save(fig, out_path)
        finally:
            plt.close(fig)
    return out_path
