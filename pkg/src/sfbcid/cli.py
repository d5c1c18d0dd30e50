"""Command-line front end: simulations, capture identification, tables."""

from __future__ import annotations

import argparse
import sys

from .classifier import DetectorConfig, flops
from .harness import (
    ExperimentConfig,
    PRESETS,
    _PRESET_ALIASES,
    identify_capture,
    parse_config_file,
    resolve_preset,
    run_to_csv,
    sweep_figures,
)
from .rmt import corrected_cdf, corrected_quantile, threshold_table, tw1_cdf, tw1_quantile

_CONFIG_FLAGS = {
    # flag dest -> ExperimentConfig field
    "pool": "pool",
    "snr": "snr_grid",
    "trials": "trials",
    "nb": "n_b",
    "nfft": "n_fft",
    "nr": "n_r",
    "cp": "cp_len",
    "prf": "pr_f",
    "modulation": "modulation",
    "sto": "sto",
    "cfo": "cfo",
    "doppler": "doppler",
    "seed": "seed",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfbcid",
        description="Blind space-frequency block code identification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate",
        help="run a Monte Carlo sweep or a figure preset and write CSV tables",
    )
    sim.add_argument("--preset", help="figure preset name (see 'sfbcid presets')")
    sim.add_argument("--config", help="plain-text key = value experiment file")
    sim.add_argument("--out", default="results", help="output directory")
    sim.add_argument("--stem", default="sweep", help="output file stem")
    sim.add_argument("--workers", type=int, help="process count (default 1)")
    sim.add_argument("--bound", action="store_true",
                     help="add measured Pr_o and the tree ceiling to summaries")
    sim.add_argument("--pool", help="comma-separated scheme names")
    sim.add_argument("--snr", help="comma-separated SNR grid in dB")
    sim.add_argument("--trials", type=int, help="trials per scheme per SNR point")
    sim.add_argument("--nb", type=int, help="received OFDM symbols per trial")
    sim.add_argument("--nfft", type=int, help="FFT size")
    sim.add_argument("--nr", type=int, help="receive antennas")
    sim.add_argument("--cp", type=int, help="cyclic prefix length")
    sim.add_argument("--prf", type=float, help="per-test false alarm level")
    sim.add_argument("--modulation", help="e.g. 4-PSK or 16-QAM")
    sim.add_argument("--sto", type=int, help="FFT window offset in samples")
    sim.add_argument("--cfo", type=float,
                     help="carrier offset, fraction of subcarrier spacing")
    sim.add_argument("--doppler", type=float,
                     help="max Doppler normalized to the sampling rate")
    sim.add_argument("--seed", type=int, help="master seed")

    ident = sub.add_parser("identify", help="identify the code in an IQ capture")
    ident.add_argument("capture", help="capture file path")
    ident.add_argument("--prf", type=float, default=1e-4,
                       help="per-test false alarm level")

    thr = sub.add_parser("thresholds", help="print the gamma_q decision table")
    thr.add_argument("--nr", type=int, required=True, help="receive antennas")
    thr.add_argument("--nb", type=int, required=True, help="received symbols")
    thr.add_argument("--prf", type=float, default=1e-4,
                     help="per-test false alarm level")

    tw = sub.add_parser("tw", help="evaluate the largest-eigenvalue law")
    grp = tw.add_mutually_exclusive_group(required=True)
    grp.add_argument("--cdf", type=float, metavar="X",
                     help="cumulative probability at X")
    grp.add_argument("--quantile", type=float, metavar="P",
                     help="argument whose cumulative probability is P")
    tw.add_argument("--u", type=int, help="matrix dimension for the scaled law")
    tw.add_argument("--p", type=int, help="sample count for the scaled law")

    fl = sub.add_parser("flops", help="per-identification flop counts")
    fl.add_argument("--algorithm", default="all",
                    choices=["proposed", "ref19", "ref20", "all"])
    fl.add_argument("--nfft", type=int, required=True)
    fl.add_argument("--nr", type=int, required=True)
    fl.add_argument("--nb", type=int, required=True)
    fl.add_argument("--cp", type=int, default=10, help="cyclic prefix length")
    fl.add_argument("--xi", type=int, help="candidate set size (ref19)")
    fl.add_argument("--upsilon", type=int, default=7,
                    help="pool size per candidate (ref19)")

    sub.add_parser("presets", help="list figure presets")
    return parser


def _cmd_simulate(args) -> int:
    overrides = {}
    for flag, field_name in _CONFIG_FLAGS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        if flag == "pool":
            value = tuple(s.strip() for s in value.split(",") if s.strip())
        elif flag == "snr":
            value = tuple(float(s) for s in value.split(",") if s.strip())
        overrides[field_name] = value

    if args.preset and args.config:
        raise ValueError("--preset and --config are mutually exclusive")

    if args.preset:
        resolved = resolve_preset(args.preset)
        if resolved == "histogram":
            hist = {}
            if args.seed is not None:
                hist["seed"] = args.seed
            if args.trials is not None:
                hist["estimates"] = args.trials
            paths = sweep_figures(resolved, args.out, overrides=hist)
        else:
            paths = sweep_figures(resolved, args.out, overrides=overrides,
                                  workers=args.workers)
        for kind, path in paths.items():
            print(f"{kind}: {path}")
        return 0

    values = parse_config_file(args.config) if args.config else {}
    values.update(overrides)
    cfg = ExperimentConfig(**values)
    paths = run_to_csv(cfg, args.out, args.stem, workers=args.workers,
                       with_bound=args.bound)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def _cmd_identify(args) -> int:
    result = identify_capture(args.capture, pr_f=args.prf)
    print(f"scheme: {result.scheme.name}")
    l1 = result.level1
    dists = ", ".join(f"{k}={v}" for k, v in l1.distances.items())
    print(f"level 1: {l1.chosen} over {l1.tested_pairs} pairs ({dists})")
    if result.level2 is None:
        print("level 2: not needed")
    else:
        l2 = result.level2
        dists = ", ".join(f"{k}={v}" for k, v in l2.distances.items())
        print(f"level 2: {l2.chosen} over {l2.tested_pairs} pairs ({dists})")
    return 0


def _cmd_thresholds(args) -> int:
    # reuse the detector validation for nr/nb/prf; the FFT size is moot here
    DetectorConfig(pr_f=args.prf, n_r=args.nr, n_b=args.nb, n_fft=16)
    gammas = threshold_table(args.nr, args.nb, args.prf)
    for q, gamma in enumerate(gammas, start=1):
        print(f"{q}\t{float(gamma)!r}")
    return 0


def _cmd_tw(args) -> int:
    if (args.u is None) != (args.p is None):
        raise ValueError("--u and --p must be given together")
    scaled = args.u is not None
    if args.cdf is not None:
        value = (
            corrected_cdf(args.cdf, args.u, args.p) if scaled
            else tw1_cdf(args.cdf)
        )
    else:
        value = (
            corrected_quantile(args.quantile, args.u, args.p) if scaled
            else tw1_quantile(args.quantile)
        )
    print(repr(float(value)))
    return 0


def _cmd_flops(args) -> int:
    names = ["proposed", "ref19", "ref20"] if args.algorithm == "all" else [args.algorithm]
    for name in names:
        kwargs = {"cp_len": args.cp}
        if name == "ref19":
            kwargs.update(card_xi=args.xi, card_upsilon=args.upsilon)
        count = flops(name, args.nfft, args.nr, args.nb, **kwargs)
        print(f"{name}\t{count}")
    return 0


def _cmd_presets(args) -> int:
    aliases: dict[str, list[str]] = {}
    for alias, name in _PRESET_ALIASES.items():
        aliases.setdefault(name, []).append(alias)
    for name, desc in PRESETS.items():
        extra = f" (alias {', '.join(sorted(aliases[name]))})" if name in aliases else ""
        print(f"{name}{extra}: {desc}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "identify": _cmd_identify,
    "thresholds": _cmd_thresholds,
    "tw": _cmd_tw,
    "flops": _cmd_flops,
    "presets": _cmd_presets,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
