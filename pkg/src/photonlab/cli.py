"""Command-line interface.

Subcommands: simulate (run a config, write the result bundle), correlate
(histogram + g2 from two timestamp files), visibility (delay sweep),
oracle (print analytic reference values), validate-config.

Exit codes: 0 success, 2 input/config error, 3 domain invariant violation.
Seed precedence: --seed flag, then the config's seed field, then the
PHOTONLAB_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantError
from .events import PS_PER_S, read_timestamps
from .emitters import (
    CoherentSourceConfig,
    FockPulseConfig,
    PulsedEmitterConfig,
    ThermalSourceConfig,
    TwoLevelCwConfig,
)
from .optics import SpectralLine, visibility_from_spectrum
from .correlator import (
    HISTOGRAM_MODES,
    all_pairs_histogram,
    analytic_g2,
    normalize_g2,
    start_stop_histogram,
)
from .experiment import run_combined, sweep_visibility
from . import config as cfgmod


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _resolve_seed(flag_seed, raw_cfg: dict) -> int:
    if flag_seed is not None:
        return flag_seed
    if "seed" in raw_cfg:
        return int(raw_cfg["seed"])
    env = os.environ.get("PHOTONLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"PHOTONLAB_SEED must be an integer, got {env!r}")
    return 0


def _cmd_simulate(args) -> int:
    from . import reports

    raw = cfgmod.load_raw_config(args.config)
    raw["seed"] = _resolve_seed(args.seed, raw)
    cfg = cfgmod.parse_config(raw, source_name=str(args.config))
    result = run_combined(cfg)
    written = reports.write_bundle(result, cfg, args.outdir)
    for path in written:
        print(path)
    return 0


def _cmd_correlate(args) -> int:
    from . import reports

    stream_a = read_timestamps(args.file_a)
    if Path(args.file_b).resolve() == Path(args.file_a).resolve():
        stream_b = stream_a  # autocorrelation: self-pairs are excluded
    else:
        stream_b = read_timestamps(args.file_b)

    if args.duration is not None:
        duration_ps = int(round(args.duration * PS_PER_S))
        last = max(
            (int(s.times[-1]) for s in (stream_a, stream_b) if len(s)), default=0
        )
        if duration_ps < last:
            raise ConfigError(
                f"--duration {args.duration} s is shorter than the last timestamp"
            )
        stream_a.duration_ps = duration_ps
        stream_b.duration_ps = duration_ps

    build = all_pairs_histogram if args.mode == "all_pairs" else start_stop_histogram
    hist = build(stream_a, stream_b, args.bin_width, args.range)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    params = {
        "command": "correlate",
        "file_a": Path(args.file_a).name,
        "file_b": Path(args.file_b).name,
        "bin_width_ps": args.bin_width,
        "range_ps": args.range,
        "mode": args.mode,
        "duration_s": args.duration,
    }
    h = cfgmod.config_hash(params)
    reports.write_csv(
        outdir / "histogram.csv", {"tau_ps": hist.tau_ps, "counts": hist.counts}, h
    )
    reports.plot_histogram(hist, outdir / "histogram.svg", h)
    if len(stream_a) == 0 or len(stream_b) == 0 or hist.duration_s <= 0:
        print(
            "warning: a channel is empty; histogram written, g2 skipped",
            file=sys.stderr,
        )
        return 0
    est = normalize_g2(hist)
    reports.write_csv(
        outdir / "g2.csv",
        {"tau_ps": est.tau_ps, "g2": est.g2, "stderr": est.stderr},
        h,
    )
    reports.plot_g2(est, outdir / "g2.svg", h)
    return 0


def _cmd_visibility(args) -> int:
    from . import reports

    raw = cfgmod.load_raw_config(args.config)
    raw["seed"] = _resolve_seed(args.seed, raw)
    cfg = cfgmod.parse_config(raw, source_name=str(args.config))
    points = sweep_visibility(cfg, args.delays)

    from scipy.constants import c

    delays = np.asarray([p.delay_m for p in points])
    reference = visibility_from_spectrum(cfg.line, delays / c)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    h = cfgmod.config_hash(
        {"config": cfgmod.config_to_json(cfg), "delays": list(map(float, args.delays))}
    )
    reports.write_csv(
        outdir / "visibility.csv",
        {
            "delay_m": delays,
            "visibility": [p.visibility for p in points],
            "error": [p.error for p in points],
            "spectrum_transform": reference,
        },
        h,
    )
    if len(points) > 1:
        grid = np.linspace(delays.min(), delays.max(), 200)
        ref_curve = (grid, visibility_from_spectrum(cfg.line, grid / c))
    else:
        ref_curve = None
    reports.plot_visibility(points, outdir / "visibility.svg", h, reference=ref_curve)
    return 0


def _build_oracle_model(args):
    if args.model == "coherent":
        return CoherentSourceConfig(rate=1.0)
    if args.model == "thermal":
        if args.coherence_time is None:
            raise ConfigError("thermal oracle needs --coherence-time")
        return ThermalSourceConfig(rate=1.0, coherence_time=args.coherence_time)
    if args.model == "two_level_cw":
        if args.pump_rate is None or args.decay_rate is None:
            raise ConfigError("two_level_cw oracle needs --pump-rate and --decay-rate")
        return TwoLevelCwConfig(pump_rate=args.pump_rate, decay_rate=args.decay_rate)
    if args.model == "pulsed":
        return PulsedEmitterConfig(
            rep_period_ps=args.rep_period_ps,
            emission_prob=args.emission_prob,
            reexcitation_prob=args.reexcitation_prob,
        )
    if args.model == "fock":
        if args.n is None:
            raise ConfigError("fock oracle needs --n")
        return FockPulseConfig(n=args.n, rep_period_ps=args.rep_period_ps)
    # line shapes
    if args.model != "delta" and args.linewidth is None:
        raise ConfigError(f"{args.model} oracle needs --linewidth")
    return SpectralLine(
        center_wavelength_nm=args.center_wavelength_nm,
        shape=args.model,
        linewidth=args.linewidth if args.model != "delta" else 0.0,
    )


def _cmd_oracle(args) -> int:
    model = _build_oracle_model(args)
    taus = np.asarray(args.tau, dtype=np.float64)
    if isinstance(model, SpectralLine):
        model.validate()
        values = visibility_from_spectrum(model, taus)
        column = "visibility"
    else:
        model.validate()
        values = analytic_g2(model, taus * PS_PER_S)
        column = "g2"
    print(f"tau_s,{column}")
    for t, v in zip(taus, np.atleast_1d(values)):
        print(f"{float(t)!r},{float(v)!r}")
    return 0


def _cmd_validate_config(args) -> int:
    cfg = cfgmod.load_config(args.config)
    print(f"config valid: sha256 {cfgmod.config_hash(cfg)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonlab",
        description="Photon-stream simulator and correlation/interference analyzer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate",
        help="run a combined experiment from a JSON config",
        epilog=(
            "writes config.json, histogram.csv/svg (tau_ps,counts), g2.csv/svg "
            "(tau_ps,g2,stderr), fringe.csv/svg (time_s,counts), summary.json; "
            "every file embeds the config hash"
        ),
    )
    p.add_argument("config")
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "correlate",
        help="histogram + g2 from two timestamp files (binary or CSV)",
        epilog=(
            "accepts the binary timestamp format or CSV (one integer picosecond "
            "per line); writes histogram.csv (tau_ps,counts) and g2.csv "
            "(tau_ps,g2,stderr) with SVG plots"
        ),
    )
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument("--bin-width", type=int, default=37, help="bin width, ps")
    p.add_argument("--range", type=int, default=66_000, help="histogram range, ps")
    p.add_argument("--mode", choices=HISTOGRAM_MODES, default="start_stop")
    p.add_argument(
        "--duration",
        type=float,
        default=None,
        help="acquisition duration in s (default: last timestamp)",
    )
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser(
        "visibility",
        help="sweep interferometer delay, fit fringe visibility at each point",
        epilog="writes visibility.csv (delay_m,visibility,error,spectrum_transform) and visibility.svg",
    )
    p.add_argument("config")
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument(
        "--delays",
        type=_float_list,
        required=True,
        help="comma-separated path differences in meters",
    )
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_visibility)

    p = sub.add_parser(
        "oracle",
        help="print analytic g2 / visibility reference values as CSV",
        epilog="g2 models: coherent, thermal, two_level_cw, pulsed, fock; visibility models: lorentzian, gaussian, delta",
    )
    p.add_argument(
        "--model",
        required=True,
        choices=[
            "coherent",
            "thermal",
            "two_level_cw",
            "pulsed",
            "fock",
            "lorentzian",
            "gaussian",
            "delta",
        ],
    )
    p.add_argument(
        "--tau", type=_float_list, required=True, help="comma-separated delays in s"
    )
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--coherence-time", type=float, default=None)
    p.add_argument("--pump-rate", type=float, default=None)
    p.add_argument("--decay-rate", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--rep-period-ps", type=int, default=13_200)
    p.add_argument("--emission-prob", type=float, default=1.0)
    p.add_argument("--reexcitation-prob", type=float, default=0.0)
    p.add_argument("--linewidth", type=float, default=None)
    p.add_argument("--center-wavelength-nm", type=float, default=700.0)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("validate-config", help="check a config against the schema")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
