"""Combined run orchestration: one photon stream feeds both measurements.

A single emitted stream is background-merged, bandpass-filtered, thinned by
the scanned Michelson, split on the HBT beam splitter and detected on two
channels.  The coincidence histogram uses both channels; the fringe trace
counts channel A alone.  All randomness derives from one master seed through
a fixed spawn map, so every run is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from .errors import ConfigError, InsufficientDataError
from .events import EventStream
from .emitters import SourceConfig, add_background, generate
from .optics import (
    ScanWaveform,
    SpectralLine,
    bandpass_filter,
    beamsplitter_route,
    michelson_transmit,
)
from .detection import DetectorConfig, FringeTrace, count_rate_trace, detect
from .correlator import (
    HISTOGRAM_MODES,
    CoincidenceHistogram,
    G2Estimate,
    all_pairs_histogram,
    normalize_g2,
    start_stop_histogram,
)

# spawn-key positions off the master seed; fixed so that disabling a stage
# never shifts the randomness of the others
_STAGES = (
    "emitter",
    "background",
    "bandpass",
    "michelson",
    "splitter",
    "detector_a",
    "detector_b",
)


def stage_seeds(master_seed: int) -> dict:
    children = np.random.SeedSequence(master_seed).spawn(len(_STAGES))
    return dict(zip(_STAGES, children))


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig
    line: SpectralLine = field(default_factory=SpectralLine)
    scan: ScanWaveform = field(default_factory=ScanWaveform)
    detector_a: DetectorConfig = field(default_factory=DetectorConfig)
    detector_b: DetectorConfig = field(default_factory=DetectorConfig)
    splitter_reflectance: float = 0.5
    background_rate: float = 0.0
    bandpass_signal: float = 1.0
    bandpass_background: float = 1.0
    bin_width_ps: int = 37
    range_ps: int = 66_000
    histogram_mode: str = "start_stop"
    fringe_window_s: float = 0.010
    duration_s: float = 60.0
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        self.source.validate()
        self.line.validate()
        self.scan.validate()
        self.detector_a.validate()
        self.detector_b.validate()
        if not 0.0 <= self.splitter_reflectance <= 1.0:
            raise ConfigError("splitter_reflectance must be in [0,1]")
        if self.background_rate < 0:
            raise ConfigError("background_rate must be >= 0")
        for name in ("bandpass_signal", "bandpass_background"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be in [0,1]")
        if self.bin_width_ps <= 0:
            raise ConfigError("bin_width_ps must be > 0")
        if self.range_ps < self.bin_width_ps:
            raise ConfigError("range_ps must be >= bin_width_ps")
        if self.histogram_mode not in HISTOGRAM_MODES:
            raise ConfigError(f"histogram_mode must be one of {HISTOGRAM_MODES}")
        if self.fringe_window_s <= 0:
            raise ConfigError("fringe_window_s must be > 0")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be > 0")
        return self


@dataclass
class RunResult:
    histogram: CoincidenceHistogram
    g2: G2Estimate
    fringe: FringeTrace
    visibility: float | None
    visibility_err: float | None
    channel_a: EventStream
    channel_b: EventStream
    provenance: dict


def run_combined(cfg: ExperimentConfig) -> RunResult:
    cfg.validate()
    seeds = stage_seeds(cfg.seed)

    stream = generate(cfg.source, cfg.duration_s, seeds["emitter"])
    if cfg.background_rate > 0:
        stream = add_background(stream, cfg.background_rate, seeds["background"])
    if cfg.bandpass_signal < 1.0 or cfg.bandpass_background < 1.0:
        stream = bandpass_filter(
            stream, cfg.bandpass_signal, cfg.bandpass_background, seeds["bandpass"]
        )
    stream = michelson_transmit(stream, cfg.line, cfg.scan, seeds["michelson"])
    side_a, side_b = beamsplitter_route(
        stream, cfg.splitter_reflectance, seeds["splitter"]
    )
    chan_a = detect(side_a, cfg.detector_a, seeds["detector_a"])
    chan_b = detect(side_b, cfg.detector_b, seeds["detector_b"])

    if cfg.histogram_mode == "all_pairs":
        hist = all_pairs_histogram(chan_a, chan_b, cfg.bin_width_ps, cfg.range_ps)
    else:
        hist = start_stop_histogram(chan_a, chan_b, cfg.bin_width_ps, cfg.range_ps)
    g2 = normalize_g2(hist)

    fringe = count_rate_trace(chan_a, cfg.fringe_window_s)
    try:
        vis, vis_err = extract_visibility(fringe, cfg.scan, cfg.line)
    except InsufficientDataError:
        vis, vis_err = None, None

    provenance = {"config": config_as_dict(cfg), "seed": cfg.seed}
    return RunResult(
        histogram=hist,
        g2=g2,
        fringe=fringe,
        visibility=vis,
        visibility_err=vis_err,
        channel_a=chan_a,
        channel_b=chan_b,
        provenance=provenance,
    )


def config_as_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["source"] = {"model": type(cfg.source).__name__, **asdict(cfg.source)}
    return d


_MIN_FRINGES = 3
_MIN_SAMPLES_PER_FRINGE = 8
_MIN_SPAN_CYCLES = 0.75
_BOOTSTRAP_ROUNDS = 200


def extract_visibility(
    trace: FringeTrace, scan: ScanWaveform, line: SpectralLine
) -> tuple[float, float]:
    """Fringe-contrast estimate from a count-rate trace.

    Each sample window is mapped to its fringe coordinate u = path_diff / λ;
    runs of samples within one integer fringe are fit with a + b·cos(2πu)
    + c·sin(2πu), whose extrema give the (Imax−Imin)/(Imax+Imin) contrast
    directly as sqrt(b²+c²)/a.  The estimate is the mean over fringes, with
    a bootstrap-over-fringes standard error.
    """
    line.validate()
    scan.validate()
    if trace.counts.shape[0] < _MIN_FRINGES * _MIN_SAMPLES_PER_FRINGE:
        raise InsufficientDataError("trace too short to cover 3 fringes")
    centers_s = trace.window_starts_s + 0.5 * trace.window_s
    wavelength_m = line.center_wavelength_nm * 1e-9
    u = scan.path_difference(centers_s) / wavelength_m
    fringe_idx = np.floor(u).astype(np.int64)

    # split into time-contiguous runs of constant integer fringe; a fringe
    # revisited after a scan turnaround forms its own run
    boundaries = np.flatnonzero(np.diff(fringe_idx)) + 1
    contrasts = []
    for seg in np.split(np.arange(u.size), boundaries):
        if seg.size < _MIN_SAMPLES_PER_FRINGE:
            continue
        uu = u[seg]
        if uu.max() - uu.min() < _MIN_SPAN_CYCLES:
            continue
        y = trace.counts[seg].astype(np.float64)
        design = np.column_stack(
            [np.ones(seg.size), np.cos(2 * np.pi * uu), np.sin(2 * np.pi * uu)]
        )
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        a, b, c = coef
        if a <= 0:
            continue
        contrasts.append(min(math.hypot(b, c) / a, 1.0))

    if len(contrasts) < _MIN_FRINGES:
        raise InsufficientDataError(
            f"only {len(contrasts)} usable fringes; need {_MIN_FRINGES}"
        )
    contrasts = np.asarray(contrasts)
    v = float(contrasts.mean())
    rng = np.random.default_rng(0)
    resampled = rng.choice(
        contrasts, size=(_BOOTSTRAP_ROUNDS, contrasts.size), replace=True
    )
    err = float(resampled.mean(axis=1).std())
    return v, err


@dataclass
class VisibilityPoint:
    delay_m: float
    visibility: float
    error: float


def sweep_visibility(cfg: ExperimentConfig, delays_m) -> list[VisibilityPoint]:
    """Visibility-vs-delay curve: one combined run per interferometer offset."""
    cfg.validate()
    if cfg.scan.kind != "triangular":
        raise ConfigError("sweep_visibility needs a triangular scan waveform")
    points = []
    for i, delay in enumerate(delays_m):
        if delay < 0:
            raise ConfigError("delays must be >= 0")
        scan = replace(cfg.scan, offset_m=float(delay))
        seed_i = int(np.random.SeedSequence([cfg.seed, i]).generate_state(1)[0])
        result = run_combined(replace(cfg, scan=scan, seed=seed_i))
        if result.visibility is None:
            raise InsufficientDataError(
                f"no usable fringes at delay {delay!r} m"
            )
        points.append(VisibilityPoint(float(delay), result.visibility, result.visibility_err))
    return points
