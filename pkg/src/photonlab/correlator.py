"""Correlation analysis: coincidence histograms, g2 normalization, pulsed peaks.

Two histogram modes are provided.  `start_stop` emulates a time-to-amplitude
converter: for each start event on channel A the first stop on channel B that
is strictly later is recorded (and symmetrically with the roles swapped to
fill negative delays).  `all_pairs` records every A-B pair whose delay falls
inside the histogram range and converges to the true correlation function at
all rates.  Both use the same binning: an odd number of bins of width w
centered on zero delay, covering [-(m + 1/2) w, (m + 1/2) w) with
m = floor(range / w).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NormalizationError
from .events import PS_PER_S, EventStream
from .emitters import (
    CoherentSourceConfig,
    FockPulseConfig,
    PulsedEmitterConfig,
    ThermalSourceConfig,
    TwoLevelCwConfig,
)

HISTOGRAM_MODES = ("start_stop", "all_pairs")


@dataclass
class CoincidenceHistogram:
    bin_width_ps: int
    range_ps: int
    counts: np.ndarray
    n_starts: int
    n_stops: int
    duration_s: float
    mode: str

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)

    @property
    def n_bins(self) -> int:
        return self.counts.shape[0]

    @property
    def tau_ps(self) -> np.ndarray:
        """Bin centers; the middle bin is centered on zero delay."""
        m = self.n_bins // 2
        return (np.arange(self.n_bins) - m) * self.bin_width_ps

    def validate(self) -> "CoincidenceHistogram":
        if self.mode not in HISTOGRAM_MODES:
            raise ConfigError(f"unknown histogram mode {self.mode!r}")
        if self.bin_width_ps <= 0 or self.range_ps <= 0:
            raise ConfigError("bin_width_ps and range_ps must be > 0")
        if self.n_bins % 2 != 1:
            raise ConfigError("histogram must have an odd number of bins")
        return self


@dataclass
class G2Estimate:
    tau_ps: np.ndarray
    g2: np.ndarray
    stderr: np.ndarray
    accidentals_per_bin: float


def _n_bins(bin_width_ps: int, range_ps: int) -> int:
    if bin_width_ps <= 0:
        raise ConfigError("bin_width_ps must be > 0")
    if range_ps < bin_width_ps:
        raise ConfigError("range_ps must be >= bin_width_ps")
    return 2 * (range_ps // bin_width_ps) + 1


def _bin_delays(delays: np.ndarray, bin_width_ps: int, n_bins: int) -> np.ndarray:
    """Histogram signed delays; bin k covers [c - w/2, c + w/2) around its center."""
    m = n_bins // 2
    w = bin_width_ps
    # floor((delta + w/2) / w) + m, in integer arithmetic (floor div handles negatives)
    idx = (2 * delays + w) // (2 * w) + m
    idx = idx[(idx >= 0) & (idx < n_bins)]
    return np.bincount(idx.astype(np.intp), minlength=n_bins)


def start_stop_histogram(
    starts: EventStream,
    stops: EventStream,
    bin_width_ps: int,
    range_ps: int,
) -> CoincidenceHistogram:
    """TAC-style histogram: each start pairs with the first strictly later stop.

    The negative-delay side is filled by swapping the roles of the channels.
    At high rates the exponential depletion of waiting times makes this
    estimator diverge from the true correlation beyond the mean inter-event
    spacing; use all_pairs there.
    """
    n_bins = _n_bins(bin_width_ps, range_ps)
    counts = np.zeros(n_bins, dtype=np.int64)
    for a, b, sign in ((starts, stops, 1), (stops, starts, -1)):
        if len(a) == 0 or len(b) == 0:
            continue
        pos = np.searchsorted(b.times, a.times, side="right")
        ok = pos < len(b)
        delays = sign * (b.times[pos[ok]] - a.times[ok])
        counts += _bin_delays(delays, bin_width_ps, n_bins)
    duration_s = max(starts.duration_ps, stops.duration_ps) / PS_PER_S
    return CoincidenceHistogram(
        bin_width_ps=bin_width_ps,
        range_ps=range_ps,
        counts=counts,
        n_starts=len(starts),
        n_stops=len(stops),
        duration_s=duration_s,
        mode="start_stop",
    )


def all_pairs_histogram(
    starts: EventStream,
    stops: EventStream,
    bin_width_ps: int,
    range_ps: int,
    chunk: int = 200_000,
) -> CoincidenceHistogram:
    """Histogram of every inter-channel pair delay within the histogram range."""
    n_bins = _n_bins(bin_width_ps, range_ps)
    m = n_bins // 2
    w = bin_width_ps
    counts = np.zeros(n_bins, dtype=np.int64)
    a_times = starts.times
    b_times = stops.times
    same = starts is stops
    # b pairs with a iff 2*(b - a) in [-(2m+1)w, (2m+1)w); search doubled times
    # so the half-integer window edges stay exact in integer arithmetic
    b2 = b_times * 2
    span = (2 * m + 1) * w
    for i0 in range(0, a_times.size, chunk):
        a = a_times[i0 : i0 + chunk]
        lo = np.searchsorted(b2, 2 * a - span, side="left")
        hi = np.searchsorted(b2, 2 * a + span, side="left")
        n_each = hi - lo
        if not n_each.any():
            continue
        reps = np.repeat(np.arange(a.size), n_each)
        offs = np.arange(n_each.sum()) - np.repeat(
            np.cumsum(n_each) - n_each, n_each
        )
        delays = b_times[lo[reps] + offs] - a[reps]
        counts += _bin_delays(delays, bin_width_ps, n_bins)
    if same:
        counts[m] -= a_times.size  # remove self-pairs
    duration_s = max(starts.duration_ps, stops.duration_ps) / PS_PER_S
    return CoincidenceHistogram(
        bin_width_ps=bin_width_ps,
        range_ps=range_ps,
        counts=counts,
        n_starts=len(starts),
        n_stops=len(stops),
        duration_s=duration_s,
        mode="all_pairs",
    )


def normalize_g2(hist: CoincidenceHistogram) -> G2Estimate:
    """Normalize histogram counts by the uncorrelated coincidence level.

    The accidental level per bin is n_starts * n_stops * bin_width / duration;
    stderr is the Poisson error sqrt(N) scaled by the same factor.
    """
    if hist.duration_s <= 0:
        raise NormalizationError("cannot normalize: zero duration")
    denom = (
        hist.n_starts * hist.n_stops * (hist.bin_width_ps / PS_PER_S) / hist.duration_s
    )
    if denom <= 0:
        raise NormalizationError(
            "cannot normalize: no events on one or both channels"
        )
    g2 = hist.counts / denom
    stderr = np.sqrt(np.maximum(hist.counts, 1.0)) / denom
    return G2Estimate(
        tau_ps=hist.tau_ps.astype(np.float64),
        g2=g2,
        stderr=stderr,
        accidentals_per_bin=denom,
    )


def analytic_g2(config, tau_ps) -> np.ndarray:
    """Ideal-source g2(tau) reference values.

    Continuous sources give the pointwise correlation function.  Pulsed
    sources give the pulse-integrated peak-area ratios: tau is mapped to the
    nearest pulse index and the value is the expected area of that peak
    relative to the uncorrelated side-peak level.
    """
    tau_s = np.abs(np.asarray(tau_ps, dtype=np.float64)) / PS_PER_S
    if isinstance(config, CoherentSourceConfig):
        return np.ones_like(tau_s)
    if isinstance(config, ThermalSourceConfig):
        tau_c = config.coherence_time
        return 1.0 + np.exp(-2.0 * tau_s / tau_c)
    if isinstance(config, TwoLevelCwConfig):
        rate_sum = config.pump_rate + config.decay_rate
        return 1.0 - np.exp(-rate_sum * tau_s)
    if isinstance(config, FockPulseConfig):
        k = np.rint(np.asarray(tau_ps, np.float64) / config.rep_period_ps)
        return np.where(k == 0, 1.0 - 1.0 / config.n, 1.0)
    if isinstance(config, PulsedEmitterConfig):
        p = config.emission_prob
        q = config.reexcitation_prob
        if p <= 0:
            raise ConfigError("pulsed analytic g2 needs emission_prob > 0")
        # per pulse: one photon w.p. p, a second w.p. p*q; ordered same-pulse
        # pairs E[Y(Y-1)] = 2pq against cross-pulse level E[Y]^2 = p^2 (1+q)^2
        central = 2.0 * q / (p * (1.0 + q) ** 2)
        k = np.rint(np.asarray(tau_ps, np.float64) / config.rep_period_ps)
        return np.where(k == 0, central, 1.0)
    raise ConfigError(f"no analytic g2 for {type(config).__name__}")


@dataclass
class PulsedPeakAreas:
    peak_delays_ps: np.ndarray
    areas: np.ndarray
    central_area: int
    mean_side_area: float
    ratio: float
    ratio_stderr: float


def pulsed_peak_areas(
    hist: CoincidenceHistogram, rep_period_ps: int
) -> PulsedPeakAreas:
    """Integrate the coincidence histogram in windows around each pulse delay.

    Window k covers [k*T - T/2, k*T + T/2) on bin centers.  The ratio of the
    central window area to the mean side-window area estimates g2(0) for a
    pulsed source.  Requires the histogram range to span at least two rep
    periods on each side so there is at least one complete side window.
    """
    if rep_period_ps <= 0:
        raise ConfigError("rep_period_ps must be > 0")
    if hist.range_ps < 2 * rep_period_ps:
        raise ConfigError(
            "histogram range must cover at least 2 rep periods per side"
        )
    tau = hist.tau_ps
    # half-open windows [k*T - T/2, k*T + T/2): floor, not round-half-even
    k = np.floor(tau / rep_period_ps + 0.5).astype(np.int64)
    # only complete windows: window k is complete if its far edge is inside range
    k_max = int((tau[-1] + hist.bin_width_ps / 2 + rep_period_ps / 2) // rep_period_ps) - 1
    k_max = max(k_max, 0)
    ks = np.arange(-k_max, k_max + 1)
    areas = np.zeros(ks.size, dtype=np.int64)
    for j, kk in enumerate(ks):
        areas[j] = hist.counts[k == kk].sum()
    central = int(areas[ks == 0][0])
    side = areas[ks != 0]
    if side.size == 0:
        raise ConfigError("no complete side windows in histogram range")
    mean_side = float(side.mean())
    if mean_side <= 0:
        raise NormalizationError("side windows are empty; cannot form peak ratio")
    ratio = central / mean_side
    # Poisson on the central area plus error on the side mean
    var = central / mean_side**2 + (central**2 / mean_side**4) * (
        side.sum() / side.size**2
    )
    return PulsedPeakAreas(
        peak_delays_ps=ks * rep_period_ps,
        areas=areas,
        central_area=central,
        mean_side_area=mean_side,
        ratio=float(ratio),
        ratio_stderr=float(np.sqrt(var)),
    )


@dataclass
class BoundsReport:
    sub_poissonian_bins: int
    antibunched_bins: int
    n_bins: int
    g2_zero: float
    g2_zero_stderr: float
    single_photon: bool
    verdict: str


def classical_bounds_check(est: G2Estimate, n_sigma: float = 3.0) -> BoundsReport:
    """Test the estimate against the classical inequalities.

    Classical light obeys g2(tau) >= 1 and g2(0) >= g2(tau).  Bins violating
    the first bound beyond n_sigma are counted as sub-Poissonian; a zero-delay
    value below every other bin (beyond joint error) counts as antibunched.
    The single-photon verdict requires g2(0) + n_sigma * stderr < 0.5.
    """
    m = est.g2.shape[0] // 2
    # floor the error so empty bins are not treated as infinitely significant
    floor = 1.0 / est.accidentals_per_bin
    err = np.maximum(est.stderr, floor)
    sub = int(np.count_nonzero(est.g2 + n_sigma * err < 1.0))
    g0 = float(est.g2[m])
    e0 = float(err[m])
    others = np.delete(np.arange(est.g2.shape[0]), m)
    joint = np.sqrt(e0**2 + err[others] ** 2)
    anti = int(np.count_nonzero(g0 + n_sigma * joint < est.g2[others]))
    single = bool(g0 + n_sigma * e0 < 0.5)
    if single:
        verdict = "single_photon"
    elif sub > 0 or anti > 0:
        verdict = "nonclassical"
    else:
        verdict = "classical"
    return BoundsReport(
        sub_poissonian_bins=sub,
        antibunched_bins=anti,
        n_bins=int(est.g2.shape[0]),
        g2_zero=g0,
        g2_zero_stderr=e0,
        single_photon=single,
        verdict=verdict,
    )
