"""Detector model: efficiency, Gaussian timing jitter, dark counts, dead time.

The stages run in a fixed order: thin by efficiency, jitter the surviving
timestamps, merge Poisson dark counts, re-sort, then apply a non-paralyzable
dead time (a click is dropped if it falls within `dead_time_ps` after the
last accepted click).  Jittered timestamps are clamped into [0, duration].

Note on jitter budgets: `jitter_fwhm_ps` is the response of ONE detector.
When two detectors feed a coincidence histogram, their delay response is the
convolution, i.e. FWHM_pair = sqrt(2) * FWHM_single; configure each channel
with system_fwhm / sqrt(2) to realize a given system resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError
from .events import PS_PER_S, EventStream, Tag
from .emitters import _rng

# FWHM = 2*sqrt(2*ln 2) * sigma for a Gaussian response
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class DetectorConfig:
    efficiency: float = 1.0
    jitter_fwhm_ps: float = 0.0
    dead_time_ps: int = 0
    dark_rate: float = 0.0

    def validate(self) -> "DetectorConfig":
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError("efficiency must be in [0,1]")
        if self.jitter_fwhm_ps < 0:
            raise ConfigError("jitter_fwhm_ps must be >= 0")
        if self.dead_time_ps < 0:
            raise ConfigError("dead_time_ps must be >= 0")
        if self.dark_rate < 0:
            raise ConfigError("dark_rate must be >= 0")
        return self


@dataclass
class FringeTrace:
    """Counts per contiguous window; window_start_s = index * window_s."""

    window_s: float
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)

    @property
    def window_starts_s(self) -> np.ndarray:
        return np.arange(self.counts.shape[0], dtype=np.float64) * self.window_s

    @property
    def samples(self) -> list[tuple[float, int]]:
        return list(zip(self.window_starts_s.tolist(), self.counts.tolist()))


@njit(cache=True)
def _dead_time_mask(times, dead_ps):
    keep = np.zeros(times.shape[0], np.bool_)
    last = np.int64(-(1 << 62))
    for i in range(times.shape[0]):
        if times[i] - last >= dead_ps:
            keep[i] = True
            last = times[i]
    return keep


def detect(stream: EventStream, cfg: DetectorConfig, seed) -> EventStream:
    """Apply the detector chain to an incident photon stream."""
    cfg.validate()
    rng = _rng(seed)
    duration_ps = stream.duration_ps

    keep = rng.random(len(stream)) < cfg.efficiency
    times = stream.times[keep]
    tags = stream.tags[keep]

    if cfg.jitter_fwhm_ps > 0 and times.size:
        sigma = cfg.jitter_fwhm_ps / FWHM_PER_SIGMA
        jittered = times.astype(np.float64) + rng.normal(0.0, sigma, times.size)
        times = np.rint(np.clip(jittered, 0.0, duration_ps)).astype(np.int64)

    if cfg.dark_rate > 0 and duration_ps > 0:
        n_dark = rng.poisson(cfg.dark_rate * duration_ps / PS_PER_S)
        dark_times = rng.integers(0, duration_ps, size=n_dark, dtype=np.int64)
        times = np.concatenate([times, dark_times])
        tags = np.concatenate([tags, np.full(n_dark, int(Tag.DARK), np.uint8)])

    order = np.argsort(times, kind="stable")
    times = times[order]
    tags = tags[order]

    if cfg.dead_time_ps > 0 and times.size:
        alive = _dead_time_mask(times, np.int64(cfg.dead_time_ps))
        times = times[alive]
        tags = tags[alive]

    return EventStream(times, tags, duration_ps)


def count_rate_trace(stream: EventStream, window_s: float) -> FringeTrace:
    """Counts per disjoint contiguous window of width window_s over the stream."""
    if window_s <= 0:
        raise ConfigError("window_s must be > 0")
    window_ps = int(round(window_s * PS_PER_S))
    n_win = stream.duration_ps // window_ps
    if n_win == 0:
        return FringeTrace(window_s, np.zeros(0, dtype=np.int64))
    end = n_win * window_ps
    # events past the last full window (trailing partial window) are dropped;
    # an event exactly at the boundary belongs to the last window
    kept = stream.times[stream.times <= end]
    idx = np.minimum(kept // window_ps, n_win - 1)
    counts = np.bincount(idx, minlength=n_win)
    return FringeTrace(window_s, counts.astype(np.int64))
