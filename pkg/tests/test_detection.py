import numpy as np
import pytest

import photonlab as pl
from photonlab.detection import FWHM_PER_SIGMA, FringeTrace
from photonlab.errors import ConfigError

import oracles


def grid_stream(n, spacing_ps, start_ps=0):
    times = start_ps + np.arange(n, dtype=np.int64) * spacing_ps
    return pl.stream_from_times(times, int(times[-1]) + spacing_ps)


# --- efficiency ---------------------------------------------------------------

def test_efficiency_thins_binomially():
    n = 100_000
    s = grid_stream(n, 10_000)
    out = pl.detect(s, pl.DetectorConfig(efficiency=0.3), seed=0)
    sigma = np.sqrt(n * 0.3 * 0.7)
    assert abs(len(out) - 0.3 * n) < 5 * sigma


def test_efficiency_one_is_identity():
    s = grid_stream(1000, 777)
    out = pl.detect(s, pl.DetectorConfig(), seed=0)
    np.testing.assert_array_equal(out.times, s.times)
    np.testing.assert_array_equal(out.tags, s.tags)


def test_efficiency_zero_drops_everything():
    s = grid_stream(1000, 777)
    out = pl.detect(s, pl.DetectorConfig(efficiency=0.0), seed=0)
    assert len(out) == 0
    assert out.duration_ps == s.duration_ps


# --- timing jitter ------------------------------------------------------------

def test_jitter_sigma_matches_fwhm():
    # events far apart so jitter cannot reorder them
    n = 200_000
    fwhm = 800.0
    s = grid_stream(n, 1_000_000, start_ps=1_000_000)
    out = pl.detect(s, pl.DetectorConfig(jitter_fwhm_ps=fwhm), seed=1)
    assert len(out) == n
    delta = out.times.astype(float) - s.times.astype(float)
    sigma = fwhm / FWHM_PER_SIGMA
    assert np.std(delta) == pytest.approx(sigma, rel=0.02)
    assert abs(np.mean(delta)) < 5 * sigma / np.sqrt(n)


def test_pair_delay_fwhm_is_sqrt2_times_single():
    # the same photons seen by two jittered detectors: delay spread grows by sqrt(2)
    n = 150_000
    fwhm = 800.0
    s = grid_stream(n, 1_000_000, start_ps=1_000_000)
    a = pl.detect(s, pl.DetectorConfig(jitter_fwhm_ps=fwhm), seed=10)
    b = pl.detect(s, pl.DetectorConfig(jitter_fwhm_ps=fwhm), seed=11)
    delta = a.times.astype(float) - b.times.astype(float)
    pair_sigma = np.sqrt(2.0) * fwhm / FWHM_PER_SIGMA
    assert np.std(delta) == pytest.approx(pair_sigma, rel=0.02)


def test_jitter_clamps_into_duration():
    duration = 1_000_000
    times = np.concatenate([np.zeros(500, np.int64),
                            np.full(500, duration, np.int64)])
    s = pl.EventStream(times, np.zeros(1000, np.uint8), duration)
    out = pl.detect(s, pl.DetectorConfig(jitter_fwhm_ps=1e6), seed=2)
    assert out.times.min() >= 0
    assert out.times.max() <= duration
    out.validate()


# --- dark counts ----------------------------------------------------------------

def test_dark_counts_rate_and_tag():
    duration = int(1e12)
    empty = pl.stream_from_times(np.zeros(0, np.int64), duration)
    out = pl.detect(empty, pl.DetectorConfig(dark_rate=100_000.0), seed=3)
    assert abs(len(out) - 100_000) < 5 * np.sqrt(100_000)
    assert np.all(out.tags == int(pl.Tag.DARK))
    assert out.times.min() >= 0 and out.times.max() < duration
    out.validate()


def test_dark_counts_merge_sorted_with_signal():
    s = grid_stream(10_000, 100_000)
    out = pl.detect(s, pl.DetectorConfig(dark_rate=50_000.0), seed=4)
    assert np.all(np.diff(out.times) >= 0)
    assert set(np.unique(out.tags)) <= {int(pl.Tag.SIGNAL), int(pl.Tag.DARK)}
    n_dark = int(np.sum(out.tags == int(pl.Tag.DARK)))
    assert n_dark > 0


# --- dead time ------------------------------------------------------------------

def test_dead_time_enforces_minimum_gap():
    rate = 2e6
    dead_ps = 100_000
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=rate), 1.0, seed=5)
    out = pl.detect(s, pl.DetectorConfig(dead_time_ps=dead_ps), seed=5)
    assert np.all(np.diff(out.times) >= dead_ps)
    expected = oracles.dead_time_throughput(rate, dead_ps * 1e-12)
    assert len(out) == pytest.approx(expected, rel=0.02)


def test_dead_time_keeps_first_of_burst():
    times = np.array([100, 150, 200, 10_000], dtype=np.int64)
    s = pl.stream_from_times(times, 20_000)
    out = pl.detect(s, pl.DetectorConfig(dead_time_ps=500), seed=0)
    np.testing.assert_array_equal(out.times, [100, 10_000])


# --- validation and determinism --------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    {"efficiency": -0.1},
    {"efficiency": 1.5},
    {"jitter_fwhm_ps": -1.0},
    {"dead_time_ps": -5},
    {"dark_rate": -2.0},
])
def test_detect_rejects_bad_config(kwargs):
    s = grid_stream(10, 1000)
    with pytest.raises(ConfigError):
        pl.detect(s, pl.DetectorConfig(**kwargs), seed=0)


def test_detect_deterministic_per_seed():
    s = grid_stream(5000, 20_000)
    cfg = pl.DetectorConfig(efficiency=0.5, jitter_fwhm_ps=300.0,
                            dead_time_ps=1000, dark_rate=10_000.0)
    a = pl.detect(s, cfg, seed=42)
    b = pl.detect(s, cfg, seed=42)
    c = pl.detect(s, cfg, seed=43)
    np.testing.assert_array_equal(a.times, b.times)
    np.testing.assert_array_equal(a.tags, b.tags)
    assert not np.array_equal(a.times, c.times)


# --- count-rate trace -------------------------------------------------------------

def test_count_rate_trace_bins_events_into_windows():
    window_ps = 1_000_000_000  # 1 ms
    duration = int(10.5 * window_ps)
    times = np.array([0, 1, window_ps - 1,          # window 0
                      window_ps,                     # window 1
                      5 * window_ps + 17,            # window 5
                      10 * window_ps,                # boundary -> last window
                      int(10.2 * window_ps)],        # partial tail, dropped
                     dtype=np.int64)
    s = pl.stream_from_times(times, duration)
    tr = pl.count_rate_trace(s, 0.001)
    assert tr.counts.shape == (10,)
    expected = np.zeros(10, dtype=np.int64)
    expected[0] = 3
    expected[1] = 1
    expected[5] = 1
    expected[9] = 1
    np.testing.assert_array_equal(tr.counts, expected)


def test_count_rate_trace_poisson_mean():
    rate = 1e6
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=rate), 2.0, seed=6)
    tr = pl.count_rate_trace(s, 0.010)
    assert tr.counts.shape == (200,)
    assert tr.counts.mean() == pytest.approx(rate * 0.010, rel=0.02)


def test_count_rate_trace_short_stream_has_no_windows():
    s = pl.stream_from_times(np.array([10, 20], dtype=np.int64), 1000)
    tr = pl.count_rate_trace(s, 1.0)
    assert tr.counts.shape == (0,)


def test_count_rate_trace_rejects_bad_window():
    s = grid_stream(10, 1000)
    with pytest.raises(ConfigError):
        pl.count_rate_trace(s, 0.0)


def test_fringe_trace_properties():
    tr = FringeTrace(0.01, np.array([3, 1, 4]))
    np.testing.assert_allclose(tr.window_starts_s, [0.0, 0.01, 0.02])
    assert tr.samples == [(0.0, 3), (0.01, 1), (0.02, 4)]
    assert tr.counts.dtype == np.int64
