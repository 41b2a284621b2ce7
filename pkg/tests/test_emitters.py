import numpy as np
import pytest
from scipy import stats

import photonlab as pl
from photonlab.errors import ConfigError

import oracles


def autocorr_g2(stream, bin_width_ps, range_ps):
    h = pl.all_pairs_histogram(stream, stream, bin_width_ps, range_ps)
    return pl.normalize_g2(h)


def bin_averaged_curve(func, tau_ps, bin_width_ps, n_sub=64):
    """Average func(tau_s) over each bin, for comparing against binned data."""
    tau_ps = np.asarray(tau_ps, dtype=float)
    offs = (np.arange(n_sub) + 0.5) / n_sub - 0.5
    grid = tau_ps[:, None] + offs[None, :] * bin_width_ps
    return func(grid * 1e-12).mean(axis=1)


# --- coherent ----------------------------------------------------------------

def test_coherent_count_within_5_sigma():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=50_000), 1.0, seed=0)
    assert abs(len(s) - 50_000) < 5 * np.sqrt(50_000)
    s.validate()


def test_coherent_zero_duration_empty():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=1e6), 0.0, seed=0)
    assert len(s) == 0


def test_coherent_gaps_pass_exponential_ks():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=1e6), 10.0, seed=1)
    gaps = np.diff(s.times).astype(float)
    mean_gap_ps = 1e12 / 1e6
    res = stats.kstest(gaps, "expon", args=(0, mean_gap_ps))
    assert res.pvalue > 0.01


def test_coherent_window_fano_near_one():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=1e6), 10.0, seed=2)
    trace = pl.count_rate_trace(s, 1e-3)
    counts = trace.counts.astype(float)
    assert len(counts) == 10_000
    fano = counts.var() / counts.mean()
    assert 0.9 < fano < 1.1


def test_coherent_rejects_bad_rate():
    with pytest.raises(ConfigError):
        pl.gen_coherent(pl.CoherentSourceConfig(rate=0.0), 1.0, seed=0)


# --- thermal -----------------------------------------------------------------

def test_thermal_g2_zero_is_two():
    # fit the known exponential bunching shape over +-10 ns; g2(0) = 1 + A
    cfg = pl.ThermalSourceConfig(rate=1e5, coherence_time=10e-9)
    s = pl.gen_thermal(cfg, 100.0, seed=3)
    est = autocorr_g2(s, 1000, 10_000)
    x = bin_averaged_curve(
        lambda t: np.exp(-2.0 * np.abs(t) / cfg.coherence_time), est.tau_ps, 1000
    )
    w = 1.0 / est.stderr**2
    amp = np.sum(w * x * (est.g2 - 1.0)) / np.sum(w * x * x)
    assert abs((1.0 + amp) - 2.0) < 0.1


def test_thermal_long_coherence_is_super_poissonian():
    cfg = pl.ThermalSourceConfig(rate=1e5, coherence_time=10e-3)
    s = pl.gen_thermal(cfg, 20.0, seed=4)
    counts = pl.count_rate_trace(s, 1e-3).counts.astype(float)
    assert counts.var() / counts.mean() > 1.5


def test_thermal_mean_rate():
    cfg = pl.ThermalSourceConfig(rate=5e5, coherence_time=5e-8)
    s = pl.gen_thermal(cfg, 20.0, seed=5)
    # bunching inflates count variance; allow a generous band around the mean
    assert abs(len(s) / 20.0 - 5e5) < 0.01 * 5e5


def test_thermal_zero_duration_empty():
    s = pl.gen_thermal(pl.ThermalSourceConfig(rate=1e5, coherence_time=1e-8), 0.0, 0)
    assert len(s) == 0


def test_thermal_rejects_bad_coherence_time():
    with pytest.raises(ConfigError):
        pl.gen_thermal(pl.ThermalSourceConfig(rate=1e5, coherence_time=0.0), 1.0, 0)


# --- two-level cw --------------------------------------------------------------

def test_two_level_antibunched_at_zero():
    cfg = pl.TwoLevelCwConfig(pump_rate=1e8, decay_rate=1e8, quantum_efficiency=0.004)
    s = pl.gen_two_level_cw(cfg, 10.0, seed=6)
    est = autocorr_g2(s, 1000, 30_000)
    mid = est.g2.shape[0] // 2
    assert est.g2[mid] < 0.1
    far = np.abs(est.tau_ps) >= 25_000
    assert abs(est.g2[far].mean() - 1.0) < 0.05


def test_two_level_curve_rmse():
    cfg = pl.TwoLevelCwConfig(pump_rate=1e8, decay_rate=1e8, quantum_efficiency=0.006)
    s = pl.gen_two_level_cw(cfg, 20.0, seed=7)
    est = autocorr_g2(s, 1000, 15_000)
    ref = oracles.two_level_g2(est.tau_ps * 1e-12, cfg.pump_rate, cfg.decay_rate)
    rmse = np.sqrt(np.mean((est.g2 - ref) ** 2))
    assert rmse <= 0.05


def test_two_level_gap_never_zero():
    # rates low enough that the 1 ps grid cannot alias two distinct photons
    cfg = pl.TwoLevelCwConfig(pump_rate=1e7, decay_rate=1e7)
    s = pl.gen_two_level_cw(cfg, 1.0, seed=8)
    assert len(s) > 0
    assert np.diff(s.times).min() > 0


def test_two_level_mean_rate():
    cfg = pl.TwoLevelCwConfig(pump_rate=2e8, decay_rate=1e8, quantum_efficiency=0.5)
    assert cfg.mean_rate == pytest.approx(0.5 * 2e8 * 1e8 / 3e8)
    s = pl.gen_two_level_cw(cfg, 0.5, seed=9)
    assert len(s) / 0.5 == pytest.approx(cfg.mean_rate, rel=0.01)


# --- pulsed --------------------------------------------------------------------

def test_pulsed_no_reexcitation_one_photon_per_pulse():
    cfg = pl.PulsedEmitterConfig(lifetime_ps=100.0, emission_prob=1.0)
    s = pl.gen_pulsed(cfg, 0.02, seed=10)
    per_pulse = np.bincount((s.times // cfg.rep_period_ps).astype(np.intp))
    assert per_pulse.max() == 1


def test_pulsed_peaks_at_rep_period_multiples():
    cfg = pl.PulsedEmitterConfig(emission_prob=1.0)
    s = pl.gen_pulsed(cfg, 0.005, seed=11)
    h = pl.all_pairs_histogram(s, s, 200, 40_000)
    tau = h.tau_ps
    for k in (1, 2):
        window = np.abs(tau - k * 13_200) <= 6_600
        peak_tau = tau[window][np.argmax(h.counts[window])]
        assert abs(peak_tau - k * 13_200) <= 400


def test_reexcitation_ratio_matches_pair_counting_oracle():
    cfg = pl.PulsedEmitterConfig(emission_prob=1.0, reexcitation_prob=0.2)
    s = pl.gen_pulsed(cfg, 0.01, seed=12)
    a, b = pl.beamsplitter_route(s, 0.5, seed=13)
    h = pl.all_pairs_histogram(a, b, 200, 33_000)
    peaks = pl.pulsed_peak_areas(h, cfg.rep_period_ps)
    ref = oracles.pulse_pair_ratio(1.0, 0.2)
    assert peaks.ratio == pytest.approx(ref, rel=0.20)


def test_pulsed_occupancy_probability():
    cfg = pl.PulsedEmitterConfig(emission_prob=0.3, lifetime_ps=100.0)
    s = pl.gen_pulsed(cfg, 0.05, seed=14)
    n_pulses = int(0.05 / (cfg.rep_period_ps * 1e-12))
    frac = len(s) / n_pulses
    assert frac == pytest.approx(0.3, abs=0.01)


# --- fock train ------------------------------------------------------------------

def test_fock_n1_never_shares_a_pulse():
    cfg = pl.FockPulseConfig(n=1, lifetime_ps=100.0)
    s = pl.gen_fock_train(cfg, 0.02, seed=15)
    per_pulse = np.bincount((s.times // cfg.rep_period_ps).astype(np.intp))
    assert per_pulse.max() == 1


def test_fock_n2_pulse_ratio_half():
    cfg = pl.FockPulseConfig(n=2)
    s = pl.gen_fock_train(cfg, 0.01, seed=16)
    a, b = pl.beamsplitter_route(s, 0.5, seed=17)
    h = pl.all_pairs_histogram(a, b, 200, 33_000)
    peaks = pl.pulsed_peak_areas(h, cfg.rep_period_ps)
    assert peaks.ratio == pytest.approx(0.5, abs=0.03)


def test_fock_rejects_n_zero():
    with pytest.raises(ConfigError):
        pl.gen_fock_train(pl.FockPulseConfig(n=0), 1.0, seed=0)


# --- background --------------------------------------------------------------------

def test_background_rate_zero_is_identity():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=1e5), 1.0, seed=18)
    out = pl.add_background(s, 0.0, seed=19)
    assert np.array_equal(out.times, s.times)


def test_background_tagging_and_rate():
    s = pl.gen_coherent(pl.CoherentSourceConfig(rate=1e5), 2.0, seed=20)
    out = pl.add_background(s, 5e4, seed=21)
    n_bg = int((out.tags == int(pl.Tag.BACKGROUND)).sum())
    assert abs(n_bg - 1e5) < 5 * np.sqrt(1e5)
    out.validate()


def test_background_lifts_antibunched_g2_zero():
    # dilute an antibunched stream so background is 25% of all counts:
    # expected zero-delay correlation 1 - (1 - rho)^2
    cfg = pl.TwoLevelCwConfig(pump_rate=1e8, decay_rate=1e8, quantum_efficiency=0.006)
    s = pl.gen_two_level_cw(cfg, 10.0, seed=22)
    mixed = pl.add_background(s, cfg.mean_rate / 3.0, seed=23)
    est = autocorr_g2(mixed, 1000, 10_000)
    mid = est.g2.shape[0] // 2
    ref = oracles.mixed_background_g2_zero(0.25)
    assert est.g2[mid] == pytest.approx(ref, abs=0.06)
    assert 0.0 < est.g2[mid] < 1.0


# --- shared properties ----------------------------------------------------------------

@pytest.mark.parametrize(
    "cfg",
    [
        pl.CoherentSourceConfig(rate=2e5),
        pl.ThermalSourceConfig(rate=2e5, coherence_time=2e-8),
        pl.TwoLevelCwConfig(pump_rate=1e8, decay_rate=1e8, quantum_efficiency=0.002),
        pl.PulsedEmitterConfig(emission_prob=0.4, reexcitation_prob=0.1),
        pl.FockPulseConfig(n=3),
    ],
    ids=["coherent", "thermal", "two_level", "pulsed", "fock"],
)
def test_generators_deterministic_and_valid(cfg):
    s1 = pl.generate(cfg, 0.01, seed=24)
    s2 = pl.generate(cfg, 0.01, seed=24)
    s3 = pl.generate(cfg, 0.01, seed=25)
    s1.validate()
    assert np.array_equal(s1.times, s2.times)
    assert not np.array_equal(s1.times, s3.times)


def test_generate_rejects_unknown_config():
    with pytest.raises(ConfigError):
        pl.generate(object(), 1.0, seed=0)
