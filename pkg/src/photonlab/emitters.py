"""Photon-stream generators for the light-source classes we simulate.

Four stationary sources plus a pulse-train idealization:

* coherent: homogeneous Poisson process (ideal laser).
* thermal: doubly stochastic Poisson process driven by the intensity
  |E(t)|^2 of a complex Gaussian field with Ornstein-Uhlenbeck dynamics;
  field autocorrelation exp(-|dt|/coherence_time), so the pair correlation
  is 1 + exp(-2|tau|/coherence_time) and g2(0) = 2.
* two-level cw: renewal process from the rate-equation cycle
  wait Exp(pump_rate), wait Exp(decay_rate), emit; pair correlation
  1 - exp(-(P+G)|tau|).  Emission is thinned by quantum_efficiency.
* pulsed: one photon per excitation pulse with probability emission_prob,
  delayed by Exp(lifetime); optionally one extra photon (re-excitation of
  the emitter within the same pulse) with probability reexcitation_prob.
* fock train: exactly n photons per pulse, independent Exp(lifetime) delays.

All generators are deterministic given (config, duration, seed) and return
EventStream objects on the integer-picosecond lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError
from .events import PS_PER_S, EventStream, Tag, empty_stream, stream_from_times

# Thinning cap for the thermal sampler, in units of the mean intensity.  The
# instantaneous intensity is unit-mean exponential, so candidates are clipped
# with probability e^-25 ~ 1.4e-11 each; the induced rate bias is ~(cap+1)e^-cap.
_THERMAL_CAP = 25.0

_SEED_LIKE = (int, np.integer, np.random.SeedSequence, np.random.Generator)


def _rng(seed) -> np.random.Generator:
    if not isinstance(seed, _SEED_LIKE):
        raise ConfigError(f"seed must be an integer or SeedSequence, got {type(seed).__name__}")
    return np.random.default_rng(seed)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


# ---------------------------------------------------------------------------
# source configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoherentSourceConfig:
    """Ideal laser: Poisson arrivals at `rate` photons per second."""

    rate: float

    def validate(self) -> "CoherentSourceConfig":
        _require(self.rate > 0, "coherent source rate must be > 0")
        return self


@dataclass(frozen=True)
class ThermalSourceConfig:
    """Chaotic light: mean `rate` per second, field correlation time `coherence_time` (s)."""

    rate: float
    coherence_time: float

    def validate(self) -> "ThermalSourceConfig":
        _require(self.rate > 0, "thermal source rate must be > 0")
        _require(self.coherence_time > 0, "thermal coherence_time must be > 0")
        return self


@dataclass(frozen=True)
class TwoLevelCwConfig:
    """Continuously pumped single emitter.

    pump_rate and decay_rate in 1/s; quantum_efficiency in [0,1] thins the
    emitted photons (collection + detection losses folded into the source,
    which leaves the normalized pair correlation unchanged).
    """

    pump_rate: float
    decay_rate: float
    quantum_efficiency: float = 1.0

    def validate(self) -> "TwoLevelCwConfig":
        _require(self.pump_rate > 0, "pump_rate must be > 0")
        _require(self.decay_rate > 0, "decay_rate must be > 0")
        _require(0.0 <= self.quantum_efficiency <= 1.0, "quantum_efficiency must be in [0,1]")
        return self

    @property
    def mean_rate(self) -> float:
        """Detected photon rate: qe * P*G/(P+G)."""
        p, g = self.pump_rate, self.decay_rate
        return self.quantum_efficiency * p * g / (p + g)


@dataclass(frozen=True)
class PulsedEmitterConfig:
    """Pulsed single emitter with optional same-pulse re-excitation."""

    rep_period_ps: int = 13_200  # 13.2 ns
    lifetime_ps: float = 1000.0
    emission_prob: float = 1.0
    reexcitation_prob: float = 0.0
    reexcitation_delay_ps: float = 1000.0

    def validate(self) -> "PulsedEmitterConfig":
        _require(self.rep_period_ps > 0, "rep_period_ps must be > 0")
        _require(self.lifetime_ps > 0, "lifetime_ps must be > 0")
        _require(0.0 <= self.emission_prob <= 1.0, "emission_prob must be in [0,1]")
        _require(0.0 <= self.reexcitation_prob <= 1.0, "reexcitation_prob must be in [0,1]")
        _require(self.reexcitation_delay_ps > 0, "reexcitation_delay_ps must be > 0")
        return self


@dataclass(frozen=True)
class FockPulseConfig:
    """Idealized number-state train: exactly n photons per pulse."""

    n: int
    rep_period_ps: int = 13_200  # 13.2 ns
    lifetime_ps: float = 1000.0

    def validate(self) -> "FockPulseConfig":
        _require(self.n >= 1, "fock n must be >= 1")
        _require(self.rep_period_ps > 0, "rep_period_ps must be > 0")
        _require(self.lifetime_ps > 0, "lifetime_ps must be > 0")
        return self


SourceConfig = (
    CoherentSourceConfig
    | ThermalSourceConfig
    | TwoLevelCwConfig
    | PulsedEmitterConfig
    | FockPulseConfig
)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_coherent(cfg: CoherentSourceConfig, duration: float, seed) -> EventStream:
    """Homogeneous Poisson stream at cfg.rate over `duration` seconds."""
    cfg.validate()
    _require(duration >= 0, "duration must be >= 0")
    rng = _rng(seed)
    duration_ps = int(round(duration * PS_PER_S))
    if duration_ps == 0:
        return empty_stream(0)
    n = rng.poisson(cfg.rate * duration)
    times = np.sort(rng.integers(0, duration_ps, size=n, dtype=np.int64))
    return stream_from_times(times, duration_ps)


@njit(cache=True)
def _ou_thinning_walk(gaps, xi_re, xi_im, u, t0, re0, im0, tau_c_ps, cap, duration_ps):
    """Walk candidate arrivals, evolving the OU field exactly between them.

    Returns (accepted times, final t, final field, candidates consumed).
    A candidate at time t is accepted with probability |E(t)|^2 / cap.
    """
    n = gaps.shape[0]
    out = np.empty(n, np.int64)
    m = 0
    t = t0
    re = re0
    im = im0
    for i in range(n):
        t += gaps[i]
        if t >= duration_ps:
            return out[:m], t, re, im, i + 1
        rho = np.exp(-gaps[i] / tau_c_ps)
        s = np.sqrt((1.0 - rho * rho) * 0.5)
        re = rho * re + s * xi_re[i]
        im = rho * im + s * xi_im[i]
        inten = re * re + im * im  # quadratures N(0, 1/2) -> unit-mean exponential
        if u[i] * cap < inten:
            out[m] = np.int64(t)
            m += 1
    return out[:m], t, re, im, n


def gen_thermal(cfg: ThermalSourceConfig, duration: float, seed) -> EventStream:
    """Doubly stochastic Poisson stream with OU-field intensity.

    Candidates arrive at cap*rate and are thinned by the instantaneous
    normalized intensity; the complex field is advanced with the exact OU
    transition between candidate times, so no grid discretization enters.
    """
    cfg.validate()
    _require(duration >= 0, "duration must be >= 0")
    rng = _rng(seed)
    duration_ps = int(round(duration * PS_PER_S))
    if duration_ps == 0:
        return empty_stream(0)

    tau_c_ps = cfg.coherence_time * PS_PER_S
    cand_rate_per_ps = _THERMAL_CAP * cfg.rate / PS_PER_S
    # stationary start: each quadrature N(0, 1/2)
    re = rng.normal() * np.sqrt(0.5)
    im = rng.normal() * np.sqrt(0.5)
    t = 0.0
    chunk = 2_000_000
    pieces = []
    while t < duration_ps:
        gaps = rng.exponential(1.0 / cand_rate_per_ps, size=chunk)
        xi_re = rng.normal(size=chunk)
        xi_im = rng.normal(size=chunk)
        u = rng.random(size=chunk)
        accepted, t, re, im, _ = _ou_thinning_walk(
            gaps, xi_re, xi_im, u, t, re, im, tau_c_ps, _THERMAL_CAP, float(duration_ps)
        )
        if accepted.size:
            pieces.append(accepted.copy())  # detach from the chunk-sized buffer
    times = np.concatenate(pieces) if pieces else np.empty(0, np.int64)
    return stream_from_times(times, duration_ps)


def gen_two_level_cw(cfg: TwoLevelCwConfig, duration: float, seed) -> EventStream:
    """Renewal stream from the excitation/decay cycle, thinned by quantum_efficiency.

    Kept events are separated by a Geometric(qe) number of full cycles, so the
    gap is Gamma(G, 1/P) + Gamma(G, 1/decay), sampled directly, which keeps
    the cost proportional to the kept events rather than all emissions.
    """
    cfg.validate()
    _require(duration >= 0, "duration must be >= 0")
    rng = _rng(seed)
    duration_ps = int(round(duration * PS_PER_S))
    if duration_ps == 0 or cfg.quantum_efficiency == 0.0:
        return empty_stream(duration_ps)

    qe = cfg.quantum_efficiency
    rate = cfg.mean_rate
    batches = []
    t = 0.0
    # batch size: expected remaining events plus slack
    while t < duration:
        n = int((duration - t) * rate * 1.05) + 64
        if qe >= 1.0:
            gaps = rng.exponential(1.0 / cfg.pump_rate, n) + rng.exponential(
                1.0 / cfg.decay_rate, n
            )
        else:
            cycles = rng.geometric(qe, n)
            gaps = rng.gamma(cycles, 1.0 / cfg.pump_rate) + rng.gamma(
                cycles, 1.0 / cfg.decay_rate
            )
        batch = t + np.cumsum(gaps)
        t = batch[-1]
        batches.append(batch)
    all_times = np.concatenate(batches)
    all_times = all_times[all_times < duration]
    return stream_from_times((all_times * PS_PER_S).astype(np.int64), duration_ps)


def _occupied_pulses(rng: np.random.Generator, prob: float, n_pulses: int) -> np.ndarray:
    """Indices of pulses that fire, via geometric gaps (O(firing pulses))."""
    if prob <= 0.0 or n_pulses == 0:
        return np.empty(0, dtype=np.int64)
    if prob >= 1.0:
        return np.arange(n_pulses, dtype=np.int64)
    idx = []
    last = -1
    while last < n_pulses:
        n = int((n_pulses - last) * prob * 1.05) + 64
        gaps = rng.geometric(prob, n).astype(np.int64)
        batch = last + np.cumsum(gaps)
        idx.append(batch)
        last = int(batch[-1])
    out = np.concatenate(idx)
    return out[out < n_pulses]


def gen_pulsed(cfg: PulsedEmitterConfig, duration: float, seed) -> EventStream:
    """Pulse train: per firing pulse one Exp(lifetime)-delayed photon, plus an
    optional re-excitation photon a further Exp(reexcitation_delay) later."""
    cfg.validate()
    duration_ps = int(round(duration * PS_PER_S))
    _require(duration_ps >= cfg.rep_period_ps, "duration must cover at least one pulse period")
    rng = _rng(seed)
    n_pulses = duration_ps // cfg.rep_period_ps
    fired = _occupied_pulses(rng, cfg.emission_prob, n_pulses)
    first = fired * cfg.rep_period_ps + rng.exponential(cfg.lifetime_ps, fired.size)
    if cfg.reexcitation_prob > 0.0 and fired.size:
        again = rng.random(fired.size) < cfg.reexcitation_prob
        second = first[again] + rng.exponential(cfg.reexcitation_delay_ps, int(again.sum()))
        all_times = np.concatenate([first, second])
    else:
        all_times = first
    all_times = np.sort(all_times[all_times < duration_ps])
    return stream_from_times(all_times.astype(np.int64), duration_ps)


def gen_fock_train(cfg: FockPulseConfig, duration: float, seed) -> EventStream:
    """Exactly n photons per pulse, each with its own Exp(lifetime) delay."""
    cfg.validate()
    duration_ps = int(round(duration * PS_PER_S))
    _require(duration_ps >= cfg.rep_period_ps, "duration must cover at least one pulse period")
    rng = _rng(seed)
    n_pulses = duration_ps // cfg.rep_period_ps
    base = np.repeat(np.arange(n_pulses, dtype=np.int64) * cfg.rep_period_ps, cfg.n)
    times = base + rng.exponential(cfg.lifetime_ps, base.size)
    times = np.sort(times[times < duration_ps])
    return stream_from_times(times.astype(np.int64), duration_ps)


def add_background(stream: EventStream, rate: float, seed) -> EventStream:
    """Merge an independent Poisson stream tagged `background`."""
    _require(rate >= 0, "background rate must be >= 0")
    if rate == 0 or stream.duration_ps == 0:
        return stream
    rng = _rng(seed)
    n = rng.poisson(rate * stream.duration_s)
    bg_times = np.sort(rng.integers(0, stream.duration_ps, size=n, dtype=np.int64))
    bg = EventStream(bg_times, np.full(n, int(Tag.BACKGROUND), np.uint8), stream.duration_ps)
    return stream.merged(bg)


def generate(cfg: SourceConfig, duration: float, seed) -> EventStream:
    """Dispatch to the generator matching the config type."""
    if isinstance(cfg, CoherentSourceConfig):
        return gen_coherent(cfg, duration, seed)
    if isinstance(cfg, ThermalSourceConfig):
        return gen_thermal(cfg, duration, seed)
    if isinstance(cfg, TwoLevelCwConfig):
        return gen_two_level_cw(cfg, duration, seed)
    if isinstance(cfg, PulsedEmitterConfig):
        return gen_pulsed(cfg, duration, seed)
    if isinstance(cfg, FockPulseConfig):
        return gen_fock_train(cfg, duration, seed)
    raise ConfigError(f"unsupported source config: {type(cfg).__name__}")
