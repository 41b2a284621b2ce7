"""Interferometer and beam-splitter optics.

The Michelson is modeled at the single-photon level: each photon
self-interferes and leaves the monitored exit port with probability

    p = (1/2) * [1 + v(tau) * cos(omega0 * tau)],    tau = path_difference / c

where v(tau) is the fringe visibility, equal to the magnitude of the Fourier
transform of the normalized emission spectrum.  Closed forms:

    lorentzian (HWHM gamma):  v = exp(-gamma * tau)
    gaussian   (HWHM gamma):  v = exp(-(sigma*tau)^2 / 2), sigma = gamma/sqrt(2 ln 2)
    delta:                    v = 1

Surviving photons keep their timestamps; the scanned path difference is
evaluated at each photon's time (the scan period is many orders of magnitude
slower than any photon-scale delay).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as _SPEED_OF_LIGHT

from .errors import ConfigError
from .events import PS_PER_S, EventStream, Tag
from .emitters import _rng

C_M_PER_S = float(_SPEED_OF_LIGHT)

LINE_SHAPES = ("lorentzian", "gaussian", "delta")
SCAN_KINDS = ("fixed", "triangular")


@dataclass(frozen=True)
class SpectralLine:
    """Emission line: center wavelength (nm), shape, angular linewidth (rad/s, HWHM)."""

    center_wavelength_nm: float = 700.0
    shape: str = "lorentzian"
    linewidth: float = 1e9

    def validate(self) -> "SpectralLine":
        if self.center_wavelength_nm <= 0:
            raise ConfigError("center_wavelength_nm must be > 0")
        if self.shape not in LINE_SHAPES:
            raise ConfigError(f"unknown line shape {self.shape!r}, expected one of {LINE_SHAPES}")
        if self.linewidth < 0:
            raise ConfigError("linewidth must be >= 0")
        return self

    @property
    def omega0(self) -> float:
        """Center angular frequency 2*pi*c/lambda."""
        return 2.0 * math.pi * C_M_PER_S / (self.center_wavelength_nm * 1e-9)


@dataclass(frozen=True)
class ScanWaveform:
    """Interferometer path-difference program.

    fixed: constant offset.  triangular: offset + amplitude * tri(f*t), where
    tri rises 0 -> +1 over the first quarter period, falls to -1 through the
    third quarter and returns to 0 (zero phase at t=0).  A quarter period
    therefore sweeps exactly `amplitude_m` of path difference.
    """

    kind: str = "fixed"
    amplitude_m: float = 0.0
    frequency_hz: float = 0.0
    offset_m: float = 0.0

    def validate(self) -> "ScanWaveform":
        if self.kind not in SCAN_KINDS:
            raise ConfigError(f"unknown scan kind {self.kind!r}, expected one of {SCAN_KINDS}")
        if self.amplitude_m < 0:
            raise ConfigError("scan amplitude_m must be >= 0")
        if self.kind == "triangular" and self.frequency_hz <= 0:
            raise ConfigError("triangular scan needs frequency_hz > 0")
        return self

    def path_difference(self, t_s):
        """Path difference (m) at time(s) t_s; vectorized over numpy arrays."""
        if self.kind == "fixed":
            return np.broadcast_to(np.float64(self.offset_m), np.shape(t_s)).copy() \
                if np.ndim(t_s) else float(self.offset_m)
        frac = np.mod(np.asarray(t_s, dtype=np.float64) * self.frequency_hz, 1.0)
        tri = np.where(
            frac < 0.25, 4.0 * frac, np.where(frac < 0.75, 2.0 - 4.0 * frac, 4.0 * frac - 4.0)
        )
        out = self.offset_m + self.amplitude_m * tri
        return out if np.ndim(t_s) else float(out)


@dataclass(frozen=True)
class VisibilitySample:
    """Fringe visibility v at interferometer delay tau (seconds)."""

    tau_s: float
    visibility: float


def visibility_from_spectrum(line: SpectralLine, tau_s) -> VisibilitySample | np.ndarray:
    """|Fourier transform| of the unit-normalized spectrum at delay tau.

    Scalar input returns a VisibilitySample; arrays return the visibility
    values directly (used in the vectorized interferometer path).
    """
    line.validate()
    scalar = np.ndim(tau_s) == 0
    if scalar and tau_s < 0:
        raise ConfigError("tau must be >= 0")
    tau = np.abs(np.asarray(tau_s, dtype=np.float64))
    if line.shape == "delta":
        v = np.ones_like(tau)
    elif line.shape == "lorentzian":
        v = np.exp(-line.linewidth * tau)
    else:  # gaussian
        sigma = line.linewidth / math.sqrt(2.0 * math.log(2.0))
        v = np.exp(-0.5 * (sigma * tau) ** 2)
    if scalar:
        return VisibilitySample(float(tau), float(v))
    return v


def michelson_exit_prob(line: SpectralLine, path_difference_m) -> float | np.ndarray:
    """Probability that a photon exits the monitored port at the given path difference."""
    line.validate()
    tau = np.asarray(path_difference_m, dtype=np.float64) / C_M_PER_S
    v = visibility_from_spectrum(line, np.abs(tau))
    if isinstance(v, VisibilitySample):
        v = v.visibility
    p = 0.5 * (1.0 + v * np.cos(line.omega0 * tau))
    if np.ndim(path_difference_m) == 0:
        return float(p)
    return p


def michelson_transmit(
    stream: EventStream, line: SpectralLine, scan: ScanWaveform, seed
) -> EventStream:
    """Bernoulli-thin the stream by the exit probability at each photon's time."""
    line.validate()
    scan.validate()
    rng = _rng(seed)
    if len(stream) == 0:
        return stream
    t_s = stream.times.astype(np.float64) / PS_PER_S
    p = michelson_exit_prob(line, scan.path_difference(t_s))
    keep = rng.random(len(stream)) < p
    return EventStream(stream.times[keep], stream.tags[keep], stream.duration_ps)


def beamsplitter_route(
    stream: EventStream, reflectance: float, seed
) -> tuple[EventStream, EventStream]:
    """Split into (reflected, transmitted) outputs; every photon goes to exactly one."""
    if not 0.0 <= reflectance <= 1.0:
        raise ConfigError("reflectance must be in [0,1]")
    rng = _rng(seed)
    to_a = rng.random(len(stream)) < reflectance
    a = EventStream(stream.times[to_a], stream.tags[to_a], stream.duration_ps)
    b = EventStream(stream.times[~to_a], stream.tags[~to_a], stream.duration_ps)
    return a, b


def bandpass_filter(
    stream: EventStream,
    signal_transmission: float,
    background_transmission: float,
    seed,
) -> EventStream:
    """Thin events by tag: the filter passes the selected line, rejects the rest."""
    for name, val in (
        ("signal_transmission", signal_transmission),
        ("background_transmission", background_transmission),
    ):
        if not 0.0 <= val <= 1.0:
            raise ConfigError(f"{name} must be in [0,1]")
    rng = _rng(seed)
    if len(stream) == 0:
        return stream
    trans = np.full(len(stream), 1.0)
    trans[stream.tags == Tag.SIGNAL] = signal_transmission
    trans[stream.tags == Tag.BACKGROUND] = background_transmission
    keep = rng.random(len(stream)) < trans
    return EventStream(stream.times[keep], stream.tags[keep], stream.duration_ps)
