"""JSON run-configuration: schema, parsing, canonical hashing.

A run config is a single JSON object; ``source`` is the only required key,
everything else falls back to the library defaults.  The ``rng`` field is
pinned to "pcg64" so that configs replay bit-exactly across platforms.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .emitters import (
    CoherentSourceConfig,
    FockPulseConfig,
    PulsedEmitterConfig,
    ThermalSourceConfig,
    TwoLevelCwConfig,
)
from .optics import LINE_SHAPES, SCAN_KINDS, ScanWaveform, SpectralLine
from .detection import DetectorConfig
from .correlator import HISTOGRAM_MODES
from .experiment import ExperimentConfig

RNG_ALGORITHM = "pcg64"

_SOURCE_MODELS = {
    "coherent": CoherentSourceConfig,
    "thermal": ThermalSourceConfig,
    "two_level_cw": TwoLevelCwConfig,
    "pulsed": PulsedEmitterConfig,
    "fock": FockPulseConfig,
}

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_UNIT = {"type": "number", "minimum": 0, "maximum": 1}

_SOURCE_SCHEMAS = [
    {
        "type": "object",
        "properties": {"model": {"const": "coherent"}, "rate": _POSITIVE},
        "required": ["model", "rate"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "model": {"const": "thermal"},
            "rate": _POSITIVE,
            "coherence_time": _POSITIVE,
        },
        "required": ["model", "rate", "coherence_time"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "model": {"const": "two_level_cw"},
            "pump_rate": _POSITIVE,
            "decay_rate": _POSITIVE,
            "quantum_efficiency": _UNIT,
        },
        "required": ["model", "pump_rate", "decay_rate"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "model": {"const": "pulsed"},
            "rep_period_ps": {"type": "integer", "exclusiveMinimum": 0},
            "lifetime_ps": _POSITIVE,
            "emission_prob": _UNIT,
            "reexcitation_prob": _UNIT,
            "reexcitation_delay_ps": _POSITIVE,
        },
        "required": ["model"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "model": {"const": "fock"},
            "n": {"type": "integer", "minimum": 1},
            "rep_period_ps": {"type": "integer", "exclusiveMinimum": 0},
            "lifetime_ps": _POSITIVE,
        },
        "required": ["model", "n"],
        "additionalProperties": False,
    },
]

_DETECTOR_SCHEMA = {
    "type": "object",
    "properties": {
        "efficiency": _UNIT,
        "jitter_fwhm_ps": _NONNEG,
        "dead_time_ps": {"type": "integer", "minimum": 0},
        "dark_rate": _NONNEG,
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "photonlab run configuration",
    "type": "object",
    "properties": {
        "source": {"oneOf": _SOURCE_SCHEMAS},
        "line": {
            "type": "object",
            "properties": {
                "center_wavelength_nm": _POSITIVE,
                "shape": {"enum": list(LINE_SHAPES)},
                "linewidth": _NONNEG,
            },
            "additionalProperties": False,
        },
        "scan": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(SCAN_KINDS)},
                "amplitude_m": _NONNEG,
                "frequency_hz": _NONNEG,
                "offset_m": {"type": "number"},
            },
            "additionalProperties": False,
        },
        "detector_a": _DETECTOR_SCHEMA,
        "detector_b": _DETECTOR_SCHEMA,
        "splitter_reflectance": _UNIT,
        "background_rate": _NONNEG,
        "bandpass_signal": _UNIT,
        "bandpass_background": _UNIT,
        "bin_width_ps": {"type": "integer", "exclusiveMinimum": 0},
        "range_ps": {"type": "integer", "exclusiveMinimum": 0},
        "histogram_mode": {"enum": list(HISTOGRAM_MODES)},
        "fringe_window_s": _POSITIVE,
        "duration_s": _POSITIVE,
        "seed": {"type": "integer", "minimum": 0},
        "rng": {"const": RNG_ALGORITHM},
    },
    "required": ["source"],
    "additionalProperties": False,
}

_INT_FIELDS = {"rep_period_ps", "n", "dead_time_ps", "bin_width_ps", "range_ps", "seed"}


def _coerced(d: dict) -> dict:
    # jsonschema accepts 5.0 as an integer; normalize to real ints
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out[k] = _coerced(v)
        elif k in _INT_FIELDS:
            out[k] = int(v)
        else:
            out[k] = v
    return out


def parse_config(raw: dict, source_name: str = "config") -> ExperimentConfig:
    """Validate a raw dict against the schema and build an ExperimentConfig."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"{source_name}: {exc.message} at {where}") from exc
    raw = _coerced(raw)

    src = raw["source"]
    model_cls = _SOURCE_MODELS[src["model"]]
    source = model_cls(**{k: v for k, v in src.items() if k != "model"})

    kwargs = {"source": source}
    if "line" in raw:
        kwargs["line"] = SpectralLine(**raw["line"])
    if "scan" in raw:
        kwargs["scan"] = ScanWaveform(**raw["scan"])
    for det in ("detector_a", "detector_b"):
        if det in raw:
            kwargs[det] = DetectorConfig(**raw[det])
    for key in (
        "splitter_reflectance",
        "background_rate",
        "bandpass_signal",
        "bandpass_background",
        "bin_width_ps",
        "range_ps",
        "histogram_mode",
        "fringe_window_s",
        "duration_s",
        "seed",
    ):
        if key in raw:
            kwargs[key] = raw[key]
    return ExperimentConfig(**kwargs).validate()


def load_raw_config(path) -> dict:
    """Read and JSON-decode a config file without schema validation."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return raw


def load_config(path) -> ExperimentConfig:
    return parse_config(load_raw_config(path), source_name=str(path))


def config_to_json(cfg: ExperimentConfig) -> dict:
    """Full config echo with defaults resolved; parse_config round-trips it."""
    d = asdict(cfg)
    source = d.pop("source")
    model = next(
        name for name, cls in _SOURCE_MODELS.items() if isinstance(cfg.source, cls)
    )
    d["source"] = {"model": model, **source}
    d["rng"] = RNG_ALGORITHM
    return d


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(cfg_or_dict) -> str:
    """sha256 over the canonical JSON form; embedded in every output file."""
    if isinstance(cfg_or_dict, ExperimentConfig):
        cfg_or_dict = config_to_json(cfg_or_dict)
    return hashlib.sha256(canonical_json(cfg_or_dict).encode()).hexdigest()
