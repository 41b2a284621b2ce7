"""Photon-stream simulation and correlation/interference analysis.

Simulates photon arrival streams from several source models, propagates
them through a scanned Michelson interferometer and a Hanbury Brown-Twiss
splitter with realistic detectors, and analyzes the results: coincidence
histograms, normalized intensity correlation, and fringe visibility.
"""

from .errors import (
    ConfigError,
    InsufficientDataError,
    InvariantError,
    NormalizationError,
)
from .events import (
    PS_PER_S,
    EventStream,
    Tag,
    empty_stream,
    read_binary,
    read_timestamps,
    read_timestamps_csv,
    stream_from_times,
    write_binary,
    write_timestamps_csv,
)
from .emitters import (
    CoherentSourceConfig,
    FockPulseConfig,
    PulsedEmitterConfig,
    SourceConfig,
    ThermalSourceConfig,
    TwoLevelCwConfig,
    add_background,
    gen_coherent,
    gen_fock_train,
    gen_pulsed,
    gen_thermal,
    gen_two_level_cw,
    generate,
)
from .optics import (
    ScanWaveform,
    SpectralLine,
    VisibilitySample,
    bandpass_filter,
    beamsplitter_route,
    michelson_exit_prob,
    michelson_transmit,
    visibility_from_spectrum,
)
from .detection import DetectorConfig, FringeTrace, count_rate_trace, detect
from .correlator import (
    CoincidenceHistogram,
    G2Estimate,
    all_pairs_histogram,
    analytic_g2,
    classical_bounds_check,
    normalize_g2,
    pulsed_peak_areas,
    start_stop_histogram,
)
from .experiment import (
    ExperimentConfig,
    RunResult,
    VisibilityPoint,
    extract_visibility,
    run_combined,
    stage_seeds,
    sweep_visibility,
)
from .config import SCHEMA, config_hash, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "InvariantError",
    "NormalizationError",
    "InsufficientDataError",
    "PS_PER_S",
    "EventStream",
    "Tag",
    "empty_stream",
    "stream_from_times",
    "read_binary",
    "write_binary",
    "read_timestamps_csv",
    "write_timestamps_csv",
    "read_timestamps",
    "CoherentSourceConfig",
    "ThermalSourceConfig",
    "TwoLevelCwConfig",
    "PulsedEmitterConfig",
    "FockPulseConfig",
    "SourceConfig",
    "gen_coherent",
    "gen_thermal",
    "gen_two_level_cw",
    "gen_pulsed",
    "gen_fock_train",
    "add_background",
    "generate",
    "SpectralLine",
    "ScanWaveform",
    "VisibilitySample",
    "visibility_from_spectrum",
    "michelson_exit_prob",
    "michelson_transmit",
    "beamsplitter_route",
    "bandpass_filter",
    "DetectorConfig",
    "FringeTrace",
    "detect",
    "count_rate_trace",
    "CoincidenceHistogram",
    "G2Estimate",
    "start_stop_histogram",
    "all_pairs_histogram",
    "normalize_g2",
    "analytic_g2",
    "pulsed_peak_areas",
    "classical_bounds_check",
    "ExperimentConfig",
    "RunResult",
    "VisibilityPoint",
    "run_combined",
    "extract_visibility",
    "sweep_visibility",
    "stage_seeds",
    "SCHEMA",
    "config_hash",
    "load_config",
    "parse_config",
    "__version__",
]
