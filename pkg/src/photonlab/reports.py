"""Output writers: CSV tables, summary JSON, and SVG figures.

Every file embeds the run's config hash (CSV as a leading comment line,
JSON as a field, SVG in its metadata) and is written atomically
(temp file in the target directory, then rename).  Figures are rendered
with a hash-salted SVG id scheme and no embedded date so that identical
runs produce identical bytes.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .config import canonical_json, config_hash, config_to_json
from .correlator import G2Estimate, CoincidenceHistogram, classical_bounds_check
from .detection import FringeTrace
from .experiment import ExperimentConfig, RunResult


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, columns: dict, cfg_hash: str) -> Path:
    """Write named columns of equal length with a config-hash comment line."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n = arrays[0].shape[0]
    lines = [f"# config_hash={cfg_hash}", ",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    _atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def write_json(path, payload: dict, cfg_hash: str) -> Path:
    path = Path(path)
    payload = {"config_hash": cfg_hash, **payload}
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _save_svg(fig, path: Path, cfg_hash: str) -> Path:
    tmp = path.with_name(path.name + ".tmp")
    with plt.rc_context({"svg.hashsalt": cfg_hash}):
        fig.savefig(
            tmp,
            format="svg",
            metadata={"Date": None, "Description": f"config_hash={cfg_hash}"},
        )
    plt.close(fig)
    os.replace(tmp, path)
    return path


def plot_histogram(hist: CoincidenceHistogram, path, cfg_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    tau_ns = hist.tau_ps / 1e3
    ax.step(tau_ns, hist.counts, where="mid", lw=0.9)
    ax.set_xlabel("delay (ns)")
    ax.set_ylabel("coincidences")
    ax.set_title(f"coincidence histogram ({hist.mode})")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    return _save_svg(fig, Path(path), cfg_hash)


def plot_g2(est: G2Estimate, path, cfg_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    tau_ns = est.tau_ps / 1e3
    ax.errorbar(tau_ns, est.g2, yerr=est.stderr, fmt="-", lw=0.9, ecolor="0.7")
    ax.axhline(1.0, ls="--", c="k", lw=0.8)
    ax.axhline(0.5, ls=":", c="r", lw=0.8)
    ax.set_xlabel("delay (ns)")
    ax.set_ylabel("normalized correlation")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    return _save_svg(fig, Path(path), cfg_hash)


def plot_fringe(trace: FringeTrace, path, cfg_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(trace.window_starts_s, trace.counts, lw=0.7)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(f"counts per {trace.window_s:g} s")
    ax.set_title("interference trace")
    fig.tight_layout()
    return _save_svg(fig, Path(path), cfg_hash)


def plot_visibility(points, path, cfg_hash: str, reference=None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    delays = [p.delay_m for p in points]
    vis = [p.visibility for p in points]
    errs = [p.error for p in points]
    ax.errorbar(delays, vis, yerr=errs, fmt="o", capsize=3, label="fitted")
    if reference is not None:
        ref_x, ref_y = reference
        ax.plot(ref_x, ref_y, "-", lw=0.8, label="spectrum transform")
        ax.legend()
    ax.set_xlabel("path difference (m)")
    ax.set_ylabel("visibility")
    ax.set_ylim(0, 1.05)
    fig.tight_layout()
    return _save_svg(fig, Path(path), cfg_hash)


def write_bundle(result: RunResult, cfg: ExperimentConfig, outdir) -> list[Path]:
    """Write the full result bundle for one combined run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    echo = config_to_json(cfg)
    h = config_hash(echo)
    written = []

    cfg_path = outdir / "config.json"
    _atomic_write_text(cfg_path, canonical_json(echo) + "\n")
    written.append(cfg_path)

    written.append(
        write_csv(
            outdir / "histogram.csv",
            {"tau_ps": result.histogram.tau_ps, "counts": result.histogram.counts},
            h,
        )
    )
    written.append(plot_histogram(result.histogram, outdir / "histogram.svg", h))
    written.append(
        write_csv(
            outdir / "g2.csv",
            {"tau_ps": result.g2.tau_ps, "g2": result.g2.g2, "stderr": result.g2.stderr},
            h,
        )
    )
    written.append(plot_g2(result.g2, outdir / "g2.svg", h))
    written.append(
        write_csv(
            outdir / "fringe.csv",
            {"time_s": result.fringe.window_starts_s, "counts": result.fringe.counts},
            h,
        )
    )
    written.append(plot_fringe(result.fringe, outdir / "fringe.svg", h))

    bounds = classical_bounds_check(result.g2)
    summary = {
        "seed": cfg.seed,
        "duration_s": cfg.duration_s,
        "histogram_mode": result.histogram.mode,
        "n_starts": result.histogram.n_starts,
        "n_stops": result.histogram.n_stops,
        "g2_zero": bounds.g2_zero,
        "g2_zero_stderr": bounds.g2_zero_stderr,
        "single_photon": bounds.single_photon,
        "verdict": bounds.verdict,
        "sub_poissonian_bins": bounds.sub_poissonian_bins,
        "antibunched_bins": bounds.antibunched_bins,
        "visibility": result.visibility,
        "visibility_err": result.visibility_err,
    }
    written.append(write_json(outdir / "summary.json", summary, h))
    return written
