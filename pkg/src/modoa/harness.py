"""Monte Carlo experiment runner with CSV persistence.

A config file describes one experiment: a source scene, an array
geometry, a sweep (weak-source SNR, snapshot count, or a single point),
the acquisition pipelines to compare, and the trial protocol.  Each
(sweep value, trial) pair simulates one snapshot batch that every
pipeline digests, so pipelines are compared on identical data, and the
same per-trial seeds recur across sweep values to smooth Monte Carlo
curves.  Results land in a deterministic CSV (stable column order,
shortest round-trip float formatting, no timing columns) plus a JSON
manifest carrying config hash, versions, and wall-clock diagnostics.
"""

from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import __version__
from .array_model import ArrayGeometry, SourceScene, simulate_snapshots
from .bif_pipeline import BifConfig, BifInitError, nmse_db, run_bif
from .covariance import ComplexCovariance
from .doa_subspace import DoaEstimate, detect, pseudo_spectrum, root_music, spectral_music
from .quantizers import (
    ConventionalAdcParams,
    ModuloQuantizerParams,
    conventional_adc,
    default_clip_threshold,
    default_modulo_range,
    quantize_batch,
)

__all__ = [
    "PipelineSpec",
    "SweepSpec",
    "ExperimentConfig",
    "ResultRow",
    "load_config",
    "run_experiment",
    "detection_probability",
    "pd_summary",
    "export_csv",
    "parse_csv",
    "export_pd_summary",
    "export_spectrum",
    "export_spectra",
    "export_trace",
    "write_manifest",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CSV_FIXED_COLUMNS = (
    "schema_version",
    "pipeline",
    "total_bits",
    "sweep_name",
    "sweep_value",
    "trial",
    "seed",
    "detected",
)
CSV_TAIL_COLUMNS = ("nmse_db", "wall_s")

_PIPELINE_KINDS = ("onebit_bif", "conventional")
_SWEEP_KINDS = ("single", "snr2", "snapshots")


@dataclass(frozen=True)
class PipelineSpec:
    """One acquisition front end: folded-plus-sign or clipping ADC."""

    kind: str
    bits: int

    def __post_init__(self) -> None:
        if self.kind not in _PIPELINE_KINDS:
            raise ValueError(f"unknown pipeline kind {self.kind!r}; expected one of {_PIPELINE_KINDS}")
        if self.bits < 1 or (self.kind == "conventional" and self.bits < 2):
            raise ValueError("pipeline bit depth too small")

    @property
    def total_bits(self) -> int:
        # the sign channel contributes one extra bit to the folded pipeline
        return self.bits + 1 if self.kind == "onebit_bif" else self.bits

    @property
    def label(self) -> str:
        prefix = "bif" if self.kind == "onebit_bif" else "conv"
        return f"{prefix}_b{self.bits}"


@dataclass(frozen=True)
class SweepSpec:
    """What varies across the experiment's x axis."""

    kind: str
    values: tuple[float, ...] = ()
    source_index: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {_SWEEP_KINDS}")
        vals = tuple(float(v) for v in self.values)
        if self.kind == "single":
            if vals:
                raise ValueError("a single-point sweep takes no values")
            vals = (0.0,)
        else:
            if not vals:
                raise ValueError("sweep values must be non-empty")
            if list(vals) != sorted(vals):
                raise ValueError("sweep values must be sorted ascending")
        if self.kind == "snapshots" and any(v < 1 or v != int(v) for v in vals):
            raise ValueError("snapshot sweep values must be positive integers")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, runnable description of one experiment."""

    name: str
    geometry: ArrayGeometry
    doas_deg: tuple[float, ...]
    snrs_db: tuple[float, ...]
    noise_power: float
    snapshots: int
    sweep: SweepSpec
    pipelines: tuple[PipelineSpec, ...]
    trials: int
    base_seed: int
    detection_tol_deg: float = 0.1
    modulo_scale: float = 1.0
    clip_scale: float = 4.0
    max_iters: int = 10
    convergence_tol: float = 1e-4
    timeout_s: float = 300.0
    music: str = "auto"
    spectral_grid_step: float = 0.01

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if len(self.doas_deg) != len(self.snrs_db):
            raise ValueError("doas_deg and snrs_db must have equal length")
        if not self.pipelines:
            raise ValueError("at least one pipeline is required")
        if len({p.label for p in self.pipelines}) != len(self.pipelines):
            raise ValueError("pipeline specs must be distinct")
        if self.music not in ("auto", "root", "spectral"):
            raise ValueError("music must be auto, root, or spectral")
        if self.sweep.kind == "snr2" and not 0 <= self.sweep.source_index < len(self.doas_deg):
            raise ValueError("sweep source index out of range")
        if not self.detection_tol_deg > 0:
            raise ValueError("detection tolerance must be positive")
        # template scene constructed eagerly so bad parameters fail at load time
        self.scene_for()

    @property
    def n_sources(self) -> int:
        return len(self.doas_deg)

    def scene_for(self, sweep_value: float | None = None) -> SourceScene:
        """Scene template with one sweep value applied (None = template)."""
        snrs = list(self.snrs_db)
        snapshots = self.snapshots
        if sweep_value is not None and self.sweep.kind == "snr2":
            snrs[self.sweep.source_index] = float(sweep_value)
        elif sweep_value is not None and self.sweep.kind == "snapshots":
            snapshots = int(sweep_value)
        return SourceScene.from_snrs(
            doas_deg=self.doas_deg,
            snrs_db=tuple(snrs),
            noise_power=self.noise_power,
            snapshots=snapshots,
        )


@dataclass(frozen=True)
class ResultRow:
    """One (pipeline, sweep value, trial) outcome.

    ``err_theta`` pairs with the config's true bearings in order; a
    failed trial carries empty errors and no NMSE.  Wall time is kept
    out of equality comparisons and out of the CSV so that repeated runs
    are byte-identical.
    """

    pipeline: str
    total_bits: int
    sweep_name: str
    sweep_value: float
    trial: int
    seed: int
    detected: bool
    err_theta: tuple[float, ...] = ()
    nmse_db: float | None = None
    wall_s: float | None = field(default=None, compare=False)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ValueError(f"config is missing {context}{key!r}")
    return mapping[key]


def _geometry_from_dict(d: dict) -> ArrayGeometry:
    kind = _require(d, "kind", "geometry key ")
    if kind == "ula":
        return ArrayGeometry.ula(int(_require(d, "n", "geometry key ")))
    if kind == "coprime":
        return ArrayGeometry.coprime(int(_require(d, "p", "geometry key ")), int(_require(d, "q", "geometry key ")))
    if kind == "nested":
        return ArrayGeometry.nested(int(_require(d, "n1", "geometry key ")), int(_require(d, "n2", "geometry key ")))
    if kind == "custom":
        return ArrayGeometry.custom(tuple(int(i) for i in _require(d, "indices", "geometry key ")))
    raise ValueError(f"unknown geometry kind {kind!r}")


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment config.

    Raises ValueError with the offending key on schema problems and
    OSError with the path on I/O problems.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValueError(f"config {path!r} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"config {path!r} must be a mapping at top level")
    version = _require(raw, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ValueError(f"config schema_version {version!r} unsupported; this build reads {SCHEMA_VERSION}")

    scene = _require(raw, "scene", "")
    sweep_raw = raw.get("sweep", {"kind": "single"})
    sweep = SweepSpec(
        kind=_require(sweep_raw, "kind", "sweep key "),
        values=tuple(sweep_raw.get("values", ())),
        source_index=int(sweep_raw.get("source_index", 1)),
    )
    pipelines = tuple(
        PipelineSpec(kind=_require(p, "kind", "pipeline key "), bits=int(_require(p, "bits", "pipeline key ")))
        for p in _require(raw, "pipelines", "")
    )
    quant = raw.get("quantizer", {})
    return ExperimentConfig(
        name=str(raw.get("name", os.path.splitext(os.path.basename(path))[0])),
        geometry=_geometry_from_dict(_require(raw, "geometry", "")),
        doas_deg=tuple(float(v) for v in _require(scene, "doas_deg", "scene key ")),
        snrs_db=tuple(float(v) for v in _require(scene, "snrs_db", "scene key ")),
        noise_power=float(_require(scene, "noise_power", "scene key ")),
        snapshots=int(_require(scene, "snapshots", "scene key ")),
        sweep=sweep,
        pipelines=pipelines,
        trials=int(_require(raw, "trials", "")),
        base_seed=int(_require(raw, "base_seed", "")),
        detection_tol_deg=float(raw.get("detection_tol_deg", 0.1)),
        modulo_scale=float(quant.get("modulo_scale", 1.0)),
        clip_scale=float(quant.get("clip_scale", 4.0)),
        max_iters=int(raw.get("max_iters", 10)),
        convergence_tol=float(raw.get("convergence_tol", 1e-4)),
        timeout_s=float(raw.get("timeout_s", 300.0)),
        music=str(raw.get("music", "auto")),
        spectral_grid_step=float(raw.get("spectral_grid_step", 0.01)),
    )


def _estimate_doas(config: ExperimentConfig, cov: ComplexCovariance) -> DoaEstimate:
    use_root = config.music == "root" or (config.music == "auto" and config.geometry.is_ula())
    if use_root:
        return root_music(cov, config.n_sources, config.geometry)
    return spectral_music(cov, config.n_sources, config.geometry, config.spectral_grid_step)


def _angle_errors(config: ExperimentConfig, estimate: DoaEstimate) -> tuple[float, ...]:
    est = np.asarray(estimate.angles_deg, dtype=np.float64)
    if est.size == 0:
        return ()
    return tuple(float(est[np.argmin(np.abs(est - t))] - t) for t in config.doas_deg)


def _run_pipeline(config: ExperimentConfig, pipe: PipelineSpec, scene: SourceScene, batch) -> tuple[tuple[float, ...], float, bool]:
    """Returns (angle errors, batch NMSE, detected) for one pipeline."""
    if pipe.kind == "onebit_bif":
        params = ModuloQuantizerParams(
            bits=pipe.bits, modulo_range=default_modulo_range(scene, config.modulo_scale)
        )
        quantized = quantize_batch(batch, params)
        result = run_bif(
            quantized.onebit,
            quantized.modulo,
            BifConfig(quantizer=params, max_iters=config.max_iters, convergence_tol=config.convergence_tol),
        )
        cov = result.covariance
        nmse = nmse_db(result.recovered, batch.data)
    else:
        params = ConventionalAdcParams(
            bits=pipe.bits, threshold=default_clip_threshold(scene, config.clip_scale)
        )
        digitized = conventional_adc(batch.data, params)
        raw = (digitized @ digitized.conj().T) / digitized.shape[1]
        cov = ComplexCovariance(0.5 * (raw + raw.conj().T))
        nmse = nmse_db(digitized, batch.data)
    estimate = _estimate_doas(config, cov)
    errs = _angle_errors(config, estimate)
    ok = detect(config.doas_deg, estimate, config.detection_tol_deg)
    return errs, nmse, ok


def _run_trial(config: ExperimentConfig, sweep_value: float, trial: int) -> list[ResultRow]:
    """All pipelines on one simulated batch; failures become flagged rows."""
    seed = config.base_seed + trial
    value = None if config.sweep.kind == "single" else sweep_value
    scene = config.scene_for(value)
    batch = simulate_snapshots(scene, config.geometry, seed=seed)
    rows = []
    for pipe in config.pipelines:
        start = time.perf_counter()
        try:
            errs, nmse, ok = _run_pipeline(config, pipe, scene, batch)
            wall = time.perf_counter() - start
            if config.timeout_s and wall > config.timeout_s:
                log.warning(
                    "%s trial %d exceeded the %.0f s timeout (%.1f s); recording failure",
                    pipe.label, trial, config.timeout_s, wall,
                )
                rows.append(_failure_row(config, pipe, sweep_value, trial, seed, wall))
                continue
            rows.append(
                ResultRow(
                    pipeline=pipe.label,
                    total_bits=pipe.total_bits,
                    sweep_name=config.sweep.kind,
                    sweep_value=float(sweep_value),
                    trial=trial,
                    seed=seed,
                    detected=ok,
                    err_theta=errs,
                    nmse_db=nmse,
                    wall_s=wall,
                )
            )
        except (BifInitError, ValueError, np.linalg.LinAlgError) as exc:
            wall = time.perf_counter() - start
            log.warning("%s trial %d failed: %s", pipe.label, trial, exc)
            rows.append(_failure_row(config, pipe, sweep_value, trial, seed, wall))
    return rows


def _failure_row(config, pipe, sweep_value, trial, seed, wall) -> ResultRow:
    return ResultRow(
        pipeline=pipe.label,
        total_bits=pipe.total_bits,
        sweep_name=config.sweep.kind,
        sweep_value=float(sweep_value),
        trial=trial,
        seed=seed,
        detected=False,
        err_theta=(),
        nmse_db=None,
        wall_s=wall,
    )


def run_experiment(config: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    """Run every (sweep value, trial, pipeline) cell of the experiment.

    Trials are independent; with threads > 1 they execute in a process
    pool.  Rows are sorted by (pipeline, sweep value, trial) regardless
    of execution order, so parallelism never changes the output table.
    """
    tasks = [(value, trial) for value in config.sweep.values for trial in range(config.trials)]
    rows: list[ResultRow] = []
    if threads <= 1:
        for value, trial in tasks:
            rows.extend(_run_trial(config, value, trial))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_run_trial, config, value, trial): (value, trial)
                for value, trial in tasks
            }
            for future in concurrent.futures.as_completed(futures):
                value, trial = futures[future]
                try:
                    rows.extend(future.result(timeout=max(config.timeout_s * len(config.pipelines), 1.0)))
                except Exception as exc:  # timeout or worker crash: flag every pipeline
                    log.warning("trial %d at sweep %s failed in worker: %s", trial, value, exc)
                    for pipe in config.pipelines:
                        rows.append(
                            _failure_row(config, pipe, value, trial, config.base_seed + trial, None)
                        )
    rows.sort(key=lambda r: (r.pipeline, r.sweep_value, r.trial))
    return rows


def detection_probability(rows: list[ResultRow], pipeline: str, sweep_value: float) -> float:
    """Fraction of matching trials with a successful detection."""
    matching = [r for r in rows if r.pipeline == pipeline and r.sweep_value == sweep_value]
    if not matching:
        raise ValueError(f"no rows for pipeline {pipeline!r} at sweep value {sweep_value!r}")
    return sum(r.detected for r in matching) / len(matching)


def pd_summary(rows: list[ResultRow]) -> list[dict]:
    """Detection probability per (pipeline, sweep value), sorted."""
    keys = sorted({(r.pipeline, r.total_bits, r.sweep_name, r.sweep_value) for r in rows})
    out = []
    for pipeline, bits, name, value in keys:
        match = [r for r in rows if r.pipeline == pipeline and r.sweep_value == value]
        detected = sum(r.detected for r in match)
        out.append(
            {
                "pipeline": pipeline,
                "total_bits": bits,
                "sweep_name": name,
                "sweep_value": value,
                "n_trials": len(match),
                "n_detected": detected,
                "pd": detected / len(match),
            }
        )
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv_header(n_sources: int) -> list[str]:
    errs = [f"err_theta_{k + 1}" for k in range(n_sources)]
    return list(CSV_FIXED_COLUMNS) + errs + list(CSV_TAIL_COLUMNS)


def export_csv(rows: list[ResultRow], path: str, n_sources: int) -> None:
    """Write the result table with a stable schema and deterministic bytes.

    The wall_s column is part of the schema but left empty: timings vary
    across runs and would break byte-identical reproduction.  They are
    recorded in the run manifest instead.
    """
    header = _csv_header(n_sources)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in rows:
                errs = list(r.err_theta) + [None] * (n_sources - len(r.err_theta))
                writer.writerow(
                    [
                        SCHEMA_VERSION,
                        r.pipeline,
                        r.total_bits,
                        r.sweep_name,
                        _fmt(float(r.sweep_value)),
                        r.trial,
                        r.seed,
                        _fmt(r.detected),
                    ]
                    + [_fmt(e) for e in errs]
                    + [_fmt(r.nmse_db), ""]
                )
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write results to {path!r}: {exc}") from exc


def parse_csv(path: str) -> tuple[list[ResultRow], int]:
    """Read a result table back; returns (rows, n_sources).

    Round-trips export_csv exactly, except wall_s, which is empty on
    disk and excluded from row equality.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ValueError(f"{path!r} is empty; expected a header row")
            n_sources = sum(1 for c in header if c.startswith("err_theta_"))
            expected = _csv_header(n_sources)
            if header != expected:
                raise ValueError(f"{path!r} columns {header} do not match schema {expected}")
            rows = []
            for rec in reader:
                vals = dict(zip(header, rec))
                if int(vals["schema_version"]) != SCHEMA_VERSION:
                    raise ValueError(f"{path!r} has schema_version {vals['schema_version']}")
                errs = tuple(
                    float(vals[f"err_theta_{k + 1}"])
                    for k in range(n_sources)
                    if vals[f"err_theta_{k + 1}"] != ""
                )
                rows.append(
                    ResultRow(
                        pipeline=vals["pipeline"],
                        total_bits=int(vals["total_bits"]),
                        sweep_name=vals["sweep_name"],
                        sweep_value=float(vals["sweep_value"]),
                        trial=int(vals["trial"]),
                        seed=int(vals["seed"]),
                        detected=vals["detected"] == "true",
                        err_theta=errs,
                        nmse_db=float(vals["nmse_db"]) if vals["nmse_db"] != "" else None,
                        wall_s=None,
                    )
                )
            return rows, n_sources
    except OSError as exc:
        raise OSError(f"cannot read results from {path!r}: {exc}") from exc


def export_pd_summary(rows: list[ResultRow], path: str) -> None:
    """Write per-(pipeline, sweep value) detection probabilities."""
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["schema_version", "pipeline", "total_bits", "sweep_name", "sweep_value", "n_trials", "n_detected", "pd"]
            )
            for entry in pd_summary(rows):
                writer.writerow(
                    [
                        SCHEMA_VERSION,
                        entry["pipeline"],
                        entry["total_bits"],
                        entry["sweep_name"],
                        _fmt(float(entry["sweep_value"])),
                        entry["n_trials"],
                        entry["n_detected"],
                        _fmt(entry["pd"]),
                    ]
                )
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write summary to {path!r}: {exc}") from exc


def export_spectrum(
    cov,
    geometry: ArrayGeometry,
    path: str,
    *,
    k: int,
    grid_step: float = 0.01,
    pipeline: str = "",
    total_bits: int | None = None,
) -> None:
    """Write the MUSIC pseudo-spectrum of one covariance on a grid.

    Values are normalized so the peak sits at 0 dB.
    """
    grid = np.arange(-90.0 + grid_step, 90.0, grid_step)
    ps = pseudo_spectrum(cov, k, geometry, grid)
    ps_db = 10.0 * np.log10(ps / ps.max())
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["schema_version", "pipeline", "total_bits", "theta_deg", "pspec_db"])
            for theta, val in zip(grid, ps_db):
                writer.writerow(
                    [SCHEMA_VERSION, pipeline, "" if total_bits is None else total_bits, _fmt(float(theta)), _fmt(float(val))]
                )
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {path!r}: {exc}") from exc


def _acquire_covariance(config: ExperimentConfig, pipe: PipelineSpec, scene, batch):
    """Covariance estimate plus recovery artifacts for one pipeline."""
    if pipe.kind == "onebit_bif":
        params = ModuloQuantizerParams(
            bits=pipe.bits, modulo_range=default_modulo_range(scene, config.modulo_scale)
        )
        quantized = quantize_batch(batch, params)
        result = run_bif(
            quantized.onebit,
            quantized.modulo,
            BifConfig(quantizer=params, max_iters=config.max_iters, convergence_tol=config.convergence_tol),
        )
        return result.covariance, quantized.modulo, result.recovered
    params = ConventionalAdcParams(bits=pipe.bits, threshold=default_clip_threshold(scene, config.clip_scale))
    digitized = conventional_adc(batch.data, params)
    raw = (digitized @ digitized.conj().T) / digitized.shape[1]
    return ComplexCovariance(0.5 * (raw + raw.conj().T)), digitized, digitized


def export_spectra(config: ExperimentConfig, path: str, *, grid_step: float = 0.01, trial: int = 0) -> None:
    """One pseudo-spectrum per configured pipeline, single CSV.

    Uses the trial's seed from the standard protocol so the spectrum
    matches row `trial` of a run of the same config.
    """
    scene = config.scene_for(None if config.sweep.kind == "single" else config.sweep.values[0])
    batch = simulate_snapshots(scene, config.geometry, seed=config.base_seed + trial)
    grid = np.arange(-90.0 + grid_step, 90.0, grid_step)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["schema_version", "pipeline", "total_bits", "theta_deg", "pspec_db"])
            for pipe in config.pipelines:
                cov, _, _ = _acquire_covariance(config, pipe, scene, batch)
                ps = pseudo_spectrum(cov, config.n_sources, config.geometry, grid)
                ps_db = 10.0 * np.log10(ps / ps.max())
                for theta, val in zip(grid, ps_db):
                    writer.writerow(
                        [SCHEMA_VERSION, pipe.label, pipe.total_bits, _fmt(float(theta)), _fmt(float(val))]
                    )
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write spectra to {path!r}: {exc}") from exc


def export_trace(config: ExperimentConfig, path: str, *, snapshot: int = 15, trial: int = 0) -> None:
    """Per-sensor fold/unfold trace of one snapshot for folded pipelines.

    Writes true signal, modulo samples, and the recovered signal at time
    index ``snapshot`` for every one-bit-aided pipeline in the config.
    """
    folded = [p for p in config.pipelines if p.kind == "onebit_bif"]
    if not folded:
        raise ValueError("config has no onebit_bif pipeline; nothing to trace")
    scene = config.scene_for(None if config.sweep.kind == "single" else config.sweep.values[0])
    if not 0 <= snapshot < scene.snapshots:
        raise ValueError(f"snapshot index {snapshot} outside 0..{scene.snapshots - 1}")
    batch = simulate_snapshots(scene, config.geometry, seed=config.base_seed + trial)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                [
                    "schema_version", "pipeline", "total_bits", "snapshot", "sensor",
                    "g_re", "g_im", "y_re", "y_im", "rec_re", "rec_im",
                ]
            )
            for pipe in folded:
                _, samples, recovered = _acquire_covariance(config, pipe, scene, batch)
                for sensor in range(config.geometry.n_sensors):
                    g = batch.data[sensor, snapshot]
                    y = samples[sensor, snapshot]
                    r = recovered[sensor, snapshot]
                    writer.writerow(
                        [SCHEMA_VERSION, pipe.label, pipe.total_bits, snapshot, sensor]
                        + [_fmt(float(v)) for v in (g.real, g.imag, y.real, y.imag, r.real, r.imag)]
                    )
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write trace to {path!r}: {exc}") from exc


def write_manifest(config: ExperimentConfig, config_path: str, path: str, *, rows: list[ResultRow] | None = None, threads: int = 1) -> None:
    """Record config hash, seeds, versions, and timing diagnostics."""
    try:
        with open(config_path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
    except OSError:
        digest = ""
    walls = [r.wall_s for r in rows or [] if r.wall_s is not None]
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "config_path": os.path.basename(config_path),
        "config_sha256": digest,
        "base_seed": config.base_seed,
        "trials": config.trials,
        "threads": threads,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
        "wall_s_total": round(sum(walls), 3) if walls else None,
        "wall_s_max_trial": round(max(walls), 3) if walls else None,
    }
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write manifest to {path!r}: {exc}") from exc
