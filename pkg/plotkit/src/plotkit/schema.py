"""Readers for the CSV artifacts the modoa harness writes.

Each reader validates the header against the documented schema before
parsing, names any missing column in its error, and returns plain typed
records.  Detection probabilities are always recomputed from raw result
rows with the same integer-count division the harness uses, so the
numbers here match its summaries exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

SCHEMA_VERSION = 1

RESULTS_HEAD = (
    "schema_version",
    "pipeline",
    "total_bits",
    "sweep_name",
    "sweep_value",
    "trial",
    "seed",
    "detected",
)
RESULTS_TAIL = ("nmse_db", "wall_s")
PD_SUMMARY_COLUMNS = (
    "schema_version",
    "pipeline",
    "total_bits",
    "sweep_name",
    "sweep_value",
    "n_trials",
    "n_detected",
    "pd",
)
SPECTRUM_COLUMNS = ("schema_version", "pipeline", "total_bits", "theta_deg", "pspec_db")
TRACE_COLUMNS = (
    "schema_version",
    "pipeline",
    "total_bits",
    "snapshot",
    "sensor",
    "g_re",
    "g_im",
    "y_re",
    "y_im",
    "rec_re",
    "rec_im",
)


@dataclass(frozen=True)
class ResultRow:
    """One (pipeline, sweep value, trial) outcome."""

    pipeline: str
    total_bits: int
    sweep_name: str
    sweep_value: float
    trial: int
    seed: int
    detected: bool
    err_theta: tuple[float, ...]
    nmse_db: float | None


@dataclass(frozen=True)
class RateEntry:
    """Detection probability for one (pipeline, sweep value) cell."""

    pipeline: str
    total_bits: int
    sweep_name: str
    sweep_value: float
    n_trials: int
    n_detected: int
    pd: float


@dataclass(frozen=True)
class SpectrumRow:
    pipeline: str
    total_bits: int | None
    theta_deg: float
    pspec_db: float


@dataclass(frozen=True)
class TraceRow:
    pipeline: str
    total_bits: int
    snapshot: int
    sensor: int
    g_re: float
    g_im: float
    y_re: float
    y_im: float
    rec_re: float
    rec_im: float


def _read_table(path: str, required: tuple[str, ...]) -> tuple[list[str], list[dict[str, str]]]:
    """Header-checked raw records; names every missing column."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ValueError(f"{path!r} is empty; expected a header row")
            missing = [c for c in required if c not in header]
            if missing:
                raise ValueError(f"{path!r} missing column(s) {', '.join(repr(c) for c in missing)}")
            records = [dict(zip(header, rec)) for rec in reader]
    except OSError as exc:
        raise OSError(f"cannot read {path!r}: {exc}") from exc
    for rec in records:
        if int(rec["schema_version"]) != SCHEMA_VERSION:
            raise ValueError(
                f"{path!r} has schema_version {rec['schema_version']}; this reader supports {SCHEMA_VERSION}"
            )
    return header, records


def read_results(path: str) -> list[ResultRow]:
    """Parse a results table.

    Parameters
    ----------
    path : str
        A ``<name>_results.csv`` written by ``modoa run``.

    Returns
    -------
    list of ResultRow
        One record per row; per-source angle errors keep their column
        order, and blank errors (failed trials) become empty tuples.

    Raises
    ------
    ValueError
        On a missing column, a schema version mismatch, or a table that
        has no trials at all.
    """
    header, records = _read_table(path, RESULTS_HEAD + RESULTS_TAIL)
    err_cols = [c for c in header if c.startswith("err_theta_")]
    expected = list(RESULTS_HEAD) + err_cols + list(RESULTS_TAIL)
    if header != expected:
        raise ValueError(f"{path!r} columns {header} are not in schema order {expected}")
    if not records:
        raise ValueError(f"{path!r} has no trials (header-only table)")
    rows = []
    for rec in records:
        errs = tuple(float(rec[c]) for c in err_cols if rec[c] != "")
        rows.append(
            ResultRow(
                pipeline=rec["pipeline"],
                total_bits=int(rec["total_bits"]),
                sweep_name=rec["sweep_name"],
                sweep_value=float(rec["sweep_value"]),
                trial=int(rec["trial"]),
                seed=int(rec["seed"]),
                detected=rec["detected"] == "true",
                err_theta=errs,
                nmse_db=float(rec["nmse_db"]) if rec["nmse_db"] != "" else None,
            )
        )
    return rows


def detection_rates(rows: list[ResultRow]) -> list[RateEntry]:
    """Recompute detection probability per (pipeline, sweep value).

    Uses the same count-and-divide the harness applies to raw rows, so
    the returned ``pd`` values equal its summary file bit for bit.
    """
    if not rows:
        raise ValueError("no result rows to aggregate")
    cells: dict[tuple[str, float], list[ResultRow]] = {}
    for row in rows:
        cells.setdefault((row.pipeline, row.sweep_value), []).append(row)
    entries = []
    for (pipeline, value), members in sorted(cells.items()):
        n_detected = sum(m.detected for m in members)
        entries.append(
            RateEntry(
                pipeline=pipeline,
                total_bits=members[0].total_bits,
                sweep_name=members[0].sweep_name,
                sweep_value=value,
                n_trials=len(members),
                n_detected=n_detected,
                pd=n_detected / len(members),
            )
        )
    return entries


def read_pd_summary(path: str) -> list[RateEntry]:
    """Parse a ``<name>_pd_summary.csv`` into rate entries."""
    header, records = _read_table(path, PD_SUMMARY_COLUMNS)
    if list(header) != list(PD_SUMMARY_COLUMNS):
        raise ValueError(f"{path!r} columns {header} do not match {list(PD_SUMMARY_COLUMNS)}")
    return [
        RateEntry(
            pipeline=rec["pipeline"],
            total_bits=int(rec["total_bits"]),
            sweep_name=rec["sweep_name"],
            sweep_value=float(rec["sweep_value"]),
            n_trials=int(rec["n_trials"]),
            n_detected=int(rec["n_detected"]),
            pd=float(rec["pd"]),
        )
        for rec in records
    ]


def read_spectrum(path: str) -> list[SpectrumRow]:
    """Parse a pseudo-spectrum table (one or more pipelines on a grid)."""
    header, records = _read_table(path, SPECTRUM_COLUMNS)
    if list(header) != list(SPECTRUM_COLUMNS):
        raise ValueError(f"{path!r} columns {header} do not match {list(SPECTRUM_COLUMNS)}")
    if not records:
        raise ValueError(f"{path!r} has no rows")
    return [
        SpectrumRow(
            pipeline=rec["pipeline"],
            total_bits=int(rec["total_bits"]) if rec["total_bits"] != "" else None,
            theta_deg=float(rec["theta_deg"]),
            pspec_db=float(rec["pspec_db"]),
        )
        for rec in records
    ]


def read_trace(path: str) -> list[TraceRow]:
    """Parse a per-sensor fold/unfold trace of one snapshot."""
    header, records = _read_table(path, TRACE_COLUMNS)
    if list(header) != list(TRACE_COLUMNS):
        raise ValueError(f"{path!r} columns {header} do not match {list(TRACE_COLUMNS)}")
    if not records:
        raise ValueError(f"{path!r} has no rows")
    return [
        TraceRow(
            pipeline=rec["pipeline"],
            total_bits=int(rec["total_bits"]),
            snapshot=int(rec["snapshot"]),
            sensor=int(rec["sensor"]),
            g_re=float(rec["g_re"]),
            g_im=float(rec["g_im"]),
            y_re=float(rec["y_re"]),
            y_im=float(rec["y_im"]),
            rec_re=float(rec["rec_re"]),
            rec_im=float(rec["rec_im"]),
        )
        for rec in records
    ]
