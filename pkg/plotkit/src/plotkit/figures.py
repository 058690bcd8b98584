"""Figure kinds and rendering on top of the schema readers.

Every figure is built from plain extracted data arrays (`pd_curves`,
`spectrum_curves`, `trace_panels`) so tests can assert on the numbers
instead of pixels.  Rendering uses the object-oriented matplotlib API
with a pinned style and PNG metadata, which keeps the output bytes a
pure function of the spec and its inputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml
from matplotlib.figure import Figure

from .schema import (
    ResultRow,
    SpectrumRow,
    TraceRow,
    detection_rates,
    read_results,
    read_spectrum,
    read_trace,
)

KINDS = ("pd_vs_snr", "pd_vs_snapshots", "spectrum", "snapshot_trace")
_PD_SWEEPS = {"pd_vs_snr": "snr2", "pd_vs_snapshots": "snapshots"}
_PNG_METADATA = {"Software": "plotkit"}
_DPI = 150


@dataclass(frozen=True)
class PlotSpec:
    """What to draw, from which CSV files, into which image.

    Parameters
    ----------
    kind : str
        One of ``pd_vs_snr``, ``pd_vs_snapshots``, ``spectrum``,
        ``snapshot_trace``.
    inputs : tuple of str
        CSV paths.  The detection-probability kinds accept several
        results files and overlay them (labels gain the file stem);
        ``spectrum`` and ``snapshot_trace`` take exactly one file.
    out : str
        Output image path (PNG).
    title : str
        Optional figure title.
    logx : bool or None
        Log-scale x axis; default is on for ``pd_vs_snapshots`` and off
        otherwise.
    """

    kind: str
    inputs: tuple[str, ...]
    out: str
    title: str = ""
    logx: bool | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        inputs = tuple(self.inputs)
        if not inputs:
            raise ValueError("plot spec needs at least one input CSV")
        if self.kind not in _PD_SWEEPS and len(inputs) != 1:
            raise ValueError(f"figure kind {self.kind!r} takes exactly one input CSV")
        if not self.out:
            raise ValueError("plot spec needs an output path")
        object.__setattr__(self, "inputs", inputs)

    @property
    def log_x(self) -> bool:
        return self.kind == "pd_vs_snapshots" if self.logx is None else self.logx


@dataclass(frozen=True)
class Curve:
    """One plotted line: label plus x/y arrays."""

    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]


@dataclass(frozen=True)
class TracePanel:
    """One pipeline's snapshot trace: true, folded, and recovered rails."""

    label: str
    snapshot: int
    sensors: tuple[int, ...]
    g_re: tuple[float, ...] = field(repr=False)
    y_re: tuple[float, ...] = field(repr=False)
    rec_re: tuple[float, ...] = field(repr=False)


def load_plot_spec(path: str) -> PlotSpec:
    """Read a YAML plot spec; relative paths resolve against the file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ValueError(f"{path!r} is not valid YAML: {exc}") from exc
    except OSError as exc:
        raise OSError(f"cannot read plot spec {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path!r} must hold a mapping of plot spec fields")
    for key in ("kind", "inputs", "out"):
        if key not in doc:
            raise ValueError(f"plot spec {path!r} is missing {key!r}")
    base = os.path.dirname(os.path.abspath(path))
    inputs = doc["inputs"]
    if isinstance(inputs, str):
        inputs = [inputs]
    resolved = tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in inputs)
    out = doc["out"]
    out = out if os.path.isabs(out) else os.path.join(base, out)
    known = {"kind", "inputs", "out", "title", "logx"}
    extra = sorted(set(doc) - known)
    if extra:
        raise ValueError(f"plot spec {path!r} has unknown field(s) {', '.join(extra)}")
    return PlotSpec(
        kind=doc["kind"],
        inputs=resolved,
        out=out,
        title=doc.get("title", ""),
        logx=doc.get("logx"),
    )


def _curve_label(pipeline: str, total_bits: int, prefix: str) -> str:
    return f"{prefix}{pipeline} ({total_bits} bits)"


def pd_curves(rows: list[ResultRow], sweep_name: str, prefix: str = "") -> list[Curve]:
    """Detection probability versus sweep value, one curve per pipeline.

    Rates come from `detection_rates`, i.e. they are recomputed from the
    raw rows rather than read from any pre-aggregated file.
    """
    seen = {r.sweep_name for r in rows}
    if seen != {sweep_name}:
        raise ValueError(
            f"results sweep {', '.join(sorted(seen))!s} does not match figure sweep {sweep_name!r}"
        )
    rates = detection_rates(rows)
    by_pipe: dict[str, list] = {}
    for entry in rates:
        by_pipe.setdefault(entry.pipeline, []).append(entry)
    curves = []
    for pipeline in sorted(by_pipe):
        entries = sorted(by_pipe[pipeline], key=lambda e: e.sweep_value)
        curves.append(
            Curve(
                label=_curve_label(pipeline, entries[0].total_bits, prefix),
                x=tuple(e.sweep_value for e in entries),
                y=tuple(e.pd for e in entries),
            )
        )
    return curves


def spectrum_curves(rows: list[SpectrumRow]) -> list[Curve]:
    """Pseudo-spectrum in dB versus angle, one curve per pipeline."""
    by_pipe: dict[str, list[SpectrumRow]] = {}
    for row in rows:
        by_pipe.setdefault(row.pipeline, []).append(row)
    curves = []
    for pipeline in sorted(by_pipe):
        entries = by_pipe[pipeline]
        bits = entries[0].total_bits
        label = pipeline if bits is None else _curve_label(pipeline, bits, "")
        curves.append(
            Curve(
                label=label,
                x=tuple(e.theta_deg for e in entries),
                y=tuple(e.pspec_db for e in entries),
            )
        )
    return curves


def trace_panels(rows: list[TraceRow]) -> list[TracePanel]:
    """Per-pipeline overlays of true, folded, and recovered rails."""
    by_pipe: dict[str, list[TraceRow]] = {}
    for row in rows:
        by_pipe.setdefault(row.pipeline, []).append(row)
    panels = []
    for pipeline in sorted(by_pipe):
        entries = sorted(by_pipe[pipeline], key=lambda e: e.sensor)
        panels.append(
            TracePanel(
                label=_curve_label(pipeline, entries[0].total_bits, ""),
                snapshot=entries[0].snapshot,
                sensors=tuple(e.sensor for e in entries),
                g_re=tuple(e.g_re for e in entries),
                y_re=tuple(e.y_re for e in entries),
                rec_re=tuple(e.rec_re for e in entries),
            )
        )
    return panels


def _input_prefix(spec: PlotSpec, path: str) -> str:
    if len(spec.inputs) == 1:
        return ""
    stem = os.path.splitext(os.path.basename(path))[0]
    return f"{stem}: "


def _render_pd(spec: PlotSpec, fig: Figure) -> None:
    sweep = _PD_SWEEPS[spec.kind]
    ax = fig.subplots()
    for path in spec.inputs:
        for curve in pd_curves(read_results(path), sweep, _input_prefix(spec, path)):
            ax.plot(curve.x, curve.y, marker="o", label=curve.label)
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel("snapshots" if sweep == "snapshots" else "swept source SNR (dB)")
    ax.set_ylabel("detection probability")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend()


def _render_spectrum(spec: PlotSpec, fig: Figure) -> None:
    ax = fig.subplots()
    for curve in spectrum_curves(read_spectrum(spec.inputs[0])):
        ax.plot(curve.x, curve.y, label=curve.label, linewidth=0.9)
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel("angle (deg)")
    ax.set_ylabel("pseudo-spectrum (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()


def _render_trace(spec: PlotSpec, fig: Figure) -> None:
    panels = trace_panels(read_trace(spec.inputs[0]))
    axes = fig.subplots(len(panels), 1, squeeze=False)[:, 0]
    for ax, panel in zip(axes, panels):
        ax.plot(panel.sensors, panel.g_re, label="true", linewidth=1.2)
        ax.plot(panel.sensors, panel.y_re, label="folded samples", linestyle=":", marker=".")
        ax.plot(panel.sensors, panel.rec_re, label="recovered", linestyle="--")
        ax.set_ylabel("in-phase rail")
        ax.set_title(f"{panel.label}, snapshot {panel.snapshot}", fontsize="medium")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")
    axes[-1].set_xlabel("sensor index")


def render(spec: PlotSpec) -> str:
    """Render one figure from a plot spec.

    Parameters
    ----------
    spec : PlotSpec
        Figure kind, input CSV path(s), and output image path.

    Returns
    -------
    str
        The output path, after the PNG has been written.  Output bytes
        are deterministic: fixed style, fixed dpi, pinned metadata.

    Raises
    ------
    ValueError
        If an input does not parse against the harness schema or holds
        no data rows.
    """
    fig = Figure(figsize=(7.0, 4.5) if spec.kind != "snapshot_trace" else (7.0, 5.5))
    if spec.kind in _PD_SWEEPS:
        _render_pd(spec, fig)
    elif spec.kind == "spectrum":
        _render_spectrum(spec, fig)
    else:
        _render_trace(spec, fig)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    out_dir = os.path.dirname(os.path.abspath(spec.out))
    os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.out, dpi=_DPI, format="png", metadata=dict(_PNG_METADATA))
    return spec.out
