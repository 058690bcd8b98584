"""Figure emitter for the CSV artifacts written by the modoa CLI."""

from __future__ import annotations

from .figures import (
    KINDS,
    Curve,
    PlotSpec,
    TracePanel,
    load_plot_spec,
    pd_curves,
    render,
    spectrum_curves,
    trace_panels,
)
from .schema import (
    RateEntry,
    ResultRow,
    SpectrumRow,
    TraceRow,
    detection_rates,
    read_pd_summary,
    read_results,
    read_spectrum,
    read_trace,
)

__all__ = [
    "KINDS",
    "Curve",
    "PlotSpec",
    "RateEntry",
    "ResultRow",
    "SpectrumRow",
    "TracePanel",
    "TraceRow",
    "detection_rates",
    "load_plot_spec",
    "pd_curves",
    "read_pd_summary",
    "read_results",
    "read_spectrum",
    "read_trace",
    "render",
    "spectrum_curves",
    "trace_panels",
]

__version__ = "0.1.0"
