"""Shared fixtures: real artifacts generated through the modoa CLI.

plotkit's contract is the CSV schema, so fixtures come from running the
actual producer as a subprocess, never from importing it.
"""

from __future__ import annotations

import os
import subprocess
import sys

import pytest

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
CONFIG_DIR = os.path.join(REPO_ROOT, "configs")


def run_modoa(*args: str) -> subprocess.CompletedProcess:
    """Invoke the modoa CLI in a child process and require success."""
    proc = subprocess.run(
        [sys.executable, "-m", "modoa.cli", *args],
        capture_output=True,
        text=True,
        cwd=REPO_ROOT,
    )
    assert proc.returncode == 0, f"modoa {' '.join(args)} failed:\n{proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def smoke_artifacts(tmp_path_factory) -> dict[str, str]:
    """Results, summary, spectrum, and trace CSVs for the smoke config."""
    out = str(tmp_path_factory.mktemp("smoke"))
    config = os.path.join(CONFIG_DIR, "single_smoke.yaml")
    run_modoa("run", config, "--out", out)
    run_modoa("spectrum", config, "--out", os.path.join(out, "single_smoke_spectrum.csv"))
    run_modoa("trace", config, "--out", os.path.join(out, "single_smoke_trace.csv"), "--snapshot", "15")
    return {
        "results": os.path.join(out, "single_smoke_results.csv"),
        "pd_summary": os.path.join(out, "single_smoke_pd_summary.csv"),
        "spectrum": os.path.join(out, "single_smoke_spectrum.csv"),
        "trace": os.path.join(out, "single_smoke_trace.csv"),
    }


@pytest.fixture(scope="session")
def sweep_artifacts(tmp_path_factory) -> dict[str, str]:
    """A small genuine SNR sweep (reduced trials) through the CLI."""
    out = str(tmp_path_factory.mktemp("sweep"))
    config = os.path.join(CONFIG_DIR, "detection_vs_snr.yaml")
    run_modoa("run", config, "--out", out, "--trials", "2")
    return {
        "results": os.path.join(out, "detection_vs_snr_results.csv"),
        "pd_summary": os.path.join(out, "detection_vs_snr_pd_summary.csv"),
    }
