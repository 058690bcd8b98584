"""Front-end ADC models: one-bit, modulo (self-reset), and clipping ADCs.

All quantizers act separately on the I and Q rails of each sensor.  The
modulo ADC folds its input into [-lambda, lambda) before uniform midpoint
quantization, so it never saturates; the conventional ADC clips at a fixed
threshold instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .array_model import SnapshotBatch, SourceScene

__all__ = [
    "ModuloQuantizerParams",
    "ConventionalAdcParams",
    "QuantizedBatch",
    "modulo_fold",
    "uniform_quantize",
    "onebit_sample",
    "modulo_sample",
    "conventional_adc",
    "quantize_batch",
    "default_modulo_range",
    "default_clip_threshold",
]

log = logging.getLogger(__name__)

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class ModuloQuantizerParams:
    """Modulo ADC with ``bits`` bits per rail over [-modulo_range, modulo_range)."""

    bits: int
    modulo_range: float

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise ValueError("modulo quantizer needs bits >= 1")
        if not self.modulo_range > 0:
            raise ValueError("modulo range must be positive")

    @property
    def levels(self) -> int:
        return 2**self.bits

    @property
    def step(self) -> float:
        return 2.0 * self.modulo_range / self.levels


@dataclass(frozen=True)
class ConventionalAdcParams:
    """Uniform clipping ADC with ``bits`` bits per rail, saturating at ``threshold``."""

    bits: int
    threshold: float

    def __post_init__(self) -> None:
        if self.bits < 2:
            raise ValueError("conventional ADC needs bits >= 2")
        if not self.threshold > 0:
            raise ValueError("clip threshold must be positive")

    @property
    def levels(self) -> int:
        return 2**self.bits


@dataclass(frozen=True)
class QuantizedBatch:
    """One-bit and modulo observations of the same underlying batch."""

    onebit: np.ndarray
    modulo: np.ndarray
    params: ModuloQuantizerParams

    def __post_init__(self) -> None:
        ob = np.asarray(self.onebit, dtype=np.complex128)
        mo = np.asarray(self.modulo, dtype=np.complex128)
        if ob.shape != mo.shape or ob.ndim != 2:
            raise ValueError("one-bit and modulo batches must share an N x T shape")
        ob.flags.writeable = False
        mo.flags.writeable = False
        object.__setattr__(self, "onebit", ob)
        object.__setattr__(self, "modulo", mo)


def modulo_fold(z, fold_range: float):
    """Centered fold of real input into [-fold_range, fold_range).

    Computes z - 2*L*floor(z/(2*L) + 1/2) with L = fold_range.  Inputs
    already inside the window pass through bit-exactly; the output interval
    is half-open (an input of exactly +L maps to -L).
    """
    if not fold_range > 0:
        raise ValueError("fold range must be positive")
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("modulo fold requires finite input")
    width = 2.0 * fold_range
    out = z - width * np.floor(z / width + 0.5)
    # Guard the window edges against rounding in the division above.
    out = np.where(out >= fold_range, out - width, out)
    out = np.where(out < -fold_range, out + width, out)
    inside = (z >= -fold_range) & (z < fold_range)
    out = np.where(inside, z, out)
    return out if out.ndim else float(out)


def uniform_quantize(z, bits: int, fold_range: float):
    """Midpoint quantizer on [-L, L) with 2**bits equal half-open cells.

    The l-th cell [-L + 2*L*l/D, -L + 2*L*(l+1)/D) reproduces its midpoint
    -L + (2*l + 1)*L/D, so outputs lie strictly inside (-L, L) and the
    error never exceeds L/D.
    """
    if bits < 1:
        raise ValueError("quantizer needs bits >= 1")
    if not fold_range > 0:
        raise ValueError("quantizer range must be positive")
    z = np.asarray(z, dtype=np.float64)
    if np.any(z < -fold_range) or np.any(z >= fold_range):
        raise ValueError("input outside [-range, range)")
    d = 2**bits
    cell = np.floor((z + fold_range) * (d / (2.0 * fold_range)))
    cell = np.clip(cell, 0, d - 1)
    out = -fold_range + (2.0 * cell + 1.0) * (fold_range / d)
    return out if out.ndim else float(out)


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) := +1 so the comparator output is always +-1.
    return np.where(x >= 0.0, 1.0, -1.0)


def onebit_sample(batch: np.ndarray) -> np.ndarray:
    """Per-rail comparator output (sign(Re) + j*sign(Im))/sqrt(2).

    Every entry has unit modulus.  Exact zeros on a rail resolve to +1 and
    are counted in a debug log line.
    """
    g = np.asarray(batch, dtype=np.complex128)
    zeros = int(np.count_nonzero(g.real == 0.0) + np.count_nonzero(g.imag == 0.0))
    if zeros:
        log.debug("onebit_sample: %d exact-zero rail(s) resolved to +1", zeros)
    return (_sign(g.real) + 1j * _sign(g.imag)) * _INV_SQRT2


def modulo_sample(batch: np.ndarray, params: ModuloQuantizerParams) -> np.ndarray:
    """Fold each rail into the modulo window, then midpoint-quantize it."""
    g = np.asarray(batch, dtype=np.complex128)
    lam, bits = params.modulo_range, params.bits
    re = uniform_quantize(modulo_fold(g.real, lam), bits, lam)
    im = uniform_quantize(modulo_fold(g.imag, lam), bits, lam)
    return re + 1j * im


def conventional_adc(batch: np.ndarray, params: ConventionalAdcParams) -> np.ndarray:
    """Clip each rail to [-threshold, threshold], then midpoint-quantize it."""
    g = np.asarray(batch, dtype=np.complex128)
    gam = params.threshold
    top = np.nextafter(gam, -np.inf)  # keep the quantizer domain half-open
    re = uniform_quantize(np.clip(g.real, -gam, top), params.bits, gam)
    im = uniform_quantize(np.clip(g.imag, -gam, top), params.bits, gam)
    return re + 1j * im


def quantize_batch(batch: SnapshotBatch, params: ModuloQuantizerParams) -> QuantizedBatch:
    """Convenience: one-bit and modulo observations of one simulated batch."""
    return QuantizedBatch(
        onebit=onebit_sample(batch.data),
        modulo=modulo_sample(batch.data, params),
        params=params,
    )


def default_modulo_range(scene: SourceScene, scale: float = 1.0) -> float:
    """Scale times one per-rail signal standard deviation sqrt(sum(p_k)/2)."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    return scale * float(np.sqrt(sum(scene.source_powers) / 2.0))


def default_clip_threshold(scene: SourceScene, scale: float = 4.0) -> float:
    """Scale times one per-rail signal standard deviation; default four."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    return scale * float(np.sqrt(sum(scene.source_powers) / 2.0))
