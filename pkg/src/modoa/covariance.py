"""Covariance estimation from one-bit streams and real/complex conversions.

The normalized covariance of the unquantized signal is recovered from
comparator outputs through the arcsine law: if C-bar is the empirical
covariance of the one-bit samples, sin(pi/2 * Re C-bar) + j*sin(pi/2 *
Im C-bar) estimates the unit-diagonal covariance of the analog input.
Downstream lattice code works on the real-composite form, a 2N x 2N real
symmetric matrix built from the complex covariance blocks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ComplexCovariance",
    "RealCompositeCovariance",
    "onebit_empirical_covariance",
    "arcsin_law",
    "complex_to_real_composite",
    "real_composite_to_complex",
    "psd_project",
]

log = logging.getLogger(__name__)

_HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class ComplexCovariance:
    """Hermitian complex covariance with a real non-negative diagonal."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance must be square")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > _HERMITIAN_TOL * scale:
            raise ValueError("covariance is not Hermitian within tolerance")
        if np.any(m.diagonal().real < -_HERMITIAN_TOL * scale):
            raise ValueError("covariance diagonal must be non-negative")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RealCompositeCovariance:
    """Real symmetric covariance of stacked [Re; Im] coordinates."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance must be square")
        if m.shape[0] % 2 != 0:
            raise ValueError("real-composite covariance has even dimension")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > _HERMITIAN_TOL * scale:
            raise ValueError("covariance is not symmetric within tolerance")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def onebit_empirical_covariance(onebit: np.ndarray) -> ComplexCovariance:
    """Sample covariance (1/T) sum_t h(t) h(t)^H of comparator outputs.

    Entries of ``onebit`` must have unit modulus (I/Q rails +-1/sqrt(2)),
    so the diagonal is pinned to exactly one.
    """
    h = np.asarray(onebit, dtype=np.complex128)
    if h.ndim != 2:
        raise ValueError("one-bit batch must be N x T")
    mag = h.real**2 + h.imag**2
    if np.abs(mag - 1.0).max() > 1e-9:
        raise ValueError("one-bit samples must have unit modulus")
    t = h.shape[1]
    c = (h @ h.conj().T) / t
    c = 0.5 * (c + c.conj().T)
    np.fill_diagonal(c, 1.0)
    return ComplexCovariance(c)


def arcsin_law(cbar: ComplexCovariance | np.ndarray) -> ComplexCovariance:
    """Map a one-bit covariance to the normalized analog covariance.

    Applies sin(pi/2 * x) elementwise to the real and imaginary parts.
    Entries are clamped into [-1, 1] first; anything beyond 1 + 1e-9 in
    magnitude is rejected as not being a one-bit covariance.
    """
    if not isinstance(cbar, ComplexCovariance):
        cbar = ComplexCovariance(cbar)
    m = cbar.matrix
    worst = max(float(np.abs(m.real).max()), float(np.abs(m.imag).max()))
    if worst > 1.0 + 1e-9:
        raise ValueError("entries exceed 1 in magnitude; not a one-bit covariance")
    clipped = int(np.count_nonzero(np.abs(m.real) > 1.0))
    clipped += int(np.count_nonzero(np.abs(m.imag) > 1.0))
    if clipped:
        log.debug("arcsin_law: clamped %d entrie(s) into [-1, 1]", clipped)
    re = np.sin(0.5 * np.pi * np.clip(m.real, -1.0, 1.0))
    im = np.sin(0.5 * np.pi * np.clip(m.imag, -1.0, 1.0))
    out = re + 1j * im
    out = 0.5 * (out + out.conj().T)
    np.fill_diagonal(out, np.sin(0.5 * np.pi * np.clip(m.diagonal().real, -1.0, 1.0)))
    return ComplexCovariance(out)


def complex_to_real_composite(
    cov: ComplexCovariance | np.ndarray,
) -> RealCompositeCovariance:
    """Block map C -> [[Re C, -Im C], [Im C, Re C]].

    The output is 2N x 2N with the eigenvalues of C doubled in
    multiplicity.
    """
    if not isinstance(cov, ComplexCovariance):
        cov = ComplexCovariance(cov)
    c = cov.matrix
    re, im = c.real, c.imag
    top = np.hstack([re, -im])
    bot = np.hstack([im, re])
    return RealCompositeCovariance(np.vstack([top, bot]))


def real_composite_to_complex(
    cov: RealCompositeCovariance | np.ndarray,
) -> ComplexCovariance:
    """Inverse block map, averaging the redundant blocks."""
    if not isinstance(cov, RealCompositeCovariance):
        cov = RealCompositeCovariance(cov)
    m = cov.matrix
    n = m.shape[0] // 2
    a, b = m[:n, :n], m[n:, n:]
    c, d = m[n:, :n], m[:n, n:]
    re = 0.5 * (a + b)
    im = 0.5 * (c - d)
    out = re + 1j * im
    return ComplexCovariance(0.5 * (out + out.conj().T))


def psd_project(
    cov: RealCompositeCovariance | np.ndarray, floor_scale: float = 1e-8
) -> RealCompositeCovariance:
    """Clip eigenvalues below floor_scale * max(eig) up to that floor.

    Keeps downstream Cholesky factorizations well posed when a covariance
    estimate is indefinite or rank-deficient.
    """
    if not isinstance(cov, RealCompositeCovariance):
        cov = RealCompositeCovariance(cov)
    m = cov.matrix
    vals, vecs = np.linalg.eigh(m)
    top = float(vals[-1])
    if top <= 0:
        raise ValueError("covariance has no positive eigenvalue to anchor the floor")
    floor = floor_scale * top
    if vals[0] >= floor:
        return cov
    vals = np.maximum(vals, floor)
    out = (vecs * vals) @ vecs.T
    return RealCompositeCovariance(0.5 * (out + out.T))
