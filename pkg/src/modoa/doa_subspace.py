"""Subspace DOA estimation and the detection metric.

Root MUSIC serves uniform linear arrays: the noise-subspace Gram matrix
defines a conjugate-reciprocal polynomial whose on-circle roots mark the
source angles.  Each selected root is polished by a golden-section
search of the continuous null spectrum along the unit circle, which
restores the precision that general-purpose root finding loses on the
double roots an exact covariance produces.  Spectral MUSIC covers
arbitrary geometries with a grid search plus the same local refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import ArrayGeometry, steering_vector
from .covariance import ComplexCovariance

__all__ = [
    "DoaEstimate",
    "root_music",
    "spectral_music",
    "detect",
    "pseudo_spectrum",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DoaEstimate:
    """Estimated source bearings plus the eigenvalue spectrum they came from.

    ``angles_deg`` is sorted ascending; ``shortfall`` marks a spectral
    search that found fewer peaks than sources requested, in which case
    fewer angles are returned.
    """

    angles_deg: tuple[float, ...]
    eigen_spectrum: tuple[float, ...]
    shortfall: bool = False

    def __post_init__(self) -> None:
        ang = tuple(float(a) for a in self.angles_deg)
        if any(not -90.0 <= a <= 90.0 for a in ang):
            raise ValueError("estimated angles must lie in [-90, 90] degrees")
        if list(ang) != sorted(ang):
            raise ValueError("angles must be sorted ascending")
        spec = tuple(float(v) for v in self.eigen_spectrum)
        if any(spec[i] < spec[i + 1] for i in range(len(spec) - 1)):
            raise ValueError("eigen spectrum must be sorted descending")
        object.__setattr__(self, "angles_deg", ang)
        object.__setattr__(self, "eigen_spectrum", spec)


def _as_complex_cov(cov) -> ComplexCovariance:
    if isinstance(cov, ComplexCovariance):
        return cov
    return ComplexCovariance(cov)


def _ordered_eig(cov: ComplexCovariance) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition, eigenvalues descending, phase-fixed vectors."""
    vals, vecs = np.linalg.eigh(cov.matrix)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ref = col[nz[0]]
            vecs[:, j] = col * (np.conj(ref) / abs(ref))
    return vals, vecs


def _noise_projector(cov: ComplexCovariance, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = cov.dim
    if not 1 <= k < n:
        raise ValueError("source count must satisfy 1 <= k < N")
    vals, vecs = _ordered_eig(cov)
    noise = vecs[:, k:]
    proj = noise @ noise.conj().T
    return 0.5 * (proj + proj.conj().T), vals


def _null_poly(proj: np.ndarray) -> np.ndarray:
    """Coefficients (highest degree first) of z^(N-1) * a^H(z) P a(z)."""
    n = proj.shape[0]
    return np.array([np.trace(proj, offset=m) for m in range(n - 1, -n, -1)])


def _null_on_circle(poly: np.ndarray, omega: float) -> float:
    n = (poly.size + 1) // 2
    z = np.exp(1j * omega)
    return float(np.real(np.polyval(poly, z) * z ** (-(n - 1))))


def _golden_min(fun, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def root_music(cov, k: int, geometry: ArrayGeometry) -> DoaEstimate:
    """Root-MUSIC bearing estimates for a uniform linear array.

    Eigendecomposes the covariance, forms the null-spectrum polynomial
    from the noise-subspace Gram matrix, takes the k roots inside the
    unit circle closest to it (ties broken by larger pseudo-spectrum),
    and polishes each along the circle by golden-section search before
    mapping arguments to angles.

    Parameters
    ----------
    cov : ComplexCovariance or ndarray
        Hermitian N x N array covariance.
    k : int
        Number of sources, 1 <= k < N.
    geometry : ArrayGeometry
        Must be a ULA; other layouts are served by spectral_music.

    Returns
    -------
    DoaEstimate
    """
    cov = _as_complex_cov(cov)
    if not geometry.is_ula():
        raise ValueError("root MUSIC requires a ULA; use spectral_music for sparse layouts")
    if cov.dim != geometry.n_sensors:
        raise ValueError("covariance size does not match the geometry")
    proj, vals = _noise_projector(cov, k)
    poly = _null_poly(proj)
    roots = np.roots(poly)
    inside = roots[np.abs(roots) < 1.0]
    if inside.size < k:
        # pathological near-singular case: fall back to all roots
        inside = roots
    dist = np.abs(1.0 - np.abs(inside))
    pspec = np.empty(inside.size)
    for i, r in enumerate(inside):
        val = _null_on_circle(poly, float(np.angle(r)))
        pspec[i] = 1.0 / max(val, np.finfo(float).tiny)
    order = np.lexsort((-pspec, dist))
    sel = inside[order[:k]]

    omegas = np.sort(np.angle(sel))
    refined = []
    for i, w in enumerate(omegas):
        gap = np.inf
        if i > 0:
            gap = min(gap, (w - omegas[i - 1]) / 2)
        if i + 1 < len(omegas):
            gap = min(gap, (omegas[i + 1] - w) / 2)
        width = float(min(2e-3, gap)) if np.isfinite(gap) else 2e-3
        width = max(width, 1e-12)
        refined.append(_golden_min(lambda x: _null_on_circle(poly, x), w - width, w + width, 1e-11))
    theta = np.degrees(np.arcsin(np.clip(np.array(refined) / np.pi, -1.0, 1.0)))
    return DoaEstimate(
        angles_deg=tuple(np.sort(theta)),
        eigen_spectrum=tuple(vals),
    )


def pseudo_spectrum(cov, k: int, geometry: ArrayGeometry, grid_deg: np.ndarray) -> np.ndarray:
    """MUSIC pseudo-spectrum 1 / ||E_n^H a(theta)||^2 on the given grid."""
    cov = _as_complex_cov(cov)
    if cov.dim != geometry.n_sensors:
        raise ValueError("covariance size does not match the geometry")
    vals, vecs = _ordered_eig(cov)
    if not 1 <= k < cov.dim:
        raise ValueError("source count must satisfy 1 <= k < N")
    noise = vecs[:, k:]
    grid = np.asarray(grid_deg, dtype=np.float64)
    idx = np.array(geometry.sensor_indices, dtype=np.float64)
    phases = np.exp(1j * np.pi * np.outer(idx, np.sin(np.radians(grid))))
    null = np.sum(np.abs(noise.conj().T @ phases) ** 2, axis=0)
    return 1.0 / np.maximum(null, np.finfo(float).tiny)


def spectral_music(
    cov,
    k: int,
    geometry: ArrayGeometry,
    grid_step: float = 0.01,
) -> DoaEstimate:
    """Grid-search MUSIC for arbitrary array layouts.

    Evaluates the pseudo-spectrum on a uniform grid over (-90, 90),
    picks the k largest well-separated local maxima, and refines each by
    golden-section search of the null spectrum to 1e-4 degrees.  Fewer
    peaks than k yields a shortfall-flagged estimate with the peaks
    found.
    """
    cov = _as_complex_cov(cov)
    if not grid_step > 0:
        raise ValueError("grid step must be positive")
    proj, vals = _noise_projector(cov, k)
    if cov.dim != geometry.n_sensors:
        raise ValueError("covariance size does not match the geometry")
    grid = np.arange(-90.0 + grid_step, 90.0, grid_step)
    idx = np.array(geometry.sensor_indices, dtype=np.float64)
    phases = np.exp(1j * np.pi * np.outer(idx, np.sin(np.radians(grid))))
    null = np.real(np.einsum("ig,ij,jg->g", phases.conj(), proj, phases))
    ps = 1.0 / np.maximum(null, np.finfo(float).tiny)

    interior = ps[1:-1]
    is_peak = (interior > ps[:-2]) & (interior >= ps[2:])
    peak_idx = np.flatnonzero(is_peak) + 1
    order = peak_idx[np.argsort(-ps[peak_idx], kind="stable")]
    chosen: list[float] = []
    for gi in order:
        theta = grid[gi]
        if all(abs(theta - c) > 2 * grid_step for c in chosen):
            chosen.append(float(theta))
        if len(chosen) == k:
            break

    def null_at(theta_deg: float) -> float:
        a = steering_vector(geometry, theta_deg)
        return float(np.real(a.conj() @ (proj @ a)))

    refined = [
        _golden_min(null_at, t - grid_step, t + grid_step, 1e-4) for t in chosen
    ]
    return DoaEstimate(
        angles_deg=tuple(sorted(refined)),
        eigen_spectrum=tuple(vals),
        shortfall=len(refined) < k,
    )


def detect(true_doas, estimated, tol: float = 0.1) -> bool:
    """True iff every true bearing has an estimate within tol degrees."""
    if not tol > 0:
        raise ValueError("detection tolerance must be positive")
    if isinstance(estimated, DoaEstimate):
        est = np.asarray(estimated.angles_deg, dtype=np.float64)
    else:
        est = np.asarray(estimated, dtype=np.float64)
    truth = np.asarray(true_doas, dtype=np.float64)
    if est.size == 0:
        return False
    return bool(all(np.min(np.abs(est - t)) <= tol for t in truth))
