"""Sensor array geometry, narrowband source scenes, and snapshot simulation.

Sensors sit on a common grid with half-wavelength unit spacing; a geometry
is the set of occupied grid indices.  Sources are far-field, narrowband and
mutually uncorrelated, with circular complex Gaussian amplitudes that are
independent across snapshots.  Simulation uses the counter-based Philox
generator so batches are reproducible from a single integer seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayGeometry",
    "SourceScene",
    "SnapshotBatch",
    "steering_vector",
    "simulate_snapshots",
    "theoretical_covariance",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ArrayGeometry:
    """Linear array described by integer sensor positions.

    Parameters
    ----------
    kind : str
        One of ``"ula"``, ``"coprime"``, ``"nested"``, ``"custom"``.
    sensor_indices : tuple of int
        Strictly increasing, non-negative grid indices in half-wavelength
        units.
    """

    kind: str
    sensor_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = self.sensor_indices
        if len(idx) == 0:
            raise ValueError("geometry needs at least one sensor")
        if any(int(i) != i for i in idx):
            raise ValueError("sensor indices must be integers")
        if any(i < 0 for i in idx):
            raise ValueError("sensor indices must be non-negative")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("sensor indices must be strictly increasing")
        object.__setattr__(self, "sensor_indices", tuple(int(i) for i in idx))

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_indices)

    @classmethod
    def ula(cls, n: int) -> "ArrayGeometry":
        """Uniform linear array occupying indices 0 .. n-1."""
        if n < 1:
            raise ValueError("ULA needs n >= 1")
        return cls("ula", tuple(range(n)))

    @classmethod
    def coprime(cls, p: int, q: int) -> "ArrayGeometry":
        """Coprime array {p*q' : 0 <= q' <= q-1} U {q*p' : 0 <= p' <= p-1}.

        The union has p + q - 1 distinct sensors (index 0 is shared).
        """
        if p < 2 or q < 2:
            raise ValueError("coprime pair must each be >= 2")
        if math.gcd(p, q) != 1:
            raise ValueError(f"({p}, {q}) are not coprime")
        idx = sorted({p * k for k in range(q)} | {q * k for k in range(p)})
        return cls("coprime", tuple(idx))

    @classmethod
    def nested(cls, n1: int, n2: int) -> "ArrayGeometry":
        """Nested array {1..n1} U {m*(n1+1) : 1 <= m <= n2}."""
        if n1 < 1 or n2 < 1:
            raise ValueError("nested levels must each be >= 1")
        idx = sorted(set(range(1, n1 + 1)) | {m * (n1 + 1) for m in range(1, n2 + 1)})
        return cls("nested", tuple(idx))

    @classmethod
    def custom(cls, indices) -> "ArrayGeometry":
        return cls("custom", tuple(int(i) for i in indices))

    def is_ula(self) -> bool:
        """True when the occupied indices are contiguous from zero."""
        return self.sensor_indices == tuple(range(self.n_sensors))


@dataclass(frozen=True)
class SourceScene:
    """Uncorrelated far-field sources plus white sensor noise.

    ``source_powers`` are the per-source variances (sigma_k^2); SNRs are
    defined against ``noise_power`` as 10*log10(power/noise).
    """

    doas_deg: tuple[float, ...]
    source_powers: tuple[float, ...]
    noise_power: float
    snapshots: int

    def __post_init__(self) -> None:
        if len(self.doas_deg) < 1:
            raise ValueError("scene needs at least one source")
        if len(self.doas_deg) != len(self.source_powers):
            raise ValueError("doas_deg and source_powers length mismatch")
        if any(p <= 0 for p in self.source_powers):
            raise ValueError("source powers must be positive")
        if self.noise_power <= 0:
            raise ValueError("noise power must be positive")
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")
        if any(not -90.0 < t < 90.0 for t in self.doas_deg):
            raise ValueError("DOAs must lie strictly inside (-90, 90) degrees")
        if len(set(self.doas_deg)) != len(self.doas_deg):
            raise ValueError("DOAs must be distinct")
        object.__setattr__(self, "doas_deg", tuple(float(t) for t in self.doas_deg))
        object.__setattr__(
            self, "source_powers", tuple(float(p) for p in self.source_powers)
        )

    @property
    def n_sources(self) -> int:
        return len(self.doas_deg)

    @classmethod
    def from_snrs(
        cls,
        doas_deg,
        snrs_db,
        noise_power: float = 1.0,
        snapshots: int = 10_000,
    ) -> "SourceScene":
        """Build a scene from per-source SNRs in dB relative to the noise."""
        powers = tuple(noise_power * 10.0 ** (s / 10.0) for s in snrs_db)
        return cls(tuple(doas_deg), powers, noise_power, snapshots)


@dataclass(frozen=True)
class SnapshotBatch:
    """Complex baseband snapshots, one column per time index."""

    data: np.ndarray
    geometry: ArrayGeometry
    rng_seed: int
    scene: SourceScene | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.complex128)
        if d.ndim != 2 or d.shape[0] != self.geometry.n_sensors:
            raise ValueError("batch must be n_sensors x snapshots")
        object.__setattr__(self, "data", _readonly(d))

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]


def steering_vector(geometry: ArrayGeometry, theta_deg: float) -> np.ndarray:
    """Unit-modulus array response exp(j*pi*d_n*sin(theta)).

    Parameters
    ----------
    geometry : ArrayGeometry
    theta_deg : float
        Angle from broadside in degrees, within [-90, 90].

    Returns
    -------
    ndarray, shape (n_sensors,), complex
    """
    if not -90.0 <= theta_deg <= 90.0:
        raise ValueError(f"angle {theta_deg} outside [-90, 90] degrees")
    d = np.asarray(geometry.sensor_indices, dtype=np.float64)
    return np.exp(1j * np.pi * d * math.sin(math.radians(theta_deg)))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    # Unit-variance circular complex Gaussian: (u + jv)/sqrt(2).
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def simulate_snapshots(
    scene: SourceScene, geometry: ArrayGeometry, seed: int
) -> SnapshotBatch:
    """Draw one batch g(t) = sum_k a(theta_k) x_k(t) + w(t).

    Source amplitudes and noise are circular complex Gaussian, independent
    across snapshots and sources.  The draw order (sources first, then
    noise) is fixed so a seed pins the batch bit-for-bit.
    """
    if geometry.n_sensors < scene.n_sources + 1:
        raise ValueError(
            f"need at least {scene.n_sources + 1} sensors for "
            f"{scene.n_sources} sources, got {geometry.n_sensors}"
        )
    rng = _rng(seed)
    k, t = scene.n_sources, scene.snapshots
    amps = _complex_normal(rng, (k, t))
    amps *= np.sqrt(np.asarray(scene.source_powers))[:, None]
    steer = np.column_stack([steering_vector(geometry, th) for th in scene.doas_deg])
    noise = _complex_normal(rng, (geometry.n_sensors, t))
    noise *= np.sqrt(scene.noise_power)
    data = steer @ amps + noise
    return SnapshotBatch(data=data, geometry=geometry, rng_seed=seed, scene=scene)


def theoretical_covariance(scene: SourceScene, geometry: ArrayGeometry) -> np.ndarray:
    """Exact snapshot covariance A diag(p) A^H + noise_power * I."""
    steer = np.column_stack([steering_vector(geometry, th) for th in scene.doas_deg])
    p = np.asarray(scene.source_powers)
    cov = (steer * p) @ steer.conj().T
    cov += scene.noise_power * np.eye(geometry.n_sensors)
    return 0.5 * (cov + cov.conj().T)
