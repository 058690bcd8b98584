"""One-bit-aided blind integer forcing recovery of folded snapshots.

The acquisition front end keeps, per sensor and time instant, only a
one-bit sign sample and a B-bit quantized modulo sample.  Recovery runs
in four stages: (1) seed a normalized covariance from the one-bit stream
via the arcsine law, (2) solve for an integer-forcing matrix and unfold
every snapshot, (3) keep the snapshots whose recovered signs reproduce
the one-bit stream exactly and re-estimate the covariance from them,
(4) iterate solve/decode/filter until the covariance estimate stops
moving, then assemble the complex covariance for subspace DOA methods.

The arcsine seed is deliberately coarse: its nonlinear distortion leaves
the initial unfold wrapping on most snapshots.  The sign filter is what
pulls the estimate into the signal scale over a few iterations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .covariance import (
    ComplexCovariance,
    RealCompositeCovariance,
    arcsin_law,
    complex_to_real_composite,
    onebit_empirical_covariance,
    psd_project,
)
from .lattice_if import if_decode, solve_if_matrix, stack_real, unstack_real
from .quantizers import ModuloQuantizerParams

__all__ = [
    "BifConfig",
    "BifResult",
    "BifInitError",
    "sign_consistency_set",
    "refine_covariance",
    "run_bif",
    "nmse_db",
]

log = logging.getLogger(__name__)

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class BifInitError(RuntimeError):
    """Raised when no snapshot survives the initial sign-consistency filter.

    Usually means the fold window is far too small relative to the signal,
    so the initial unfold scrambles every snapshot.
    """


@dataclass(frozen=True)
class BifConfig:
    """Iteration controls and the modulo quantizer the samples came from."""

    quantizer: ModuloQuantizerParams
    max_iters: int = 10
    convergence_tol: float = 1e-4

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")


@dataclass(frozen=True)
class BifResult:
    """Artifacts of a blind integer-forcing run.

    ``consistent_set`` holds the sorted time indices whose recovered
    signs match the one-bit stream; ``recovered`` keeps every snapshot,
    consistent or not, for diagnostics.  ``per_iteration_objective``
    starts with the initialization solve's objective (computed on the
    normalized arcsine covariance, hence on a different scale than the
    signal-scale iterates that follow).
    """

    covariance: ComplexCovariance
    consistent_set: np.ndarray
    iterations_run: int
    recovered: np.ndarray
    per_iteration_objective: tuple[float, ...] = field(repr=False)

    def __post_init__(self) -> None:
        idx = np.asarray(self.consistent_set, dtype=np.int64)
        rec = np.asarray(self.recovered, dtype=np.complex128)
        if rec.ndim != 2:
            raise ValueError("recovered batch must be an N x T matrix")
        if idx.ndim != 1 or (idx.size and not (0 <= idx.min() and idx.max() < rec.shape[1])):
            raise ValueError("consistent set indices out of range")
        idx.flags.writeable = False
        rec.flags.writeable = False
        object.__setattr__(self, "consistent_set", idx)
        object.__setattr__(self, "recovered", rec)
        object.__setattr__(
            self, "per_iteration_objective", tuple(float(v) for v in self.per_iteration_objective)
        )


def sign_consistency_set(recovered: np.ndarray, onebit_stacked: np.ndarray) -> np.ndarray:
    """Time indices where recovered signs reproduce the one-bit stream.

    A snapshot t is kept iff sign(recovered[i, t]) / sqrt(2) equals
    onebit_stacked[i, t] for every stacked component i, with sign(0)
    taken as +1.  The comparison is exact: both sides are +-1/sqrt(2)
    floats produced by the same expression.

    Parameters
    ----------
    recovered : ndarray
        Real stacked 2N x T matrix of unfolded snapshots.
    onebit_stacked : ndarray
        Real stacked 2N x T matrix of one-bit samples (+-1/sqrt(2)).

    Returns
    -------
    ndarray of int64
        Sorted indices of the consistent snapshots.
    """
    rec = np.asarray(recovered, dtype=np.float64)
    one = np.asarray(onebit_stacked, dtype=np.float64)
    if rec.shape != one.shape:
        raise ValueError("recovered and one-bit matrices must have equal shapes")
    signs = np.where(rec >= 0, _INV_SQRT2, -_INV_SQRT2)
    keep = np.all(signs == one, axis=0)
    return np.flatnonzero(keep).astype(np.int64)


def refine_covariance(recovered: np.ndarray, t_set: np.ndarray) -> RealCompositeCovariance:
    """Empirical second moment of the consistent recovered snapshots.

    Computes (1/|T|) * sum over t in T of g(t) g(t)^T, symmetrized.
    """
    rec = np.asarray(recovered, dtype=np.float64)
    idx = np.asarray(t_set, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("consistency set is empty; nothing to estimate from")
    sel = rec[:, idx]
    cov = (sel @ sel.T) / idx.size
    return RealCompositeCovariance(0.5 * (cov + cov.T))


def nmse_db(estimate: np.ndarray, truth: np.ndarray, floor_db: float = -200.0) -> float:
    """Normalized mean squared error in dB, floored for exact matches."""
    est = np.asarray(estimate)
    tru = np.asarray(truth)
    if est.shape != tru.shape:
        raise ValueError("estimate and truth must have equal shapes")
    denom = float(np.linalg.norm(tru) ** 2)
    if denom == 0.0:
        raise ValueError("truth is identically zero")
    num = float(np.linalg.norm(est - tru) ** 2)
    if num == 0.0:
        return floor_db
    return max(float(10.0 * np.log10(num / denom)), floor_db)


def run_bif(
    onebit: np.ndarray,
    modulo: np.ndarray,
    config: BifConfig,
    *,
    init_covariance: RealCompositeCovariance | None = None,
) -> BifResult:
    """Recover folded snapshots by one-bit-seeded blind integer forcing.

    Parameters
    ----------
    onebit : ndarray
        Complex N x T one-bit samples, entries (+-1 +- 1j)/sqrt(2).
    modulo : ndarray
        Complex N x T B-bit modulo samples from the same acquisition.
    config : BifConfig
        Quantizer parameters and iteration controls.
    init_covariance : RealCompositeCovariance, optional
        Replaces the arcsine-law seed, e.g. with the true covariance for
        oracle studies.  The initialization solve still omits the
        quantization-noise term.

    Returns
    -------
    BifResult

    Raises
    ------
    BifInitError
        If no snapshot is sign-consistent after the initial unfold.
    """
    h = np.asarray(onebit, dtype=np.complex128)
    y = np.asarray(modulo, dtype=np.complex128)
    if h.shape != y.shape or h.ndim != 2:
        raise ValueError("one-bit and modulo batches must be equal-shaped N x T matrices")
    lam = config.quantizer.modulo_range
    levels = config.quantizer.levels
    quant_var = lam * lam / (3.0 * levels * levels)
    two_n = 2 * h.shape[0]

    hbar = stack_real(h)
    ybar = stack_real(y)

    if init_covariance is None:
        seed_cov = complex_to_real_composite(arcsin_law(onebit_empirical_covariance(h)))
    else:
        seed_cov = init_covariance
        if seed_cov.dim != two_n:
            raise ValueError("init covariance dimension does not match the batch")

    objectives: list[float] = []
    if_matrix = solve_if_matrix(psd_project(seed_cov))
    objectives.append(if_matrix.objective)
    recovered = if_decode(ybar, if_matrix, lam)
    t_set = sign_consistency_set(recovered, hbar)
    if t_set.size == 0:
        raise BifInitError(
            "no snapshot is sign-consistent after the initial unfold "
            f"(fold range {lam:.4g}, {levels} levels, peak folded magnitude "
            f"{float(np.abs(ybar).max()):.4g}); the fold range is likely far "
            "too small for the signal"
        )

    cov_r = refine_covariance(recovered, t_set)
    iterations = 0
    for _ in range(config.max_iters):
        if t_set.size < two_n:
            log.warning(
                "consistency set has %d snapshots for dimension %d; "
                "covariance estimate is rank-deficient", t_set.size, two_n
            )
        if_matrix = solve_if_matrix(psd_project(cov_r), quant_var)
        objectives.append(if_matrix.objective)
        candidate = if_decode(ybar, if_matrix, lam)
        candidate_set = sign_consistency_set(candidate, hbar)
        iterations += 1
        if candidate_set.size == 0:
            log.warning("consistency set emptied at iteration %d; keeping previous estimate", iterations)
            break
        recovered = candidate
        t_set = candidate_set
        cov_next = refine_covariance(recovered, t_set)
        rel = np.linalg.norm(cov_next.matrix - cov_r.matrix, "fro") / np.linalg.norm(
            cov_r.matrix, "fro"
        )
        cov_r = cov_next
        if rel < config.convergence_tol:
            break

    complex_rec = unstack_real(recovered)
    sel = complex_rec[:, t_set]
    cov = (sel @ sel.conj().T) / t_set.size
    cov = 0.5 * (cov + cov.conj().T)
    return BifResult(
        covariance=ComplexCovariance(cov),
        consistent_set=t_set,
        iterations_run=iterations,
        recovered=complex_rec,
        per_iteration_objective=tuple(objectives),
    )
