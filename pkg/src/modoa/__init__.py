"""Modulo-sampling direction-of-arrival toolkit.

Simulates sensor-array snapshots, folds them through low-resolution
modulo and conventional ADC front ends, recovers the unfolded signal by
blind integer forcing seeded from one-bit sign data, and estimates
directions of arrival with subspace methods.
"""

from __future__ import annotations

from .array_model import (
    ArrayGeometry,
    SnapshotBatch,
    SourceScene,
    simulate_snapshots,
    steering_vector,
    theoretical_covariance,
)
from .bif_pipeline import (
    BifConfig,
    BifInitError,
    BifResult,
    nmse_db,
    refine_covariance,
    run_bif,
    sign_consistency_set,
)
from .covariance import (
    ComplexCovariance,
    RealCompositeCovariance,
    arcsin_law,
    complex_to_real_composite,
    onebit_empirical_covariance,
    psd_project,
    real_composite_to_complex,
)
from .doa_subspace import (
    DoaEstimate,
    detect,
    pseudo_spectrum,
    root_music,
    spectral_music,
)
from .lattice_if import (
    IFMatrix,
    LatticeBasis,
    if_decode,
    lll_reduce,
    solve_if_matrix,
    stack_real,
    unstack_real,
)
from .quantizers import (
    ConventionalAdcParams,
    ModuloQuantizerParams,
    QuantizedBatch,
    conventional_adc,
    default_clip_threshold,
    default_modulo_range,
    modulo_fold,
    modulo_sample,
    onebit_sample,
    quantize_batch,
    uniform_quantize,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "SourceScene",
    "SnapshotBatch",
    "simulate_snapshots",
    "steering_vector",
    "theoretical_covariance",
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
    "ComplexCovariance",
    "RealCompositeCovariance",
    "onebit_empirical_covariance",
    "arcsin_law",
    "complex_to_real_composite",
    "real_composite_to_complex",
    "psd_project",
    "LatticeBasis",
    "IFMatrix",
    "lll_reduce",
    "solve_if_matrix",
    "if_decode",
    "stack_real",
    "unstack_real",
    "BifConfig",
    "BifResult",
    "BifInitError",
    "sign_consistency_set",
    "refine_covariance",
    "run_bif",
    "nmse_db",
    "DoaEstimate",
    "root_music",
    "spectral_music",
    "pseudo_spectrum",
    "detect",
    "__version__",
]
