"""Coreset-backed kernel density exploration engine.

Priority-reorders 2-D point sets along the Z-order curve so any prefix is a
coreset, rasterizes and compares Gaussian KDEs, and suppresses low-density
visual noise with a witness-radius thresholding rule.
"""

from .denoise import (
    CannotSuppressError,
    DenoiseParams,
    RegionSelection,
    apply_denoise,
    denoise_mask,
    suggest_params,
)
from .ingest import (
    KdcsFormatError,
    PointSet,
    load_points,
    load_priority_dataset,
    save_priority_dataset,
    synth_generate,
)
from .kde import (
    DensityRaster,
    ErrorReport,
    GridSpec,
    KernelParams,
    error_report,
    kde_eval,
    kde_raster,
    transfer_map,
)
from .ordering import (
    CoresetSpec,
    PriorityOrdering,
    bit_reverse_permute,
    coreset_size_for_eps,
    extract_coreset,
    random_sample,
    random_sample_size_for_eps,
    tree_priority_reorder,
    zorder_block_coreset,
)
from .zorder import morton_encode, zorder_sort

__version__ = "0.1.0"

__all__ = [
    "CannotSuppressError",
    "CoresetSpec",
    "DenoiseParams",
    "DensityRaster",
    "ErrorReport",
    "GridSpec",
    "KdcsFormatError",
    "KernelParams",
    "PointSet",
    "PriorityOrdering",
    "RegionSelection",
    "apply_denoise",
    "bit_reverse_permute",
    "coreset_size_for_eps",
    "denoise_mask",
    "error_report",
    "extract_coreset",
    "kde_eval",
    "kde_raster",
    "load_points",
    "load_priority_dataset",
    "morton_encode",
    "random_sample",
    "random_sample_size_for_eps",
    "save_priority_dataset",
    "suggest_params",
    "synth_generate",
    "transfer_map",
    "tree_priority_reorder",
    "zorder_block_coreset",
    "zorder_sort",
]
