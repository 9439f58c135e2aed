"""Depth supervision toolkit: MVS depth refinement, ordinal curation,
scale-invariant losses and evaluation metrics.

Depth maps are float32 (h, w) arrays with NaN at invalid pixels; log-depth
grids are float64; category masks are uint8 arrays holding the SKY /
FOREGROUND / BACKGROUND / UNKNOWN codes exported below.
"""

from ._core import (  # noqa: F401
    BACKGROUND,
    FOREGROUND,
    SKY,
    UNKNOWN,
    ConfigError,
    CurateConfig,
    EmptyOverlapError,
    FitConfig,
    FormatError,
    LossConfig,
    MetricConfig,
    RefineConfig,
    align_scale,
    classify_image,
    corrupt_preset,
    data_loss,
    extract_ordinal_regions,
    finite_diff_audit,
    fit_log_depth,
    from_log,
    grad_loss,
    keep_closer_fuse,
    median_stabilize,
    ord,
    ord_loss,
    preset_names,
    read_depth,
    read_mask,
    refine_pipeline,
    remove_sky,
    render_preset,
    sample_ordinal_pairs,
    sdr,
    semantic_filter,
    si_rmse,
    standard_metrics,
    to_log,
    total_loss,
    true_ordinal,
    valid_fraction,
    whdr,
    write_depth,
    write_mask,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = getattr(__import__("depthforge._core", fromlist=["_core"]),
                      "__version__", "dev")
