from lagoontwin.features.align import (
    AlignedSeries,
    align_observations,
    drop_sparse,
    impute_linear,
    missing_fraction,
)
from lagoontwin.features.matrix import (
    WEIGHT_ANY_TOUCH,
    WEIGHT_TARGET_ONLY,
    DesignMatrix,
    build_lag_matrix,
    chrono_split,
)
from lagoontwin.features.scaling import RobustScaler

__all__ = [
    "AlignedSeries",
    "DesignMatrix",
    "RobustScaler",
    "WEIGHT_ANY_TOUCH",
    "WEIGHT_TARGET_ONLY",
    "align_observations",
    "build_lag_matrix",
    "chrono_split",
    "drop_sparse",
    "impute_linear",
    "missing_fraction",
]
