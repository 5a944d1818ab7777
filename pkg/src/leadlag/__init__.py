"""Lead-lag detection in multivariate time series.

Pairwise banded dynamic time warping plus K-Medoids clustering turns a
panel of return series into an antisymmetric matrix of estimated
pairwise lags; synthetic lagged factor models with known ground truth
validate the detector, and a sliding-window momentum backtest converts
detected structure into volatility-targeted PnL with a full metrics
suite.
"""

from .cluster import ClusterAssignment, adjusted_rand_index, kmeans, kmedoids
from .dtw import (
    WarpingPath,
    dtw,
    dtw_cost,
    pairwise_distance_matrix,
    point_distance,
    vector_distance,
)
from .lagmatrix import (
    DetectorConfig,
    LeadLagMatrix,
    ccf,
    ccf_auc_leadlag,
    detect,
    error_matrix,
    ground_truth_psi,
    lag_estimate,
    leader_sign,
    leadlag_matrix_dtw,
    path_offsets,
    read_leadlag_csv,
    read_leadlag_json,
    write_leadlag_csv,
    write_leadlag_json,
)
from .panel import (
    PreprocessConfig,
    PreprocessResult,
    TimeSeriesPanel,
    load_csv,
    preprocess_equity,
    preprocess_futures,
    write_csv,
)
from .strategy import (
    BacktestConfig,
    MetricsReport,
    PnLSeries,
    Ranking,
    compute_metrics,
    ewma_signal,
    grid_run,
    rescale_pnl,
    rowsum_rank,
    run_backtest,
    split,
)
from .synthetic import (
    FactorModelSpec,
    SyntheticPanel,
    generate,
    heterogeneous_spec,
    homogeneous_spec,
    membership_labels,
    replicate_rows,
    sweep_sigma,
    sweep_window,
)

__version__ = "0.1.0"

__all__ = [
    "BacktestConfig",
    "ClusterAssignment",
    "DetectorConfig",
    "FactorModelSpec",
    "LeadLagMatrix",
    "MetricsReport",
    "PnLSeries",
    "PreprocessConfig",
    "PreprocessResult",
    "Ranking",
    "SyntheticPanel",
    "TimeSeriesPanel",
    "WarpingPath",
    "adjusted_rand_index",
    "ccf",
    "ccf_auc_leadlag",
    "compute_metrics",
    "detect",
    "dtw",
    "dtw_cost",
    "error_matrix",
    "ewma_signal",
    "generate",
    "grid_run",
    "ground_truth_psi",
    "heterogeneous_spec",
    "homogeneous_spec",
    "kmeans",
    "kmedoids",
    "lag_estimate",
    "leader_sign",
    "leadlag_matrix_dtw",
    "load_csv",
    "membership_labels",
    "pairwise_distance_matrix",
    "path_offsets",
    "point_distance",
    "preprocess_equity",
    "preprocess_futures",
    "read_leadlag_csv",
    "read_leadlag_json",
    "replicate_rows",
    "rescale_pnl",
    "rowsum_rank",
    "run_backtest",
    "split",
    "sweep_sigma",
    "sweep_window",
    "vector_distance",
    "write_csv",
    "write_leadlag_csv",
    "write_leadlag_json",
]
