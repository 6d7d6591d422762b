"""Loop-vertex-expansion toolkit: trees, BKAR forests, multiscale
covariances, Wick-moment oracles, the cleaning expansion, and
Borel-summability diagnostics on small lattice models."""

from ._lve import (
    BorelTransform,
    ClusterSumReport,
    ContinuumCovariance,
    CutoffMode,
    DecoratedTree,
    DerivationConvention,
    DualCycleWord,
    LabeledTree,
    LatticeModel,
    MajorantReport,
    SeriesCoefficients,
    TadpoleTable,
    TaylorRemainder,
    TermLedger,
    Z_series,
    bkar_check,
    borel_partial_transform,
    cluster_sum,
    cluster_tree_length,
    convention_name,
    count_planar_decorations,
    direct_logZ,
    dualize,
    entire_logZ,
    enumerate_labeled_trees,
    forest_count,
    gaussian_moment,
    kernel,
    lattice_covariance,
    ledger_value,
    logZ_series,
    lve_logZ_series,
    matrix_sqrt,
    nelson_check,
    net_tadpole_count,
    pair_tadpoles,
    path_infimum_matrix,
    pressure_majorant,
    pruefer_code,
    renormalized_planar_sum,
    run_cleaning,
    series_to_json,
    slice_kernel,
    tadpole_table,
    taylor_remainder,
    tree_from_json,
    tree_from_pruefer,
    tree_to_json,
    uncleaned_value,
    wick_order_quartic,
    wick_quartic_moment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
