"""Extremal entries of sample correlation and Gram matrices.

Blocked, deterministic computation of

* ``W_n = max_{i<j} |sum_k X[k, i] X[k, j]|``,
* ``L_n = max_{i<j} |rho_ij|`` (largest off-diagonal Pearson correlation),
* ``T_n = max_{i != j} |sum_k U[k, i] V[k, j]|``,

the extreme-value test of independence built on ``L_n``, moment diagnostics
for the strong laws, and a seeded simulation harness.
"""

__version__ = "0.1.0"

from .asymptotics import TestReport, jiang_transform, limit_cdf, limit_quantile, limit_sf, p_value, run_test
from .distributions import DistributionSpec
from .errors import (
    CorrmaxError,
    DegenerateColumn,
    DomainError,
    FormatError,
    ParseError,
    ShapeError,
    UnsupportedError,
)
from .kernel import (
    MaxEntryResult,
    corr_offdiag_max,
    cross_gram_max,
    extremal_stats,
    gram_offdiag_max,
    prefix_trajectory,
)
from .matrix import DataMatrix, column_summaries, load_binary, load_csv, load_matrix, save_binary, save_csv
from .moments import (
    ConditionVerdict,
    abs_moment,
    ll_condition_verdict,
    ll_functionals,
    series_partial_sums,
    slln_condition_verdict,
    top_two_product_tail,
)
from .sim import (
    ExperimentRecord,
    PnSchedule,
    divergence_probe,
    ks_distance,
    run_evd_experiment,
    run_ll_experiment,
    run_slln_experiment,
    sample_matrix,
)

__all__ = [
    "ConditionVerdict",
    "CorrmaxError",
    "DataMatrix",
    "DegenerateColumn",
    "DistributionSpec",
    "DomainError",
    "ExperimentRecord",
    "FormatError",
    "MaxEntryResult",
    "ParseError",
    "PnSchedule",
    "ShapeError",
    "TestReport",
    "UnsupportedError",
    "abs_moment",
    "column_summaries",
    "corr_offdiag_max",
    "cross_gram_max",
    "divergence_probe",
    "extremal_stats",
    "gram_offdiag_max",
    "jiang_transform",
    "ks_distance",
    "limit_cdf",
    "limit_quantile",
    "limit_sf",
    "ll_condition_verdict",
    "ll_functionals",
    "load_binary",
    "load_csv",
    "load_matrix",
    "p_value",
    "prefix_trajectory",
    "run_evd_experiment",
    "run_ll_experiment",
    "run_slln_experiment",
    "run_test",
    "sample_matrix",
    "save_binary",
    "save_csv",
    "series_partial_sums",
    "slln_condition_verdict",
    "top_two_product_tail",
]
