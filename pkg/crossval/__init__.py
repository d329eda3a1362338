"""
Cross-Validation Module
=======================
Stratified folds, averaged and combined cross-validation, replicated
aggregation, peeling-length tuning and permutation p-values.
"""

from .folds import (
    PERMUTATION_STREAM,
    REPLICATE_STREAM,
    derive_seed,
    resubstitution_folds,
    stratified_kfold,
)
from .tuning import cv_max_length, select_optimal_length
from .techniques import FoldFit, average_edges, averaged_cv, combined_cv, fit_folds
from .replicated import (
    aggregate_replicates,
    build_profile,
    check_support_consistency,
    majority_vote,
    replicated_cv,
    replicated_max_length,
    run_replicate,
    run_replicates,
)
from .permutation import permutation_pvalues, permuted_statistic

__all__ = [
    'PERMUTATION_STREAM',
    'REPLICATE_STREAM',
    'derive_seed',
    'resubstitution_folds',
    'stratified_kfold',
    'cv_max_length',
    'select_optimal_length',
    'FoldFit',
    'averaged_cv',
    'combined_cv',
    'fit_folds',
    'aggregate_replicates',
    'average_edges',
    'check_support_consistency',
    'build_profile',
    'majority_vote',
    'replicated_cv',
    'replicated_max_length',
    'run_replicate',
    'run_replicates',
    'permutation_pvalues',
    'permuted_statistic',
]
