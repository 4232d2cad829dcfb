"""Optimal threshold calibration for binary-classification scores.

Maintains the loss-minimizing monotone (thresholding) transform of scores
under plain, class-weighted, sample-weighted, or raw linear losses, with
O(N) batch solving and O(log N) sequential updates per unordered sample.
"""

from ._core import (
    HIGH,
    LOW,
    AuditReport,
    AuxSummary,
    Calibrator,
    LabeledObservation,
    LossMode,
    LossSpec,
    MappingBounds,
    Metrics,
    MergeTree,
    OptimalityReport,
    Sample,
    SnapshotError,
    SortedInstance,
    ThresholdSolution,
    batch_build,
    evaluate_threshold,
    merge_aux,
    monotone_assignment_count,
    reduce_to_linear,
    singleton,
    solve_brute_force,
    solve_iterative,
    verify_threshold_optimality,
    weighted_error_offset,
)

__all__ = [
    "HIGH",
    "LOW",
    "AuditReport",
    "AuxSummary",
    "Calibrator",
    "LabeledObservation",
    "LossMode",
    "LossSpec",
    "MappingBounds",
    "Metrics",
    "MergeTree",
    "OptimalityReport",
    "Sample",
    "SnapshotError",
    "SortedInstance",
    "ThresholdSolution",
    "batch_build",
    "evaluate_threshold",
    "merge_aux",
    "monotone_assignment_count",
    "reduce_to_linear",
    "singleton",
    "solve_brute_force",
    "solve_iterative",
    "verify_threshold_optimality",
    "weighted_error_offset",
]

__version__ = "0.1.0"
