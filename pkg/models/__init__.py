"""
Models Module
=============
Shared data classes for every layer.

Components:
- SurvivalData, RiskTable, StepCurve: censored data and estimator outputs
- Box, PeelConfig, StepRecord, Trajectory: peeling engine state
- CvConfig, FoldAssignment, CvProfile, CvResult: cross-validation
- SimModelSpec, GroundTruth: simulated models
- errors: exception and warning taxonomy
"""

from .errors import (
    SbhError,
    DataValidationError,
    ConfigError,
    NoEventsError,
    DegenerateVarianceError,
    NoPermissiblePairsError,
    NoCandidatesError,
    CrossValidationError,
    CalibrationFailure,
    InvariantViolation,
    SchemaError,
    ParseError,
    SbhWarning,
    StratumTooSmallWarning,
    FoldWithoutEventsWarning,
    FlatProfileWarning,
    SeparationWarning,
    ConsistencyWarning,
)
from .survival import (
    SurvivalData,
    RiskTable,
    StepCurve,
    CoxFit,
    KmEndPoints,
    EndPoints,
)
from .peeling import (
    Criterion,
    PeelSide,
    PeelMode,
    Box,
    PeelConfig,
    Candidate,
    StepRecord,
    Trajectory,
    CoverageResult,
    RuleEdge,
    DecisionRule,
    max_peeling_length,
)
from .validation import (
    STATISTICS,
    Technique,
    OptCriterion,
    CvConfig,
    FoldAssignment,
    ReplicateResult,
    CvProfile,
    CvResult,
    PermutationResult,
)
from .simulation import CovariateLaw, SimModelSpec, GroundTruth

__all__ = [
    'SbhError',
    'DataValidationError',
    'ConfigError',
    'NoEventsError',
    'DegenerateVarianceError',
    'NoPermissiblePairsError',
    'NoCandidatesError',
    'CrossValidationError',
    'CalibrationFailure',
    'InvariantViolation',
    'SchemaError',
    'ParseError',
    'SbhWarning',
    'StratumTooSmallWarning',
    'FoldWithoutEventsWarning',
    'FlatProfileWarning',
    'SeparationWarning',
    'ConsistencyWarning',
    'SurvivalData',
    'RiskTable',
    'StepCurve',
    'CoxFit',
    'KmEndPoints',
    'EndPoints',
    'Criterion',
    'PeelSide',
    'PeelMode',
    'Box',
    'PeelConfig',
    'Candidate',
    'StepRecord',
    'Trajectory',
    'CoverageResult',
    'RuleEdge',
    'DecisionRule',
    'max_peeling_length',
    'STATISTICS',
    'Technique',
    'OptCriterion',
    'CvConfig',
    'FoldAssignment',
    'ReplicateResult',
    'CvProfile',
    'CvResult',
    'PermutationResult',
    'CovariateLaw',
    'SimModelSpec',
    'GroundTruth',
]
