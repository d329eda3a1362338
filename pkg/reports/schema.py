"""
Result Document Schema
======================
Versioned pydantic schema of result.json. Every document is validated
before it is written; numeric fields are finite or null, and each null
carries a reason code in ``null_reasons``.
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict

SCHEMA_VERSION = "1.0"


class FiniteModel(BaseModel):
    model_config = ConfigDict(allow_inf_nan=False, extra='forbid')


class RuleEdgeEntry(FiniteModel):
    covariate: str
    side: Literal['lower', 'upper']
    value: float
    se: Optional[float] = None
    frequency: Optional[float] = None


class StepEntry(FiniteModel):
    """One row of the per-step table"""
    step: int
    n_in: Optional[int] = None
    support: Optional[float] = None
    box_support: Optional[float] = None
    meft: Optional[float] = None
    mefp: Optional[float] = None
    lhr: Optional[float] = None
    lrt: Optional[float] = None
    cer: Optional[float] = None
    se: Dict[str, Optional[float]] = {}
    lower: List[float]
    upper: List[float]
    peeled_covariate: Optional[str] = None
    peeled_side: Optional[str] = None
    vote_agreement: Optional[float] = None
    p_value: Optional[float] = None
    p_below_precision: Optional[bool] = None


class BoxEntry(FiniteModel):
    """One box of a covering (fit command)"""
    box: int
    length: int
    stop_reason: str
    n_active: int
    steps: List[StepEntry]
    used_covariates: List[str]


class PermutationEntry(FiniteModel):
    A: int
    statistic: str
    p_values: List[Optional[float]]
    exceed_counts: List[int]
    n_defined: List[int]
    below_precision: List[bool]


class ResultDocument(FiniteModel):
    schema_version: Literal["1.0"] = SCHEMA_VERSION
    command: Literal['fit', 'cv', 'permtest']
    seed: int
    config: Dict[str, Any]
    data: Dict[str, Any]
    covariate_names: List[str]
    technique: Optional[str] = None
    max_length: int
    optimal_length: Optional[int] = None
    flat_profile: bool = False
    replicate_lengths: List[int] = []
    steps: List[StepEntry] = []
    boxes: List[BoxEntry] = []
    rules: List[List[RuleEdgeEntry]] = []
    rules_text: str = ''
    used_covariates: List[str] = []
    covariate_step_share: Dict[str, float] = {}
    permutation: Optional[PermutationEntry] = None
    null_reasons: Dict[str, str] = {}
    warnings: List[str] = []


def result_json_schema() -> Dict:
    return ResultDocument.model_json_schema()
