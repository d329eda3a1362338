"""
Error and Warning Taxonomy
==========================
Every failure raised by the toolkit derives from SbhError so the CLI shell
can turn it into a machine-readable error record. Non-fatal conditions are
Warning subclasses issued through ``warnings.warn``.
"""

from typing import Any, Dict, List, Optional


class SbhError(Exception):
    """Base class for all survival bump hunting errors"""

    def details(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': str(self),
            'details': self.details(),
        }


class DataValidationError(SbhError, ValueError):
    """Input arrays violate the SurvivalData invariants"""


class ConfigError(SbhError, ValueError):
    """Run configuration is invalid or inconsistent"""


class NoEventsError(SbhError):
    """Every observation is censored"""


class DegenerateVarianceError(SbhError):
    """Log-rank variance is zero, statistic undefined"""


class NoPermissiblePairsError(SbhError):
    """No comparable pair exists for the concordance index"""


class NoCandidatesError(SbhError):
    """Every candidate sub-box is ineligible"""

    def __init__(self, message: str, reason: str = 'no_candidates'):
        self.reason = reason
        super().__init__(message)

    def details(self) -> Dict[str, Any]:
        return {'reason': self.reason}


class CrossValidationError(SbhError):
    """Every cross-validation replicate failed"""

    def __init__(self, message: str, reasons: Optional[List[str]] = None):
        self.reasons = list(reasons or [])
        super().__init__(message)

    def details(self) -> Dict[str, Any]:
        return {'replicate_errors': self.reasons}


class CalibrationFailure(SbhError):
    """Censoring bound cannot be bracketed for the requested rate"""


class InvariantViolation(SbhError):
    """An internal identity that must hold exactly did not"""


class SchemaError(SbhError):
    """Required columns are missing or a document fails its schema"""


class ParseError(SbhError):
    """A data row cannot be parsed"""

    def __init__(self, row: int, column: Optional[str], reason: str):
        self.row = row
        self.column = column
        self.reason = reason
        where = f"row {row}" + (f", column '{column}'" if column else "")
        super().__init__(f"{where}: {reason}")

    def details(self) -> Dict[str, Any]:
        return {'row': self.row, 'column': self.column, 'reason': self.reason}


# =============================================================================
# Warnings
# =============================================================================

class SbhWarning(UserWarning):
    """Base class for non-fatal conditions"""


class StratumTooSmallWarning(SbhWarning):
    """An event/censoring stratum has fewer members than folds"""


class FoldWithoutEventsWarning(SbhWarning):
    """A held-out fold carries no events"""


class FlatProfileWarning(SbhWarning):
    """The cross-validated tuning profile is essentially flat"""


class SeparationWarning(SbhWarning):
    """Cox likelihood is monotone; log hazard ratio clamped"""


class ConsistencyWarning(SbhWarning):
    """Averaged-box membership and support estimates disagree"""
