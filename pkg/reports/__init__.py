"""
Reports Module
==============
CSV ingestion, result schema and artifact writers.

Architecture: Imperative Shell
"""

from .csv_io import load_csv, to_frame, write_csv
from .schema import SCHEMA_VERSION, ResultDocument, result_json_schema
from .artifacts import (
    ERROR_FILE,
    RESULT_FILE,
    NullRecorder,
    build_cv_document,
    build_fit_document,
    write_cv_artifacts,
    write_error,
    write_fit_artifacts,
    write_json,
    write_km_curves_csv,
    write_profile_csv,
    write_result,
    write_rules,
    write_simulation,
    write_trajectory_csv,
    write_traces_csv,
)

__all__ = [
    'load_csv',
    'to_frame',
    'write_csv',
    'SCHEMA_VERSION',
    'ResultDocument',
    'result_json_schema',
    'ERROR_FILE',
    'RESULT_FILE',
    'NullRecorder',
    'build_cv_document',
    'build_fit_document',
    'write_cv_artifacts',
    'write_error',
    'write_fit_artifacts',
    'write_json',
    'write_km_curves_csv',
    'write_profile_csv',
    'write_result',
    'write_rules',
    'write_simulation',
    'write_trajectory_csv',
    'write_traces_csv',
]
