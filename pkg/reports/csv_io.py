"""
Survival CSV Ingestion
======================
Reads and writes datasets with columns ``time``, ``status`` and numeric
covariates in file order.

Architecture: Imperative Shell
File I/O only; returns SurvivalData for the functional core.

Usage:
    from reports import load_csv, write_csv
    data = load_csv('cohort.csv')
    write_csv(data, 'copy.csv')
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from models import ParseError, SchemaError, SurvivalData

logger = logging.getLogger(__name__)

TIME_COLUMN = 'time'
STATUS_COLUMN = 'status'
FLOAT_FORMAT = '%.17g'


def _first_bad_row(mask: pd.Series) -> int:
    """1-based data row number (header excluded) of the first flagged row"""
    return int(np.flatnonzero(mask.to_numpy())[0]) + 1


def load_csv(path: Union[str, Path]) -> SurvivalData:
    """
    Load a survival dataset.

    Raises:
        SchemaError: file missing, unreadable, or without time/status
            columns or covariates
        ParseError: a field is missing or invalid; names the first
            offending row and column
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise SchemaError(f"Cannot read {path}: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in (TIME_COLUMN, STATUS_COLUMN) if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path.name}: required column(s) missing: {', '.join(missing)}")
    covariate_names = [c for c in frame.columns if c not in (TIME_COLUMN, STATUS_COLUMN)]
    if not covariate_names:
        raise SchemaError(f"{path.name}: no covariate columns")
    if frame.empty:
        raise SchemaError(f"{path.name}: no data rows")

    numeric = {}
    for column in frame.columns:
        raw = frame[column].str.strip()
        blank = raw == ''
        if blank.any():
            raise ParseError(_first_bad_row(blank), column, "missing value")
        values = pd.to_numeric(raw, errors='coerce')
        bad = values.isna() | ~np.isfinite(values.fillna(0.0))
        if bad.any():
            row = _first_bad_row(bad)
            raise ParseError(row, column, f"not a finite number: '{raw.iloc[row - 1]}'")
        # correctly rounded parse, so written values reload bit for bit
        numeric[column] = raw.astype(float).to_numpy(dtype=float)

    times = numeric[TIME_COLUMN]
    negative = pd.Series(times < 0)
    if negative.any():
        raise ParseError(_first_bad_row(negative), TIME_COLUMN, "time must be >= 0")
    status = numeric[STATUS_COLUMN]
    invalid = pd.Series(~np.isin(status, (0.0, 1.0)))
    if invalid.any():
        row = _first_bad_row(invalid)
        raise ParseError(row, STATUS_COLUMN, f"status must be 0 or 1, got {status[row - 1]:g}")

    data = SurvivalData(
        times=times,
        events=status.astype(np.int8),
        covariates=np.column_stack([numeric[c] for c in covariate_names]),
        covariate_names=tuple(covariate_names),
    )
    logger.info(f"Loaded {path.name}: n={data.n}, p={data.p}, events={data.n_events}")
    return data


def to_frame(data: SurvivalData) -> pd.DataFrame:
    frame = pd.DataFrame(data.covariates, columns=list(data.covariate_names))
    frame.insert(0, STATUS_COLUMN, data.events.astype(int))
    frame.insert(0, TIME_COLUMN, data.times)
    return frame


def write_csv(data: SurvivalData, path: Union[str, Path]) -> Path:
    """Write with 17 significant digits so a reload reproduces every value"""
    path = Path(path)
    to_frame(data).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path
