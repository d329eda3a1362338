"""
Run Artifacts
=============
Turns fit, cross-validation and simulation results into files:

    result.json      full result, validated against the versioned schema
    profile.csv      step, criterion means and standard errors (tuning profile)
    trajectory.csv   step, support and per-covariate box bounds
    traces.csv       covariate usage and importance per step
    km_curves.csv    in-box / out-of-box Kaplan-Meier breakpoints per step
    rules.txt        canonical decision rules
    error.json       machine-readable failure record

Architecture: Imperative Shell
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from models import (
    STATISTICS,
    Box,
    CoverageResult,
    CvResult,
    GroundTruth,
    PermutationResult,
    SbhError,
    SimModelSpec,
    SurvivalData,
    Trajectory,
)
from peeling import range_importance
from survival import group_curve

from .csv_io import FLOAT_FORMAT, write_csv
from .schema import SCHEMA_VERSION, ResultDocument

logger = logging.getLogger(__name__)

RESULT_FILE = 'result.json'
ERROR_FILE = 'error.json'


# =============================================================================
# Finite-or-null conversion
# =============================================================================

class NullRecorder:
    """Replaces non-finite numbers with None and remembers why"""

    def __init__(self):
        self.reasons: Dict[str, str] = {}

    def value(self, x: Any, path: str, reason: str = 'undefined') -> Optional[float]:
        if x is None:
            return None
        x = float(x)
        if math.isfinite(x):
            return x
        self.reasons[path] = reason
        return None

    def values(self, xs: Iterable, path: str, reason: str = 'undefined') -> List[Optional[float]]:
        return [self.value(x, f"{path}[{i}]", reason) for i, x in enumerate(xs)]


def _share_by_name(names, share: np.ndarray) -> Dict[str, float]:
    return {name: float(share[j]) for j, name in enumerate(names)}


# =============================================================================
# Documents
# =============================================================================

def _trajectory_steps(trajectory: Trajectory, nulls: NullRecorder, prefix: str) -> List[Dict]:
    names = trajectory.covariate_names
    rows = []
    for record in trajectory.steps:
        path = f"{prefix}[{record.step}]"
        points = record.end_points
        entry = {
            'step': record.step,
            'n_in': int(record.n_in),
            'support': nulls.value(record.support, f"{path}.support"),
            'lower': record.box.lower.tolist(),
            'upper': record.box.upper.tolist(),
            'peeled_covariate': names[record.peeled_covariate] if record.peeled_covariate is not None else None,
            'peeled_side': record.peeled_side.value if record.peeled_side is not None else None,
        }
        for name in ('lhr', 'lrt', 'cer', 'meft', 'mefp'):
            entry[name] = nulls.value(getattr(points, name), f"{path}.{name}", points.reasons.get(name, 'undefined'))
        rows.append(entry)
    return rows


def build_fit_document(
    provenance: Dict,
    data: SurvivalData,
    coverage: CoverageResult,
    warnings: List[str],
) -> Dict:
    nulls = NullRecorder()
    boxes = []
    for m, trajectory in enumerate(coverage.trajectories):
        boxes.append({
            'box': m + 1,
            'length': trajectory.length,
            'stop_reason': trajectory.stop_reason,
            'n_active': int(len(trajectory.active)),
            'steps': _trajectory_steps(trajectory, nulls, f"boxes[{m}].steps"),
            'used_covariates': [data.covariate_names[j] for j in trajectory.used_covariates()],
        })
    first = coverage.trajectories[0] if coverage.trajectories else None
    document = {
        'schema_version': SCHEMA_VERSION,
        'command': 'fit',
        'seed': provenance.get('seed', 0),
        'config': provenance,
        'data': data.summary(),
        'covariate_names': list(data.covariate_names),
        'technique': None,
        'max_length': first.length if first else 0,
        'optimal_length': first.length if first else None,
        'steps': boxes[0]['steps'] if boxes else [],
        'boxes': boxes,
        'rules': coverage.rule.to_dict()['boxes'],
        'rules_text': coverage.rule.text(),
        'used_covariates': sorted({name for box in boxes for name in box['used_covariates']},
                                  key=list(data.covariate_names).index),
        'null_reasons': nulls.reasons,
        'warnings': list(warnings),
    }
    return ResultDocument(**document).model_dump(mode='json')


def build_cv_document(
    provenance: Dict,
    data: SurvivalData,
    result: CvResult,
    command: str = 'cv',
) -> Dict:
    nulls = NullRecorder()
    profile = result.profile
    permutation = result.p_values
    steps = []
    for step in range(profile.max_length + 1):
        path = f"steps[{step}]"
        entry = {
            'step': step,
            'n_in': int(result.membership[step].sum()),
            'box_support': float(result.box_support[step]),
            'lower': result.boxes[step].lower.tolist(),
            'upper': result.boxes[step].upper.tolist(),
            'vote_agreement': nulls.value(result.vote_agreement[step], f"{path}.vote_agreement"),
            'se': {},
        }
        for name in STATISTICS:
            entry[name] = nulls.value(profile.mean[name][step], f"{path}.{name}", 'undefined_in_all_replicates')
            entry['se'][name] = nulls.value(profile.se[name][step], f"{path}.se.{name}", 'undefined_in_all_replicates')
        if permutation is not None and step < permutation.p_values.shape[0]:
            entry['p_value'] = nulls.value(permutation.p_values[step], f"{path}.p_value", 'no_defined_permutations')
            entry['p_below_precision'] = bool(permutation.below_precision[step])
        steps.append(entry)

    document = {
        'schema_version': SCHEMA_VERSION,
        'command': command,
        'seed': provenance.get('seed', 0),
        'config': provenance,
        'data': data.summary(),
        'covariate_names': list(data.covariate_names),
        'technique': result.technique.value,
        'max_length': profile.max_length,
        'optimal_length': result.optimal_length,
        'flat_profile': result.flat_profile,
        'replicate_lengths': list(result.replicate_lengths),
        'steps': steps,
        'rules': result.rule.to_dict()['boxes'],
        'rules_text': result.rule.text(),
        'used_covariates': result.used_covariates(),
        'covariate_step_share': _share_by_name(data.covariate_names, result.covariate_step_share),
        'permutation': _permutation_entry(permutation, nulls) if permutation is not None else None,
        'null_reasons': nulls.reasons,
        'warnings': list(result.warnings),
    }
    return ResultDocument(**document).model_dump(mode='json')


def _permutation_entry(permutation: PermutationResult, nulls: NullRecorder) -> Dict:
    return {
        'A': permutation.A,
        'statistic': 'lrt',
        'p_values': nulls.values(permutation.p_values, 'permutation.p_values', 'no_defined_permutations'),
        'exceed_counts': [int(c) for c in permutation.exceed_counts],
        'n_defined': [int(c) for c in permutation.n_defined],
        'below_precision': [bool(b) for b in permutation.below_precision],
    }


# =============================================================================
# Writers
# =============================================================================

def write_json(document: Dict, path: Path) -> Path:
    with open(path, 'w') as f:
        json.dump(document, f, indent=2)
        f.write('\n')
    return path


def write_result(document: Dict, out_dir: Path) -> Path:
    ResultDocument.model_validate(document)
    return write_json(document, Path(out_dir) / RESULT_FILE)


def write_error(error: SbhError, out_dir: Optional[Path]) -> Optional[Path]:
    record = error.to_dict()
    if out_dir is None:
        return None
    try:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        return write_json(record, Path(out_dir) / ERROR_FILE)
    except OSError as e:
        logger.error(f"Could not write error record: {e}")
        return None


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def write_profile_csv(result: CvResult, out_dir: Path) -> Path:
    profile = result.profile
    frame = pd.DataFrame({'step': profile.steps})
    for name in STATISTICS:
        frame[f"{name}_mean"] = profile.mean[name]
        frame[f"{name}_se"] = profile.se[name]
    frame['replicates'] = profile.counts
    frame['optimal'] = frame['step'] == result.optimal_length
    return _write_frame(frame, Path(out_dir) / 'profile.csv')


def _bounds_frame(names, steps, supports, boxes) -> pd.DataFrame:
    frame = pd.DataFrame({'step': steps, 'support': supports})
    lowers = np.array([b.lower for b in boxes])
    uppers = np.array([b.upper for b in boxes])
    for j, name in enumerate(names):
        frame[f"{name}_lower"] = lowers[:, j]
        frame[f"{name}_upper"] = uppers[:, j]
    return frame


def write_trajectory_csv(out_dir: Path, result: Optional[CvResult] = None,
                         coverage: Optional[CoverageResult] = None) -> Path:
    """Per-step box bounds; one block per box for a covering"""
    if result is not None:
        frame = _bounds_frame(result.covariate_names, result.profile.steps, result.support, result.boxes)
        frame.insert(2, 'box_support', result.box_support)
    else:
        frames = []
        for m, trajectory in enumerate(coverage.trajectories, start=1):
            block = _bounds_frame(
                trajectory.covariate_names,
                [s.step for s in trajectory.steps],
                trajectory.supports,
                trajectory.boxes,
            )
            block.insert(0, 'box', m)
            frames.append(block)
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=['box', 'step', 'support'])
    return _write_frame(frame, Path(out_dir) / 'trajectory.csv')


def write_traces_csv(data: SurvivalData, out_dir: Path, result: Optional[CvResult] = None,
                     coverage: Optional[CoverageResult] = None) -> Path:
    """Long table: one row per step and covariate"""
    rows = []
    names = data.covariate_names
    if result is not None:
        importance = range_importance(result.boxes, Box.covering(data.covariates))
        for step in range(len(result.boxes)):
            for j, name in enumerate(names):
                rows.append({
                    'box': 1,
                    'step': step,
                    'covariate': name,
                    'importance': importance[j, step],
                    'usage_lower': result.edge_usage[step, j, 0],
                    'usage_upper': result.edge_usage[step, j, 1],
                })
    else:
        for m, trajectory in enumerate(coverage.trajectories, start=1):
            for step in range(trajectory.length + 1):
                peeled = trajectory.trace_usage[step - 1] if step > 0 else None
                for j, name in enumerate(names):
                    rows.append({
                        'box': m,
                        'step': step,
                        'covariate': name,
                        'importance': trajectory.trace_importance[j, step],
                        'usage_lower': float(trajectory.steps[step].box.lower[j] > trajectory.initial_box.lower[j]),
                        'usage_upper': float(trajectory.steps[step].box.upper[j] < trajectory.initial_box.upper[j]),
                        'peeled': peeled == j,
                    })
    frame = pd.DataFrame(rows, columns=['box', 'step', 'covariate', 'importance', 'usage_lower', 'usage_upper']
                         + (['peeled'] if result is None else []))
    return _write_frame(frame, Path(out_dir) / 'traces.csv')


def _km_rows(data: SurvivalData, in_box: np.ndarray, box: int, step: int) -> List[Dict]:
    rows = []
    for group, mask in (('in', in_box), ('out', ~in_box)):
        if not mask.any():
            continue
        curve = group_curve(data, mask)
        rows.append({'box': box, 'step': step, 'group': group, 'time': 0.0, 'survival': 1.0})
        for t, s in zip(curve.breakpoints, curve.values):
            rows.append({'box': box, 'step': step, 'group': group, 'time': float(t), 'survival': float(s)})
    return rows


def write_km_curves_csv(data: SurvivalData, out_dir: Path, result: Optional[CvResult] = None,
                        coverage: Optional[CoverageResult] = None) -> Path:
    rows = []
    if result is not None:
        for step in range(len(result.boxes)):
            rows += _km_rows(data, result.membership[step], 1, step)
    else:
        for m, trajectory in enumerate(coverage.trajectories, start=1):
            active = data.subset(trajectory.active)
            for record in trajectory.steps:
                rows += _km_rows(active, record.in_box, m, record.step)
    frame = pd.DataFrame(rows, columns=['box', 'step', 'group', 'time', 'survival'])
    return _write_frame(frame, Path(out_dir) / 'km_curves.csv')


def write_rules(text: str, out_dir: Path) -> Path:
    path = Path(out_dir) / 'rules.txt'
    path.write_text(text + '\n')
    return path


def write_cv_artifacts(data: SurvivalData, result: CvResult, document: Dict, out_dir: Path,
                       csv: bool = True) -> List[Path]:
    paths = [write_result(document, out_dir), write_rules(result.rule.text(), out_dir)]
    if csv:
        paths += [
            write_profile_csv(result, out_dir),
            write_trajectory_csv(out_dir, result=result),
            write_traces_csv(data, out_dir, result=result),
            write_km_curves_csv(data, out_dir, result=result),
        ]
    return paths


def write_fit_artifacts(data: SurvivalData, coverage: CoverageResult, document: Dict, out_dir: Path,
                        csv: bool = True) -> List[Path]:
    paths = [write_result(document, out_dir), write_rules(coverage.rule.text(), out_dir)]
    if csv:
        paths += [
            write_trajectory_csv(out_dir, coverage=coverage),
            write_traces_csv(data, out_dir, coverage=coverage),
            write_km_curves_csv(data, out_dir, coverage=coverage),
        ]
    return paths


# =============================================================================
# Simulation outputs
# =============================================================================

def write_simulation(data: SurvivalData, truth: GroundTruth, spec: SimModelSpec, out_dir: Path) -> List[Path]:
    """Dataset CSV plus a ground-truth sidecar (per-row CSV and model JSON)"""
    out_dir = Path(out_dir)
    dataset = write_csv(data, out_dir / 'data.csv')

    rows = pd.DataFrame({
        'true_time': truth.true_times,
        'censor_time': truth.censor_times,
        'linear_predictor': truth.linear_predictor,
    })
    if truth.planted_membership is not None:
        rows['planted'] = truth.planted_membership.astype(int)
    rows = rows.replace([np.inf], np.nan)
    sidecar = _write_frame(rows, out_dir / 'truth.csv')

    bound = truth.censoring_bound if math.isfinite(truth.censoring_bound) else None
    meta = {
        'schema_version': SCHEMA_VERSION,
        'spec': spec.to_dict(),
        'censoring_bound': bound,
        'censoring_disabled': bound is None,
        'realised_censored_fraction': 1.0 - data.n_events / data.n,
        'coefficients': truth.coefficients.tolist(),
        'coefficients_drawn': truth.coefficients_drawn,
        'sigma_defaulted': truth.sigma_defaulted,
    }
    model = write_json(meta, out_dir / 'truth.json')
    return [dataset, sidecar, model]
