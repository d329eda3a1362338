"""
Desk-Scale Reproduction Runner
==============================
Runs the model #2 and model #3 scenarios with combined cross-validation
(directed LRT peeling, n=250, K=5, B=16, censoring 0.5) and prints the optimal
lengths and the end points at the selected step.

Also runs the averaged technique on model #3, where the LRT profile is
expected to stay high over long trajectories.

Usage:
    python scripts/run_reproduction.py
    python scripts/run_reproduction.py --B 8 --threads 4 --permutations 64

Author: Survival Bump Hunting maintainers
Version: 1.0
"""

import argparse
import sys
import time
import warnings
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import default_threads, load_simulation_presets  # noqa: E402
from crossval import permutation_pvalues, replicated_cv  # noqa: E402
from models import CvConfig, PeelConfig  # noqa: E402
from simulation import generate, spec_from_preset  # noqa: E402

SCENARIOS = [
    ('2', 'combined', 'lrt'),
    ('2', 'combined', 'cer'),
    ('3', 'combined', 'lrt'),
    ('3', 'averaged', 'lrt'),
]


def run_scenario(presets, model_id, technique, opt, args):
    spec = spec_from_preset(presets, model_id, seed=args.seed)
    data, _ = generate(spec)
    cv_config = CvConfig(K=5, B=args.B, A=args.permutations or 1, technique=technique,
                         opt_criterion=opt, master_seed=args.seed)
    peel_config = PeelConfig(criterion='lrt', peel_mode='directed')

    started = time.time()
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        result = replicated_cv(data, cv_config, peel_config, n_jobs=args.threads)
        if args.permutations:
            result.p_values = permutation_pvalues(data, cv_config, peel_config, result.profile,
                                                  n_jobs=args.threads)
    elapsed = time.time() - started

    step = result.optimal_length
    mean = result.profile.mean
    print(f"\nModel #{model_id}  {technique:<9} opt={opt}")
    print("-" * 40)
    print(f"  optimal length : {step} (max {result.profile.max_length})")
    print(f"  support        : {mean['support'][step]:.3f}")
    print(f"  LHR            : {mean['lhr'][step]:.3f}")
    print(f"  LRT            : {mean['lrt'][step]:.3f}")
    print(f"  CER            : {mean['cer'][step]:.3f}")
    print(f"  x3 step share  : {result.covariate_step_share[2]:.3f}")
    if result.p_values is not None:
        below = result.p_values.below_precision[step]
        print(f"  p-value        : {'< ' if below else ''}{result.p_values.p_values[step]:.4g}")
    print(f"  rule           : {result.rule.text()}")
    print(f"  elapsed        : {elapsed:.1f}s")


def main():
    parser = argparse.ArgumentParser(description='Desk-scale reproduction runs')
    parser.add_argument('--B', type=int, default=16)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--threads', type=int, default=default_threads())
    parser.add_argument('--permutations', type=int, default=0, help='A; 0 skips p-values')
    args = parser.parse_args()

    print("Survival Bump Hunting - Reproduction")
    print("=" * 40)
    presets = load_simulation_presets()
    for model_id, technique, opt in SCENARIOS:
        run_scenario(presets, model_id, technique, opt, args)
    return 0


if __name__ == '__main__':
    sys.exit(main())
