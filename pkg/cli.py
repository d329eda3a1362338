"""
Survival Bump Hunting CLI
=========================
Command-line interface for recursive survival peeling with replicated
cross-validation.

Usage:
    python cli.py simulate --model 2 --seed 7 --out runs/model2
    python cli.py fit --input runs/model2/data.csv --M 2 --out runs/fit
    python cli.py cv --model 2 --technique combined --B 16 --out runs/cv
    python cli.py permtest --model 3 --A 256 --out runs/perm
    python cli.py config --show

Exit status: 0 on success, 1 on a module error (error.json is written to
the output directory), 2 on invalid arguments. Warnings never change the
exit status; they are collected in result.json.
"""

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Tuple

from models import ConfigError, SbhError, SurvivalData

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def _add_data_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('data source (exactly one)')
    group.add_argument('--input', type=Path, help='CSV with time, status and covariate columns')
    group.add_argument('--model', choices=['1', '1b', '2', '3', '4'], help='Simulated model')
    group.add_argument('--n', type=int, help='Simulated sample size')
    group.add_argument('--p', type=int, help='Simulated covariate count')
    group.add_argument('--pi', type=float, help='Simulated censoring rate, 0 disables censoring')


def _add_peel_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('peeling')
    group.add_argument('--alpha0', type=float, help='Peeling quantile (default 0.10)')
    group.add_argument('--beta0', type=float, help='Minimal box support (default 0.05)')
    group.add_argument('--criterion', choices=['lrt', 'chs', 'lhr'], help='Peeling criterion')
    group.add_argument('--paste', action='store_true', default=None, help='Paste the final box')
    group.add_argument('--directed', metavar='SPEC',
                       help="Peel directions: 'auto' (default), 'free' or a comma list of +1/-1/0 per covariate")
    group.add_argument('--preselect', type=int, metavar='N',
                       help='Keep the N covariates with largest univariate Cox score')


def _add_cv_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('cross-validation')
    group.add_argument('--technique', choices=['averaged', 'combined', 'none'])
    group.add_argument('--opt', choices=['lhr', 'lrt', 'cer'], help='Length optimisation criterion')
    group.add_argument('--K', type=int, help='Folds (default 5)')
    group.add_argument('--B', type=int, help='Replicates (default 16)')
    group.add_argument('--one-se', action='store_true', default=None, help='One-standard-error rule')


def _add_run_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('run')
    group.add_argument('--seed', type=int, help='Master seed for every random draw')
    group.add_argument('--threads', type=int, help='Worker processes (default: all cores)')
    group.add_argument('--out', type=Path, help='Output directory')
    group.add_argument('--verbose', '-v', action='count', default=0, help='-v info, -vv debug')


def parse_args(argv: Optional[List[str]] = None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(
        description='Survival bump hunting by recursive peeling with replicated cross-validation',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # Fit command
    fit_parser = subparsers.add_parser('fit', help='Peel one or more boxes without cross-validation')
    _add_data_args(fit_parser)
    _add_peel_args(fit_parser)
    fit_parser.add_argument('--M', type=int, help='Maximum number of boxes (default 1)')
    _add_run_args(fit_parser)

    # CV command
    cv_parser = subparsers.add_parser('cv', help='Replicated cross-validated peeling')
    _add_data_args(cv_parser)
    _add_peel_args(cv_parser)
    _add_cv_args(cv_parser)
    _add_run_args(cv_parser)

    # Permutation test command
    perm_parser = subparsers.add_parser('permtest', help='Cross-validated run with permutation p-values')
    _add_data_args(perm_parser)
    _add_peel_args(perm_parser)
    _add_cv_args(perm_parser)
    perm_parser.add_argument('--A', type=int, help='Permutations (default 256)')
    _add_run_args(perm_parser)

    # Simulate command
    sim_parser = subparsers.add_parser('simulate', help='Write a simulated dataset and its ground truth')
    sim_parser.add_argument('--model', choices=['1', '1b', '2', '3', '4'], required=True)
    sim_parser.add_argument('--n', type=int)
    sim_parser.add_argument('--p', type=int)
    sim_parser.add_argument('--pi', type=float)
    _add_run_args(sim_parser)

    # Config command
    config_parser = subparsers.add_parser('config', help='Show defaults or the result schema')
    config_parser.add_argument('--show', action='store_true', help='Show resolved defaults')
    config_parser.add_argument('--schema', action='store_true', help='Print the result.json schema')

    return parser.parse_args(argv)


# =============================================================================
# Shared plumbing
# =============================================================================

def configure_logging(verbosity: int):
    if verbosity >= 2:
        level = 'DEBUG'
    elif verbosity == 1:
        level = 'INFO'
    else:
        level = os.getenv('SBH_LOG_LEVEL', 'WARNING').upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )


def _overrides(args) -> dict:
    """argparse namespace to RunConfig field names; absent flags stay None"""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    return {
        'input': get('input'),
        'model': get('model'),
        'n': get('n'),
        'p': get('p'),
        'pi': get('pi'),
        'alpha0': get('alpha0'),
        'beta0': get('beta0'),
        'criterion': get('criterion'),
        'pasting': get('paste'),
        'directed': get('directed'),
        'preselect': get('preselect'),
        'technique': get('technique'),
        'opt_criterion': get('opt'),
        'K': get('K'),
        'B': get('B'),
        'A': get('A'),
        'one_se_rule': get('one_se'),
        'M': get('M'),
        'seed': get('seed'),
        'threads': get('threads'),
        'output_dir': get('out'),
    }


def load_data(config) -> Tuple[SurvivalData, Optional[tuple]]:
    """Dataset from the configured source; simulated runs also return (truth, spec)"""
    from config import load_simulation_presets
    from reports import load_csv
    from simulation import generate, spec_from_preset

    if config.input is not None:
        return load_csv(config.input), None
    spec = spec_from_preset(
        load_simulation_presets(), config.model,
        n=config.n, p=config.p, censoring_rate=config.pi, seed=config.seed,
    )
    data, truth = generate(spec)
    return data, (truth, spec)


def _run(command, args) -> int:
    """Resolve config, run ``command(config)`` and map failures to exit codes"""
    from config import resolve_run_config
    from reports import write_error

    configure_logging(args.verbose)
    try:
        config = resolve_run_config(_overrides(args))
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        config.prepare_output_dir()
        return command(config)
    except SbhError as e:
        path = write_error(e, config.output_dir)
        print(json.dumps(e.to_dict()), file=sys.stderr)
        if path:
            print(f"Error record: {path}", file=sys.stderr)
        return EXIT_ERROR


def _merge_warnings(*groups) -> List[str]:
    seen, merged = set(), []
    for group in groups:
        for message in group:
            if message not in seen:
                seen.add(message)
                merged.append(message)
    return merged


def _print_paths(paths):
    print("\nArtifacts:")
    for path in paths:
        print(f"  {path}")


# =============================================================================
# Commands
# =============================================================================

def cmd_fit(args):
    """Execute fit command"""
    from peeling import coverage_loop
    from reports import build_fit_document, write_fit_artifacts

    def run(config) -> int:
        print("Survival Bump Hunting - Fit")
        print("=" * 40)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            data, _ = load_data(config)
            coverage = coverage_loop(data, config.peel_config(), max_boxes=config.M)
        messages = _merge_warnings([str(w.message) for w in caught])

        document = build_fit_document(config.provenance(), data, coverage, messages)
        paths = write_fit_artifacts(data, coverage, document, config.output_dir,
                                    csv='csv' in [f.value for f in config.formats])
        print(f"\nData: n={data.n}, p={data.p}, events={data.n_events}")
        for m, trajectory in enumerate(coverage.trajectories, start=1):
            final = trajectory.final
            print(f"Box {m}: {trajectory.length} steps, support {final.support:.3f}, "
                  f"LHR {final.end_points.lhr:.3f}, LRT {final.end_points.lrt:.3f}")
        print(f"\n{coverage.rule.text()}")
        _print_paths(paths)
        return EXIT_OK

    return _run(run, args)


def _cross_validate(config, with_permutations: bool):
    from crossval import permutation_pvalues, replicated_cv

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        data, _ = load_data(config)
        cv_config, peel_config = config.cv_config(), config.peel_config()
        result = replicated_cv(data, cv_config, peel_config, n_jobs=config.threads)
        if with_permutations:
            result.p_values = permutation_pvalues(
                data, cv_config, peel_config, result.profile, n_jobs=config.threads,
            )
    result.warnings = _merge_warnings(result.warnings, [str(w.message) for w in caught])
    return data, result


def _report_cv(config, data, result, command: str) -> int:
    from reports import build_cv_document, write_cv_artifacts

    document = build_cv_document(config.provenance(), data, result, command=command)
    paths = write_cv_artifacts(data, result, document, config.output_dir,
                               csv='csv' in [f.value for f in config.formats])
    step = result.optimal_length
    print(f"\nData: n={data.n}, p={data.p}, events={data.n_events}")
    print(f"Technique: {result.technique.value}, replicates: {len(result.replicate_lengths)}")
    print(f"Max length: {result.profile.max_length}, optimal length: {step}"
          + (" (flat profile)" if result.flat_profile else ""))
    row = document['steps'][step]
    print(f"Step {step}: support {row['support']}, LHR {row['lhr']}, LRT {row['lrt']}, CER {row['cer']}")
    if result.p_values is not None:
        p = result.p_values.p_values[step]
        below = result.p_values.below_precision[step]
        print(f"Permutation p-value: {'< ' if below else ''}{p:.4g}")
    print(f"\n{result.rule.text()}")
    if result.warnings:
        print(f"\n{len(result.warnings)} warning(s) recorded in result.json")
    _print_paths(paths)
    return EXIT_OK


def cmd_cv(args):
    """Execute cv command"""
    def run(config) -> int:
        print("Survival Bump Hunting - Cross-Validation")
        print("=" * 40)
        data, result = _cross_validate(config, with_permutations=False)
        return _report_cv(config, data, result, 'cv')

    return _run(run, args)


def cmd_permtest(args):
    """Execute permtest command"""
    def run(config) -> int:
        print("Survival Bump Hunting - Permutation Test")
        print("=" * 40)
        data, result = _cross_validate(config, with_permutations=True)
        return _report_cv(config, data, result, 'permtest')

    return _run(run, args)


def cmd_simulate(args):
    """Execute simulate command"""
    from reports import write_simulation

    def run(config) -> int:
        print("Survival Bump Hunting - Simulate")
        print("=" * 40)
        data, (truth, spec) = load_data(config)
        paths = write_simulation(data, truth, spec, config.output_dir)
        print(f"\nModel {spec.model_id}: n={data.n}, p={data.p}, events={data.n_events}")
        if truth.coefficients_drawn:
            print("Coefficients drawn from U(-1, 1); recorded in truth.json")
        _print_paths(paths)
        return EXIT_OK

    return _run(run, args)


def cmd_config(args):
    """Execute config command"""
    from config import load_run_defaults, load_simulation_presets
    from reports import result_json_schema

    if args.schema:
        print(json.dumps(result_json_schema(), indent=2))
        return EXIT_OK

    if args.show:
        print("Current Configuration")
        print("=" * 40)
        defaults = load_run_defaults()
        for section in ('peeling', 'cross_validation', 'coverage', 'run'):
            print(f"\n{section.replace('_', ' ').title()}:")
            for key, value in defaults.get(section, {}).items():
                print(f"  {key}: {value}")
        print("\nSimulation models:")
        for model_id, preset in load_simulation_presets().get('models', {}).items():
            print(f"  {model_id}: n={preset['n']}, p={preset['p']}, {preset['description']}")
        print("\nEnvironment:")
        for name in ('SBH_THREADS', 'SBH_OUTPUT_DIR', 'SBH_LOG_LEVEL'):
            print(f"  {name}: {os.getenv(name, '(unset)')}")

    return EXIT_OK


def main(argv: Optional[List[str]] = None):
    """Main entry point"""
    args = parse_args(argv)

    if args.command == 'fit':
        return cmd_fit(args)
    elif args.command == 'cv':
        return cmd_cv(args)
    elif args.command == 'permtest':
        return cmd_permtest(args)
    elif args.command == 'simulate':
        return cmd_simulate(args)
    elif args.command == 'config':
        return cmd_config(args)
    else:
        print("Survival Bump Hunting v1.0")
        print("=" * 40)
        print("\nUsage:")
        print("  python cli.py simulate --model 2 --out runs/model2")
        print("  python cli.py fit --input data.csv --M 2")
        print("  python cli.py cv --model 2 --B 16")
        print("  python cli.py permtest --model 3 --A 256")
        print("  python cli.py config --show")
        print("\nUse --help for more options")
        return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
