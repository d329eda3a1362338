"""
CLI and I/O Tests
=================
CSV ingestion, run configuration, result documents and the command-line
entry point.
"""

import json

import numpy as np
import pytest


def _write(path, text):
    path.write_text(text)
    return path


def _small_data(n=80, seed=0):
    from models import SurvivalData

    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(n, 2))
    hazard = np.where(x[:, 0] > 0.5, 8.0, 1.0)
    return SurvivalData(
        times=rng.exponential(1.0 / hazard),
        events=(rng.uniform(size=n) > 0.3).astype(int),
        covariates=x,
        covariate_names=('age', 'dose'),
    )


class TestLoadCsv:
    """Tests for CSV ingestion"""

    def test_loads_columns_in_file_order(self, tmp_path):
        """Test covariates keep file order and status becomes an event flag"""
        from reports import load_csv

        path = _write(tmp_path / 'd.csv', "dose,time,status,age\n1.5,3.0,1,40\n2.5,1.0,0,50\n")
        data = load_csv(path)
        assert data.covariate_names == ('dose', 'age')
        assert data.times.tolist() == [3.0, 1.0]
        assert data.events.tolist() == [1, 0]
        assert data.covariates[:, 1].tolist() == [40.0, 50.0]

    def test_missing_status_column(self, tmp_path):
        """Test a file without status is a schema error"""
        from models import SchemaError
        from reports import load_csv

        with pytest.raises(SchemaError):
            load_csv(_write(tmp_path / 'd.csv', "time,x1\n1,2\n"))

    def test_no_covariates(self, tmp_path):
        """Test a file with only time and status is a schema error"""
        from models import SchemaError
        from reports import load_csv

        with pytest.raises(SchemaError):
            load_csv(_write(tmp_path / 'd.csv', "time,status\n1,1\n"))

    def test_missing_file(self, tmp_path):
        """Test a missing path is a schema error"""
        from models import SchemaError
        from reports import load_csv

        with pytest.raises(SchemaError):
            load_csv(tmp_path / 'absent.csv')

    def test_bad_status_names_row_and_column(self, tmp_path):
        """Test status 2 on row 2 is reported with its location"""
        from models import ParseError
        from reports import load_csv

        path = _write(tmp_path / 'd.csv', "time,status,x1\n1,1,0.5\n2,2,0.1\n")
        with pytest.raises(ParseError) as info:
            load_csv(path)
        assert info.value.row == 2
        assert info.value.column == 'status'
        assert 'status must be 0 or 1' in info.value.reason

    def test_non_numeric_and_missing_values(self, tmp_path):
        """Test text and blanks in covariates are parse errors"""
        from models import ParseError
        from reports import load_csv

        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path / 'a.csv', "time,status,x1\n1,1,abc\n"))
        assert info.value.column == 'x1'
        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path / 'b.csv', "time,status,x1\n1,1,0.2\n2,0,\n"))
        assert info.value.row == 2

    def test_negative_time(self, tmp_path):
        """Test negative times are rejected"""
        from models import ParseError
        from reports import load_csv

        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path / 'd.csv', "time,status,x1\n-1,1,0.2\n"))
        assert info.value.column == 'time'

    def test_write_then_load_is_exact(self, tmp_path):
        """Test written data reloads bit for bit"""
        from reports import load_csv, write_csv

        data = _small_data()
        reloaded = load_csv(write_csv(data, tmp_path / 'copy.csv'))
        assert np.array_equal(reloaded.times, data.times)
        assert np.array_equal(reloaded.covariates, data.covariates)
        assert reloaded.covariate_names == data.covariate_names

    def test_reload_is_exact_on_wide_magnitudes(self, tmp_path):
        """Test 500 values spanning many magnitudes reload bit for bit"""
        from models import SurvivalData
        from reports import load_csv, write_csv

        rng = np.random.default_rng(13)
        covariates = rng.normal(size=(100, 4)) * 10.0 ** rng.integers(-8, 9, size=(100, 4))
        data = SurvivalData(times=rng.exponential(size=100) * 1e-3, events=rng.integers(0, 2, size=100),
                            covariates=covariates)
        reloaded = load_csv(write_csv(data, tmp_path / 'wide.csv'))
        assert np.array_equal(reloaded.times, data.times)
        assert np.array_equal(reloaded.covariates, data.covariates)


class TestRunConfig:
    """Tests for run configuration resolution"""

    def test_defaults(self):
        """Test JSON defaults reach the derived configs"""
        from config import resolve_run_config

        config = resolve_run_config({'model': '2'})
        peel, cv = config.peel_config(), config.cv_config()
        assert (peel.alpha0, peel.beta0, peel.criterion.value) == (0.10, 0.05, 'lrt')
        assert (cv.K, cv.B, cv.technique.value) == (5, 16, 'combined')

    def test_directed_peeling_by_default(self):
        """Test the shipped defaults peel in auto-directed mode and 'free' turns it off"""
        from config import parse_directions, resolve_run_config

        peel = resolve_run_config({'model': '2'}).peel_config()
        assert peel.directed
        assert peel.directions is None
        assert parse_directions('free') == (False, None)
        assert not resolve_run_config({'model': '2', 'directed': 'free'}).peel_config().directed

    def test_overrides_win(self, monkeypatch):
        """Test CLI values beat environment values"""
        from config import resolve_run_config

        monkeypatch.setenv('SBH_THREADS', '3')
        assert resolve_run_config({'model': '2'}).threads == 3
        assert resolve_run_config({'model': '2', 'threads': 5}).threads == 5

    def test_exactly_one_source(self, tmp_path):
        """Test zero or two data sources are rejected"""
        from config import resolve_run_config
        from models import ConfigError

        with pytest.raises(ConfigError):
            resolve_run_config({})
        with pytest.raises(ConfigError):
            resolve_run_config({'model': '2', 'input': tmp_path / 'd.csv'})

    def test_invalid_values(self):
        """Test out-of-range settings are configuration errors"""
        from config import resolve_run_config
        from models import ConfigError

        for bad in ({'alpha0': 1.5}, {'K': 1}, {'criterion': 'auc'}, {'directed': '+1,2'}):
            with pytest.raises(ConfigError):
                resolve_run_config({'model': '2', **bad})

    def test_no_cv_allows_single_fold(self):
        """Test technique none does not need K >= 2"""
        from config import resolve_run_config

        assert resolve_run_config({'model': '2', 'technique': 'none', 'K': 1}).K == 1

    def test_directions(self):
        """Test direction strings parse to directed peel configs"""
        from config import parse_directions, resolve_run_config

        assert parse_directions('auto') == (True, None)
        assert parse_directions('+1,-1,0') == (True, (1, -1, 0))
        assert parse_directions(None) == (False, None)
        peel = resolve_run_config({'model': '2', 'directed': '+,-,0'}).peel_config()
        assert peel.directed
        assert peel.directions == (1, -1, 0)

    def test_provenance_excludes_execution_fields(self):
        """Test thread count and output location stay out of results"""
        from config import resolve_run_config

        provenance = resolve_run_config({'model': '2', 'threads': 7}).provenance()
        assert 'threads' not in provenance
        assert 'output_dir' not in provenance
        assert provenance['seed'] == 0


class TestResultDocument:
    """Tests for result.json documents"""

    def test_fit_document_validates(self):
        """Test a fit document matches the schema and keeps every step"""
        from config import resolve_run_config
        from peeling import coverage_loop
        from reports import ResultDocument, build_fit_document

        data = _small_data(seed=1)
        coverage = coverage_loop(data)
        provenance = resolve_run_config({'model': '2'}).provenance()
        document = build_fit_document(provenance, data, coverage, ['note'])

        ResultDocument.model_validate(document)
        assert document['command'] == 'fit'
        assert len(document['steps']) == coverage.trajectories[0].length + 1
        assert document['steps'][0]['support'] == 1.0
        assert document['warnings'] == ['note']
        json.dumps(document, allow_nan=False)

    def test_cv_document_nulls_have_reasons(self):
        """Test every null statistic in a cv document carries a reason"""
        from config import resolve_run_config
        from crossval import replicated_cv
        from models import CvConfig
        from reports import build_cv_document

        data = _small_data(seed=2)
        result = replicated_cv(data, CvConfig(K=3, B=2))
        provenance = resolve_run_config({'model': '2'}).provenance()
        document = build_cv_document(provenance, data, result)

        assert document['optimal_length'] == result.optimal_length
        assert len(document['steps']) == result.profile.max_length + 1
        text = json.dumps(document, allow_nan=False)
        assert 'NaN' not in text
        for i, step in enumerate(document['steps']):
            for name in ('lhr', 'lrt', 'cer'):
                if step[name] is None:
                    assert any(key.startswith(f"steps[{i}]") for key in document['null_reasons'])

    def test_schema_rejects_non_finite(self):
        """Test NaN never validates as a number"""
        from pydantic import ValidationError
        from reports.schema import StepEntry

        with pytest.raises(ValidationError):
            StepEntry(step=0, n_in=1, support=float('nan'), lower=[0.0], upper=[1.0])


class TestCli:
    """Tests for the command-line entry point"""

    def test_simulate_is_byte_identical(self, tmp_path):
        """Test the same seed writes identical data files"""
        from cli import main

        assert main(['simulate', '--model', '2', '--seed', '7', '--out', str(tmp_path / 'a')]) == 0
        assert main(['simulate', '--model', '2', '--seed', '7', '--out', str(tmp_path / 'b')]) == 0
        assert (tmp_path / 'a' / 'data.csv').read_bytes() == (tmp_path / 'b' / 'data.csv').read_bytes()
        truth = json.loads((tmp_path / 'a' / 'truth.json').read_text())
        assert truth['spec']['coefficients'] == [12.0, -15.0, 0.0]

    def test_fit_on_simulated_file(self, tmp_path):
        """Test fit reads a CSV and writes result, rules and CSV artifacts"""
        from cli import main

        assert main(['simulate', '--model', '2', '--n', '120', '--out', str(tmp_path / 'sim')]) == 0
        out = tmp_path / 'fit'
        code = main(['fit', '--input', str(tmp_path / 'sim' / 'data.csv'), '--M', '2', '--out', str(out)])
        assert code == 0
        document = json.loads((out / 'result.json').read_text())
        assert document['command'] == 'fit'
        assert (out / 'rules.txt').read_text().startswith('Box 1')
        assert (out / 'trajectory.csv').exists()

    def test_cv_run(self, tmp_path):
        """Test cv writes the profile and a schema-valid result"""
        from cli import main
        from reports import ResultDocument

        out = tmp_path / 'cv'
        code = main(['cv', '--model', '2', '--n', '100', '--K', '3', '--B', '2', '--threads', '1',
                     '--out', str(out)])
        assert code == 0
        document = json.loads((out / 'result.json').read_text())
        ResultDocument.model_validate(document)
        assert document['technique'] == 'combined'
        assert (out / 'profile.csv').exists()

    def test_cv_result_independent_of_threads(self, tmp_path):
        """Test cv writes a byte-identical result.json for one and four threads"""
        from cli import main

        outputs = []
        for threads in ('1', '4'):
            out = tmp_path / f"threads{threads}"
            code = main(['cv', '--model', '2', '--n', '100', '--K', '3', '--B', '4', '--seed', '5',
                         '--threads', threads, '--out', str(out)])
            assert code == 0
            outputs.append((out / 'result.json').read_bytes())
        assert outputs[0] == outputs[1]

    def test_usage_error_exit_code(self, tmp_path):
        """Test an invalid configuration exits with status 2"""
        from cli import main

        assert main(['cv', '--model', '2', '--alpha0', '2.0', '--out', str(tmp_path)]) == 2
        assert main(['fit', '--out', str(tmp_path)]) == 2

    def test_module_error_writes_error_json(self, tmp_path):
        """Test a bad input file exits with status 1 and an error record"""
        from cli import main

        path = _write(tmp_path / 'bad.csv', "time,status,x1\n1,3,0.5\n")
        out = tmp_path / 'out'
        assert main(['fit', '--input', str(path), '--out', str(out)]) == 1
        record = json.loads((out / 'error.json').read_text())
        assert record['error'] == 'ParseError'
        assert record['details']['row'] == 1
