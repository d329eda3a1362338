"""
Peeling Engine Tests
====================
Candidate generation, peel and paste steps, trajectories, the covering
loop and decision rules.
"""

import numpy as np
import pytest


def _bump_data(n=300, seed=0, p=3, censor=0.3):
    """Hazard 20x higher where x1 > 0.6; other covariates are noise"""
    from models import SurvivalData

    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(n, p))
    hazard = np.where(x[:, 0] > 0.6, 20.0, 1.0)
    times = rng.exponential(1.0 / hazard)
    events = (rng.uniform(size=n) > censor).astype(int)
    return SurvivalData(times=times, events=events, covariates=x)


class TestPeelingLength:
    """Tests for the trajectory length bound"""

    def test_bound_for_default_parameters(self):
        """Test ceil(log 0.05 / log 0.9) is 29"""
        from models import max_peeling_length

        assert max_peeling_length(0.10, 0.05) == 29

    def test_trajectories_respect_bound(self):
        """Test random configurations never exceed the bound"""
        from models import PeelConfig, max_peeling_length
        from peeling import peel_trajectory

        rng = np.random.default_rng(1)
        for trial in range(20):
            alpha0 = float(rng.uniform(0.05, 0.3))
            beta0 = float(rng.uniform(0.03, 0.3))
            criterion = ['lrt', 'chs', 'lhr'][trial % 3]
            data = _bump_data(n=120, seed=trial)
            trajectory = peel_trajectory(data, config=PeelConfig(alpha0=alpha0, beta0=beta0, criterion=criterion))
            assert trajectory.length <= max_peeling_length(alpha0, beta0)
            assert trajectory.final.support >= beta0 - 1e-12

    def test_invalid_config(self):
        """Test alpha0 and beta0 outside (0, 1) are rejected"""
        from models import ConfigError, PeelConfig

        with pytest.raises(ConfigError):
            PeelConfig(alpha0=0.0)
        with pytest.raises(ConfigError):
            PeelConfig(beta0=1.0)
        with pytest.raises(ConfigError):
            PeelConfig(directions=(1, 2))


class TestCandidates:
    """Tests for quantile candidate peels"""

    def test_quantile_count(self):
        """Test slab sizes are ceil(alpha0 * m) and at least one"""
        from peeling import quantile_count

        assert quantile_count(0.1, 100) == 10
        assert quantile_count(0.1, 95) == 10
        assert quantile_count(0.1, 5) == 1

    def test_face_order(self):
        """Test faces run by covariate, lower before upper"""
        from models import PeelSide
        from peeling import allowed_faces

        faces = allowed_faces(2)
        assert faces == [(0, PeelSide.LOWER), (0, PeelSide.UPPER), (1, PeelSide.LOWER), (1, PeelSide.UPPER)]

    def test_directed_faces(self):
        """Test +1 opens only the lower face and -1 only the upper face"""
        from models import PeelSide
        from peeling import allowed_faces

        faces = allowed_faces(3, directions=(1, -1, 0))
        assert faces == [(0, PeelSide.LOWER), (1, PeelSide.UPPER), (2, PeelSide.LOWER), (2, PeelSide.UPPER)]

    def test_one_dimensional_peels(self):
        """Test bounds move to the nearest remaining order statistic"""
        from models import Box, PeelConfig, PeelSide, SurvivalData
        from peeling import candidate_peels

        x = np.arange(10, dtype=float).reshape(-1, 1)
        data = SurvivalData(times=np.arange(1, 11), events=np.ones(10, dtype=int), covariates=x)
        candidates = candidate_peels(data, np.arange(10), Box.covering(x), PeelConfig(alpha0=0.1))
        by_side = {c.side: c for c in candidates}
        assert by_side[PeelSide.LOWER].bound == 1.0
        assert by_side[PeelSide.UPPER].bound == 8.0
        assert by_side[PeelSide.LOWER].support == pytest.approx(0.9)

    def test_peel_leaving_no_events_excluded(self):
        """Test a peel that removes every event is not a candidate"""
        from models import Box, PeelConfig, PeelSide, SurvivalData
        from peeling import candidate_peels

        x = np.arange(4, dtype=float).reshape(-1, 1)
        data = SurvivalData(times=[1, 2, 3, 4], events=[1, 0, 0, 0], covariates=x)
        candidates = candidate_peels(data, np.arange(4), Box.covering(x), PeelConfig(alpha0=0.25))
        assert [c.side for c in candidates] == [PeelSide.UPPER]

    def test_tied_values_peel_together(self):
        """Test every row tied at the cut is removed"""
        from models import Box, PeelConfig, PeelSide, SurvivalData
        from peeling import candidate_peels

        x = np.array([0, 0, 0, 1, 2, 3, 4, 5, 6, 7], dtype=float).reshape(-1, 1)
        data = SurvivalData(times=np.arange(1, 11), events=np.ones(10, dtype=int), covariates=x)
        candidates = candidate_peels(data, np.arange(10), Box.covering(x), PeelConfig(alpha0=0.1))
        lower = [c for c in candidates if c.side is PeelSide.LOWER][0]
        assert lower.bound == 1.0
        assert lower.support == pytest.approx(0.7)


class TestPeelStep:
    """Tests for single peel steps"""

    def test_peels_towards_high_hazard(self):
        """Test the first LRT peel raises the lower bound of the active covariate"""
        from models import Box, PeelConfig, PeelSide
        from peeling import peel_step

        data = _bump_data(seed=2)
        record = peel_step(data, np.arange(data.n), Box.covering(data.covariates), 0.0, 1.0, PeelConfig())
        assert record.peeled_covariate == 0
        assert record.peeled_side is PeelSide.LOWER
        assert record.criterion_value > 0
        assert record.support < 1.0

    def test_min_support_stops(self):
        """Test peels below beta0 end the loop with reason min_support"""
        from models import Box, NoCandidatesError, PeelConfig
        from peeling import peel_step

        data = _bump_data(n=50, seed=3)
        with pytest.raises(NoCandidatesError) as info:
            peel_step(data, np.arange(data.n), Box.covering(data.covariates), 0.0, 1.0,
                      PeelConfig(alpha0=0.1, beta0=0.95))
        assert info.value.reason == 'min_support'

    def test_ties_go_to_lower_index_then_lower_face(self):
        """Test equal rates pick the lowest covariate index, then the lower face"""
        from models import Box, PeelConfig, PeelSide, SurvivalData
        from peeling import peel_step

        rng = np.random.default_rng(4)
        n = 40
        # every row an event with distinct values: each CHS peel drops the same count
        data = SurvivalData(times=rng.exponential(size=n), events=np.ones(n, dtype=int),
                            covariates=rng.permutation(np.arange(2 * n, dtype=float)).reshape(n, 2))
        box = Box.covering(data.covariates)
        config = PeelConfig(criterion='chs')

        record = peel_step(data, np.arange(n), box, float(n), 1.0, config)
        assert (record.peeled_covariate, record.peeled_side) == (0, PeelSide.LOWER)

        record = peel_step(data, np.arange(n), box, float(n), 1.0, config, directions=(-1, 0))
        assert (record.peeled_covariate, record.peeled_side) == (0, PeelSide.UPPER)

        record = peel_step(data, np.arange(n), box, float(n), 1.0, config, directions=(-1, 1),
                           peelable=np.array([False, True]))
        assert (record.peeled_covariate, record.peeled_side) == (1, PeelSide.LOWER)


class TestTrajectory:
    """Tests for full peeling trajectories"""

    def test_nested_boxes_and_decreasing_support(self):
        """Test boxes are nested and supports strictly decrease"""
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=4))
        supports = trajectory.supports
        assert supports[0] == 1.0
        assert np.all(np.diff(supports) < 0)
        for outer, inner in zip(trajectory.boxes[:-1], trajectory.boxes[1:]):
            assert np.all(inner.lower >= outer.lower) and np.all(inner.upper <= outer.upper)
        assert trajectory.stop_reason in ('max_steps', 'min_support', 'no_candidates')

    def test_finds_planted_region(self):
        """Test the final box sits inside the high-hazard half of x1"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(n=400, seed=5), config=PeelConfig(beta0=0.2))
        assert trajectory.final.box.lower[0] > 0.5
        assert trajectory.final.end_points.lhr > 0

    def test_chs_criterion_counts_events(self):
        """Test the CHS criterion of each step equals its in-box event count"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=6), config=PeelConfig(criterion='chs'))
        for record in trajectory.steps:
            assert record.criterion_value == record.n_events_in

    def test_empty_trajectory(self):
        """Test a beta0 too large for any peel gives an empty trajectory"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(n=60, seed=7), config=PeelConfig(beta0=0.95))
        assert trajectory.empty
        assert trajectory.length == 0
        assert trajectory.stop_reason == 'min_support'

    def test_no_events(self):
        """Test a fully censored dataset stops before peeling"""
        from models import SurvivalData
        from peeling import peel_trajectory

        data = SurvivalData(times=np.arange(1, 21), events=np.zeros(20, dtype=int),
                            covariates=np.linspace(0, 1, 20).reshape(-1, 1))
        trajectory = peel_trajectory(data)
        assert trajectory.empty
        assert trajectory.stop_reason == 'no_events'

    def test_directed_peeling_uses_allowed_faces(self):
        """Test directed peeling only moves permitted faces"""
        from models import PeelConfig
        from peeling import peel_trajectory

        data = _bump_data(seed=8)
        trajectory = peel_trajectory(data, config=PeelConfig(peel_mode='directed', directions=(1, 0, -1)))
        start = trajectory.initial_box
        final = trajectory.final.box
        assert final.upper[0] == start.upper[0]
        assert final.lower[2] == start.lower[2]

    def test_auto_directions_from_score_sign(self):
        """Test automatic directions keep the high end of a hazard-raising covariate"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=9), config=PeelConfig(peel_mode='directed'))
        assert trajectory.directions[0] == 1

    def test_preselect_restricts_covariates(self):
        """Test pre-selection keeps peeling to the top-scoring covariates"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=10, p=6), config=PeelConfig(preselect=1))
        assert trajectory.peelable.tolist() == [True, False, False, False, False, False]
        assert trajectory.used_covariates() in ([], [0])

    def test_step_limit(self):
        """Test max_steps caps the trajectory"""
        from models import PeelConfig
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=11), config=PeelConfig(max_steps=3))
        assert trajectory.length <= 3

    def test_training_rows_only(self):
        """Test supports are fractions of the active rows"""
        from peeling import peel_trajectory

        data = _bump_data(seed=12)
        active = np.arange(0, data.n, 2)
        trajectory = peel_trajectory(data, active)
        assert trajectory.final.n_in == pytest.approx(trajectory.final.support * active.size)
        assert trajectory.membership(trajectory.length)[1::2].sum() == 0

    def test_traces(self):
        """Test usage traces name the peeled covariates and importance is signed"""
        from peeling import peel_trajectory

        trajectory = peel_trajectory(_bump_data(seed=13))
        assert len(trajectory.trace_usage) == trajectory.length
        assert trajectory.trace_importance.shape == (3, trajectory.length + 1)
        assert np.all(trajectory.trace_importance[:, 0] == 0)
        assert trajectory.trace_importance[0, -1] > 0


    def test_range_importance(self):
        """Test signed range importance on boxes and on trajectory traces"""
        from models import Box
        from peeling import peel_trajectory, range_importance

        initial = Box([0.0, 0.0, 1.0], [1.0, 2.0, 1.0])
        boxes = [initial, Box([0.25, 0.0, 1.0], [1.0, 1.5, 1.0])]
        importance = range_importance(boxes, initial)
        assert importance.shape == (3, 2)
        assert importance[:, 0].tolist() == [0.0, 0.0, 0.0]
        assert importance[:, 1].tolist() == [0.25, -0.25, 0.0]

        trajectory = peel_trajectory(_bump_data(seed=18))
        np.testing.assert_array_equal(
            trajectory.trace_importance, range_importance(trajectory.boxes, trajectory.initial_box)
        )

    def test_rerun_is_bit_identical(self):
        """Test the same input and config reproduce every box and criterion value"""
        from models import PeelConfig
        from peeling import peel_trajectory

        data = _bump_data(seed=17)
        for config in (PeelConfig(), PeelConfig(criterion='lhr', pasting=True),
                       PeelConfig(peel_mode='directed', preselect=2)):
            first = peel_trajectory(data, config=config)
            second = peel_trajectory(data, config=config)
            assert first.length == second.length
            for a, b in zip(first.steps, second.steps):
                assert a.box.same_as(b.box)
                assert np.array_equal(a.in_box, b.in_box)
                assert np.array_equal([a.criterion_value, a.rate], [b.criterion_value, b.rate], equal_nan=True)
            assert np.array_equal(first.trace_importance, second.trace_importance)

    def test_directed_single_covariate_matches_threshold_sweep(self):
        """Test a directed 1-D trajectory equals a brute-force sweep over observed thresholds"""
        import math

        from models import DegenerateVarianceError, PeelConfig, SurvivalData
        from peeling import peel_trajectory
        from survival import log_rank_statistic

        config = PeelConfig(peel_mode='directed', directions=(1,))
        for seed in range(8):
            rng = np.random.default_rng(100 + seed)
            n = int(rng.integers(15, 31))
            x = rng.uniform(size=n)
            times = rng.exponential(1.0 / np.where(x > 0.5, 6.0, 1.0))
            events = (rng.uniform(size=n) > 0.2).astype(int)
            data = SurvivalData(times=times, events=events, covariates=x[:, None])

            threshold = x.min()
            bounds, values = [], []
            for _ in range(config.length_bound):
                inside = x >= threshold
                k = max(1, math.ceil(round(config.alpha0 * inside.sum(), 9)))
                choices = [t for t in np.unique(x) if t > threshold and np.count_nonzero(inside & (x < t)) >= k]
                if not choices:
                    break
                kept = x >= choices[0]
                if kept.mean() < config.beta0 or not data.event_mask[kept].any():
                    break
                try:
                    z = log_rank_statistic(data, kept)
                except DegenerateVarianceError:
                    break
                threshold = choices[0]
                bounds.append(threshold)
                values.append(z)

            trajectory = peel_trajectory(data, config=config)
            assert trajectory.length == len(bounds)
            assert [s.box.lower[0] for s in trajectory.steps[1:]] == bounds
            assert all(s.box.upper[0] == x.max() for s in trajectory.steps)
            np.testing.assert_allclose([s.criterion_value for s in trajectory.steps[1:]], values, atol=1e-10)


class TestPasting:
    """Tests for bottom-up pasting"""

    @pytest.mark.parametrize('alpha0, first_row', [(0.10, 11), (0.20, 10)])
    def test_paste_restores_high_risk_slab(self, alpha0, first_row):
        """Test slabs are sized from the excluded rows and pasting stops before late failures"""
        from models import Box, PeelConfig, SurvivalData
        from peeling import paste_step
        from survival import log_rank_statistic

        x = np.arange(20) / 20.0
        times = np.r_[20.0 + np.arange(10), [0.3, 0.2, 0.1], 5.0 + np.arange(7)]
        data = SurvivalData(times=times, events=np.ones(20, dtype=int), covariates=x[:, None])
        box = Box([x[13]], [x[19]])
        start_z = log_rank_statistic(data, box.contains(data.covariates))

        record = paste_step(data, np.arange(20), box, start_z, PeelConfig(alpha0=alpha0))
        assert record is not None and record.pasted
        assert record.box.lower[0] == x[first_row]
        assert record.box.upper[0] == x[19]
        assert record.support == pytest.approx((20 - first_row) / 20.0)
        assert record.criterion_value > start_z
        assert record.criterion_value == pytest.approx(
            log_rank_statistic(data, record.box.contains(data.covariates)), abs=1e-12
        )

    def test_pasted_box_stays_between_steps(self):
        """Test pasting never reaches the parent support and keeps nesting"""
        from models import PeelConfig
        from peeling import peel_trajectory

        for seed in range(5):
            data = _bump_data(seed=20 + seed)
            plain = peel_trajectory(data)
            pasted = peel_trajectory(data, config=PeelConfig(pasting=True))
            if plain.length < 1:
                continue
            parent = pasted.steps[-2]
            final = pasted.final
            assert final.support < parent.support
            assert final.support >= plain.final.support
            assert np.all(final.box.lower >= parent.box.lower)
            assert np.all(final.box.upper <= parent.box.upper)
            if final.pasted:
                assert final.criterion_value > plain.final.criterion_value


class TestEndPoints:
    """Tests for box end points"""

    def test_unpeeled_values(self):
        """Test the full box has LHR 0, LRT 0 and CER 1"""
        from peeling import box_end_points

        data = _bump_data(seed=30)
        points = box_end_points(data, np.ones(data.n, dtype=bool))
        assert (points.lhr, points.lrt, points.cer) == (0.0, 0.0, 1.0)

    def test_empty_box_reason(self):
        """Test an empty box gives NaN with reason codes"""
        from peeling import box_end_points

        data = _bump_data(seed=31)
        points = box_end_points(data, np.zeros(data.n, dtype=bool))
        assert np.isnan(points.lrt)
        assert points.reasons['lrt'] == 'empty_box'


class TestCoverage:
    """Tests for the covering loop and rules"""

    def test_two_boxes_disjoint(self):
        """Test the second box is grown on rows outside the first"""
        from models import PeelConfig
        from peeling import coverage_loop

        data = _bump_data(n=400, seed=40)
        coverage = coverage_loop(data, PeelConfig(beta0=0.1), max_boxes=2)
        assert 1 <= coverage.n_boxes <= 2
        if coverage.n_boxes == 2:
            first = coverage.trajectories[0].membership(coverage.trajectories[0].length)
            second = coverage.trajectories[1].membership(coverage.trajectories[1].length)
            assert not np.any(first & second)
        assert coverage.rule.text().startswith("Box 1: ")

    def test_single_box_rule(self):
        """Test M=1 gives one conjunctive rule block"""
        from peeling import coverage_loop

        coverage = coverage_loop(_bump_data(seed=41))
        assert len(coverage.rule.boxes) == 1
        assert len(coverage.rule.text().splitlines()) == 1

    def test_invalid_box_count(self):
        """Test max_boxes below one is rejected"""
        from models import ConfigError
        from peeling import coverage_loop

        with pytest.raises(ConfigError):
            coverage_loop(_bump_data(n=30, seed=42), max_boxes=0)

    def test_rule_text_format(self):
        """Test canonical conjunct text and ordering"""
        from models import Box
        from peeling import decision_rule

        start = Box([0.0, 0.0], [1.0, 1.0])
        box = Box([0.25, 0.0], [1.0, 0.5])
        rule = decision_rule([box], start, ('age', 'dose'))
        assert rule.text() == "Box 1: age >= 0.25 AND dose <= 0.5"

    def test_unconstrained_rule(self):
        """Test a box equal to the start box renders as TRUE"""
        from models import Box
        from peeling import decision_rule

        start = Box([0.0], [1.0])
        assert decision_rule([start], start, ('x1',)).text() == "Box 1: TRUE"
