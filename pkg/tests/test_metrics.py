import math

import pytest

from deckchase.metrics import (EmptySelection, InsufficientCoverage,
                               PREVIEW_TABLE_HEADER, PredictionErrorReport,
                               landing_stats, pooled_prediction_errors,
                               prediction_error_values, prediction_errors,
                               turn_offsets, turn_tracking,
                               write_preview_table)
from deckchase.logio import read_csv
from deckchase.mission import AttemptRecord
from deckchase.simulate import SimResult, TICKS_HEADER


def _row(**kw):
    base = {name: 0.0 for name in TICKS_HEADER}
    base["phase"] = "FOLLOW"
    base["visible"] = 1
    base.update(kw)
    return tuple(base[name] for name in TICKS_HEADER)


def _result(ticks=(), predictions=(), attempts=()):
    return SimResult(scenario="synthetic", mode="curvilinear", seed=0,
                     ticks=list(ticks), predictions=list(predictions),
                     measurements=[], events=[], attempts=list(attempts),
                     meta={})


def _cruise_ticks(n, speed=1.0):
    return [_row(t=k / 100.0, usv_x=speed * k / 100.0) for k in range(n)]


class TestReport:
    def test_small_sample_statistics(self):
        rep = PredictionErrorReport.from_errors(1.0, [1.0, 2.0, 3.0])
        assert rep.n == 3
        assert rep.mean_m == 2.0
        assert rep.max_m == 3.0
        assert rep.std_m == pytest.approx(0.816496580927726, abs=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(EmptySelection):
            PredictionErrorReport.from_errors(1.0, [])


class TestPredictionErrors:
    def test_matched_by_tick_index(self):
        ticks = _cruise_ticks(201)
        predictions = [
            (0.0, 1.0, 1.3, 0.4, 0.0),   # truth at tick 100 is x=1.0
            (0.5, 1.0, 1.5, 0.0, 0.0),   # exact hit at tick 150
            (1.9, 1.0, 0.0, 0.0, 0.0),   # lands past the run: dropped
        ]
        values = prediction_error_values(_result(ticks, predictions))
        assert set(values) == {1.0}
        assert values[1.0] == [0.5, 0.0]

    def test_marks_stay_separate(self):
        ticks = _cruise_ticks(301)
        predictions = [(0.0, 1.0, 1.0, 0.0, 0.0), (0.0, 2.0, 2.5, 0.0, 0.0)]
        values = prediction_error_values(_result(ticks, predictions))
        assert values[1.0] == [0.0]
        assert values[2.0] == [0.5]

    def test_min_count_enforced(self):
        ticks = _cruise_ticks(201)
        predictions = [(0.0, 1.0, 1.0, 0.0, 0.0)] * 3
        with pytest.raises(InsufficientCoverage):
            prediction_errors(_result(ticks, predictions), min_count=10)
        reports = prediction_errors(_result(ticks, predictions), min_count=3)
        assert reports[1.0].n == 3

    def test_no_predictions_at_all(self):
        with pytest.raises(InsufficientCoverage):
            prediction_errors(_result(_cruise_ticks(10), []))

    def test_pooling_concatenates_runs(self):
        ticks = _cruise_ticks(201)
        pred_a = [(0.0, 1.0, 1.3, 0.4, 0.0)] * 2
        pred_b = [(0.0, 1.0, 1.0, 0.0, 0.0)] * 2
        pooled = pooled_prediction_errors(
            [_result(ticks, pred_a), _result(ticks, pred_b)], min_count=4)
        assert pooled[1.0].n == 4
        assert pooled[1.0].mean_m == pytest.approx(0.25)
        assert pooled[1.0].max_m == 0.5


class TestTurnTracking:
    def test_threshold_is_strict(self):
        ticks = [
            _row(usv_eta_dot=0.1, uav_x=5.0),      # at threshold: excluded
            _row(usv_eta_dot=0.11, uav_x=3.0),
            _row(usv_eta_dot=-0.2, uav_x=4.0),
        ]
        offsets = turn_offsets(_result(ticks))
        assert offsets == [3.0, 4.0]

    def test_recovery_phases_excluded(self):
        ticks = [
            _row(usv_eta_dot=0.5, uav_x=1.0, phase="SEARCH"),
            _row(usv_eta_dot=0.5, uav_x=2.0, phase="ABORT_CLIMB"),
            _row(usv_eta_dot=0.5, uav_x=3.0, phase="LAND"),
            _row(usv_eta_dot=0.5, uav_x=4.0, phase="FOLLOW"),
        ]
        assert turn_offsets(_result(ticks)) == [3.0, 4.0]

    def test_median_even_and_odd(self):
        ticks = [_row(usv_eta_dot=0.5, uav_x=v) for v in (4.0, 1.0, 3.0)]
        rep = turn_tracking(_result(ticks))
        assert rep.n == 3
        assert rep.median_m == 3.0
        rep = turn_tracking(_result(ticks + [_row(usv_eta_dot=0.5, uav_x=2.0)]))
        assert rep.median_m == 2.5

    def test_fraction_within_radii(self):
        ticks = [_row(usv_eta_dot=0.5, uav_x=v)
                 for v in (0.2, 0.5, 0.9, 1.0, 2.0)]
        rep = turn_tracking(_result(ticks))
        assert rep.fraction_within == ((0.5, 0.4), (1.0, 0.8))

    def test_no_turning_ticks(self):
        with pytest.raises(EmptySelection):
            turn_tracking(_result([_row(usv_eta_dot=0.0, uav_x=1.0)]))


class TestLandingStats:
    def _attempt(self, outcome, offset=0.3):
        return AttemptRecord(t_trigger=1.0, outcome=outcome, t_outcome=5.0,
                             final_offset=offset)

    def test_counts_and_rate(self):
        results = [
            _result(attempts=[self._attempt("touchdown", 0.2)]),
            _result(attempts=[self._attempt("abort"),
                              self._attempt("touchdown", 0.4)]),
        ]
        stats = landing_stats(results)
        assert stats.attempts == 3
        assert stats.touchdowns == 2
        assert stats.aborts == 1
        assert stats.success_rate == pytest.approx(2.0 / 3.0)
        assert stats.mean_touchdown_offset_m == pytest.approx(0.3)

    def test_all_aborts_has_nan_offset(self):
        stats = landing_stats([_result(attempts=[self._attempt("abort")])])
        assert stats.success_rate == 0.0
        assert math.isnan(stats.mean_touchdown_offset_m)

    def test_no_attempts_rejected(self):
        with pytest.raises(EmptySelection):
            landing_stats([_result()])

    def test_unknown_outcome_rejected(self):
        with pytest.raises(ValueError):
            landing_stats([_result(attempts=[self._attempt("crashed")])])


class TestPreviewTable:
    def test_written_shape(self, tmp_path):
        p = tmp_path / "table.csv"
        rep = PredictionErrorReport.from_errors(1.0, [0.5, 0.1])
        write_preview_table(p, [("figure8", "curvilinear", rep)])
        header, rows = read_csv(p)
        assert header == PREVIEW_TABLE_HEADER
        assert rows[0][0] == "figure8"
        assert rows[0][1] == "curvilinear"
        assert float(rows[0][2]) == 1.0
        assert float(rows[0][3]) == pytest.approx(0.3)
        assert int(rows[0][6]) == 2
