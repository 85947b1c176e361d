"""Run-level statistics: preview error, turn tracking, landing outcomes.

Prediction rows are matched to truth by integer tick index (times live on
the tick grid by construction), never by nearest-neighbor search, so a
mismatch is a bug and not something to paper over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import logio
from .simulate import SimResult, TICKS_HEADER


class InsufficientCoverage(RuntimeError):
    """Too few prediction rows had truth to compare against."""


class EmptySelection(RuntimeError):
    """A filtered statistic matched no samples."""


_IX_T = TICKS_HEADER.index("t")
_IX_UX = TICKS_HEADER.index("usv_x")
_IX_UY = TICKS_HEADER.index("usv_y")
_IX_ETA_DOT = TICKS_HEADER.index("usv_eta_dot")
_IX_AX = TICKS_HEADER.index("uav_x")
_IX_AY = TICKS_HEADER.index("uav_y")
_IX_PHASE = TICKS_HEADER.index("phase")


@dataclass(frozen=True, slots=True)
class PredictionErrorReport:
    mark_s: float
    n: int
    mean_m: float
    max_m: float
    std_m: float

    @classmethod
    def from_errors(cls, mark_s: float, errors) -> "PredictionErrorReport":
        if not len(errors):
            raise EmptySelection("no errors to summarize")
        n = len(errors)
        mean = sum(errors) / n
        var = sum((e - mean) ** 2 for e in errors) / n
        return cls(mark_s=float(mark_s), n=n, mean_m=mean,
                   max_m=max(errors), std_m=math.sqrt(var))


def prediction_error_values(result: SimResult, *, world_hz: int = 100) -> dict:
    """Horizontal preview error per mark, matched to truth by tick index."""
    values: dict[float, list[float]] = {}
    n_ticks = len(result.ticks)
    for t_anchor, mark, x, y, _eta in result.predictions:
        target = int(round((t_anchor + mark) * world_hz))
        if target >= n_ticks:
            continue
        row = result.ticks[target]
        err = math.hypot(x - row[_IX_UX], y - row[_IX_UY])
        values.setdefault(mark, []).append(err)
    return values


def prediction_errors(result: SimResult, *, world_hz: int = 100,
                      min_count: int = 10) -> dict:
    values = prediction_error_values(result, world_hz=world_hz)
    if not values:
        raise InsufficientCoverage("run produced no matchable predictions")
    out = {}
    for mark, errs in sorted(values.items()):
        if len(errs) < min_count:
            raise InsufficientCoverage(
                f"only {len(errs)} samples at mark {mark}s, need {min_count}")
        out[mark] = PredictionErrorReport.from_errors(mark, errs)
    return out


def pooled_prediction_errors(results, *, world_hz: int = 100,
                             min_count: int = 10) -> dict:
    """Per-mark reports over the concatenated errors of several runs."""
    pooled: dict[float, list[float]] = {}
    for res in results:
        for mark, errs in prediction_error_values(res, world_hz=world_hz).items():
            pooled.setdefault(mark, []).extend(errs)
    if not pooled:
        raise InsufficientCoverage("no matchable predictions in any run")
    out = {}
    for mark, errs in sorted(pooled.items()):
        if len(errs) < min_count:
            raise InsufficientCoverage(
                f"only {len(errs)} pooled samples at mark {mark}s")
        out[mark] = PredictionErrorReport.from_errors(mark, errs)
    return out


def turn_offsets(result: SimResult, *, rate_threshold: float = 0.1) -> list:
    """Horizontal vessel-aircraft offsets on ticks spent actually turning.

    A tick counts when the truth yaw rate is strictly above the threshold
    in magnitude and the mission is following or landing (recovery phases
    would measure the spiral, not the tracker).
    """
    offsets = []
    for row in result.ticks:
        if abs(row[_IX_ETA_DOT]) <= rate_threshold:
            continue
        if row[_IX_PHASE] not in ("FOLLOW", "LAND"):
            continue
        offsets.append(math.hypot(row[_IX_UX] - row[_IX_AX],
                                  row[_IX_UY] - row[_IX_AY]))
    return offsets


@dataclass(frozen=True, slots=True)
class TurnTrackingReport:
    n: int
    median_m: float
    fraction_within: tuple    # ((radius, fraction), ...)


def turn_tracking(result: SimResult, *, rate_threshold: float = 0.1,
                  radii=(0.5, 1.0)) -> TurnTrackingReport:
    offsets = turn_offsets(result, rate_threshold=rate_threshold)
    if not offsets:
        raise EmptySelection("no ticks above the turn-rate threshold")
    ordered = sorted(offsets)
    n = len(ordered)
    mid = n // 2
    median = ordered[mid] if n % 2 else 0.5 * (ordered[mid - 1] + ordered[mid])
    fractions = tuple((r, sum(1 for o in ordered if o <= r) / n) for r in radii)
    return TurnTrackingReport(n=n, median_m=median, fraction_within=fractions)


@dataclass(frozen=True, slots=True)
class LandingStats:
    attempts: int
    touchdowns: int
    aborts: int
    success_rate: float
    mean_touchdown_offset_m: float


def landing_stats(results) -> LandingStats:
    attempts = touchdowns = aborts = 0
    offsets = []
    for res in results:
        for a in res.attempts:
            attempts += 1
            if a.outcome == "touchdown":
                touchdowns += 1
                offsets.append(a.final_offset)
            elif a.outcome == "abort":
                aborts += 1
            else:
                raise ValueError(f"unknown outcome {a.outcome!r}")
    if attempts == 0:
        raise EmptySelection("no landing attempts in these runs")
    if touchdowns + aborts != attempts:
        raise AssertionError("outcome counts do not add up")
    mean_off = sum(offsets) / len(offsets) if offsets else float("nan")
    return LandingStats(attempts=attempts, touchdowns=touchdowns,
                        aborts=aborts, success_rate=touchdowns / attempts,
                        mean_touchdown_offset_m=mean_off)


PREVIEW_TABLE_HEADER = ("scenario", "mode", "horizon_s", "mean_m", "max_m",
                        "std_m", "n")


def write_preview_table(path, entries) -> None:
    """entries: (scenario, mode, PredictionErrorReport) triples."""
    rows = [(scenario, mode, rep.mark_s, rep.mean_m, rep.max_m, rep.std_m,
             rep.n) for scenario, mode, rep in entries]
    logio.write_csv(path, PREVIEW_TABLE_HEADER, rows)
