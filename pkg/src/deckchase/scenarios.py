"""Vessel command scripts: canned maneuver patterns plus JSON round-trip.

A scenario is a piecewise-constant timeline of (surge speed, yaw rate)
commands.  Scripts only shape the commands; the actual path comes out of
the vessel plant with its lags and turn-speed coupling, so arcs are
tighter and slower than the commanded speed/rate ratio suggests.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

MAX_SURGE = 5.0
MAX_YAW_RATE = 1.0


@dataclass(frozen=True, slots=True)
class ScenarioScript:
    name: str
    timeline: tuple            # ((t, surge_speed, yaw_rate), ...)
    duration: float
    noise: bool = True
    _times: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.timeline:
            raise ValueError("timeline must not be empty")
        rows = tuple((float(t), float(s), float(w)) for t, s, w in self.timeline)
        object.__setattr__(self, "timeline", rows)
        if rows[0][0] != 0.0:
            raise ValueError("timeline must start at t=0")
        for (ta, *_), (tb, *_) in zip(rows, rows[1:]):
            if tb <= ta:
                raise ValueError("timeline times must be strictly increasing")
        for t, surge, yaw in rows:
            if abs(surge) > MAX_SURGE:
                raise ValueError(f"surge command {surge} exceeds {MAX_SURGE} m/s")
            if abs(yaw) > MAX_YAW_RATE:
                raise ValueError(f"yaw rate command {yaw} exceeds {MAX_YAW_RATE} rad/s")
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")
        object.__setattr__(self, "_times", tuple(r[0] for r in rows))

    def command_at(self, t: float) -> tuple[float, float]:
        """Active (surge_speed, yaw_rate) at time t; the last entry holds."""
        i = bisect_right(self._times, t) - 1
        if i < 0:
            i = 0
        row = self.timeline[i]
        return row[1], row[2]

    def to_json(self) -> str:
        body = {
            "name": self.name,
            "duration": self.duration,
            "noise": self.noise,
            "timeline": [
                {"t": t, "surge_speed": s, "yaw_rate": w}
                for t, s, w in self.timeline
            ],
        }
        return json.dumps(body, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioScript":
        try:
            body = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"scenario is not valid JSON: {exc}") from exc
        try:
            timeline = tuple(
                (row["t"], row["surge_speed"], row["yaw_rate"])
                for row in body["timeline"]
            )
            return cls(name=body["name"], timeline=timeline,
                       duration=body["duration"],
                       noise=bool(body.get("noise", True)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"scenario JSON missing field: {exc}") from exc


def straight(speed: float = 3.0, duration: float = 40.0,
             noise: bool = True) -> ScenarioScript:
    return ScenarioScript(name="straight", duration=duration, noise=noise,
                          timeline=((0.0, speed, 0.0),))


def turn(speed: float = 3.0, yaw_rate: float = 0.4, duration: float = 45.0,
         lead_in: float = 5.0, noise: bool = True) -> ScenarioScript:
    """Straight lead-in, then a sustained constant-rate turn."""
    return ScenarioScript(name="turn", duration=duration, noise=noise,
                          timeline=((0.0, speed, 0.0),
                                    (lead_in, speed, yaw_rate)))


def figure8(speed: float = 3.0, yaw_rate: float = 0.5, laps: int = 3,
            noise: bool = True) -> ScenarioScript:
    """Bowtie eight: crossing diagonals joined by opposite 270-degree arcs.

    The diagonal length matches the turn radius the plant actually flies
    (turn-speed coupling included), so the crossing stays near the middle.
    """
    arc_t = 1.5 * math.pi / yaw_rate
    radius = (speed / (1.0 + 0.5 * yaw_rate)) / yaw_rate
    straight_t = 2.0 * radius / speed
    rows = []
    t = 0.0
    for _ in range(laps):
        rows.append((t, speed, 0.0))
        t += straight_t
        rows.append((t, speed, yaw_rate))
        t += arc_t
        rows.append((t, speed, 0.0))
        t += straight_t
        rows.append((t, speed, -yaw_rate))
        t += arc_t
    return ScenarioScript(name="figure8", duration=t, noise=noise,
                          timeline=tuple(rows))


def triangle(speed: float = 3.0, yaw_rate: float = 0.5, laps: int = 3,
             noise: bool = True) -> ScenarioScript:
    """Rounded triangle with equal time in straights and 120-degree arcs."""
    arc_t = (2.0 * math.pi / 3.0) / yaw_rate
    straight_t = arc_t
    rows = []
    t = 0.0
    for _ in range(laps):
        for _ in range(3):
            rows.append((t, speed, 0.0))
            t += straight_t
            rows.append((t, speed, yaw_rate))
            t += arc_t
    return ScenarioScript(name="triangle", duration=t, noise=noise,
                          timeline=tuple(rows))


BUILDERS = {
    "straight": straight,
    "turn": turn,
    "figure8": figure8,
    "triangle": triangle,
}


def load_scenario(spec: str) -> ScenarioScript:
    """Resolve a builder name or a path to a scenario JSON file."""
    if spec in BUILDERS:
        return BUILDERS[spec]()
    if spec.endswith(".json"):
        with open(spec, "r", encoding="utf-8") as fh:
            return ScenarioScript.from_json(fh.read())
    names = ", ".join(sorted(BUILDERS))
    raise ValueError(f"unknown scenario {spec!r}; expected one of {names} "
                     f"or a path to a .json file")
