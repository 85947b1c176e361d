"""Landing mission supervision: phase logic, attempt outcomes, recovery.

The supervisor consumes truth-side relative geometry (contact is a
physical event) plus the visibility flag, and decides when an attempt
ends.  A touchdown needs the aircraft inside the horizontal radius and
within the vertical band at the same instant; dropping below the deck
band anywhere else is a miss and counts as an abort, as does losing
sight of the deck for more than the visibility timeout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

import numpy as np

from . import uav_model
from .mpc import ReferenceTrajectory


class MissionPhase(Enum):
    FOLLOW = auto()
    LAND = auto()
    TOUCHDOWN = auto()
    ABORT_CLIMB = auto()
    SEARCH = auto()


@dataclass(frozen=True, slots=True)
class LandingCriteria:
    horiz_radius: float = 1.0
    vert_tol: float = 0.15
    miss_depth: float = 0.2
    visibility_timeout: float = 0.5


@dataclass(frozen=True, slots=True)
class CommitRule:
    """Hold inside this envelope to switch the descent to its final bias."""

    radius: float = 0.8
    height: float = 1.4
    hold: float = 1.0
    bias: float = 0.6


@dataclass(frozen=True, slots=True)
class AttemptRecord:
    t_trigger: float
    outcome: str            # "touchdown" | "abort"
    t_outcome: float
    final_offset: float


def landing_success(horiz_offset: float, z_rel: float,
                    criteria: LandingCriteria) -> bool:
    """Inclusive touchdown test on truth offsets (z_rel = uav_z - deck_z)."""
    return (horiz_offset <= criteria.horiz_radius
            and -criteria.miss_depth <= z_rel <= criteria.vert_tol)


class MissionSupervisor:
    def __init__(self, criteria: LandingCriteria | None = None,
                 commit: CommitRule | None = None,
                 follow_height: float = 3.0, climb_height: float = 3.0):
        self.criteria = criteria if criteria is not None else LandingCriteria()
        self.commit = commit if commit is not None else CommitRule()
        self.follow_height = follow_height
        self.climb_height = climb_height
        self.phase = MissionPhase.FOLLOW
        self.committed = False
        self.attempts: list[AttemptRecord] = []
        self.search_started_at: float | None = None
        self._t_trigger: float | None = None
        self._last_visible = 0.0
        self._commit_since: float | None = None
        self._climb_target = 0.0

    @property
    def approach_bias(self) -> float:
        if self.committed and self.phase is MissionPhase.LAND:
            return self.commit.bias
        return 0.0

    def trigger(self, t: float) -> bool:
        """Start a landing attempt; only honored while following."""
        if self.phase is not MissionPhase.FOLLOW:
            return False
        self.phase = MissionPhase.LAND
        self._t_trigger = t
        self._last_visible = t
        self._commit_since = None
        self.committed = False
        return True

    def update(self, t: float, *, visible: bool, horiz_offset: float,
               uav_z: float, deck_z: float) -> MissionPhase:
        if self.phase is MissionPhase.LAND:
            self._update_land(t, visible, horiz_offset, uav_z, deck_z)
        elif self.phase is MissionPhase.ABORT_CLIMB:
            if visible:
                self.phase = MissionPhase.FOLLOW
            elif uav_z >= self._climb_target - 0.3:
                self.phase = MissionPhase.SEARCH
                self.search_started_at = t
        elif self.phase is MissionPhase.SEARCH:
            if visible:
                self.phase = MissionPhase.FOLLOW
        return self.phase

    def _update_land(self, t, visible, horiz_offset, uav_z, deck_z):
        c = self.criteria
        z_rel = uav_z - deck_z
        if landing_success(horiz_offset, z_rel, c):
            self._finish(t, "touchdown", horiz_offset)
            self.phase = MissionPhase.TOUCHDOWN
            return
        if z_rel < -c.miss_depth:
            # reached deck level away from the pad: that attempt is gone
            self._finish(t, "abort", horiz_offset)
            self._begin_climb(deck_z)
            return
        if visible:
            self._last_visible = t
        elif t - self._last_visible > c.visibility_timeout:
            self._finish(t, "abort", horiz_offset)
            self._begin_climb(deck_z)
            return
        if not self.committed:
            rule = self.commit
            # the deck is seen at the sensor rate, not every world tick
            seen = (t - self._last_visible) <= 0.2
            inside = (seen and horiz_offset <= rule.radius
                      and z_rel < rule.height)
            if inside:
                if self._commit_since is None:
                    self._commit_since = t
                elif t - self._commit_since >= rule.hold:
                    self.committed = True
            else:
                self._commit_since = None

    def _begin_climb(self, deck_z: float):
        self.phase = MissionPhase.ABORT_CLIMB
        self._climb_target = deck_z + self.climb_height
        self.committed = False
        self._commit_since = None

    def _finish(self, t: float, outcome: str, horiz_offset: float):
        self.attempts.append(AttemptRecord(t_trigger=float(self._t_trigger),
                                           outcome=outcome, t_outcome=float(t),
                                           final_offset=float(horiz_offset)))


def climb_reference(mp: int, *, x: float, y: float, psi: float,
                    climb_to: float, deck_z: float) -> ReferenceTrajectory:
    """Hold position and climb to a safe altitude after an abort."""
    x_star = np.zeros((mp, uav_model.NX))
    x_star[:, 0] = x
    x_star[:, 3] = y
    x_star[:, uav_model.IX_Z] = climb_to
    x_star[:, uav_model.IX_PSI] = psi
    return ReferenceTrajectory(x_star=x_star, zdot_b=np.zeros(mp),
                               deck_z=np.full(mp, deck_z))


def search_reference(mp: int, dt: float, *, elapsed: float, center_x: float,
                     center_y: float, deck_z: float, height: float, psi: float,
                     omega: float = 0.8, r0: float = 0.5, growth: float = 0.3,
                     r_max: float = 12.0) -> ReferenceTrajectory:
    """Outward spiral around the last believed deck position."""
    tau = elapsed + dt * np.arange(1, mp + 1)
    r = np.minimum(r0 + growth * tau, r_max)
    ang = omega * tau
    cos_a, sin_a = np.cos(ang), np.sin(ang)
    x_star = np.zeros((mp, uav_model.NX))
    x_star[:, 0] = center_x + r * cos_a
    x_star[:, 1] = growth * cos_a - r * omega * sin_a
    x_star[:, 3] = center_y + r * sin_a
    x_star[:, 4] = growth * sin_a + r * omega * cos_a
    x_star[:, uav_model.IX_Z] = deck_z + height
    x_star[:, uav_model.IX_PSI] = psi
    return ReferenceTrajectory(x_star=x_star, zdot_b=np.zeros(mp),
                               deck_z=np.full(mp, deck_z))
