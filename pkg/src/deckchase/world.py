"""Ground-truth vehicle plants and the noisy relative pose sensor.

Both plants deliberately disobey the models the estimator and controller
assume.  The vessel carries surge and yaw lags, a turn-speed coupling, and
lateral drag 20% stronger than the filter's nominal value; the aircraft
tracks velocity commands through jerk- and acceleration-limited axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_pi_scalar
from .usv_filter import PoseMeasurement


@dataclass(frozen=True, slots=True)
class UsvPlantConfig:
    mass: float = 35.0
    k_y_true: float = 72.0      # nominal 60 plus 20% model mismatch
    tau_surge: float = 0.4
    surge_accel_max: float = 2.0   # thrust authority, m/s^2
    yaw_wn: float = 2.0         # lightly underdamped steering response
    yaw_zeta: float = 0.4
    turn_coupling: float = 0.5  # attainable surge = cmd / (1 + c*|yaw rate|)


@dataclass(slots=True)
class UsvState:
    x: float = 0.0
    y: float = 0.0
    eta: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    eta_dot: float = 0.0
    eta_ddot: float = 0.0

    @property
    def z(self) -> float:
        return 0.0

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


def usv_plant_step(state: UsvState, surge_cmd: float, yaw_rate_cmd: float,
                   dt: float, cfg: UsvPlantConfig) -> UsvState:
    """One semi-implicit step of the vessel.

    The yaw rate answers its command through an underdamped second order,
    the heading integrates, and the world velocity is re-expressed in the
    new body frame: the rotation transfers momentum into sideslip instead
    of creating speed, so the hull can never move faster than the largest
    surge it was ever asked for.
    """
    wn = cfg.yaw_wn
    eta_ddot = state.eta_ddot + dt * (wn * wn * (yaw_rate_cmd - state.eta_dot)
                                      - 2.0 * cfg.yaw_zeta * wn * state.eta_ddot)
    eta_dot = state.eta_dot + dt * eta_ddot
    eta = wrap_pi_scalar(state.eta + dt * eta_dot)

    c, s = math.cos(eta), math.sin(eta)
    surge = c * state.vx + s * state.vy
    sway = -s * state.vx + c * state.vy

    s_eff = surge_cmd / (1.0 + cfg.turn_coupling * abs(eta_dot))
    d_surge = (dt / cfg.tau_surge) * (s_eff - surge)
    lim = dt * cfg.surge_accel_max
    if d_surge > lim:
        d_surge = lim
    elif d_surge < -lim:
        d_surge = -lim
    surge += d_surge
    sway += dt * (-cfg.k_y_true / cfg.mass) * sway

    vx = c * surge - s * sway
    vy = s * surge + c * sway
    return UsvState(x=state.x + dt * vx, y=state.y + dt * vy, eta=eta,
                    vx=vx, vy=vy, eta_dot=eta_dot, eta_ddot=eta_ddot)


@dataclass(frozen=True, slots=True)
class UavPlantConfig:
    v_max: float = 8.0
    a_max: float = 6.0
    j_max: float = 20.0
    brake_floor: float = 3.0       # accel allowance kept near zero gap
    psi_rate_max: float = 2.0
    psi_acc_max: float = 4.0
    psi_jerk_max: float = 10.0
    psi_brake_floor: float = 1.5


@dataclass(slots=True)
class UavState:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    psi: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    psi_dot: float = 0.0
    ax: float = 0.0
    ay: float = 0.0
    az: float = 0.0
    psi_ddot: float = 0.0


def _axis_step(pos, vel, acc, v_cmd, dt, v_max, a_max, j_max, floor):
    # deadbeat velocity gain so one-step-ahead commands carry acceleration;
    # the brake cap keeps large-gap approaches jerk-feasible while the floor
    # preserves authority for the small gaps closed-loop commands produce
    gap = v_cmd - vel
    cap = math.sqrt(2.0 * j_max * abs(gap))
    if cap < floor:
        cap = floor
    if cap > a_max:
        cap = a_max
    a_des = gap / dt
    if a_des > cap:
        a_des = cap
    elif a_des < -cap:
        a_des = -cap
    da = a_des - acc
    lim = j_max * dt
    if da > lim:
        da = lim
    elif da < -lim:
        da = -lim
    acc += da
    vel += dt * acc
    if vel > v_max:
        vel = v_max
    elif vel < -v_max:
        vel = -v_max
    pos += dt * vel
    return pos, vel, acc


def uav_plant_step(state: UavState, cmd, dt: float, cfg: UavPlantConfig) -> UavState:
    """Track a velocity and heading-rate command through limited axes."""
    x, vx, ax = _axis_step(state.x, state.vx, state.ax, cmd.vx, dt,
                           cfg.v_max, cfg.a_max, cfg.j_max, cfg.brake_floor)
    y, vy, ay = _axis_step(state.y, state.vy, state.ay, cmd.vy, dt,
                           cfg.v_max, cfg.a_max, cfg.j_max, cfg.brake_floor)
    z, vz, az = _axis_step(state.z, state.vz, state.az, cmd.vz, dt,
                           cfg.v_max, cfg.a_max, cfg.j_max, cfg.brake_floor)
    psi, psi_dot, psi_ddot = _axis_step(state.psi, state.psi_dot, state.psi_ddot,
                                        cmd.psi_dot, dt, cfg.psi_rate_max,
                                        cfg.psi_acc_max, cfg.psi_jerk_max,
                                        cfg.psi_brake_floor)
    return UavState(x=x, y=y, z=z, psi=psi, vx=vx, vy=vy, vz=vz,
                    psi_dot=psi_dot, ax=ax, ay=ay, az=az, psi_ddot=psi_ddot)


@dataclass(frozen=True, slots=True)
class SensorConfig:
    sigma_pos: float = 0.05
    sigma_eta: float = 0.02
    cone_half_angle: float = math.radians(42.0)
    max_range: float = 15.0   # horizontal reach of detection


def deck_visible(usv: UsvState, uav: UavState, cfg: SensorConfig) -> bool:
    """True when the deck sits inside the downward view cone and in range."""
    dz = uav.z - usv.z
    if dz <= 0.0:
        return False
    horiz = math.hypot(usv.x - uav.x, usv.y - uav.y)
    if horiz > cfg.max_range:
        return False
    return horiz <= math.tan(cfg.cone_half_angle) * dz


def sense_pose(t: float, usv: UsvState, uav: UavState, rng: np.random.Generator,
               cfg: SensorConfig, noise: bool = True) -> PoseMeasurement | None:
    """Absolute deck pose recovered from the camera, or None when unseen.

    Exactly four normal draws are consumed per visible frame so the noise
    stream stays aligned across runs regardless of what the aircraft does.
    """
    if not deck_visible(usv, uav, cfg):
        return None
    x, y, z, eta = usv.x, usv.y, usv.z, usv.eta
    if noise:
        x += cfg.sigma_pos * rng.standard_normal()
        y += cfg.sigma_pos * rng.standard_normal()
        z += cfg.sigma_pos * rng.standard_normal()
        eta += cfg.sigma_eta * rng.standard_normal()
    return PoseMeasurement(t=t, x=x, y=y, z=z, eta=wrap_pi_scalar(eta))
