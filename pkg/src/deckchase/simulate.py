"""Closed-loop simulation on a fixed integer tick grid.

The world steps at 100 Hz.  The camera delivers poses on ticks
floor(s*world_hz/sensor_hz); the controller runs every control_stride
ticks and its command is held in between.  All times are tick_index/rate,
all randomness comes from per-purpose seeded streams, and logs are
written with round-trip float text, so a (scenario, mode, seed) triple
reproduces its output files byte for byte.

Two run styles share the engine: estimation-only runs keep the camera
unconditionally locked on the vessel and log long-range predictions for
error statistics; full-stack runs fly the aircraft and optionally execute
one landing attempt.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import logio, uav_model
from .angles import wrap_pi_scalar
from .mission import (AttemptRecord, MissionPhase, MissionSupervisor,
                      climb_reference, search_reference)
from .mpc import (ControlCommand, MpcConfig, MpcController, build_reference,
                  plan_command)
from .scenarios import ScenarioScript
from .usv_filter import PoseMeasurement, PredictionHorizon, make_filter
from .world import (SensorConfig, UavPlantConfig, UavState, UsvPlantConfig,
                    UsvState, sense_pose, uav_plant_step, usv_plant_step)

TICKS_HEADER = (
    "t",
    "usv_x", "usv_y", "usv_z", "usv_eta", "usv_vx", "usv_vy", "usv_eta_dot",
    "uav_x", "uav_y", "uav_z", "uav_psi", "uav_vx", "uav_vy", "uav_vz",
    "est_x", "est_y", "est_z", "est_eta",
    "est_vx", "est_vy", "est_vz", "est_eta_dot",
    "phase", "cmd_vx", "cmd_vy", "cmd_vz", "cmd_psi_dot", "visible",
)

PREDICTIONS_HEADER = ("t_anchor", "mark_s", "x", "y", "eta")

TRIGGER_STREAM = 0
SENSOR_STREAM = 1


@dataclass(frozen=True, slots=True)
class SimConfig:
    world_hz: int = 100
    sensor_hz: int = 30
    control_stride: int = 5
    follow_height: float = 3.0
    warmup_s: float = 10.0
    est_marks: tuple = (1.0, 2.0)
    est_horizon_steps: int = 200
    attempt_window_s: float = 25.0
    linger_s: float = 2.0
    trigger_min_s: float = 10.0
    trigger_max_s: float = 35.0
    usv: UsvPlantConfig = field(default_factory=UsvPlantConfig)
    uav: UavPlantConfig = field(default_factory=UavPlantConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    mpc: MpcConfig = field(default_factory=MpcConfig)


@dataclass(slots=True)
class SimResult:
    scenario: str
    mode: str
    seed: int
    ticks: list
    predictions: list
    measurements: list
    events: list
    attempts: list
    meta: dict


def _uav_x0(uav: UavState) -> np.ndarray:
    return np.array([uav.x, uav.vx, uav.ax, uav.y, uav.vy, uav.ay,
                     uav.z, uav.vz, uav.az, uav.psi, uav.psi_dot, uav.psi_ddot])


def _sliced_horizon(filt, steps: int, skew: int) -> PredictionHorizon:
    h = filt.predict_horizon(steps + skew, 0.01)
    if skew == 0:
        return h
    return PredictionHorizon(states=h.states[skew:], dt_pred=h.dt_pred,
                             t0=h.t0 + skew * h.dt_pred)


def _tick_row(t, usv, uav, filt, phase_name, cmd, visible):
    if filt.initialized:
        est = filt.state
    else:
        est = np.zeros(8)
    return (t,
            usv.x, usv.y, usv.z, usv.eta, usv.vx, usv.vy, usv.eta_dot,
            uav.x, uav.y, uav.z, uav.psi, uav.vx, uav.vy, uav.vz,
            est[0], est[1], est[2], est[3], est[4], est[5], est[6], est[7],
            phase_name, cmd.vx, cmd.vy, cmd.vz, cmd.psi_dot, int(visible))


def _solve_stats(solve_times):
    if not solve_times:
        return {"n": 0, "mean_ms": 0.0, "max_ms": 0.0, "p95_ms": 0.0}
    ms = np.asarray(solve_times) * 1e3
    return {"n": int(ms.size), "mean_ms": float(np.mean(ms)),
            "max_ms": float(np.max(ms)),
            "p95_ms": float(np.percentile(ms, 95))}


def run_estimation(scenario: ScenarioScript, mode: str = "curvilinear",
                   seed: int = 0, cfg: SimConfig | None = None) -> SimResult:
    """Estimator-only pass: scripted vessel, camera always locked on.

    The aircraft is not simulated; every control-rate tick after warmup
    logs the predicted vessel position at the configured marks so the
    preview error statistics can be computed against the truth log.
    """
    cfg = cfg if cfg is not None else SimConfig()
    t_start = time.perf_counter()
    filt = make_filter(mode)
    rng_sensor = np.random.default_rng([seed, SENSOR_STREAM])
    usv = UsvState()
    uav = UavState(z=cfg.follow_height)
    cmd = ControlCommand(0.0, 0.0, 0.0, 0.0)
    dt = 1.0 / cfg.world_hz
    total_ticks = int(round(scenario.duration * cfg.world_hz)) + 1
    max_mark = max(cfg.est_marks)

    ticks, predictions, measurements = [], [], []
    next_s = 0
    next_sensor_tick = 0
    for k in range(total_ticks):
        t = k / cfg.world_hz
        if k == next_sensor_tick:
            # estimation runs bypass the view cone: always a detection
            x, y, z, eta = usv.x, usv.y, usv.z, usv.eta
            if scenario.noise:
                x += cfg.sensor.sigma_pos * rng_sensor.standard_normal()
                y += cfg.sensor.sigma_pos * rng_sensor.standard_normal()
                z += cfg.sensor.sigma_pos * rng_sensor.standard_normal()
                eta += cfg.sensor.sigma_eta * rng_sensor.standard_normal()
            meas = PoseMeasurement(t=t, x=x, y=y, z=z, eta=wrap_pi_scalar(eta))
            filt.ingest(meas)
            measurements.append(meas)
            next_s += 1
            next_sensor_tick = (next_s * cfg.world_hz) // cfg.sensor_hz
        if (k % cfg.control_stride == 0 and filt.initialized
                and filt.last_t >= cfg.warmup_s
                and int(round((filt.last_t + max_mark) * cfg.world_hz)) < total_ticks):
            horizon = filt.predict_horizon(cfg.est_horizon_steps, 0.01)
            for mark in cfg.est_marks:
                m = int(round(mark / horizon.dt_pred))
                s_pred = horizon.states[m - 1]
                predictions.append((filt.last_t, mark,
                                    s_pred[0], s_pred[1], s_pred[3]))
        ticks.append(_tick_row(t, usv, uav, filt, "EST", cmd, True))
        surge, yaw = scenario.command_at(t)
        usv = usv_plant_step(usv, surge, yaw, dt, cfg.usv)

    meta = {"scenario": scenario.name, "mode": mode, "seed": seed,
            "style": "estimation", "wall_s": time.perf_counter() - t_start,
            "solve": _solve_stats([])}
    return SimResult(scenario=scenario.name, mode=mode, seed=seed, ticks=ticks,
                     predictions=predictions, measurements=measurements,
                     events=[], attempts=[], meta=meta)


def run_tracking(scenario: ScenarioScript, mode: str = "curvilinear",
                 seed: int = 0, cfg: SimConfig | None = None,
                 trigger: float | str | None = None) -> SimResult:
    """Full closed loop: filter, controller, both plants, mission logic.

    trigger=None follows for the scenario duration; a float starts one
    landing attempt at that time; "auto" draws the time from the seed's
    trigger stream.  Landing runs end after the attempt settles.
    """
    cfg = cfg if cfg is not None else SimConfig()
    t_start = time.perf_counter()
    filt = make_filter(mode)
    controller = MpcController(config=cfg.mpc, stride=cfg.control_stride)
    sup = MissionSupervisor(follow_height=cfg.follow_height)
    rng_sensor = np.random.default_rng([seed, SENSOR_STREAM])
    if trigger == "auto":
        rng_trigger = np.random.default_rng([seed, TRIGGER_STREAM])
        trigger = float(rng_trigger.uniform(cfg.trigger_min_s, cfg.trigger_max_s))
    landing = trigger is not None

    usv = UsvState()
    uav = UavState(z=cfg.follow_height)
    cmd = ControlCommand(0.0, 0.0, 0.0, 0.0)
    plan = None
    plan_tick = 0
    dt = 1.0 / cfg.world_hz
    mp = cfg.mpc.mp

    ticks, predictions, measurements, events = [], [], [], []
    solve_times = []
    triggered = False
    next_s = 0
    next_sensor_tick = 0
    k = 0
    while True:
        t = k / cfg.world_hz
        if landing:
            if sup.attempts and t >= sup.attempts[0].t_outcome + cfg.linger_s:
                break
            if not sup.attempts and t > trigger + cfg.attempt_window_s:
                sup.attempts.append(_timed_out_attempt(trigger, t, usv, uav))
                events.append({"t": t, "event": "outcome", "outcome": "abort",
                               "detail": "window"})
                break
        elif k >= int(round(scenario.duration * cfg.world_hz)) + 1:
            break

        meas = None
        if k == next_sensor_tick:
            meas = sense_pose(t, usv, uav, rng_sensor, cfg.sensor,
                              noise=scenario.noise)
            if meas is not None:
                filt.ingest(meas)
                measurements.append(meas)
            next_s += 1
            next_sensor_tick = (next_s * cfg.world_hz) // cfg.sensor_hz
        visible = meas is not None

        was = sup.phase
        committed_before = sup.committed
        attempts_before = len(sup.attempts)
        if landing and not triggered and t >= trigger:
            if sup.trigger(t):
                triggered = True
                events.append({"t": t, "event": "trigger"})
        horiz = float(np.hypot(usv.x - uav.x, usv.y - uav.y))
        sup.update(t, visible=visible, horiz_offset=horiz, uav_z=uav.z,
                   deck_z=usv.z)
        if sup.phase is not was:
            events.append({"t": t, "event": "phase", "from": was.name,
                           "to": sup.phase.name})
        if len(sup.attempts) > attempts_before:
            a = sup.attempts[-1]
            events.append({"t": t, "event": "outcome", "outcome": a.outcome,
                           "final_offset": a.final_offset})
        if sup.committed and not committed_before:
            events.append({"t": t, "event": "commit"})

        if (k % cfg.control_stride == 0 and filt.initialized
                and sup.phase is not MissionPhase.TOUCHDOWN):
            ref = _phase_reference(t, cfg, filt, sup, uav, mp)
            tic = time.perf_counter()
            cmd, plan = controller.control(t, _uav_x0(uav), ref)
            plan_tick = k
            solve_times.append(time.perf_counter() - tic)
            if sup.phase in (MissionPhase.FOLLOW, MissionPhase.LAND):
                predictions.append((t, mp / 100.0, ref.x_star[-1, 0],
                                    ref.x_star[-1, 3],
                                    ref.x_star[-1, uav_model.IX_PSI]))
        elif plan is not None and sup.phase is not MissionPhase.TOUCHDOWN:
            # between solves the tracker samples the plan, not a held setpoint
            cmd = plan_command(plan, k - plan_tick, t=t)
        if sup.phase is MissionPhase.TOUCHDOWN:
            cmd = ControlCommand(0.0, 0.0, 0.0, 0.0, t=t)
            plan = None

        ticks.append(_tick_row(t, usv, uav, filt, sup.phase.name, cmd, visible))
        surge, yaw = scenario.command_at(t)
        usv = usv_plant_step(usv, surge, yaw, dt, cfg.usv)
        if sup.phase is MissionPhase.TOUCHDOWN:
            uav = UavState(x=usv.x, y=usv.y, z=usv.z, psi=uav.psi,
                           vx=usv.vx, vy=usv.vy)
        else:
            uav = uav_plant_step(uav, cmd, dt, cfg.uav)
        k += 1

    meta = {"scenario": scenario.name, "mode": mode, "seed": seed,
            "style": "landing" if landing else "tracking",
            "trigger": trigger if landing else None,
            "wall_s": time.perf_counter() - t_start,
            "solve": _solve_stats(solve_times)}
    return SimResult(scenario=scenario.name, mode=mode, seed=seed, ticks=ticks,
                     predictions=predictions, measurements=measurements,
                     events=events, attempts=list(sup.attempts), meta=meta)


def _timed_out_attempt(trigger, t, usv, uav):
    horiz = float(np.hypot(usv.x - uav.x, usv.y - uav.y))
    return AttemptRecord(t_trigger=float(trigger), outcome="abort",
                         t_outcome=float(t), final_offset=horiz)


def _phase_reference(t, cfg, filt, sup, uav, mp):
    if sup.phase in (MissionPhase.FOLLOW, MissionPhase.LAND):
        skew = int(round((t - filt.last_t) / 0.01))
        skew = max(0, skew)
        horizon = _sliced_horizon(filt, mp, skew)
        if sup.phase is MissionPhase.LAND:
            return build_reference(horizon, sup.phase, cfg.follow_height,
                                   uav_z=uav.z, approach_bias=sup.approach_bias)
        return build_reference(horizon, sup.phase, cfg.follow_height)
    est = filt.state
    if sup.phase is MissionPhase.ABORT_CLIMB:
        return climb_reference(mp, x=uav.x, y=uav.y, psi=uav.psi,
                               climb_to=est[2] + sup.climb_height,
                               deck_z=est[2])
    # SEARCH: spiral out around the last believed deck position
    elapsed = t - (sup.search_started_at if sup.search_started_at is not None
                   else t)
    return search_reference(mp, 0.01, elapsed=elapsed, center_x=est[0],
                            center_y=est[1], deck_z=est[2],
                            height=sup.follow_height, psi=uav.psi)


def run_prediction_pair(scenario: ScenarioScript, seed: int = 0,
                        cfg: SimConfig | None = None) -> dict:
    """Same scenario and seed through both filter modes, estimation style."""
    return {mode: run_estimation(scenario, mode, seed, cfg)
            for mode in ("curvilinear", "baseline")}


def run_tracking_pair(scenario: ScenarioScript, seed: int = 0,
                      cfg: SimConfig | None = None) -> dict:
    return {mode: run_tracking(scenario, mode, seed, cfg)
            for mode in ("curvilinear", "baseline")}


def run_landing_campaign(scenario: ScenarioScript, seeds,
                         cfg: SimConfig | None = None,
                         modes=("curvilinear", "baseline")) -> dict:
    """One auto-triggered attempt per seed, per mode, paired by seed."""
    out = {mode: [] for mode in modes}
    for seed in seeds:
        for mode in modes:
            out[mode].append(run_tracking(scenario, mode, seed, cfg,
                                          trigger="auto"))
    return out


def write_outputs(result: SimResult, outdir) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    logio.write_csv(out / "ticks.csv", TICKS_HEADER, result.ticks)
    logio.write_csv(out / "predictions.csv", PREDICTIONS_HEADER,
                    result.predictions)
    logio.write_pose_log(out / "measurements.csv", result.measurements)
    logio.write_jsonl(out / "events.jsonl", result.events)
    logio.write_jsonl(out / "attempts.jsonl",
                      [{"t_trigger": a.t_trigger, "outcome": a.outcome,
                        "t_outcome": a.t_outcome,
                        "final_offset": a.final_offset}
                       for a in result.attempts])
    logio.write_json(out / "meta.json", result.meta)
    return out
