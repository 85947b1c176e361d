"""Live WebSocket bridge: a human steers the vessel, the stack flies.

One shared session advances the world five ticks per 50 ms wall block and
broadcasts a state frame to every client at 20 Hz.  Inbound messages are
a small tagged union (steer, trigger_landing, reset); malformed input
gets an error frame back and the connection stays open.  When the last
client drops, the manual steering command freezes and then decays
linearly to zero over one second so the vessel does not sail away
unattended.
"""

from __future__ import annotations

import asyncio
import time
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Literal, Union

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from .mission import MissionPhase, MissionSupervisor
from .mpc import ControlCommand, MpcController, plan_command
from .scenarios import MAX_SURGE, MAX_YAW_RATE
from .simulate import SENSOR_STREAM, SimConfig, _phase_reference, _uav_x0
from .usv_filter import make_filter
from .world import UavState, UsvState, sense_pose, uav_plant_step, usv_plant_step


class UsvWire(BaseModel):
    x: float
    y: float
    z: float
    eta: float
    speed: float
    eta_dot: float


class UavWire(BaseModel):
    x: float
    y: float
    z: float
    psi: float


class MetricsWire(BaseModel):
    horiz_offset: float
    rel_height: float
    visible: bool
    committed: bool
    attempts: int
    outcome: str | None = None
    solve_ms: float = 0.0


class StateMsg(BaseModel):
    type: Literal["state"] = "state"
    t: float
    usv: UsvWire
    uav: UavWire
    horizon: list[list[float]]
    phase: str
    metrics: MetricsWire


class SteerMsg(BaseModel):
    type: Literal["steer"]
    surge_speed: float
    yaw_rate: float


class TriggerMsg(BaseModel):
    type: Literal["trigger_landing"]


class ResetMsg(BaseModel):
    type: Literal["reset"]
    seed: int = 0


class ErrorMsg(BaseModel):
    type: Literal["error"] = "error"
    message: str


InboundMsg = Union[SteerMsg, TriggerMsg, ResetMsg]
INBOUND: TypeAdapter = TypeAdapter(
    Union[SteerMsg, TriggerMsg, ResetMsg])

DECAY_S = 1.0


class LiveSim:
    """Synchronous world stepped in small blocks by the broadcast loop."""

    def __init__(self, mode: str = "curvilinear", seed: int = 0,
                 cfg: SimConfig | None = None):
        self.mode = mode
        self.cfg = cfg if cfg is not None else SimConfig()
        self.reset(seed)

    def reset(self, seed: int):
        cfg = self.cfg
        self.seed = seed
        self.filt = make_filter(self.mode)
        self.controller = MpcController(config=cfg.mpc,
                                        stride=cfg.control_stride)
        self.sup = MissionSupervisor(follow_height=cfg.follow_height)
        self.rng_sensor = np.random.default_rng([seed, SENSOR_STREAM])
        self.usv = UsvState()
        self.uav = UavState(z=cfg.follow_height)
        self.cmd = ControlCommand(0.0, 0.0, 0.0, 0.0)
        self.plan = None
        self.plan_tick = 0
        self.k = 0
        self.manual = (0.0, 0.0)
        self.connected = False
        self._decay_from = (0.0, 0.0)
        self._decay_t0 = None
        self.visible = False
        self.last_solve_ms = 0.0
        self.last_ref = None

    @property
    def t(self) -> float:
        return self.k / self.cfg.world_hz

    def steer(self, surge: float, yaw: float):
        surge = float(np.clip(surge, -MAX_SURGE, MAX_SURGE))
        yaw = float(np.clip(yaw, -MAX_YAW_RATE, MAX_YAW_RATE))
        self.manual = (surge, yaw)

    def trigger_landing(self) -> bool:
        return self.sup.trigger(self.t)

    def note_connected(self):
        self.connected = True
        self._decay_t0 = None

    def note_disconnected(self):
        if self.connected:
            self.connected = False
            self._decay_from = self.manual
            self._decay_t0 = self.t

    def _effective_command(self) -> tuple:
        if self.connected or self._decay_t0 is None:
            return self.manual
        frac = (self.t - self._decay_t0) / DECAY_S
        if frac >= 1.0:
            self.manual = (0.0, 0.0)
            return self.manual
        scale = 1.0 - frac
        return (self._decay_from[0] * scale, self._decay_from[1] * scale)

    def step_block(self, n_ticks: int | None = None):
        cfg = self.cfg
        n = n_ticks if n_ticks is not None else cfg.control_stride
        dt = 1.0 / cfg.world_hz
        for _ in range(n):
            t = self.t
            meas = None
            if self._is_sensor_tick(self.k):
                meas = sense_pose(t, self.usv, self.uav, self.rng_sensor,
                                  cfg.sensor, noise=True)
                if meas is not None:
                    self.filt.ingest(meas)
            self.visible = meas is not None

            horiz = float(np.hypot(self.usv.x - self.uav.x,
                                   self.usv.y - self.uav.y))
            self.sup.update(t, visible=self.visible, horiz_offset=horiz,
                            uav_z=self.uav.z, deck_z=self.usv.z)

            if (self.k % cfg.control_stride == 0 and self.filt.initialized
                    and self.sup.phase is not MissionPhase.TOUCHDOWN):
                ref = _phase_reference(t, cfg, self.filt, self.sup, self.uav,
                                       cfg.mpc.mp)
                tic = time.perf_counter()
                self.cmd, self.plan = self.controller.control(
                    t, _uav_x0(self.uav), ref)
                self.plan_tick = self.k
                self.last_solve_ms = (time.perf_counter() - tic) * 1e3
                self.last_ref = ref
            elif (self.plan is not None
                  and self.sup.phase is not MissionPhase.TOUCHDOWN):
                self.cmd = plan_command(self.plan, self.k - self.plan_tick, t=t)
            if self.sup.phase is MissionPhase.TOUCHDOWN:
                self.plan = None

            surge, yaw = self._effective_command()
            self.usv = usv_plant_step(self.usv, surge, yaw, dt, cfg.usv)
            if self.sup.phase is MissionPhase.TOUCHDOWN:
                self.uav = UavState(x=self.usv.x, y=self.usv.y, z=self.usv.z,
                                    psi=self.uav.psi, vx=self.usv.vx,
                                    vy=self.usv.vy)
            else:
                self.uav = uav_plant_step(self.uav, self.cmd, dt, cfg.uav)
            self.k += 1

    def _is_sensor_tick(self, k: int) -> bool:
        # frame s lands on tick (s*world_hz)//sensor_hz; invert by ceiling
        cfg = self.cfg
        s = -((-k * cfg.sensor_hz) // cfg.world_hz)
        return (s * cfg.world_hz) // cfg.sensor_hz == k

    def state_msg(self) -> StateMsg:
        usv, uav = self.usv, self.uav
        horizon = []
        if self.last_ref is not None and self.sup.phase in (
                MissionPhase.FOLLOW, MissionPhase.LAND):
            pts = self.last_ref.x_star[::5]
            horizon = [[float(p[0]), float(p[3])] for p in pts]
        attempts = self.sup.attempts
        return StateMsg(
            t=self.t,
            usv=UsvWire(x=usv.x, y=usv.y, z=usv.z, eta=usv.eta,
                        speed=usv.speed, eta_dot=usv.eta_dot),
            uav=UavWire(x=uav.x, y=uav.y, z=uav.z, psi=uav.psi),
            horizon=horizon,
            phase=self.sup.phase.name,
            metrics=MetricsWire(
                horiz_offset=float(np.hypot(usv.x - uav.x, usv.y - uav.y)),
                rel_height=uav.z - usv.z,
                visible=self.visible,
                committed=self.sup.committed,
                attempts=len(attempts),
                outcome=attempts[-1].outcome if attempts else None,
                solve_ms=self.last_solve_ms,
            ),
        )


class SimSession:
    def __init__(self, mode: str = "curvilinear", seed: int = 0,
                 cfg: SimConfig | None = None, period_s: float = 0.05):
        self.live = LiveSim(mode, seed, cfg)
        self.period_s = period_s
        self.clients: set[WebSocket] = set()
        self._task: asyncio.Task | None = None

    async def start(self):
        if self._task is None:
            self._task = asyncio.create_task(self._loop())

    async def stop(self):
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
            self._task = None

    async def _loop(self):
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            self.live.step_block()
            payload = self.live.state_msg().model_dump_json()
            dead = []
            for ws in list(self.clients):
                try:
                    await ws.send_text(payload)
                except Exception:
                    dead.append(ws)
            for ws in dead:
                self._drop(ws)
            next_t += self.period_s
            await asyncio.sleep(max(0.0, next_t - loop.time()))

    def _drop(self, ws: WebSocket):
        self.clients.discard(ws)
        if not self.clients:
            self.live.note_disconnected()

    async def handle(self, ws: WebSocket):
        await ws.accept()
        self.clients.add(ws)
        self.live.note_connected()
        await self.start()
        try:
            while True:
                text = await ws.receive_text()
                reply = self.dispatch(text)
                if reply is not None:
                    await ws.send_text(reply)
        except WebSocketDisconnect:
            self._drop(ws)

    def dispatch(self, text: str) -> str | None:
        try:
            msg = INBOUND.validate_json(text)
        except ValidationError as exc:
            return ErrorMsg(message=f"bad message: {exc.errors()[0]['msg']}"
                            ).model_dump_json()
        if isinstance(msg, SteerMsg):
            self.live.steer(msg.surge_speed, msg.yaw_rate)
        elif isinstance(msg, TriggerMsg):
            if not self.live.trigger_landing():
                return ErrorMsg(message="landing can only start while "
                                        "following").model_dump_json()
        elif isinstance(msg, ResetMsg):
            self.live.reset(msg.seed)
            self.live.note_connected()
        return None


def create_app(mode: str = "curvilinear", seed: int = 0,
               cfg: SimConfig | None = None,
               frontend_dir: str | Path | None = None) -> FastAPI:
    session = SimSession(mode, seed, cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        await session.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.session = session

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await session.handle(ws)

    if frontend_dir is not None:
        root = Path(frontend_dir)
        if root.is_dir():
            app.mount("/", StaticFiles(directory=root, html=True),
                      name="frontend")
    return app
