"""Pose-only Kalman filter for a surface vessel on curvilinear paths.

The filter measures pose (x, y, z, heading) and carries world-frame
velocities plus the heading rate as hidden states.  An artificial lateral
drag acceleration, regenerated from the evolving state at every step,
acts as the model input: while the heading rotates, the drag keeps pulling
the velocity estimate toward the hull direction, so multi-step predictions
bend into arcs instead of running off along the tangent.  A negative
cross covariance between the velocity states and the heading rate encodes
the speed loss a vessel shows when it turns.

Setting the lateral drag coefficient and the cross covariance to zero
recovers a plain constant-velocity filter, used as the straight-line
baseline in every comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .angles import wrap_pi, wrap_pi_scalar

# state vector layout
IX_X, IX_Y, IX_Z, IX_ETA = 0, 1, 2, 3
IX_VX, IX_VY, IX_VZ, IX_ETADOT = 4, 5, 6, 7
NX = 8

# pose measurement picks position and heading out of the state
H_POSE = np.zeros((4, NX))
H_POSE[0, IX_X] = H_POSE[1, IX_Y] = H_POSE[2, IX_Z] = H_POSE[3, IX_ETA] = 1.0
H_POSE.flags.writeable = False

PSD_TOL = 1e-9


class CovarianceDegeneracy(RuntimeError):
    """Covariance lost positive semidefiniteness beyond tolerance."""


class SingularInnovation(RuntimeError):
    """Innovation covariance cannot be inverted."""


@dataclass(frozen=True, slots=True)
class DragParams:
    """Artificial drag coefficients; k_y = 0 selects the baseline filter."""

    mass: float = 35.0
    k_x: float = 0.0
    k_y: float = 60.0

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be positive")
        if self.k_x != 0.0:
            # hull propulsion is assumed to cancel drag along the keel
            raise ValueError("k_x is fixed at zero")
        if self.k_y < 0.0:
            raise ValueError("k_y must be nonnegative")


@dataclass(frozen=True, slots=True)
class ProcessNoise:
    """Per-step process covariance entries for the 8-state model.

    The four cross terms couple the translational velocity states with the
    heading rate and must not be positive: a turning vessel sheds speed.
    """

    sigma_x: float = 1e-4
    sigma_y: float = 1e-4
    sigma_z: float = 1e-4
    sigma_eta: float = 1e-4
    sigma_xdot: float = 1e-2
    sigma_ydot: float = 1e-2
    sigma_zdot: float = 1e-2
    sigma_etadot: float = 1e-2
    sigma_cross: float = -3e-3

    def __post_init__(self):
        diag = (self.sigma_x, self.sigma_y, self.sigma_z, self.sigma_eta,
                self.sigma_xdot, self.sigma_ydot, self.sigma_zdot, self.sigma_etadot)
        if any(v < 0.0 for v in diag):
            raise ValueError("diagonal process variances must be nonnegative")
        if self.sigma_cross > 0.0:
            raise ValueError("velocity/yaw-rate cross covariance must be <= 0")
        if np.min(np.linalg.eigvalsh(self.matrix())) < -1e-12:
            raise ValueError("assembled process covariance is not PSD")

    @classmethod
    def from_correlation(cls, rho=-0.3, **kw):
        """Build with the cross terms set as rho * sqrt(sigma_vel * sigma_etadot)."""
        probe = cls(sigma_cross=0.0, **kw)
        cross = rho * np.sqrt(probe.sigma_xdot * probe.sigma_etadot)
        return cls(sigma_cross=float(cross), **kw)

    def matrix(self) -> np.ndarray:
        q = np.diag([self.sigma_x, self.sigma_y, self.sigma_z, self.sigma_eta,
                     self.sigma_xdot, self.sigma_ydot, self.sigma_zdot,
                     self.sigma_etadot])
        q[IX_VX, IX_ETADOT] = q[IX_ETADOT, IX_VX] = self.sigma_cross
        q[IX_VY, IX_ETADOT] = q[IX_ETADOT, IX_VY] = self.sigma_cross
        return q


@dataclass(frozen=True, slots=True)
class PoseMeasurement:
    t: float
    x: float
    y: float
    z: float
    eta: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.t, self.x, self.y, self.z, self.eta)):
            raise ValueError("measurement components must be finite")
        if not (-np.pi < self.eta <= np.pi):
            raise ValueError("eta must lie in (-pi, pi]")

    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.eta])


@dataclass(frozen=True, slots=True)
class PredictionHorizon:
    """Mean-only forward rollout of the filter model."""

    states: np.ndarray   # (n, 8)
    dt_pred: float
    t0: float

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[1] != NX:
            raise ValueError("states must be (n, 8)")
        if not self.dt_pred > 0.0:
            raise ValueError("dt_pred must be positive")

    def __len__(self):
        return len(self.states)

    def positions(self) -> np.ndarray:
        return self.states[:, (IX_X, IX_Y)]


def body_world_rotation(eta):
    """Return (R_bw, R_wb), the world-to-body and body-to-world planar rotations."""
    c, s = np.cos(eta), np.sin(eta)
    r_bw = np.array([[c, s], [-s, c]])
    return r_bw, r_bw.T.copy()


def transition_matrix(dt) -> np.ndarray:
    a = np.eye(NX)
    a[IX_X, IX_VX] = a[IX_Y, IX_VY] = a[IX_Z, IX_VZ] = a[IX_ETA, IX_ETADOT] = dt
    return a


def input_matrix(dt) -> np.ndarray:
    b = np.zeros((NX, 2))
    b[IX_VX, 0] = b[IX_VY, 1] = dt
    return b


def drag_input(state, drag: DragParams) -> np.ndarray:
    """World-frame acceleration produced by lateral form drag on the hull."""
    r_bw, r_wb = body_world_rotation(state[IX_ETA])
    v_body = r_bw @ state[[IX_VX, IX_VY]]
    f_body = np.array([-drag.k_x * v_body[0], -drag.k_y * v_body[1]])
    return (r_wb @ f_body) / drag.mass


class UsvFilter:
    """Linear Kalman filter over the 8-component vessel state.

    The instance is single-writer: predict/update mutate it in place.
    Horizon rollouts never touch the live state or covariance.
    """

    def __init__(self, drag: DragParams | None = None,
                 noise: ProcessNoise | None = None,
                 meas_noise=None, dt: float = 1.0 / 30.0):
        self.drag = drag if drag is not None else DragParams()
        self.noise = noise if noise is not None else ProcessNoise()
        if meas_noise is None:
            meas_noise = np.diag([0.05 ** 2, 0.05 ** 2, 0.05 ** 2, 0.02 ** 2])
        meas_noise = np.asarray(meas_noise, dtype=float)
        if meas_noise.shape != (4, 4) or np.any(np.diag(meas_noise) <= 0.0):
            raise ValueError("meas_noise must be 4x4 with positive diagonal")
        self.meas_noise = meas_noise
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        self.dt = float(dt)
        self._q = self.noise.matrix()
        self.state: np.ndarray | None = None
        self.covariance: np.ndarray | None = None
        self.last_t: float | None = None

    @classmethod
    def curvilinear(cls, **kw) -> "UsvFilter":
        return cls(**kw)

    @classmethod
    def baseline(cls, **kw) -> "UsvFilter":
        """Straight-line variant: no drag input, no cross covariance."""
        kw.setdefault("drag", DragParams(k_y=0.0))
        kw.setdefault("noise", ProcessNoise(sigma_cross=0.0))
        return cls(**kw)

    @property
    def initialized(self) -> bool:
        return self.state is not None

    def _check_covariance(self):
        p = self.covariance
        p = 0.5 * (p + p.T)
        self.covariance = p
        if np.min(np.linalg.eigvalsh(p)) < -PSD_TOL:
            raise CovarianceDegeneracy("covariance lost PSD beyond 1e-9")

    def predict(self, dt=None):
        """Advance the mean through the drag-driven model and inflate the covariance."""
        if self.state is None:
            raise RuntimeError("filter has no state yet")
        dt = self.dt if dt is None else float(dt)
        a = transition_matrix(dt)
        self.state = a @ self.state + input_matrix(dt) @ drag_input(self.state, self.drag)
        self.state[IX_ETA] = wrap_pi(self.state[IX_ETA])
        self.covariance = a @ self.covariance @ a.T + self._q
        if self.last_t is not None:
            self.last_t += dt
        self._check_covariance()

    def update(self, z: PoseMeasurement):
        """Fuse one pose measurement (assumed taken at the filter's current time)."""
        if self.state is None:
            self._initialize(z)
            return
        nu = z.vector() - H_POSE @ self.state
        nu[3] = wrap_pi(nu[3])
        s = H_POSE @ self.covariance @ H_POSE.T + self.meas_noise
        try:
            k = np.linalg.solve(s, H_POSE @ self.covariance).T
        except np.linalg.LinAlgError as exc:
            raise SingularInnovation(str(exc)) from exc
        self.state = self.state + k @ nu
        self.state[IX_ETA] = wrap_pi(self.state[IX_ETA])
        ikh = np.eye(NX) - k @ H_POSE
        self.covariance = ikh @ self.covariance @ ikh.T + k @ self.meas_noise @ k.T
        self._check_covariance()
        self.last_t = z.t if self.last_t is None else max(self.last_t, z.t)

    def ingest(self, z: PoseMeasurement) -> bool:
        """Advance to the measurement time and fuse it; False if it is stale."""
        if self.state is None:
            self._initialize(z)
            return True
        if z.t < self.last_t:
            return False
        if z.t > self.last_t:
            self.predict(z.t - self.last_t)
            self.last_t = z.t
        self.update(z)
        return True

    def _initialize(self, z: PoseMeasurement):
        self.state = np.array([z.x, z.y, z.z, z.eta, 0.0, 0.0, 0.0, 0.0])
        self.covariance = np.diag([1.0, 1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 4.0])
        self.last_t = z.t

    def predict_horizon(self, mp: int, dt_pred: float) -> PredictionHorizon:
        """Roll the state mean mp steps ahead without touching the live filter.

        The drag input is regenerated from each predicted state, which is
        what bends the path while the heading keeps integrating its rate.
        """
        if self.state is None:
            raise RuntimeError("filter has no state yet")
        if mp < 1:
            raise ValueError("mp must be >= 1")
        if not dt_pred > 0.0:
            raise ValueError("dt_pred must be positive")
        states = np.empty((mp, NX))
        x, y, zc, eta, vx, vy, vz, etadot = (float(v) for v in self.state)
        ky_m = self.drag.k_y / self.drag.mass
        for i in range(mp):
            c = cos(eta)
            s = sin(eta)
            vlat = -s * vx + c * vy
            ax = ky_m * s * vlat
            ay = -ky_m * c * vlat
            x += dt_pred * vx
            y += dt_pred * vy
            zc += dt_pred * vz
            eta = wrap_pi_scalar(eta + dt_pred * etadot)
            vx += dt_pred * ax
            vy += dt_pred * ay
            states[i, 0] = x
            states[i, 1] = y
            states[i, 2] = zc
            states[i, 3] = eta
            states[i, 4] = vx
            states[i, 5] = vy
            states[i, 6] = vz
            states[i, 7] = etadot
        return PredictionHorizon(states=states, dt_pred=dt_pred, t0=self.last_t or 0.0)


def make_filter(mode: str, **kw) -> UsvFilter:
    """Factory for the two estimator modes used throughout the package."""
    if mode == "curvilinear":
        return UsvFilter.curvilinear(**kw)
    if mode == "baseline":
        return UsvFilter.baseline(**kw)
    raise ValueError(f"unknown estimator mode {mode!r} (use curvilinear or baseline)")
