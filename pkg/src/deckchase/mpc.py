"""Receding-horizon landing controller on a condensed box-constrained QP.

States are eliminated through the linear UAV model, so the decision vector
is the stacked jerk sequence over the control horizon; inputs beyond it
are held at their last value.  The touchdown-velocity term is gated by a
two-branch sigmoid of the height above the deck.  The gate weights are
frozen from the warm-start trajectory on every solve (one reweighting
pass), which keeps each solve a convex QP.

The QP is solved with an operator-splitting iteration (scaled ADMM with a
cached Cholesky factor) plus a projected-gradient safeguard that keeps the
returned cost at or below the projected warm start even on iteration-cap
bailouts.  Returned inputs are feasible by construction: they come out of
an exact box projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import uav_model
from .angles import TWO_PI
from .usv_filter import PredictionHorizon

GATE_SWITCH = 0.16
GATE_UPPER_SLOPE = 0.15
GATE_LOWER_SLOPE = 0.01
GATE_LOWER_MID = 0.1


def _default_s() -> np.ndarray:
    # per axis: position error 8, velocity error 4, acceleration error 0.1
    return np.diag(np.tile([8.0, 4.0, 0.1], uav_model.N_AXES))


def _default_t() -> np.ndarray:
    return 0.05 * np.eye(uav_model.NU)


def _default_u_min() -> np.ndarray:
    return np.array([-20.0, -20.0, -20.0, -10.0])


def _default_u_max() -> np.ndarray:
    return np.array([20.0, 20.0, 20.0, 10.0])


def _check_psd(m, name):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(m, m.T, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(m)) < -1e-9:
        raise ValueError(f"{name} must be PSD")


@dataclass(frozen=True)
class MpcConfig:
    mp: int = 100
    mc: int = 40
    s: np.ndarray = field(default_factory=_default_s)
    t: np.ndarray = field(default_factory=_default_t)
    alpha_l: float = 1200.0
    h_d: float = 1.1
    u_min: np.ndarray = field(default_factory=_default_u_min)
    u_max: np.ndarray = field(default_factory=_default_u_max)
    solver_tol: float = 1e-4
    max_iters: int = 400

    def __post_init__(self):
        if not (self.mp >= self.mc >= 1):
            raise ValueError("need mp >= mc >= 1")
        for name in ("s", "t", "u_min", "u_max"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        _check_psd(self.s, "s")
        _check_psd(self.t, "t")
        if self.s.shape != (uav_model.NX, uav_model.NX):
            raise ValueError("s must be 12x12")
        if self.t.shape != (uav_model.NU, uav_model.NU):
            raise ValueError("t must be 4x4")
        if self.u_min.shape != (uav_model.NU,) or self.u_max.shape != (uav_model.NU,):
            raise ValueError("input bounds must have shape (4,)")
        if not np.all(self.u_min < self.u_max):
            raise ValueError("u_min must be below u_max componentwise")
        if self.alpha_l < 0.0:
            raise ValueError("alpha_l must be nonnegative")
        if not self.solver_tol > 0.0:
            raise ValueError("solver_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("s", "t", "u_min", "u_max"):
            getattr(self, name).flags.writeable = False


@dataclass(frozen=True, slots=True)
class ReferenceTrajectory:
    """Per-step desired states plus the deck's vertical motion.

    zdot_b is the predicted vertical velocity of the deck itself; deck_z its
    altitude, used as the floor of the sigmoid gate.  approach_bias shifts
    the touchdown-velocity matching target below the deck rate while a
    landing is being committed; zero leaves pure rate matching.
    """

    x_star: np.ndarray    # (mp, 12)
    zdot_b: np.ndarray    # (mp,)
    deck_z: np.ndarray    # (mp,)
    approach_bias: float = 0.0

    def __post_init__(self):
        mp = len(self.x_star)
        if self.x_star.ndim != 2 or self.x_star.shape[1] != uav_model.NX:
            raise ValueError("x_star must be (mp, 12)")
        if self.zdot_b.shape != (mp,) or self.deck_z.shape != (mp,):
            raise ValueError("zdot_b and deck_z must match x_star length")

    def __len__(self):
        return len(self.x_star)


@dataclass(frozen=True, slots=True)
class ControlCommand:
    """Velocity and heading-rate reference handed to the vehicle plant."""

    vx: float
    vy: float
    vz: float
    psi_dot: float
    t: float = 0.0


@dataclass(frozen=True, slots=True)
class MpcSolution:
    inputs: np.ndarray             # (mc, 4), always inside the box
    predicted_states: np.ndarray   # (mp, 12)
    cost: float
    kkt_residual: float
    iterations: int
    converged: bool


def sigmoid_gate(z_tilde, h_d: float = 1.1):
    """Touchdown gate over height above the deck.

    Near zero far above the deck, ~1 inside the waiting band below h_d, and
    collapsing again right above the deck so the final drop is released.
    """
    z = np.asarray(z_tilde, dtype=float)
    up = np.clip((z - h_d) / GATE_UPPER_SLOPE, -700.0, 700.0)
    low = np.clip(-(z - GATE_LOWER_MID) / GATE_LOWER_SLOPE, -700.0, 700.0)
    out = np.where(z >= GATE_SWITCH,
                   1.0 / (1.0 + np.exp(up)),
                   1.0 / (1.0 + np.exp(low)))
    if np.ndim(z_tilde) == 0:
        return float(out)
    return out


def build_reference(horizon: PredictionHorizon, phase, follow_height: float, *,
                    uav_z: float | None = None, descent_rate: float = 0.4,
                    approach_bias: float = 0.0) -> ReferenceTrajectory:
    """Turn a predicted deck horizon into per-step desired UAV states.

    Lateral position, velocity, heading, and heading rate track the
    prediction step for step.  The altitude target sits follow_height above
    the deck while following and descends toward the deck during a landing.
    """
    states = horizon.states
    mp = len(states)
    dt = horizon.dt_pred
    name = getattr(phase, "name", str(phase)).upper()
    x_star = np.zeros((mp, uav_model.NX))
    x_star[:, 0] = states[:, 0]
    x_star[:, 1] = states[:, 4]
    x_star[:, 3] = states[:, 1]
    x_star[:, 4] = states[:, 5]
    x_star[:, 9] = np.unwrap(states[:, 3])
    x_star[:, 10] = states[:, 7]
    deck_z = states[:, 2].copy()
    zdot_b = states[:, 6].copy()
    if name == "FOLLOW":
        x_star[:, 6] = deck_z + follow_height
        x_star[:, 7] = zdot_b
        bias = 0.0
    elif name == "LAND":
        if uav_z is None:
            raise ValueError("LAND reference needs the current uav_z")
        rate = max(descent_rate, approach_bias)
        profile = uav_z - rate * dt * np.arange(1, mp + 1)
        x_star[:, 6] = np.maximum(deck_z, profile)
        x_star[:, 7] = zdot_b - rate
        bias = approach_bias
    else:
        raise ValueError(f"build_reference handles FOLLOW and LAND, not {name}")
    return ReferenceTrajectory(x_star=x_star, zdot_b=zdot_b, deck_z=deck_z,
                               approach_bias=bias)


class _CondensedProblem:
    """Precomputed condensation of one (config, model) pair."""

    def __init__(self, config: MpcConfig, model: uav_model.UavLtiModel):
        self.config = config
        self.model = model
        mp, mc = config.mp, config.mc
        nx, nu = uav_model.NX, uav_model.NU
        n = nu * mc

        p = np.empty((mp, nx, nu))
        p[0] = model.e
        f_rows = np.empty((mp, nx, nx))
        f_rows[0] = model.d
        for i in range(1, mp):
            p[i] = model.d @ p[i - 1]
            f_rows[i] = model.d @ f_rows[i - 1]
        csum = np.cumsum(p, axis=0)

        g = np.zeros((nx * mp, n))
        for k0 in range(mp):
            k = k0 + 1
            for j0 in range(min(k, mc)):
                j = j0 + 1
                if j == mc and k >= mc:
                    block = csum[k - mc]
                else:
                    block = p[k - j]
                g[k0 * nx:(k0 + 1) * nx, j0 * nu:(j0 + 1) * nu] = block

        self.f = f_rows.reshape(mp * nx, nx)
        self.g = g
        self.gt = np.ascontiguousarray(g.T)

        g3 = g.reshape(mp, nx, n)
        sg = np.einsum("ij,kjl->kil", config.s, g3).reshape(mp * nx, n)
        a1 = self.gt @ sg

        l = np.eye(n)
        for i in range(1, mc):
            l[nu * i:nu * i + nu, nu * (i - 1):nu * i] -= np.eye(nu)
        t_tilde = np.kron(np.eye(mc), config.t)
        a2 = l.T @ t_tilde @ l
        self.l = l
        self.a12 = 2.0 * (a1 + a2)

        self.gz = np.ascontiguousarray(g[uav_model.IX_Z::nx, :])
        self.gvz = np.ascontiguousarray(g[uav_model.IX_VZ::nx, :])
        self.fz = np.ascontiguousarray(self.f[uav_model.IX_Z::nx, :])
        self.fvz = np.ascontiguousarray(self.f[uav_model.IX_VZ::nx, :])

        self.lo = np.tile(config.u_min, mc)
        self.hi = np.tile(config.u_max, mc)
        self.n = n

    def warm_vector(self, warm: MpcSolution | None, shift: int) -> np.ndarray:
        mc, nu = self.config.mc, uav_model.NU
        if warm is None:
            seq = np.zeros((mc, nu))
        else:
            seq = warm.inputs
            if shift > 0:
                shift = min(shift, mc)
                seq = np.vstack([seq[shift:], np.repeat(seq[-1:], shift, axis=0)])
        flat = seq.reshape(-1)
        return np.clip(flat, self.lo, self.hi)

    def assemble(self, x0, u_prev, ref: ReferenceTrajectory, u_warm: np.ndarray):
        """Quadratic data (H, q, c, w) with gate weights w frozen at u_warm."""
        cfg = self.config
        mp = cfg.mp
        nx = uav_model.NX
        x0 = np.asarray(x0, dtype=float)
        u_prev = np.asarray(u_prev, dtype=float)

        target = ref.x_star
        psi_ref = target[:, uav_model.IX_PSI]
        offset = TWO_PI * np.round((x0[uav_model.IX_PSI] - psi_ref[0]) / TWO_PI)
        if offset != 0.0:
            target = target.copy()
            target[:, uav_model.IX_PSI] = psi_ref + offset

        r = (self.f @ x0).reshape(mp, nx) - target
        sr = r @ cfg.s
        q = 2.0 * (self.gt @ sr.reshape(-1))
        c = float(np.sum(r * sr))

        tb = np.zeros(self.n)
        tb[:uav_model.NU] = cfg.t @ u_prev
        q -= 2.0 * (self.l.T @ tb)
        c += float(u_prev @ cfg.t @ u_prev)

        z_warm = self.fz @ x0 + self.gz @ u_warm
        w = cfg.alpha_l * sigmoid_gate(z_warm - ref.deck_z, cfg.h_d)
        rz = self.fvz @ x0 - (ref.zdot_b - ref.approach_bias)
        h = self.a12 + 2.0 * (self.gvz.T @ (w[:, None] * self.gvz))
        q += 2.0 * (self.gvz.T @ (w * rz))
        c += float(w @ (rz * rz))
        return h, q, c, w

    def solve(self, x0, u_prev, ref: ReferenceTrajectory,
              warm: MpcSolution | None = None, shift: int = 0) -> MpcSolution:
        cfg = self.config
        u_warm = self.warm_vector(warm, shift)
        h, q, c, _ = self.assemble(x0, u_prev, ref, u_warm)
        lo, hi = self.lo, self.hi

        def cost(u):
            return 0.5 * float(u @ (h @ u)) + float(q @ u) + c

        def kkt(u):
            grad = h @ u + q
            return float(np.max(np.abs(u - np.clip(u - grad, lo, hi))))

        rho0 = float(np.trace(h)) / self.n
        rho = rho0
        eye = np.eye(self.n)
        factor = cho_factor(h + rho * eye, check_finite=False)
        z = u_warm.copy()
        y = np.zeros(self.n)
        iterations = 0
        residual = kkt(z)
        if residual > cfg.solver_tol:
            for it in range(1, cfg.max_iters + 1):
                x = cho_solve(factor, rho * z - y - q, check_finite=False)
                z_prev = z
                z = np.clip(x + y / rho, lo, hi)
                y += rho * (x - z)
                iterations = it
                if it % 3 == 0 or it == cfg.max_iters:
                    residual = kkt(z)
                    if residual <= cfg.solver_tol:
                        break
                    # rebalance the penalty when primal/dual residuals diverge
                    r_prim = float(np.max(np.abs(x - z)))
                    r_dual = rho * float(np.max(np.abs(z - z_prev)))
                    scale = 1.0
                    if r_prim > 10.0 * r_dual:
                        scale = 2.0
                    elif r_dual > 10.0 * r_prim:
                        scale = 0.5
                    if scale != 1.0:
                        new_rho = min(max(rho * scale, 1e-6 * rho0), 1e6 * rho0)
                        if new_rho != rho:
                            rho = new_rho
                            factor = cho_factor(h + rho * eye,
                                                check_finite=False)

        # safeguard: never hand back something worse than the projected warm start
        if cost(z) > cost(u_warm) + 1e-12:
            lip = float(np.max(np.sum(np.abs(h), axis=0)))
            u = u_warm.copy()
            step = 1.0 / lip
            for _ in range(100):
                u = np.clip(u - step * (h @ u + q), lo, hi)
            if cost(u) < cost(z):
                z = u
            residual = kkt(z)

        u_seq = z.reshape(cfg.mc, uav_model.NU)
        states = ((self.f @ np.asarray(x0, dtype=float)) + self.g @ z)
        return MpcSolution(inputs=u_seq,
                           predicted_states=states.reshape(cfg.mp, uav_model.NX),
                           cost=cost(z),
                           kkt_residual=residual,
                           iterations=iterations,
                           converged=residual <= cfg.solver_tol)


_PROBLEMS: dict = {}


def _condensed(config: MpcConfig, model: uav_model.UavLtiModel) -> _CondensedProblem:
    key = (config.mp, config.mc, config.s.tobytes(), config.t.tobytes(),
           config.alpha_l, config.h_d, config.u_min.tobytes(),
           config.u_max.tobytes(), config.solver_tol, config.max_iters,
           model.dt_p, model.d.tobytes())
    prob = _PROBLEMS.get(key)
    if prob is None:
        prob = _CondensedProblem(config, model)
        _PROBLEMS[key] = prob
    return prob


def solve(config: MpcConfig, model: uav_model.UavLtiModel, x0, u_prev,
          ref: ReferenceTrajectory, warm: MpcSolution | None = None,
          shift: int = 0) -> MpcSolution:
    """Minimize the tracking-plus-touchdown cost over the input sequence.

    warm is the previous solution; shift says how many model steps have
    elapsed since it was computed, so its input sequence can be re-aligned
    before it seeds both the iteration and the frozen gate weights.
    """
    if len(ref) != config.mp:
        raise ValueError("reference length must equal the prediction horizon")
    return _condensed(config, model).solve(x0, u_prev, ref, warm=warm, shift=shift)


def assemble_qp(config: MpcConfig, model: uav_model.UavLtiModel, x0, u_prev,
                ref: ReferenceTrajectory, u_warm):
    """Expose the condensed (H, q, c, w) for a given frozen warm vector."""
    prob = _condensed(config, model)
    return prob.assemble(x0, u_prev, ref, np.asarray(u_warm, dtype=float).reshape(-1))


def extract_command(solution: MpcSolution, t: float = 0.0) -> ControlCommand:
    """Velocity and heading-rate reference read off the first predicted state."""
    x1 = solution.predicted_states[0]
    return ControlCommand(vx=float(x1[1]), vy=float(x1[4]), vz=float(x1[7]),
                          psi_dot=float(x1[10]), t=t)


def plan_command(solution: MpcSolution, offset: int, t: float = 0.0) -> ControlCommand:
    """Command sampled `offset` prediction steps into the solution.

    The tracker layer walks the planned trajectory between re-solves instead
    of holding the first sample flat, which would cancel the planned
    acceleration.  offset 0 reproduces extract_command.
    """
    m = min(max(int(offset), 0), len(solution.predicted_states) - 1)
    xm = solution.predicted_states[m]
    return ControlCommand(vx=float(xm[1]), vy=float(xm[4]), vz=float(xm[7]),
                          psi_dot=float(xm[10]), t=t)


class MpcController:
    """Stateful wrapper owning warm starts and the previous applied input."""

    def __init__(self, config: MpcConfig | None = None,
                 model: uav_model.UavLtiModel | None = None, stride: int = 5):
        self.config = config if config is not None else MpcConfig()
        self.model = model if model is not None else uav_model.build_model()
        if stride < 1:
            raise ValueError("stride must be >= 1")
        self.stride = stride
        self.last: MpcSolution | None = None

    def reset(self):
        self.last = None

    def control(self, t: float, x0, ref: ReferenceTrajectory):
        if self.last is None:
            warm, shift = None, 0
            u_prev = np.zeros(uav_model.NU)
        else:
            warm, shift = self.last, self.stride
            u_prev = self.last.inputs[min(self.stride, self.config.mc) - 1]
        sol = solve(self.config, self.model, x0, u_prev, ref, warm=warm, shift=shift)
        self.last = sol
        return extract_command(sol, t=t), sol
