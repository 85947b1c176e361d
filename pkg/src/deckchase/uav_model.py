"""Discrete LTI prediction model of the quadrotor: a jerk-driven triple
integrator per axis (x, y, z, heading), assembled with a Kronecker product
so all four axes share one 3x3 stencil.

State layout (12): [x, vx, ax, y, vy, ay, z, vz, az, psi, psidot, psiddot].
Input layout (4): jerk on x, y, z and heading.  Heading is kept unwrapped
inside the model; wrapping would break linearity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NX = 12
NU = 4
N_AXES = 4

IX_POS = (0, 3, 6, 9)
IX_VEL = (1, 4, 7, 10)
IX_ACC = (2, 5, 8, 11)
IX_Z, IX_VZ = 6, 7
IX_PSI, IX_PSIDOT = 9, 10


@dataclass(frozen=True, slots=True)
class UavLtiModel:
    d: np.ndarray    # (12, 12) transition
    e: np.ndarray    # (12, 4) input
    dt_p: float


def build_model(dt_p: float = 0.01) -> UavLtiModel:
    """Assemble D = I4 (x) D' and E = I4 (x) E' for the given step."""
    if not dt_p > 0.0:
        raise ValueError("dt_p must be positive")
    dprime = np.array([
        [1.0, dt_p, dt_p ** 2 / 2.0],
        [0.0, 1.0, dt_p],
        [0.0, 0.0, 1.0],
    ])
    eprime = np.array([[dt_p ** 3 / 6.0], [dt_p ** 2 / 2.0], [dt_p]])
    d = np.kron(np.eye(N_AXES), dprime)
    e = np.kron(np.eye(N_AXES), eprime)
    d.flags.writeable = False
    e.flags.writeable = False
    return UavLtiModel(d=d, e=e, dt_p=float(dt_p))


def step(model: UavLtiModel, x, u) -> np.ndarray:
    """One model step: x+ = D x + E u."""
    return model.d @ np.asarray(x, dtype=float) + model.e @ np.asarray(u, dtype=float)


def rollout(model: UavLtiModel, x0, inputs, mp: int, mc: int) -> np.ndarray:
    """Roll mp states forward applying inputs[m-1] for steps m <= mc, then
    holding the last input for steps beyond the control horizon.

    Returns the stacked states after each step, shape (mp, 12).
    """
    inputs = np.asarray(inputs, dtype=float)
    if not (1 <= mc <= mp):
        raise ValueError("need 1 <= mc <= mp")
    if inputs.shape != (mc, NU):
        raise ValueError(f"inputs must have shape ({mc}, {NU})")
    states = np.empty((mp, NX))
    x = np.asarray(x0, dtype=float)
    for m in range(mp):
        u = inputs[m] if m < mc else inputs[mc - 1]
        x = model.d @ x + model.e @ u
        states[m] = x
    return states
