"""Angle helpers shared by the filter, the controller, and the plants."""

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_pi(angle):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    w = np.mod(angle, TWO_PI)
    w = np.where(w > np.pi, w - TWO_PI, w)
    if np.ndim(angle) == 0:
        return float(w)
    return w


def wrap_pi_scalar(a):
    # fast path for hot loops, same (-pi, pi] convention as wrap_pi
    w = a % TWO_PI
    if w > np.pi:
        w -= TWO_PI
    return w


def unwrap_near(angle, anchor):
    """Shift angle by whole turns so the result lands within pi of anchor."""
    return angle + TWO_PI * np.round((anchor - angle) / TWO_PI)
