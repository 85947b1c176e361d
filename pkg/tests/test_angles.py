import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deckchase.angles import TWO_PI, unwrap_near, wrap_pi, wrap_pi_scalar


def test_wrap_known_value():
    # -6.2 sits one full turn below its principal value
    assert wrap_pi_scalar(-6.2) == pytest.approx(-6.2 + 2 * math.pi, abs=1e-15)
    assert wrap_pi_scalar(-6.2) > 0


def test_wrap_boundary_is_half_open():
    assert wrap_pi_scalar(math.pi) == pytest.approx(math.pi)
    assert wrap_pi_scalar(-math.pi) == pytest.approx(math.pi)


def test_wrap_vectorized_matches_scalar():
    xs = np.linspace(-20.0, 20.0, 401)
    wrapped = wrap_pi(xs)
    for x, w in zip(xs, wrapped):
        assert w == pytest.approx(wrap_pi_scalar(float(x)), abs=1e-12)


@given(st.floats(-1e6, 1e6), st.integers(-50, 50))
def test_wrap_periodicity(x, k):
    a = wrap_pi_scalar(x)
    b = wrap_pi_scalar(x + k * TWO_PI)
    assert abs(a - b) < 1e-6 or abs(abs(a - b) - TWO_PI) < 1e-6


@given(st.floats(-1e4, 1e4))
def test_wrap_range(x):
    w = wrap_pi_scalar(x)
    assert -math.pi < w <= math.pi


@given(st.floats(-50.0, 50.0), st.floats(-math.pi, math.pi))
def test_unwrap_near_stays_close(anchor, delta):
    target = wrap_pi_scalar(anchor + delta)
    lifted = unwrap_near(target, anchor)
    assert abs(lifted - anchor) <= math.pi + 1e-9
    assert wrap_pi_scalar(lifted) == pytest.approx(target, abs=1e-9)
