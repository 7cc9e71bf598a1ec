import numpy as np
import pytest

from spectral_bench.cnn.adam import AdamState, adam_step
from spectral_bench.exceptions import ShapeError


def test_first_step_closed_form():
    gen = np.random.default_rng(0)
    params = {"w": gen.standard_normal(6)}
    g = gen.standard_normal(6)
    before = params["w"].copy()
    state = AdamState.for_params(params)
    adam_step(params, {"w": g}, state, lr=0.05)
    # bias correction makes m_hat = g and v_hat = g**2 exactly at t=1
    expected = before - 0.05 * g / (np.abs(g) + state.eps)
    assert np.allclose(params["w"], expected, atol=1e-15)
    assert state.t == 1


def test_zero_gradient_keeps_parameters_but_advances_t():
    params = {"w": np.array([1.0, -2.0])}
    state = AdamState.for_params(params)
    adam_step(params, {"w": np.zeros(2)}, state, lr=0.1)
    assert np.array_equal(params["w"], [1.0, -2.0])
    assert state.t == 1


def test_three_steps_on_quadratic_match_hand_recurrence():
    lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
    params = {"w": np.array([1.0])}
    state = AdamState.for_params(params)

    # independent scalar recurrence
    w, m, v = 1.0, 0.0, 0.0
    history = []
    for t in range(1, 4):
        g = 2.0 * w
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        w -= lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
        history.append(w)

    seen = []
    for _ in range(3):
        g = 2.0 * params["w"]
        adam_step(params, {"w": g}, state, lr=lr)
        seen.append(float(params["w"][0]))

    assert np.allclose(seen, history, atol=1e-12)
    assert seen[0] > seen[1] > seen[2]  # strictly decreasing toward 0
    assert all(s < 1.0 for s in seen)


def test_shape_mismatch_rejected():
    params = {"w": np.zeros(3)}
    state = AdamState.for_params(params)
    with pytest.raises(ShapeError):
        adam_step(params, {"w": np.zeros(4)}, state, lr=0.1)
    with pytest.raises(ShapeError):
        adam_step(params, {"x": np.zeros(3)}, state, lr=0.1)
