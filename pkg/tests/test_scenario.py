import math

import numpy as np
import pytest

from anticipating_segmentation.modules.data_models import ControllerGains, RampSegment, SimConfig
from anticipating_segmentation.modules.scenario import (
    ScenarioState,
    actuation,
    drive_deriv,
    pd_controller,
    scenario_step,
    segment_index,
    slope_change_times,
    theta_for_slope,
)

G = 9.81
T = 0.01
DEFAULT_SEGMENTS = SimConfig().segments


def test_theta_for_slope_examples():
    np.testing.assert_allclose(theta_for_slope(0.0, G), [0.0, 0.0])
    np.testing.assert_allclose(theta_for_slope(math.pi / 2, G), [0.0, -G], atol=1e-12)
    np.testing.assert_allclose(theta_for_slope(math.pi / 12, G), [-2.4525, -0.657145], atol=1e-5)


def test_theta_for_slope_rejects_non_positive_gravity():
    with pytest.raises(ValueError):
        theta_for_slope(0.1, 0.0)


def test_segment_index_by_progress():
    assert segment_index(0.0, DEFAULT_SEGMENTS) == 0
    assert segment_index(-499.0, DEFAULT_SEGMENTS) == 0
    assert segment_index(-600.0, DEFAULT_SEGMENTS) == 1
    assert segment_index(-1e6, DEFAULT_SEGMENTS) == 2


def test_segment_index_clamps_past_last_boundary():
    segments = [RampSegment(beta=0.1, length=1.0), RampSegment(beta=0.2, length=1.0)]
    assert segment_index(-5.0, segments) == 1
    assert segment_index(5.0, segments, direction=1.0) == 1


def test_segment_index_requires_segments():
    with pytest.raises(ValueError):
        segment_index(0.0, [])


def test_drive_deriv_examples():
    theta = np.array([-2.4525, -0.6571])
    np.testing.assert_allclose(drive_deriv(np.zeros(4), theta, np.zeros(2)), [-2.4525, -0.6571, 0, 0])
    np.testing.assert_allclose(drive_deriv(np.array([1.0, 2.0, 0, 0]), np.zeros(2), np.array([1.0, 2.0])),
                               [-1, -2, 1, 2])


def test_actuation_negates_camera_acceleration():
    np.testing.assert_array_equal(actuation(np.array([0.5, -2.0])), [-0.5, 2.0, 0.0, 0.0])


def test_pd_controller_example():
    gains = ControllerGains(kp=1.0, kd=2.0)
    out = pd_controller(np.array([0.0, 0.0, 1.0, -1.0]), np.array([-2.4525, -0.6571]), gains)
    np.testing.assert_allclose(out, [-1.4525, -1.6571])
    assert gains.critically_damped


def test_closed_loop_on_manifold_is_critically_damped():
    gains = ControllerGains(kp=1.0, kd=2.0)
    theta = theta_for_slope(math.pi / 12, G)
    x = np.array([0.3, -0.4, 1.5, 2.5])
    dx = drive_deriv(x, theta, pd_controller(x, theta, gains))
    np.testing.assert_allclose(dx[:2], -gains.kp * x[2:] - gains.kd * x[:2], atol=1e-12)


def test_scenario_step_at_rest_on_flat_plane():
    segments = [RampSegment(beta=0.0, length=math.inf)]
    st = ScenarioState.initial(segments, G)
    new, theta, image = scenario_step(st, np.zeros(2), segments, G, T)
    np.testing.assert_array_equal(new.v, np.zeros(2))
    np.testing.assert_array_equal(new.v_dot, np.zeros(2))
    np.testing.assert_array_equal(image, np.zeros(4))
    np.testing.assert_array_equal(theta, [0.0, 0.0])


def test_image_state_is_projection():
    rng = np.random.default_rng(8)
    st = ScenarioState.initial(DEFAULT_SEGMENTS, G, camera_position=(1.0, -2.0))
    for k in range(200):
        st, _, image = scenario_step(st, rng.normal(size=2), DEFAULT_SEGMENTS, G, T, step=k)
        np.testing.assert_array_equal(image, np.concatenate([st.v_dot - st.c_dot, st.v - st.c]))


def test_ball_ignores_the_camera():
    rng = np.random.default_rng(13)
    a = ScenarioState.initial(DEFAULT_SEGMENTS, G)
    b = ScenarioState.initial(DEFAULT_SEGMENTS, G)
    for k in range(300):
        a, _, _ = scenario_step(a, rng.normal(size=2), DEFAULT_SEGMENTS, G, T)
        b, _, _ = scenario_step(b, 10 * rng.normal(size=2), DEFAULT_SEGMENTS, G, T)
    np.testing.assert_array_equal(a.v, b.v)
    np.testing.assert_array_equal(a.v_dot, b.v_dot)


def _roll_to_end(n_steps):
    st = ScenarioState.initial(DEFAULT_SEGMENTS, G)
    changes = []
    prev_theta = st.theta(DEFAULT_SEGMENTS, G)
    for k in range(n_steps):
        v_dot_before = st.v_dot.copy()
        st, theta, _ = scenario_step(st, np.zeros(2), DEFAULT_SEGMENTS, G, T, step=k)
        # velocity stays continuous across boundaries
        assert np.max(np.abs(st.v_dot - v_dot_before)) <= T * G
        if not np.array_equal(theta, prev_theta):
            changes.append(((k + 1) * T, theta))
        prev_theta = theta
    return changes


def test_default_ramps_change_slope_twice():
    changes = _roll_to_end(10000)
    assert len(changes) == 2
    expected = slope_change_times(DEFAULT_SEGMENTS, G)
    for (t, _), t_true in zip(changes, expected):
        assert abs(t - t_true) < 0.05
    np.testing.assert_allclose(changes[0][1], [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(changes[1][1], theta_for_slope(math.pi / 12, G))


def test_slope_change_times_default():
    times = slope_change_times(DEFAULT_SEGMENTS, G)
    assert len(times) == 2
    assert times[0] == pytest.approx(math.sqrt(1000.0 / 2.4525), abs=1e-3)
    assert times[0] == pytest.approx(20.19, abs=0.01)
    assert times[1] == pytest.approx(30.29, abs=0.01)


def test_slope_change_times_stops_on_flat_start():
    segments = [RampSegment(beta=0.0, length=10.0), RampSegment(beta=0.1, length=math.inf)]
    assert slope_change_times(segments, G) == []
