import logging

import numpy as np
import pytest

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import Preset, SimConfig
from anticipating_segmentation.modules.processing import (
    THETA_COLUMNS,
    extended_lyapunov_series,
    image_rms,
    parameter_error,
)
from anticipating_segmentation.modules.harness import run_simulation
from anticipating_segmentation.modules.scenario import slope_change_times


@pytest.fixture(scope="module")
def full_run():
    return run_simulation(SimConfig())


@pytest.fixture(scope="module")
def no_anticipation_run():
    return run_simulation(SimConfig(preset=Preset.NO_ANTICIPATION))


@pytest.fixture(scope="module")
def crossings():
    cfg = SimConfig()
    return slope_change_times(cfg.segments, cfg.g)


def _between(trace, start, stop):
    t = trace["t"]
    return trace.loc[(t >= start) & (t <= stop)]


def test_trace_layout(full_run):
    trace = full_run.trace
    assert list(trace.columns) == config.TRACE_COLUMNS
    assert len(trace) == 10000
    assert trace["t"].iloc[0] == 0.0
    np.testing.assert_allclose(np.diff(trace["t"].to_numpy()), 0.01, rtol=1e-9)
    assert list(full_run.world.columns) == config.WORLD_COLUMNS
    assert len(full_run.world) == 10000
    assert full_run.delay_samples == 65
    assert full_run.preset == "full"


def test_detects_both_slope_changes(full_run, crossings):
    assert len(full_run.events) == 2
    tau = full_run.config.tau
    for event, t_true in zip(full_run.events, crossings):
        latency = event.time - t_true
        assert tau < latency <= tau + 1.5
        assert abs(event.b_value) > 3.0
    assert int(full_run.trace["event"].sum()) == 2


def test_learned_parameters_converge_per_segment(full_run, crossings):
    trace = full_run.trace
    error = parameter_error(trace)
    t_c1, t_c2 = crossings
    end = trace["t"].iloc[-1]
    segments = [(0.0, t_c1, 0.25), (t_c1, t_c2, 0.10), (t_c2, end, 0.25)]
    for start, stop, tail in segments:
        part = error[(trace["t"] >= stop - tail * (stop - start)) & (trace["t"] <= stop)]
        assert len(part) > 0
        assert part.max() < 0.05


def test_prediction_error_settles_before_first_change(full_run, crossings):
    trace = full_run.trace
    part = _between(trace, 15.0, crossings[0] + full_run.config.tau)
    assert part["V"].max() < 1e-3


def test_camera_keeps_ball_centred(full_run, crossings):
    trace = full_run.trace
    t_c1, t_c2 = crossings
    for start, stop in ((15.0, t_c1), (t_c2 + 15.0, 100.0)):
        part = _between(trace, start, stop)
        assert part[["x_p1", "x_p2"]].abs().to_numpy().max() < 0.05


def test_anticipation_improves_tracking(full_run, no_anticipation_run, crossings):
    full = image_rms(full_run.trace, 20.0, crossings[0])
    delayed = image_rms(no_anticipation_run.trace, 20.0, crossings[0])
    assert delayed >= 2 * full
    assert no_anticipation_run.preset == "no-anticipation"


def test_extended_lyapunov_nonincreasing_between_changes(full_run):
    trace = full_run.trace
    d = full_run.delay_samples
    values = extended_lyapunov_series(trace, 1.0, d).to_numpy()
    theta = trace[THETA_COLUMNS].to_numpy()
    theta_tau = np.vstack([np.repeat(theta[:1], d, axis=0), theta])[:len(theta)]
    for k in range(d, len(values) - 1):
        if not np.array_equal(theta_tau[k + 1], theta_tau[k]):
            continue
        allowed = 10 * 0.01 ** 2 * 2 * values[k] + 1e-12
        assert values[k + 1] - values[k] <= allowed, f"step {k}"


def test_wiring_without_delay_or_learning():
    cfg = SimConfig(duration=20.0, window=10.0, tau=0.0, gamma=0.0, alpha_init="theta",
                    camera_position=(-1.0, 0.5), response_offset=(0.1, -0.2, 0.3, 0.05))
    result = run_simulation(cfg)
    V = result.trace["V"].to_numpy()
    assert V[0] == pytest.approx(0.5 * (0.1 ** 2 + 0.2 ** 2 + 0.3 ** 2 + 0.05 ** 2))
    # e_{k+1} = (1 - T) e_k once the delay is gone and alpha = theta
    assert np.all(np.diff(V) < 0)
    np.testing.assert_allclose(V[1:1000] / V[:999], 0.99 ** 2, rtol=1e-6)
    assert V[-1] < 1e-10
    np.testing.assert_allclose(result.trace[["alpha_1", "alpha_2"]].to_numpy(),
                               result.trace[THETA_COLUMNS].to_numpy())


def test_closed_loop_matches_critically_damped_oracle():
    cfg = SimConfig(duration=10.0, window=5.0, tau=0.0, gamma=0.0, alpha_init="theta",
                    camera_position=(-1.0, 0.5))
    trace = run_simulation(cfg).trace
    t = trace["t"].to_numpy()
    envelope = (1.0 + t) * np.exp(-t)
    np.testing.assert_allclose(trace["x_p1"].to_numpy(), envelope, atol=1e-2)
    np.testing.assert_allclose(trace["x_p2"].to_numpy(), -0.5 * envelope, atol=1e-2)


def test_zero_duration_is_empty():
    result = run_simulation(SimConfig(duration=0.0))
    assert result.trace.empty
    assert list(result.trace.columns) == config.TRACE_COLUMNS
    assert result.events == []
    assert result.world.empty


def test_first_row_holds_initial_state(full_run):
    trace = full_run.trace
    row = trace.iloc[0]
    for col in config.TRACE_COLUMNS[1:17]:
        assert row[col] == 0.0
    assert row["V"] == 0.0
    assert row["b_V"] == 0.0
    # the first perceived sample repeats the initial state for d steps
    d = full_run.delay_samples
    np.testing.assert_array_equal(trace[["xtau_p1", "xtau_v1"]].iloc[:d + 1].to_numpy(), 0.0)


def test_response_offset_moves_initial_responses():
    offset = (0.1, -0.2, 0.3, 0.05)
    trace = run_simulation(SimConfig(duration=11.0, window=10.0, response_offset=offset)).trace
    row = trace.iloc[0]
    np.testing.assert_allclose(row[[f"ystar_{s}" for s in config.STATE_LABELS]].to_numpy(), offset)
    np.testing.assert_allclose(row[[f"y_{s}" for s in config.STATE_LABELS]].to_numpy(), offset)


def test_final_record_matches_last_row(full_run):
    record = full_run.final_record
    last = full_run.trace.iloc[-1]
    assert record.t == last["t"]
    assert record.alpha == last[["alpha_1", "alpha_2"]].tolist()
    assert record.V == last["V"]
    assert not record.event_flag
    assert run_simulation(SimConfig(duration=0.0)).final_record is None


def test_gains_off_critical_damping_are_reported(caplog):
    with caplog.at_level(logging.WARNING):
        run_simulation(SimConfig(duration=0.0, kp=1.0, kd=1.0))
    assert "not critically damped" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING):
        run_simulation(SimConfig(duration=0.0))
    assert "not critically damped" not in caplog.text


def test_window_without_restart_misses_the_close_second_change(crossings):
    result = run_simulation(SimConfig(duration=40.0, restart_window=False))
    assert len(result.events) == 1
    assert result.events[0].time == pytest.approx(crossings[0] + 0.65, abs=0.2)
