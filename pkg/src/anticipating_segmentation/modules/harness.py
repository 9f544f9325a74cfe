"""Closed-loop simulation: drive (ball + camera), perceptual delay lines,
adaptive and anticipating responses, camera controller and event detector.

Per step k (t = k T):
  1. camera command from y (full) or y* (no-anticipation)
  2. u_tau from the actuation delay line
  3. the drive state x_k that u acts on enters the perception delay line -> x_tau
  4. the drive advances with u
  5. adaptive response on (x_tau, u_tau) -> e, V, alpha
  6. detector scores V
  7. anticipating response on (x_tau, u, alpha)
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import EventBoundary, Preset, SimConfig, TraceRecord
from anticipating_segmentation.modules.dynsys import DelayLine, ensure_finite
from anticipating_segmentation.modules.errors import SimulationError
from anticipating_segmentation.modules.scenario import (
    BALL_MODEL,
    ScenarioState,
    actuation,
    pd_controller,
    scenario_step,
)
from anticipating_segmentation.modules.segment import EventDetector
from anticipating_segmentation.modules.sync import (
    AdaptiveResponse,
    AnticipatingResponse,
    adaptive_step,
    anticipating_step,
)

logger = logging.getLogger(__name__)

# column slices of a trace row
_T = 0
_X = slice(1, 5)
_XTAU = slice(5, 9)
_YSTAR = slice(9, 13)
_Y = slice(13, 17)
_ALPHA = slice(17, 19)
_THETA = slice(19, 21)
_U = slice(21, 23)
_V, _B, _EVENT = 23, 24, 25


class Trace:
    """Preallocated per-step record table with the ``TRACE_COLUMNS`` layout."""

    def __init__(self, n_steps: int):
        self.data = np.zeros((n_steps, len(config.TRACE_COLUMNS)))

    def __len__(self) -> int:
        return self.data.shape[0]

    def record(self, k, t, x, x_tau, y_star, y, alpha, theta, u, V, b, event):
        row = self.data[k]
        row[_T] = t
        row[_X] = x
        row[_XTAU] = x_tau
        row[_YSTAR] = y_star
        row[_Y] = y
        row[_ALPHA] = alpha
        row[_THETA] = theta
        row[_U] = u
        row[_V] = V
        row[_B] = b
        row[_EVENT] = 1.0 if event else 0.0

    def record_at(self, k: int) -> TraceRecord:
        row = self.data[k]
        return TraceRecord(
            t=row[_T], x=row[_X].tolist(), x_tau=row[_XTAU].tolist(), y_star=row[_YSTAR].tolist(),
            y=row[_Y].tolist(), alpha=row[_ALPHA].tolist(), theta_true=row[_THETA].tolist(),
            u=row[_U].tolist(), V=row[_V], b_V=row[_B], event_flag=bool(row[_EVENT]),
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.data, columns=config.TRACE_COLUMNS)
        frame["event"] = frame["event"].astype(int)
        return frame


@dataclass
class SimulationResult:
    config: SimConfig
    trace: pd.DataFrame
    events: List[EventBoundary] = field(default_factory=list)
    world: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=config.WORLD_COLUMNS))
    final_record: Optional[TraceRecord] = None

    @property
    def delay_samples(self) -> int:
        return self.config.delay_samples

    @property
    def preset(self) -> str:
        return Preset(self.config.preset).value


def run_simulation(cfg: SimConfig) -> SimulationResult:
    """Run the closed loop for ``cfg.duration`` seconds; deterministic for a given cfg."""
    T = cfg.T
    d = cfg.delay_samples
    n_steps = cfg.n_steps
    segments = cfg.segments
    gains = cfg.gains
    feed_anticipated = Preset(cfg.preset) is Preset.FULL

    BALL_MODEL.check()
    if not gains.critically_damped:
        logger.warning("camera gains kp=%g, kd=%g are not critically damped (kd^2 != 4 kp)", gains.kp, gains.kd)

    logger.info(
        "simulating %d steps (T=%g s, tau=%g s -> %d samples, preset=%s)",
        n_steps, T, cfg.tau, d, Preset(cfg.preset).value,
    )

    scene = ScenarioState.initial(segments, cfg.g, cfg.camera_position, cfg.camera_velocity)
    x = scene.image_state
    theta = scene.theta(segments, cfg.g)
    alpha0 = theta.copy() if cfg.alpha_init == "theta" else np.zeros(BALL_MODEL.m)

    y0 = x + np.asarray(cfg.response_offset, dtype=float)
    adaptive = AdaptiveResponse(model=BALL_MODEL, state=y0.copy(), alpha=alpha0, gamma=cfg.gamma)
    anticipating = AnticipatingResponse.create(BALL_MODEL, y0.copy(), cfg.k, d)
    x_line = DelayLine(d, x)
    u_line = DelayLine(d, np.zeros(BALL_MODEL.n))
    detector = EventDetector(cfg.window_samples, cfg.detector)

    trace = Trace(n_steps)
    world = np.zeros((n_steps, len(config.WORLD_COLUMNS)))
    events: List[EventBoundary] = []

    try:
        for k in range(n_steps):
            t = k * T
            y_star, y = adaptive.state, anticipating.state
            alpha = adaptive.alpha

            c_ddot = pd_controller(y if feed_anticipated else y_star, alpha, gains)
            c_ddot = ensure_finite(c_ddot, "u", k)
            u = actuation(c_ddot)
            u_tau = u_line.push(u)

            x_tau = x_line.push(x)
            world[k] = (t, *scene.v, *scene.c)
            x_now, theta_now = x, theta
            scene, theta, x = scenario_step(scene, c_ddot, segments, cfg.g, T, k)

            err = adaptive_step(adaptive, x_tau, u_tau, T, k)
            b, event = detector.update(err.V, t)
            if event is not None:
                events.append(event)

            anticipating_step(anticipating, x_tau, u, adaptive.alpha, T, k)

            trace.record(k, t, x_now, x_tau, y_star, y, alpha, theta_now, c_ddot,
                         err.V, b, event is not None)
    except SimulationError:
        logger.error("simulation aborted at t=%.2f s", k * T)
        raise

    logger.info("simulation finished: %d event boundaries", len(events))
    return SimulationResult(
        config=cfg,
        trace=trace.to_frame(),
        events=events,
        world=pd.DataFrame(world, columns=config.WORLD_COLUMNS),
        final_record=trace.record_at(n_steps - 1) if n_steps else None,
    )
