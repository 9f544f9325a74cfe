"""Ball rolling on piecewise inclined planes, watched by a camera that moves
parallel to the plane under an orthographic projection x = v - c.

Image state layout: [vel1, vel2, pos1, pos2]. The ball obeys a double
integrator with acceleration theta(beta) of the segment it is on; the camera
is a double integrator driven by the commanded acceleration c_ddot.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from anticipating_segmentation.modules.config import PARAM_DIM, STATE_DIM
from anticipating_segmentation.modules.data_models import ControllerGains, RampSegment
from anticipating_segmentation.modules.dynsys import (
    ParamVec,
    StateVec,
    SystemModel,
    as_vector,
    ensure_finite,
    euler_step,
)

logger = logging.getLogger(__name__)

_F_MATRIX = np.array(
    [[1.0, 0.0],
     [0.0, 1.0],
     [0.0, 0.0],
     [0.0, 0.0]]
)
_F_MATRIX.setflags(write=False)


def _kinematics(x: StateVec) -> StateVec:
    return np.array([0.0, 0.0, x[0], x[1]])


def _input_matrix(x: StateVec) -> np.ndarray:
    return _F_MATRIX


BALL_MODEL = SystemModel(n=STATE_DIM, m=PARAM_DIM, f=_kinematics, F=_input_matrix, name="ball-in-image")


def theta_for_slope(beta: float, g: float) -> ParamVec:
    """Ball acceleration on a plane of slope beta: [-g sin cos, -g sin^2]."""
    if g <= 0:
        raise ValueError(f"gravity must be positive, got {g}")
    s = math.sin(beta)
    return np.array([-g * s * math.cos(beta), -g * s * s])


def actuation(c_ddot: np.ndarray) -> StateVec:
    """Camera acceleration as the drive's input u = [-c1'', -c2'', 0, 0]."""
    return np.array([-c_ddot[0], -c_ddot[1], 0.0, 0.0])


def travel_direction(segments: Sequence[RampSegment], g: float) -> float:
    """Sign of the horizontal motion set by the first segment (negative if flat)."""
    theta = theta_for_slope(segments[0].beta, g)
    return 1.0 if theta[0] > 0 else -1.0


def segment_index(v1: float, segments: Sequence[RampSegment], start: float = 0.0,
                  direction: float = -1.0) -> int:
    """Index of the segment holding the ball, by progress |v1 - start| along ``direction``."""
    if not segments:
        raise ValueError("at least one ramp segment is required")
    progress = max(0.0, direction * (v1 - start))
    bounds = np.cumsum([s.length for s in segments])
    idx = int(np.searchsorted(bounds, progress, side="right"))
    return min(idx, len(segments) - 1)


def drive_deriv(x: StateVec, theta: ParamVec, c_ddot: np.ndarray) -> StateVec:
    """Image-plane dynamics: [theta1 - c1'', theta2 - c2'', x1', x2']."""
    return np.array([theta[0] - c_ddot[0], theta[1] - c_ddot[1], x[0], x[1]])


def pd_controller(y: StateVec, alpha: ParamVec, gains: ControllerGains) -> np.ndarray:
    """Camera acceleration c'' = kp * pos(y) + kd * vel(y) + alpha."""
    return gains.kp * y[2:4] + gains.kd * y[0:2] + alpha


@dataclass(frozen=True)
class ScenarioState:
    v: np.ndarray
    v_dot: np.ndarray
    c: np.ndarray
    c_dot: np.ndarray
    segment_idx: int = 0
    start: float = 0.0
    direction: float = -1.0

    @classmethod
    def initial(cls, segments: Sequence[RampSegment], g: float,
                camera_position: Sequence[float] = (0.0, 0.0),
                camera_velocity: Sequence[float] = (0.0, 0.0)) -> "ScenarioState":
        """Ball at rest at the world origin, camera at the given position."""
        return cls(
            v=np.zeros(2),
            v_dot=np.zeros(2),
            c=as_vector(camera_position, 2, "camera_position"),
            c_dot=as_vector(camera_velocity, 2, "camera_velocity"),
            segment_idx=0,
            start=0.0,
            direction=travel_direction(segments, g),
        )

    @property
    def image_state(self) -> StateVec:
        return np.concatenate([self.v_dot - self.c_dot, self.v - self.c])

    def theta(self, segments: Sequence[RampSegment], g: float) -> ParamVec:
        return theta_for_slope(segments[self.segment_idx].beta, g)


def scenario_step(st: ScenarioState, c_ddot: np.ndarray, segments: Sequence[RampSegment],
                  g: float, T: float, step: Optional[int] = None):
    """Advance ball and camera one Euler step.

    Returns (new state, theta of the segment now occupied, new image state).
    """
    theta = st.theta(segments, g)
    ball = euler_step(np.concatenate([st.v_dot, st.v]),
                      np.concatenate([theta, st.v_dot]), T, step, "ball")
    camera = euler_step(np.concatenate([st.c_dot, st.c]),
                        np.concatenate([ensure_finite(c_ddot, "c_ddot", step), st.c_dot]),
                        T, step, "camera")
    v_dot, v = ball[:2], ball[2:]
    idx = segment_index(float(v[0]), segments, st.start, st.direction)
    if idx != st.segment_idx:
        logger.debug("ball entered segment %d at step %s (v1=%.6g)", idx, step, v[0])
    new = replace(st, v=v, v_dot=v_dot, c=camera[2:], c_dot=camera[:2], segment_idx=idx)
    return new, new.theta(segments, g), new.image_state


def slope_change_times(segments: Sequence[RampSegment], g: float) -> List[float]:
    """Analytic times at which the ball, released at rest, enters each next segment.

    Progress along the travel direction is piecewise uniformly accelerated;
    segments that are never reached produce no entry.
    """
    direction = travel_direction(segments, g)
    times: List[float] = []
    t, speed = 0.0, 0.0
    for seg in segments[:-1]:
        a = direction * theta_for_slope(seg.beta, g)[0]
        L = seg.length
        if not math.isfinite(L):
            break
        if abs(a) < 1e-15:
            if speed <= 0:
                break
            dt = L / speed
        else:
            disc = speed * speed + 2.0 * a * L
            if disc < 0:
                break
            dt = (-speed + math.sqrt(disc)) / a
        t += dt
        speed += a * dt
        times.append(t)
    return times
