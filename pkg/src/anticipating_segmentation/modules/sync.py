"""Double-response system: the adaptive response (Chen's controller and
learning rule) and the anticipating response (delayed self-feedback).

Both responses share the drive's structural model (f, F). The adaptive
response tracks the delayed perception x_tau and learns alpha; the
anticipating response receives alpha each step and runs tau ahead of x_tau.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Protocol

import numpy as np

from anticipating_segmentation.modules.config import DIVERGENCE_BOUND
from anticipating_segmentation.modules.dynsys import (
    DelayLine,
    ParamVec,
    StateVec,
    SystemModel,
    as_vector,
    ensure_finite,
    euler_step,
    eval_parametric,
)
from anticipating_segmentation.modules.errors import DivergenceError

logger = logging.getLogger(__name__)

SyncController = Callable[[StateVec, StateVec, ParamVec, SystemModel], StateVec]


class LyapunovFunction(Protocol):
    def value(self, e: StateVec) -> float: ...

    def gradient(self, e: StateVec) -> StateVec: ...


class QuadraticLyapunov:
    """V(e) = 1/2 e^T e, with gradient e^T."""

    def value(self, e: StateVec) -> float:
        return lyapunov_v(e)

    def gradient(self, e: StateVec) -> StateVec:
        return e


class PredictionError(NamedTuple):
    e: StateVec
    V: float


def lyapunov_v(e: StateVec) -> float:
    return 0.5 * float(np.dot(e, e))


def chen_controller(y_star: StateVec, x_tau: StateVec, alpha: ParamVec,
                    model: SystemModel) -> StateVec:
    """U = -e + f(x) - f(y) + [F(x) - F(y)] alpha, with e = y - x."""
    e = y_star - x_tau
    U = -e + model.f(x_tau) - model.f(y_star) + (model.F(x_tau) - model.F(y_star)) @ alpha
    return ensure_finite(U, "controller")


def learning_update(alpha: ParamVec, x_tau: StateVec, e: StateVec, model: SystemModel,
                    gamma: float, T: float,
                    lyapunov: Optional[LyapunovFunction] = None) -> ParamVec:
    """Discretized learning rule: alpha - gamma T F(x)^T grad V(e)^T."""
    grad = e if lyapunov is None else lyapunov.gradient(e)
    return ensure_finite(alpha - gamma * T * (model.F(x_tau).T @ grad), "alpha")


def extended_lyapunov(e: StateVec, alpha: ParamVec, theta: ParamVec, gamma: float) -> float:
    """1/2 e^T e + 1/2 ||alpha - theta||^2 / gamma."""
    if gamma <= 0:
        raise ValueError("extended Lyapunov function needs gamma > 0")
    d = alpha - theta
    return lyapunov_v(e) + 0.5 * float(np.dot(d, d)) / gamma


def _guard(state: StateVec, signal: str, step: Optional[int]) -> None:
    norm = float(np.linalg.norm(state))
    if norm > DIVERGENCE_BOUND:
        raise DivergenceError(signal, norm, DIVERGENCE_BOUND, step)


@dataclass
class AdaptiveResponse:
    model: SystemModel
    state: StateVec
    alpha: ParamVec
    gamma: float = 1.0
    controller: SyncController = chen_controller
    lyapunov: LyapunovFunction = field(default_factory=QuadraticLyapunov)

    def __post_init__(self):
        self.state = as_vector(self.state, self.model.n, "y*")
        self.alpha = as_vector(self.alpha, self.model.m, "alpha")
        if self.gamma < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.gamma}")


@dataclass
class AnticipatingResponse:
    model: SystemModel
    state: StateVec
    k: float
    y_delay: DelayLine

    def __post_init__(self):
        self.state = as_vector(self.state, self.model.n, "y")
        if self.k < 0:
            raise ValueError(f"feedback gain must be >= 0, got {self.k}")

    @classmethod
    def create(cls, model: SystemModel, initial: StateVec, k: float, depth: int) -> "AnticipatingResponse":
        initial = as_vector(initial, model.n, "y")
        return cls(model=model, state=initial, k=k, y_delay=DelayLine(depth, initial))


def adaptive_step(resp: AdaptiveResponse, x_tau: StateVec, u_tau: StateVec, T: float,
                  step: Optional[int] = None) -> PredictionError:
    """Advance y* and alpha by one step, returning the error measured before it.

    e and V come first, alpha is updated by the learning rule and y* is
    integrated with the pre-update alpha.
    """
    y_star = resp.state
    e = y_star - x_tau
    V = resp.lyapunov.value(e)

    U = resp.controller(y_star, x_tau, resp.alpha, resp.model)
    dy = eval_parametric(resp.model, y_star, resp.alpha, u_tau + U, step, "y* derivative")
    new_alpha = learning_update(resp.alpha, x_tau, e, resp.model, resp.gamma, T, resp.lyapunov)

    resp.state = euler_step(y_star, dy, T, step, "y*")
    resp.alpha = ensure_finite(new_alpha, "alpha", step)
    _guard(resp.state, "y*", step)
    return PredictionError(e=e, V=V)


def anticipating_step(resp: AnticipatingResponse, x_tau: StateVec, u: StateVec,
                      alpha: ParamVec, T: float, step: Optional[int] = None) -> StateVec:
    """Advance y by dy = f(y) + F(y) alpha + u + k (x_tau - y_tau)."""
    alpha = np.array(alpha, dtype=np.float64)
    y = resp.state
    y_tau = resp.y_delay.push(y)
    coupling = resp.k * (x_tau - y_tau)
    dy = eval_parametric(resp.model, y, alpha, u + coupling, step, "y derivative")
    resp.state = euler_step(y, dy, T, step, "y")
    _guard(resp.state, "y", step)
    return resp.state


def complete_sync_step(model: SystemModel, x: StateVec, y_line: DelayLine, y: StateVec,
                       theta: ParamVec, u: StateVec, k: float, T: float) -> tuple:
    """One step of the classical delayed-feedback pair.

    dx/dt = f(x) + F(x) theta + u,  dy/dt = f(y) + F(y) theta + u + k (x - y_tau)
    Returns the new (x, y).
    """
    y_tau = y_line.push(y)
    dx = eval_parametric(model, x, theta, u)
    dy = eval_parametric(model, y, theta, u + k * (x - y_tau))
    return euler_step(x, dx, T), euler_step(y, dy, T)
