"""Numerical substrate: state vectors, parametric system models, forward Euler
integration and sample delay lines.

Models follow the form ``dx/dt = f(x) + F(x) @ p + u`` with ``f: R^n -> R^n``
and ``F: R^n -> R^{n x m}`` (dense, row-major).
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Optional

import numpy as np
import numpy.typing as npt

from anticipating_segmentation.modules.config import INTEGRAL_TOLERANCE
from anticipating_segmentation.modules.errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

StateVec = npt.NDArray[np.float64]
ParamVec = npt.NDArray[np.float64]
Matrix = npt.NDArray[np.float64]


def as_vector(values, dim: Optional[int] = None, name: str = "vector") -> npt.NDArray[np.float64]:
    """Copy ``values`` into a 1-D float64 array, checking its length."""
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name}: expected dimension {dim}, got {arr.shape[0]}")
    return arr


def ensure_finite(values: np.ndarray, signal: str, step: Optional[int] = None) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NumericalError(signal, step, detail=np.array2string(np.asarray(values)))
    return values


def delay_samples(tau: float, T: float, key: str = "tau") -> int:
    """Number of samples d = tau/T; a non-integral ratio is a configuration error."""
    if T <= 0:
        raise ConfigError("T", "step must be positive")
    if tau < 0:
        raise ConfigError(key, "must be non-negative")
    ratio = tau / T
    d = int(round(ratio))
    if abs(ratio - d) > INTEGRAL_TOLERANCE * max(1.0, abs(ratio)):
        raise ConfigError(key, f"{tau} is not a whole number of {T} s samples")
    return d


@dataclass(frozen=True)
class SystemModel:
    """Parametric structure (f, F) of dx/dt = f(x) + F(x) @ p + u."""

    n: int
    m: int
    f: Callable[[StateVec], StateVec]
    F: Callable[[StateVec], Matrix]
    name: str = "model"

    def check(self, state: Optional[StateVec] = None) -> None:
        x = np.zeros(self.n) if state is None else as_vector(state, self.n, "state")
        fx = np.asarray(self.f(x))
        Fx = np.asarray(self.F(x))
        if fx.shape != (self.n,):
            raise ValueError(f"{self.name}: f returned shape {fx.shape}, expected ({self.n},)")
        if Fx.shape != (self.n, self.m):
            raise ValueError(
                f"{self.name}: F returned shape {Fx.shape}, expected ({self.n}, {self.m})"
            )


def euler_step(x: StateVec, dx: StateVec, T: float, step: Optional[int] = None,
               signal: str = "state") -> StateVec:
    """One forward Euler step: x + T * dx."""
    if T <= 0:
        raise ValueError(f"step size must be positive, got {T}")
    if x.shape != dx.shape:
        raise ValueError(f"dimension mismatch: state {x.shape} vs derivative {dx.shape}")
    return ensure_finite(x + T * dx, signal, step)


def eval_parametric(model: SystemModel, x: StateVec, p: ParamVec, u: StateVec,
                    step: Optional[int] = None, signal: str = "derivative") -> StateVec:
    """Evaluate f(x) + F(x) @ p + u."""
    if x.shape != (model.n,) or p.shape != (model.m,) or u.shape != (model.n,):
        raise ValueError(
            f"{model.name}: inconsistent dimensions x{x.shape} p{p.shape} u{u.shape}"
        )
    return ensure_finite(model.f(x) + model.F(x) @ p + u, signal, step)


class DelayLine:
    """Fixed-depth FIFO realizing a d-sample delay.

    The buffer is pre-filled with ``depth`` copies of the initial value, so the
    first ``depth`` pushes return it.
    """

    def __init__(self, depth: int, initial: np.ndarray):
        if depth < 0:
            raise ValueError(f"delay depth must be >= 0, got {depth}")
        self.depth = depth
        self._shape = np.shape(initial)
        self._buffer: Deque[np.ndarray] = deque(
            (np.array(initial, dtype=np.float64) for _ in range(depth)), maxlen=depth or None
        )

    def __len__(self) -> int:
        return len(self._buffer)

    def push(self, sample: np.ndarray) -> np.ndarray:
        """Store ``sample`` and return the one pushed ``depth`` calls earlier."""
        if np.shape(sample) != self._shape:
            raise ValueError(
                f"delay line sample shape {np.shape(sample)} does not match {self._shape}"
            )
        stored = np.array(sample, dtype=np.float64)
        if self.depth == 0:
            return stored
        out = self._buffer.popleft()
        self._buffer.append(stored)
        return out


def delay_push(line: DelayLine, sample: np.ndarray) -> np.ndarray:
    return line.push(sample)
