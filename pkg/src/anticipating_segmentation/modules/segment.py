"""Online event-boundary detection on the prediction-error stream.

Each new V is scored against the W previous values (the current sample is not
part of its own window):  b_V = (V - mu_V) / max(sigma_V, sigma_floor).
A boundary is emitted when |b_V| > b_event, the window is warm and no other
boundary fell within the refractory period.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from anticipating_segmentation.modules.data_models import DetectorConfig, EventBoundary

logger = logging.getLogger(__name__)


class WindowStats:
    """Sliding window of the last ``capacity`` V samples with mean and population variance."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._buffer = np.zeros(capacity)
        self._next = 0
        self._count = 0
        self.mean = 0.0
        self.variance = 0.0

    def __len__(self) -> int:
        return self._count

    @property
    def full(self) -> bool:
        return self._count >= self.capacity

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.variance))

    def values(self) -> np.ndarray:
        """Stored samples, oldest first."""
        if not self.full:
            return self._buffer[:self._count].copy()
        return np.roll(self._buffer, -self._next)

    def push(self, V: float) -> "WindowStats":
        self._buffer[self._next] = V
        self._next = (self._next + 1) % self.capacity
        self._count = min(self._count + 1, self.capacity)
        # moments recomputed from the stored samples on every push
        stored = self._buffer[:self._count]
        self.mean = float(np.mean(stored))
        self.variance = max(float(np.var(stored)), 0.0)
        return self


def window_push(stats: WindowStats, V: float) -> WindowStats:
    return stats.push(V)


def b_metric(V: float, mu: float, sigma: float, sigma_floor: float) -> float:
    return (V - mu) / max(sigma, sigma_floor)


def detect(b: float, t: float, cfg: DetectorConfig, last_event: Optional[float],
           warm: bool, V: float = float("nan"), mu: float = float("nan"),
           sigma: float = float("nan")) -> Optional[EventBoundary]:
    if not warm or abs(b) <= cfg.b_event:
        return None
    if last_event is not None and t - last_event < cfg.refractory:
        return None
    return EventBoundary(time=t, b_value=b, V_value=V, mu=mu, sigma=sigma)


class EventDetector:
    """Streaming detector: score V against history, then add V to the history.

    With ``restart_window`` a boundary empties the window, samples inside the
    refractory period are not stored, and detection resumes once the window
    holds ``rearm_fraction`` of its capacity again. The transient that follows
    a boundary therefore never inflates sigma_V for the next one.
    """

    def __init__(self, capacity: int, cfg: DetectorConfig):
        self.cfg = cfg
        self.capacity = capacity
        self.stats = WindowStats(capacity)
        self.last_event: Optional[float] = None
        self._rearm_samples = max(1, math.ceil(cfg.rearm_fraction * capacity))

    @property
    def armed(self) -> bool:
        if not self.cfg.restart_window or self.last_event is None:
            return self.stats.full
        return len(self.stats) >= self._rearm_samples

    def _in_refractory(self, t: float) -> bool:
        return self.last_event is not None and t - self.last_event < self.cfg.refractory

    def update(self, V: float, t: float) -> Tuple[float, Optional[EventBoundary]]:
        mu, sigma = self.stats.mean, self.stats.sigma
        armed = self.armed
        b = b_metric(V, mu, sigma, self.cfg.sigma_floor) if armed else 0.0
        event = detect(b, t, self.cfg, self.last_event, armed, V=V, mu=mu, sigma=sigma)
        if event is not None:
            self.last_event = t
            logger.info("event boundary at t=%.2f s (b_V=%.3g, V=%.3g)", t, b, V)
            if self.cfg.restart_window:
                self.stats = WindowStats(self.capacity)
        if not (self.cfg.restart_window and self._in_refractory(t)):
            self.stats.push(V)
        return b, event


def rolling_event_metric(V: pd.Series, capacity: int, sigma_floor: float) -> pd.Series:
    """Offline b_V of a V series against the ``capacity`` previous samples (NaN until warm).

    Matches :class:`EventDetector` up to its first boundary; window restarts are not replayed.
    """
    history = V.shift(1).rolling(capacity, min_periods=capacity)
    sigma = history.std(ddof=0).clip(lower=sigma_floor)
    return (V - history.mean()) / sigma
