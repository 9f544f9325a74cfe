from enum import Enum
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Literal, Tuple

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.errors import ConfigError


class Preset(str, Enum):
    FULL = "full"
    NO_ANTICIPATION = "no-anticipation"


class RampSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., description="Slope angle of the plane (radians)")
    length: float = Field(
        ..., gt=0, description="Extent along the horizontal coordinate (m); inf for the last one"
    )

    @field_validator("beta")
    @classmethod
    def _finite_beta(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("slope must be finite")
        return value


class ControllerGains(BaseModel):
    model_config = ConfigDict(frozen=True)

    kp: float = Field(default=config.DEFAULT_KP, gt=0, description="Proportional gain")
    kd: float = Field(
        default=config.DEFAULT_KD,
        gt=0,
        description="Derivative gain (kd^2 = 4 kp gives a double pole at -kd/2)",
    )

    @property
    def critically_damped(self) -> bool:
        return math.isclose(self.kd ** 2, 4.0 * self.kp)


class DetectorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    b_event: float = Field(default=config.DEFAULT_B_EVENT, gt=0, description="Threshold on |b_V|")
    refractory: float = Field(
        default=config.DEFAULT_REFRACTORY, ge=0,
        description="Seconds after a boundary during which detection is suppressed",
    )
    sigma_floor: float = Field(
        default=config.DEFAULT_SIGMA_FLOOR, gt=0, description="Lower bound on sigma_V"
    )
    restart_window: bool = Field(
        default=config.DEFAULT_RESTART_WINDOW,
        description="Empty the window at each boundary and keep the refractory samples out of it",
    )
    rearm_fraction: float = Field(
        default=config.DEFAULT_REARM_FRACTION, gt=0, le=1,
        description="Share of the window that must refill after a restart before detection resumes",
    )


class EventBoundary(BaseModel):
    time: float = Field(..., description="Detection time (s)")
    b_value: float = Field(..., description="Normalized metric b_V at detection")
    V_value: float = Field(..., description="Prediction error V at detection")
    mu: float = Field(..., description="Window mean of V")
    sigma: float = Field(..., description="Window standard deviation of V (unfloored)")


def _default_segments() -> List[RampSegment]:
    return [RampSegment(beta=b, length=length) for b, length in config.DEFAULT_SEGMENTS]


class SimConfig(BaseModel):
    """Simulation settings; defaults reproduce the ball-on-ramps experiment."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    T: float = Field(default=config.DEFAULT_T, gt=0, description="Step (s)")
    duration: float = Field(default=config.DEFAULT_DURATION, ge=0, description="Simulated time (s)")
    tau: float = Field(default=config.DEFAULT_TAU, ge=0, description="Perceptual delay (s)")
    k: float = Field(default=config.DEFAULT_K, gt=0, description="Anticipating feedback gain")
    kp: float = Field(default=config.DEFAULT_KP, gt=0, description="Camera proportional gain")
    kd: float = Field(default=config.DEFAULT_KD, gt=0, description="Camera derivative gain")
    gamma: float = Field(
        default=config.DEFAULT_GAMMA, ge=0, description="Learning rate; 0 freezes alpha"
    )
    window: float = Field(default=config.DEFAULT_WINDOW, gt=0, description="Normalization window (s)")
    b_event: float = Field(default=config.DEFAULT_B_EVENT, gt=0, description="Event threshold")
    refractory: float = Field(default=config.DEFAULT_REFRACTORY, ge=0, description="Refractory period (s)")
    sigma_floor: float = Field(default=config.DEFAULT_SIGMA_FLOOR, gt=0, description="Floor on sigma_V")
    restart_window: bool = Field(
        default=config.DEFAULT_RESTART_WINDOW, description="Restart the normalization window at each boundary"
    )
    rearm_fraction: float = Field(
        default=config.DEFAULT_REARM_FRACTION, gt=0, le=1,
        description="Window share to refill after a restart before detecting again",
    )
    g: float = Field(default=config.DEFAULT_G, gt=0, description="Gravity (m/s^2)")
    segments: List[RampSegment] = Field(
        default_factory=_default_segments, min_length=1, description="Ramp segments in travel order"
    )
    preset: Preset = Field(default=Preset.FULL, description="Controller input: y (full) or y* (no-anticipation)")
    alpha_init: Literal["zero", "theta"] = Field(
        default="zero", description="Initial alpha: zero vector or the first segment's theta"
    )
    camera_position: Tuple[float, float] = Field(default=(0.0, 0.0), description="Initial camera position (m)")
    camera_velocity: Tuple[float, float] = Field(default=(0.0, 0.0), description="Initial camera velocity (m/s)")
    response_offset: Tuple[float, float, float, float] = Field(
        default=(0.0, 0.0, 0.0, 0.0), description="Initial offset of both responses from the drive state"
    )

    @field_validator("T", "duration", "tau", "k", "kp", "kd", "gamma", "window",
                     "b_event", "refractory", "sigma_floor", "rearm_fraction", "g")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @field_validator("camera_position", "camera_velocity", "response_offset")
    @classmethod
    def _finite_vector(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not all(math.isfinite(v) for v in value):
            raise ValueError("entries must be finite")
        return value

    @model_validator(mode="after")
    def _check_sampling(self) -> "SimConfig":
        for key in ("tau", "window"):
            ratio = getattr(self, key) / self.T
            if abs(ratio - round(ratio)) > config.INTEGRAL_TOLERANCE * max(1.0, ratio):
                raise ConfigError(key, f"{getattr(self, key)} s is not a whole number of {self.T} s samples")
        if self.duration != 0 and self.duration <= self.window:
            raise ConfigError("duration", f"must exceed the {self.window} s window (or be 0)")
        return self

    @property
    def delay_samples(self) -> int:
        return int(round(self.tau / self.T))

    @property
    def window_samples(self) -> int:
        return int(round(self.window / self.T))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.T))

    @property
    def gains(self) -> ControllerGains:
        return ControllerGains(kp=self.kp, kd=self.kd)

    @property
    def detector(self) -> DetectorConfig:
        return DetectorConfig(
            b_event=self.b_event, refractory=self.refractory, sigma_floor=self.sigma_floor,
            restart_window=self.restart_window, rearm_fraction=self.rearm_fraction,
        )


class TraceRecord(BaseModel):
    t: float = Field(..., description="Time (s)")
    x: List[float] = Field(..., description="Drive image state [vel1, vel2, pos1, pos2]")
    x_tau: List[float] = Field(..., description="Delayed drive state")
    y_star: List[float] = Field(..., description="Adaptive response state")
    y: List[float] = Field(..., description="Anticipating response state")
    alpha: List[float] = Field(..., description="Learned parameters")
    theta_true: List[float] = Field(..., description="True parameters of the current segment")
    u: List[float] = Field(..., description="Camera acceleration command")
    V: float = Field(..., description="Prediction error V(e)")
    b_V: float = Field(..., description="Normalized metric")
    event_flag: bool = Field(default=False, description="Boundary detected at this step")
