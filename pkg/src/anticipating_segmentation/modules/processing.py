import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import EventBoundary, SimConfig
from anticipating_segmentation.modules.harness import SimulationResult
from anticipating_segmentation.modules.scenario import slope_change_times, theta_for_slope
from anticipating_segmentation.modules.segment import rolling_event_metric
from anticipating_segmentation.modules.validation import format_config

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

X_COLUMNS = [f"x_{s}" for s in config.STATE_LABELS]
XTAU_COLUMNS = [f"xtau_{s}" for s in config.STATE_LABELS]
YSTAR_COLUMNS = [f"ystar_{s}" for s in config.STATE_LABELS]
Y_COLUMNS = [f"y_{s}" for s in config.STATE_LABELS]
ALPHA_COLUMNS = ["alpha_1", "alpha_2"]
THETA_COLUMNS = ["theta_1", "theta_2"]


def write_trace(trace: pd.DataFrame, path: PathLike) -> Path:
    """Header plus one row per step, 17 significant digits (lossless for float64)."""
    path = Path(path)
    trace.to_csv(path, columns=config.TRACE_COLUMNS, index=False,
                 float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def read_trace(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def events_frame(events: Sequence[EventBoundary]) -> pd.DataFrame:
    rows = [[e.time, e.b_value, e.V_value, e.mu, e.sigma] for e in events]
    return pd.DataFrame(rows, columns=config.EVENT_COLUMNS, dtype=float)


def write_events(events: Sequence[EventBoundary], path: PathLike) -> Path:
    path = Path(path)
    events_frame(events).to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT,
                                lineterminator="\n")
    return path


def write_world(world: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    world.to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def write_ground_truth(cfg: SimConfig, path: PathLike) -> Path:
    """True slope-change times of the ball (analytic kinematics)."""
    path = Path(path)
    times = [t for t in slope_change_times(cfg.segments, cfg.g) if t <= cfg.duration]
    frame = pd.DataFrame({"event": range(1, len(times) + 1), "t": times},
                         columns=config.GROUND_TRUTH_COLUMNS)
    frame.to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def _window(trace: pd.DataFrame, start: Optional[float], stop: Optional[float]) -> pd.DataFrame:
    mask = np.ones(len(trace), dtype=bool)
    if start is not None:
        mask &= trace["t"].to_numpy() >= start
    if stop is not None:
        mask &= trace["t"].to_numpy() <= stop
    return trace.loc[mask]


def image_rms(trace: pd.DataFrame, start: Optional[float] = None, stop: Optional[float] = None) -> float:
    """RMS of the ball's image position (x1, x2) over [start, stop]."""
    part = _window(trace, start, stop)
    if part.empty:
        return float("nan")
    pos = part[["x_p1", "x_p2"]].to_numpy()
    return float(np.sqrt(np.mean(np.sum(pos ** 2, axis=1))))


def parameter_error(trace: pd.DataFrame) -> pd.Series:
    """||alpha - theta||_inf against the true parameters at each step."""
    diff = trace[ALPHA_COLUMNS].to_numpy() - trace[THETA_COLUMNS].to_numpy()
    return pd.Series(np.max(np.abs(diff), axis=1), index=trace.index, name="alpha_error")


def anticipation_lag(trace: pd.DataFrame, max_lag: int, start: Optional[float] = None,
                     stop: Optional[float] = None) -> int:
    """Lag l in [0, max_lag] minimizing sum_t ||y(t - l) - x_tau(t)||^2 over [start, stop]."""
    y = trace[Y_COLUMNS].to_numpy()
    x_tau = trace[XTAU_COLUMNS].to_numpy()
    t = trace["t"].to_numpy()
    idx = np.flatnonzero((t >= (start if start is not None else -np.inf))
                         & (t <= (stop if stop is not None else np.inf)))
    idx = idx[idx >= max_lag]
    if idx.size == 0:
        raise ValueError("interval too short for the requested lag range")
    costs = [np.sum((y[idx - lag] - x_tau[idx]) ** 2) for lag in range(max_lag + 1)]
    return int(np.argmin(costs))


def extended_lyapunov_series(trace: pd.DataFrame, gamma: float, delay_samples: int) -> pd.Series:
    """1/2 e^T e + 1/2 ||alpha - theta_tau||^2 / gamma along a trace.

    theta_tau is the true theta at the perceived (delayed) sample, the one the
    adaptive response is actually identifying.
    """
    if gamma <= 0:
        raise ValueError("extended Lyapunov function needs gamma > 0")
    e = trace[YSTAR_COLUMNS].to_numpy() - trace[XTAU_COLUMNS].to_numpy()
    theta = trace[THETA_COLUMNS].to_numpy()
    theta_tau = np.vstack([np.repeat(theta[:1], delay_samples, axis=0), theta])[:len(theta)]
    a = trace[ALPHA_COLUMNS].to_numpy() - theta_tau
    values = 0.5 * np.sum(e ** 2, axis=1) + 0.5 * np.sum(a ** 2, axis=1) / gamma
    return pd.Series(values, index=trace.index, name="V_ext")


def detection_latencies(events: Sequence[EventBoundary], truth: Sequence[float]) -> List[Optional[float]]:
    """For each true change, delay to the first detection at or after it (None if missed)."""
    times = sorted(e.time for e in events)
    latencies: List[Optional[float]] = []
    for i, t_true in enumerate(truth):
        t_next = truth[i + 1] if i + 1 < len(truth) else np.inf
        hits = [t for t in times if t_true <= t < t_next]
        latencies.append(hits[0] - t_true if hits else None)
    return latencies


def peak_event_metric(trace: pd.DataFrame) -> float:
    return float(trace["b_V"].abs().max()) if len(trace) else float("nan")


def offline_event_metric(trace: pd.DataFrame, cfg: SimConfig) -> pd.Series:
    return rolling_event_metric(trace["V"], cfg.window_samples, cfg.sigma_floor)


def summarize(result: SimulationResult) -> Dict[str, object]:
    """Headline metrics of a run, as written to ``summary.json``."""
    cfg = result.config
    trace = result.trace
    truth = [t for t in slope_change_times(cfg.segments, cfg.g) if t <= cfg.duration]
    summary: Dict[str, object] = {
        "preset": result.preset,
        "steps": len(trace),
        "delay_samples": cfg.delay_samples,
        "events": [e.time for e in result.events],
        "slope_changes": truth,
        "detection_latencies": detection_latencies(result.events, truth),
        "thetas": [theta_for_slope(s.beta, cfg.g).tolist() for s in cfg.segments],
    }
    if len(trace):
        summary.update({
            "final_alpha": trace[ALPHA_COLUMNS].iloc[-1].tolist(),
            "final_alpha_error": float(parameter_error(trace).iloc[-1]),
            "image_rms": image_rms(trace),
            "peak_b_V": peak_event_metric(trace),
        })
    if result.final_record is not None:
        summary["final_record"] = result.final_record.model_dump()
    return summary


def write_summary(result: SimulationResult, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summarize(result), indent=2, allow_nan=True) + "\n", encoding="utf-8")
    return path


def write_config(cfg: SimConfig, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_config(cfg), encoding="utf-8")
    return path


def write_outputs(result: SimulationResult, outdir: PathLike) -> Dict[str, Path]:
    """Write trace, events, world, ground truth, summary and the effective config into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {
        "trace": write_trace(result.trace, outdir / config.TRACE_FILE),
        "events": write_events(result.events, outdir / config.EVENTS_FILE),
        "world": write_world(result.world, outdir / config.WORLD_FILE),
        "ground_truth": write_ground_truth(result.config, outdir / config.GROUND_TRUTH_FILE),
        "summary": write_summary(result, outdir / config.SUMMARY_FILE),
        "config": write_config(result.config, outdir / config.CONFIG_FILE),
    }
    logger.info("wrote %s", ", ".join(str(p) for p in written.values()))
    return written


def chart_frames(result: SimulationResult) -> Dict[str, pd.DataFrame]:
    """Time-indexed frames backing the report page charts."""
    trace = result.trace.set_index("t")
    span = trace.loc[trace.index <= config.PREDICTION_ERROR_SPAN]
    return {
        "parameters": trace[ALPHA_COLUMNS + THETA_COLUMNS],
        "image": trace[["x_p1", "x_p2"]],
        "prediction_error": span[["V"]],
        "event_metric": trace[["b_V"]],
        "world": result.world.set_index("t")[["v1", "v2"]],
    }
