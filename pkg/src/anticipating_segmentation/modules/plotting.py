import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import matplotlib

matplotlib.use("agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from anticipating_segmentation.modules import config  # noqa: E402
from anticipating_segmentation.modules.data_models import EventBoundary  # noqa: E402
from anticipating_segmentation.modules.harness import SimulationResult  # noqa: E402

logger = logging.getLogger(__name__)

# Matplotlib embeds a creation date and random clip ids in SVG output unless told otherwise
_SVG_RC = {"svg.hashsalt": "anticipating-segmentation", "svg.fonttype": "none"}
_SVG_METADATA = {"Date": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    with plt.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    return path


def plot_parameters(trace: pd.DataFrame, path: Path) -> Path:
    """alpha (solid) against the true theta (dashed)."""
    fig, ax = plt.subplots(figsize=(8, 4))
    t = trace["t"]
    for i, color in ((1, "tab:blue"), (2, "tab:orange")):
        ax.plot(t, trace[f"alpha_{i}"], color=color, label=f"alpha_{i}")
        ax.plot(t, trace[f"theta_{i}"], color=color, linestyle="--", label=f"theta_{i}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("[m/s^2]")
    ax.set_title("Parameters alpha vs true theta")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_response(trace: pd.DataFrame, preset: str, path: Path) -> Path:
    """Ball image coordinates with the controller's input state."""
    fig, ax = plt.subplots(figsize=(8, 4))
    t = trace["t"]
    feed = "y" if preset == "full" else "ystar"
    for i, color in ((1, "tab:blue"), (2, "tab:orange")):
        ax.plot(t, trace[f"x_p{i}"], color=color, label=f"x_{i}")
        ax.plot(t, trace[f"{feed}_p{i}"], color=color, linestyle=":", label=f"{feed}_{i}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("image position [m]")
    title = "using the full architecture" if preset == "full" else "without anticipation"
    ax.set_title(f"System response {title}")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_prediction_error(trace: pd.DataFrame, path: Path,
                          span: float = config.PREDICTION_ERROR_SPAN) -> Path:
    part = trace.loc[trace["t"] <= span]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(part["t"], part["V"], color="tab:red")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("V(e)")
    ax.set_title(f"Prediction error V, first {span:g} s")
    return _save(fig, path)


def plot_events(world: pd.DataFrame, trace: pd.DataFrame, events: Sequence[EventBoundary],
                path: Path, zoom: float = 3.0) -> Path:
    """Ball v2 with detected boundaries; lower panel zooms on the first one."""
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 6))
    top.plot(world["t"], world["v2"], color="tab:green")
    for event in events:
        top.axvline(event.time, color="k", linestyle="--", linewidth=0.8)
    top.set_xlabel("t [s]")
    top.set_ylabel("v2 [m]")
    top.set_title(f"Ball v2 and {len(events)} detected event(s)")

    if events:
        t0 = events[0].time
        part = trace.loc[(trace["t"] >= t0 - zoom) & (trace["t"] <= t0 + zoom)]
        bottom.plot(part["t"], part["b_V"], color="tab:purple", label="b_V")
        bottom.axvline(t0, color="k", linestyle="--", linewidth=0.8)
        bottom.legend(loc="best")
    bottom.set_xlabel("t [s]")
    bottom.set_ylabel("b_V")
    return _save(fig, path)


def emit_plots(result: SimulationResult, outdir: Union[str, Path],
               companion: Optional[SimulationResult] = None) -> List[Path]:
    """Write the figure set for ``result`` (plus the companion preset's response figure)."""
    trace = result.trace
    if trace.empty:
        logger.warning("empty trace: no figures written")
        return []
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [
        plot_parameters(trace, outdir / config.FIGURE_PARAMETERS),
        plot_response(trace, result.preset, outdir / config.FIGURE_RESPONSE.format(preset=result.preset)),
    ]
    if companion is not None and not companion.trace.empty:
        written.append(plot_response(companion.trace, companion.preset,
                                     outdir / config.FIGURE_RESPONSE.format(preset=companion.preset)))
    written.append(plot_prediction_error(trace, outdir / config.FIGURE_PREDICTION_ERROR))
    written.append(plot_events(result.world, trace, result.events, outdir / config.FIGURE_EVENTS))
    logger.info("wrote %d figure(s) to %s", len(written), outdir)
    return written
