import logging

import pytest

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import Preset, SimConfig
from anticipating_segmentation.modules.harness import run_simulation
from anticipating_segmentation.modules.plotting import emit_plots, plot_events


@pytest.fixture(scope="module")
def short_runs():
    cfg = SimConfig(duration=12.0, window=1.0)
    return run_simulation(cfg), run_simulation(cfg.model_copy(update={"preset": Preset.NO_ANTICIPATION}))


def test_emit_plots_writes_five_figures(tmp_path, short_runs):
    result, companion = short_runs
    written = emit_plots(result, tmp_path, companion=companion)
    assert len(written) == 5
    for path in written:
        text = path.read_text(encoding="utf-8")
        assert "<svg" in text
    assert (tmp_path / config.FIGURE_RESPONSE.format(preset="no-anticipation")).exists()


def test_emit_plots_without_companion(tmp_path, short_runs):
    written = emit_plots(short_runs[0], tmp_path)
    assert len(written) == 4


def test_svg_output_is_reproducible(tmp_path, short_runs):
    first = emit_plots(short_runs[0], tmp_path / "a")
    second = emit_plots(short_runs[0], tmp_path / "b")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_events_figure_without_events(tmp_path, short_runs):
    result = short_runs[0]
    path = plot_events(result.world, result.trace, [], tmp_path / config.FIGURE_EVENTS)
    assert "0 detected event(s)" in path.read_text(encoding="utf-8")


def test_empty_trace_writes_nothing(tmp_path, caplog):
    result = run_simulation(SimConfig(duration=0.0))
    with caplog.at_level(logging.WARNING):
        assert emit_plots(result, tmp_path / "empty") == []
    assert "empty trace" in caplog.text
    assert not (tmp_path / "empty").exists()
