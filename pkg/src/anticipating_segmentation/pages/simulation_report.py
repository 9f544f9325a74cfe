from pathlib import Path

import streamlit as st

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.errors import ConfigError, SimulationError
from anticipating_segmentation.modules.harness import run_simulation
from anticipating_segmentation.modules.processing import chart_frames, events_frame, summarize
from anticipating_segmentation.modules.utils import download_csv_button
from anticipating_segmentation.modules.validation import build_config, load_config


EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "examples"


def render():
    st.title("Simulation report")
    st.write("Run the ball-on-ramps experiment and inspect identification, tracking and event boundaries.")

    defaults = load_config(EXAMPLES_DIR / "default.cfg")

    st.sidebar.header("Configuration")
    preset = st.sidebar.selectbox("Preset", config.PRESETS, index=0,
                                  help="Controller fed by the anticipated state y or by y*")
    if preset == "no-anticipation":
        st.sidebar.info(
            "The camera is driven by the delayed estimate y*. "
            "Expect the ball to drift further from the image centre after each slope change."
        )
    duration = st.sidebar.number_input(
        "Duration (s)", min_value=20.0, max_value=300.0, value=defaults.duration, step=10.0,
        help="Simulated time. The slope changes happen at about 20.2 s and 30.3 s",
    )
    tau = st.sidebar.number_input(
        "Perceptual delay tau (s)", min_value=0.0, max_value=2.0, value=defaults.tau,
        step=defaults.T, format="%.2f",
        help="Delay of the perceived image; rounded to whole 0.01 s steps",
    )
    gamma = st.sidebar.number_input(
        "Learning rate gamma", min_value=0.0, max_value=10.0, value=defaults.gamma, step=0.1,
        help="Speed of the online parameter update. 0 keeps alpha at its initial value",
    )
    k = st.sidebar.number_input(
        "Feedback gain k", min_value=0.01, max_value=10.0, value=defaults.k, step=0.1,
        help="Coupling of the anticipating response to the delayed image",
    )
    window = st.sidebar.number_input(
        "Window (s)", min_value=1.0, max_value=60.0, value=defaults.window, step=1.0,
        help="History of prediction errors used to normalize V into b_V",
    )
    b_event = st.sidebar.number_input(
        "b_event", min_value=0.5, max_value=20.0, value=defaults.b_event, step=0.5,
        help="An event boundary is reported when |b_V| exceeds this threshold",
    )
    restart_window = st.sidebar.checkbox(
        "Restart window at boundaries", value=defaults.restart_window,
        help="Empty the normalization window at each boundary so the transient after it "
             "does not hide the next one",
    )

    st.info(
        "Boundaries are expected about tau after each slope change. "
        "The first window of samples is a warm-up: b_V stays 0 and no boundary is reported."
    )

    if st.button("Run simulation", type="primary"):
        entries = defaults.model_dump()
        entries.update(preset=preset, duration=duration, tau=round(tau, 2), gamma=gamma,
                       k=k, window=window, b_event=b_event, restart_window=restart_window)
        try:
            cfg = build_config(entries)
            with st.spinner("Simulating..."):
                st.session_state["result"] = run_simulation(cfg)
        except ConfigError as e:
            st.error(f"Invalid configuration: {e}")
            st.session_state.pop("result", None)
        except SimulationError as e:
            st.error(f"Simulation failed: {e}")
            st.session_state.pop("result", None)

    result = st.session_state.get("result")
    if result is None:
        return

    frames = chart_frames(result)
    summary = summarize(result)
    st.success(f"{summary['steps']} steps, {len(result.events)} event boundaries ({summary['preset']})")

    st.subheader("Parameters alpha vs true theta")
    st.line_chart(frames["parameters"])
    st.subheader("Ball in the image")
    st.line_chart(frames["image"])
    st.subheader(f"Prediction error V, first {config.PREDICTION_ERROR_SPAN:g} s")
    st.line_chart(frames["prediction_error"])
    st.subheader("Normalized metric b_V")
    st.line_chart(frames["event_metric"])

    st.subheader("Event boundaries")
    events = events_frame(result.events)
    st.dataframe(events)
    if not result.events:
        st.info("No boundary detected. Try a lower b_event or a longer duration.")
    with st.expander("Summary", expanded=False):
        st.json(summary)

    col1, col2 = st.columns(2)
    with col1:
        download_csv_button(result.trace, config.TRACE_FILE, "📥 trace.csv", key="trace_csv")
    with col2:
        download_csv_button(events, config.EVENTS_FILE, "📥 events.csv", key="events_csv")


if __name__ == "__main__":
    # When Streamlit runs this file directly from the pages menu, render the page.
    render()
