from pathlib import Path

import pandas as pd
import streamlit as st

from anticipating_segmentation.modules import config


def frame_to_csv_bytes(frame: pd.DataFrame) -> bytes:
    return frame.to_csv(index=False, float_format=config.CSV_FLOAT_FORMAT,
                        lineterminator="\n").encode("utf-8")


def download_csv_button(
        frame: pd.DataFrame,
        file_name: str = config.TRACE_FILE,
        label: str = "📥 Download CSV",
        key: str = None,
    ):
    st.download_button(
        label=label,
        data=frame_to_csv_bytes(frame),
        file_name=file_name,
        mime="text/csv",
        key=key,
    )


def download_example_button(
        path: str,
        file_name: str = "default.cfg",
        label: str = "📥 Download example config",
    ):
    example_file_path = Path(path)
    if example_file_path.exists():
        with open(example_file_path, "rb") as f:
            st.download_button(
                label=label,
                data=f,
                file_name=file_name,
                mime="text/plain"
            )
