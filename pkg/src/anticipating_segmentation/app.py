from pathlib import Path

import streamlit as st

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import SimConfig
from anticipating_segmentation.modules.utils import download_example_button

st.set_page_config(
    page_title="Anticipating Segmentation",
    layout="wide"
)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "examples" / "default.cfg"


def format_column_list(columns: list) -> str:
    """Format a column list for markdown."""
    return " | ".join(f"`{col}`" for col in columns)


def format_bullet_list(items: list) -> str:
    return "\n".join(f"- **{item}**" for item in items)


def render_instructions():
    config_keys = [
        f"{name}: {field.description}" for name, field in SimConfig.model_fields.items()
    ]
    st.markdown(f"""
## How it works

A ball rolls over a sequence of inclined planes while a camera tries to keep it
centred in the image. The camera sees the world with a perceptual delay τ.
An **adaptive response** learns the slope parameters online, an **anticipating
response** predicts the image τ seconds ahead to drive the camera, and spikes in
the normalized prediction error mark **event boundaries** (slope changes).

---

### Configuration keys (`key=value`, one per line)

{format_bullet_list(config_keys)}

`segments` is written as `beta,length;beta,length;...`, angles accept `pi/12`,
the last length may be `inf`.

---

### Trace columns (`{config.TRACE_FILE}`)

{format_column_list(config.TRACE_COLUMNS)}

### Event columns (`{config.EVENTS_FILE}`)

{format_column_list(config.EVENT_COLUMNS)}

---

Command line: `anticipating-segmentation simulate --config default.cfg --out runs/default`
""")


def main():
    st.title("Anticipating Segmentation")
    st.markdown("Open **simulation report** in the sidebar to run the experiment.")
    download_example_button(str(DEFAULT_CONFIG_PATH))
    render_instructions()


if __name__ == "__main__":
    main()
