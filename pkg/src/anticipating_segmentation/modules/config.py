import math

STATE_DIM = 4
PARAM_DIM = 2
STATE_LABELS = ["v1", "v2", "p1", "p2"]

DEFAULT_T = 0.01
DEFAULT_DURATION = 100.0
DEFAULT_TAU = 0.65
DEFAULT_K = 1.0
DEFAULT_KP = 1.0
DEFAULT_KD = 2.0
DEFAULT_GAMMA = 1.0
DEFAULT_WINDOW = 10.0
DEFAULT_B_EVENT = 3.0
DEFAULT_REFRACTORY = 2.0
DEFAULT_SIGMA_FLOOR = 1e-12
DEFAULT_RESTART_WINDOW = True
DEFAULT_REARM_FRACTION = 0.5
DEFAULT_G = 9.81
DEFAULT_SEGMENTS = [
    (math.pi / 12, 500.0),
    (0.0, 500.0),
    (math.pi / 12, math.inf),
]

PRESETS = ["full", "no-anticipation"]
ALPHA_INIT_OPTIONS = ["zero", "theta"]

# abort threshold on ||y|| and ||y*||
DIVERGENCE_BOUND = 1e9

# tolerance when checking that tau/T and window/T are whole sample counts
INTEGRAL_TOLERANCE = 1e-9

TRACE_COLUMNS = (
    ["t"]
    + [f"x_{s}" for s in STATE_LABELS]
    + [f"xtau_{s}" for s in STATE_LABELS]
    + [f"ystar_{s}" for s in STATE_LABELS]
    + [f"y_{s}" for s in STATE_LABELS]
    + ["alpha_1", "alpha_2", "theta_1", "theta_2", "u_1", "u_2"]
    + ["V", "b_V", "event"]
)
EVENT_COLUMNS = ["t", "b_value", "V", "mu", "sigma"]
WORLD_COLUMNS = ["t", "v1", "v2", "c1", "c2"]
GROUND_TRUTH_COLUMNS = ["event", "t"]

CSV_FLOAT_FORMAT = "%.17g"

TRACE_FILE = "trace.csv"
EVENTS_FILE = "events.csv"
WORLD_FILE = "world.csv"
GROUND_TRUTH_FILE = "ground_truth.csv"
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.cfg"

FIGURE_PARAMETERS = "parameters.svg"
FIGURE_RESPONSE = "response_{preset}.svg"
FIGURE_PREDICTION_ERROR = "prediction_error.svg"
FIGURE_EVENTS = "events.svg"

# Seconds of V shown in the prediction-error figure
PREDICTION_ERROR_SPAN = 10.0
