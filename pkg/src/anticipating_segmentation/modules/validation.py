import math
import re
from pathlib import Path
from typing import Dict, List, Union

from pydantic import ValidationError

from anticipating_segmentation.modules.data_models import RampSegment, SimConfig
from anticipating_segmentation.modules.errors import ConfigError

_PI_RE = re.compile(r"^([+-]?\d*\.?\d*(?:e[+-]?\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$", re.IGNORECASE)
_VECTOR_KEYS = {"camera_position": 2, "camera_velocity": 2, "response_offset": 4}
_TEXT_KEYS = {"preset", "alpha_init", "restart_window"}


def normalize_spaces(text: str) -> str:
    if text is None:
        return ''
    return re.sub(r'\s+', ' ', str(text)).strip()


def parse_real(text: str, key: str) -> float:
    """Parse a real number; accepts ``inf`` and multiples/fractions of ``pi``."""
    value = normalize_spaces(text).replace(" ", "")
    match = _PI_RE.match(value)
    if match:
        coef = match.group(1)
        if coef in ("", "+"):
            factor = 1.0
        elif coef == "-":
            factor = -1.0
        else:
            try:
                factor = float(coef)
            except ValueError:
                raise ConfigError(key, f"cannot parse '{text}' as a multiple of pi") from None
        divisor = float(match.group(2)) if match.group(2) else 1.0
        if divisor == 0:
            raise ConfigError(key, f"'{text}' divides by zero")
        return factor * math.pi / divisor
    try:
        return float(value)
    except ValueError:
        raise ConfigError(key, f"cannot parse '{text}' as a number") from None


def parse_segments(text: str) -> List[RampSegment]:
    """``beta,length;beta,length;...`` -> ramp segments."""
    segments = []
    for idx, chunk in enumerate(part for part in text.split(";") if part.strip()):
        fields = [f for f in chunk.split(",")]
        if len(fields) != 2:
            raise ConfigError("segments", f"entry {idx + 1} '{chunk.strip()}' must be 'beta,length'")
        beta = parse_real(fields[0], "segments")
        length = parse_real(fields[1], "segments")
        if not length > 0:
            raise ConfigError("segments", f"entry {idx + 1} has non-positive length {length}")
        if not math.isfinite(beta):
            raise ConfigError("segments", f"entry {idx + 1} has non-finite slope {beta}")
        segments.append(RampSegment(beta=beta, length=length))
    if not segments:
        raise ConfigError("segments", "at least one segment is required")
    return segments


def parse_config_text(text: str) -> Dict[str, object]:
    """Flat ``key=value`` lines; ``#`` starts a comment, blank lines are ignored."""
    entries: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = normalize_spaces(raw.split("#", 1)[0])
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got '{line}'")
        key, value = (normalize_spaces(p) for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "missing key")
        if key in entries:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        if key not in SimConfig.model_fields:
            raise ConfigError(key, "unknown configuration key")
        if key == "segments":
            entries[key] = parse_segments(value)
        elif key in _VECTOR_KEYS:
            parts = value.split(",")
            if len(parts) != _VECTOR_KEYS[key]:
                raise ConfigError(key, f"expected {_VECTOR_KEYS[key]} comma-separated values, got '{value}'")
            entries[key] = tuple(parse_real(p, key) for p in parts)
        elif key in _TEXT_KEYS:
            entries[key] = value
        else:
            entries[key] = parse_real(value, key)
    return entries


def build_config(entries: Dict[str, object]) -> SimConfig:
    """Validate ``entries`` into a SimConfig, reporting the offending key."""
    try:
        return SimConfig.model_validate(entries)
    except ValidationError as exc:
        err = exc.errors()[0]
        cause = (err.get("ctx") or {}).get("error")
        if isinstance(cause, ConfigError):
            raise cause from None
        key = str(err["loc"][0]) if err["loc"] else "config"
        raise ConfigError(key, err["msg"]) from None


def load_config(path: Union[str, Path]) -> SimConfig:
    """Read a key=value config file; absent keys take their defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config file: {exc.strerror or exc}") from None
    return build_config(parse_config_text(text))


def format_config(cfg: SimConfig) -> str:
    """Render ``cfg`` back to key=value text readable by ``load_config``."""
    lines = []
    for key in SimConfig.model_fields:
        value = getattr(cfg, key)
        if key == "segments":
            value = ";".join(f"{s.beta!r},{s.length!r}" for s in value)
        elif key in _VECTOR_KEYS:
            value = ",".join(repr(float(v)) for v in value)
        elif key == "preset":
            value = value.value
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
