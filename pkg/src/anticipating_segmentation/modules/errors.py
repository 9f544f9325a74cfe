from typing import Optional


class SimulationError(RuntimeError):
    """Base class for failures raised while advancing a simulation."""


class NumericalError(SimulationError):
    """A state, derivative or parameter became NaN or infinite."""

    def __init__(self, signal: str, step: Optional[int] = None, detail: str = ""):
        self.signal = signal
        self.step = step
        where = f" at step {step}" if step is not None else ""
        message = f"non-finite value in '{signal}'{where}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class DivergenceError(SimulationError):
    """A response state left the admissible region (norm above the bound)."""

    def __init__(self, signal: str, norm: float, bound: float, step: Optional[int] = None):
        self.signal = signal
        self.step = step
        self.norm = norm
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"'{signal}' diverged{where}: norm {norm:.6g} exceeds {bound:.6g}"
        )


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
