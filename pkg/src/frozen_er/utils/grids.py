import numpy as np

from src.frozen_er.errors import ConfigurationError


def parse_grid(text: str) -> list[float]:
    """Parse `a:b:step` into the points a, a+step, ..., up to and including b."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"grid must look like a:b:step, got {text!r}")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError as exc:
        raise ConfigurationError(f"grid bounds must be numbers, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigurationError(f"grid needs step > 0 and b >= a, got {text!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [float(value) for value in start + step * np.arange(count)]


def parse_float_list(text: str) -> list[float]:
    """Parse a comma-separated list of numbers; the empty string gives []."""
    if not text.strip():
        return []
    try:
        return [float(item) for item in text.split(",")]
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from exc
