"""CNOT Readout Util Functions.

Small helper functions that are used more than once.
"""

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
import logging

import numpy as np

from .const import SIGNIFICANT_DIGITS

_LOGGER = logging.getLogger(__name__)


def fan_out(func: Callable, items: Iterable, workers: int = 1) -> list:
    """Map func over items, in a process pool when workers > 1.

    Results come back in the order of items.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    _LOGGER.debug("Fanning %d tasks out to %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def format_number(value: float) -> str:
    """Format a number with a fixed count of significant digits."""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def linear_grid(start: float, stop: float, steps: int) -> np.ndarray:
    """Return steps evenly spaced values from start to stop inclusive."""
    return np.linspace(start, stop, steps)


def integer_grid(start: float, stop: float, steps: int) -> list[int]:
    """Return a rounded, de-duplicated integer grid."""
    values = [int(value) for value in np.rint(linear_grid(start, stop, steps))]
    unique = list(dict.fromkeys(values))
    if len(unique) < len(values):
        _LOGGER.debug("Integer grid %s collapsed to %d values", values, len(unique))
    return unique

