"""Parameter sweeps over the readout schemes."""

from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np

from .base.channels import ErrorParams
from .const import (
    CONF_K1,
    CONF_N_DETECTORS,
    CONF_P_C,
    CONF_P_CLOSS,
    CONF_P_X,
    CONF_P_XLOSS,
    DIP_STEP,
    DROP_ONSET_GATE_ERRORS,
    DROP_ONSET_WINDOW,
    SWEEP_AXES,
    Scheme,
)
from .exceptions import InvalidParameters
from .schemes import ConclusionDistribution, SchemeSpec, run_scheme
from .util import fan_out, integer_grid, linear_grid

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    """A dense one-dimensional study of several schemes."""

    schemes: tuple[SchemeSpec, ...]
    axis: str
    start: float
    stop: float
    steps: int
    fixed: ErrorParams

    def __post_init__(self) -> None:
        """Validate the grid."""
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not self.schemes:
            raise InvalidParameters("schemes", "at least one scheme is required")
        if self.axis not in SWEEP_AXES:
            raise InvalidParameters("axis", f"{self.axis} is not a sweepable parameter")
        if self.start > self.stop:
            raise InvalidParameters("from", f"{self.start} is above {self.stop}")
        if self.steps < 2:
            raise InvalidParameters("steps", "at least two steps are needed")

    def axis_values(self) -> list[float]:
        """Return the grid along the axis."""
        if self.axis == CONF_N_DETECTORS:
            return integer_grid(self.start, self.stop, self.steps)
        return linear_grid(self.start, self.stop, self.steps).tolist()


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point."""

    scheme: Scheme
    n_detectors: int
    axis: str
    axis_value: float
    distribution: ConclusionDistribution


def fidelity_at(spec: SchemeSpec, params: ErrorParams) -> float:
    """Return the fidelity of a scheme at one parameter set."""
    return run_scheme(spec, params).fidelity


def _evaluate(point: tuple[SchemeSpec, ErrorParams, str, float]) -> SweepRow:
    spec, params, axis, value = point
    return SweepRow(spec.scheme, spec.n_detectors, axis, value, run_scheme(spec, params))


def _grid_points(spec: SweepSpec) -> list[tuple[SchemeSpec, ErrorParams, str, float]]:
    points = []
    for value in spec.axis_values():
        if spec.axis == CONF_N_DETECTORS:
            params = spec.fixed
        else:
            params = spec.fixed.replace(**{spec.axis: value})
        for scheme_spec in spec.schemes:
            if spec.axis == CONF_N_DETECTORS:
                if scheme_spec.scheme == Scheme.S3 and value % 2:
                    _LOGGER.warning(
                        "Skipping scheme 3 at %d detectors, it needs an even count",
                        value,
                    )
                    continue
                scheme_spec = SchemeSpec(
                    scheme_spec.scheme, int(value), scheme_spec.loss_interval
                )
            points.append((scheme_spec, params, spec.axis, value))
    return points


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate every scheme at every grid value, ordered by axis then scheme."""
    points = _grid_points(spec)
    _LOGGER.info(
        "Sweeping %s over [%s, %s]: %d points", spec.axis, spec.start, spec.stop, len(points)
    )
    rows = fan_out(_evaluate, points, workers)
    _LOGGER.info("Sweep over %s finished", spec.axis)
    return rows


def dip_onset(
    spec: SchemeSpec,
    params: ErrorParams,
    k1_from: float,
    k1_to: float,
    step: float = DIP_STEP,
) -> float | None:
    """Return the largest k1 at which the fidelity slope changes sign.

    The slope is the central difference over a k1 grid of the given step.
    Fidelity falls towards the interior minimum and rises again towards
    k1 = 1, so the returned point is the local maximum just below the
    perfect source, where performance starts to drop. Returns None when
    the slope keeps its sign.
    """
    if not 0 <= k1_from < k1_to <= 1:
        raise InvalidParameters("k1", f"bad range [{k1_from}, {k1_to}]")
    count = int(round((k1_to - k1_from) / step)) + 1
    if count < 3:
        raise InvalidParameters("step", f"step {step} leaves fewer than three points")
    grid = np.linspace(k1_from, k1_to, count)
    fidelity = np.array(
        [fidelity_at(spec, params.replace(**{CONF_K1: float(k1)})) for k1 in grid]
    )
    slope = np.sign(np.gradient(fidelity, grid))
    changes = np.nonzero(slope[:-1] * slope[1:] < 0)[0]
    if not changes.size:
        _LOGGER.debug("%s: no slope change on [%s, %s]", spec, k1_from, k1_to)
        return None
    last = changes[-1]
    return float((grid[last] + grid[last + 1]) / 2)


def performance_drop_onsets(
    spec: SchemeSpec,
    params: ErrorParams,
    gate_errors: Sequence[float] = DROP_ONSET_GATE_ERRORS,
) -> dict[float, float | None]:
    """Locate the fidelity turn-over for several per-gate error rates.

    Every gate error sets the Pauli and loss errors of both gates; the k1 window
    reaches a few gate errors below one with a step of a tenth of the error.
    """
    onsets = {}
    for error in gate_errors:
        scaled = params.replace(
            **{CONF_P_X: error, CONF_P_C: error, CONF_P_XLOSS: error, CONF_P_CLOSS: error}
        )
        onsets[error] = dip_onset(
            spec, scaled, 1 - DROP_ONSET_WINDOW * error, 1.0, step=error / 10
        )
        _LOGGER.debug("%s: gate error %s turns over at k1=%s", spec, error, onsets[error])
    return onsets
