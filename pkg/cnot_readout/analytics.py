"""Closed-form readout baselines.

The copier efficiency limit, the binomial majority-vote model, its lossy
CNOT chain generalization with independent errors, and the photon presence
ratio that predicts where loss detection starts to pay off.
"""

from dataclasses import dataclass, fields
import logging
import math

from scipy.stats import binom
import voluptuous as vol

from .base.channels import ErrorParams
from .const import (
    DEFAULT_ANCILLA_PRESENCE,
    DEFAULT_CNOT_ERROR_FREE,
    DEFAULT_DETECTION_PROBABILITY,
    DEFAULT_DETECTOR_WORKING,
    DEFAULT_EPSILON,
    DEFAULT_ETA,
    DEFAULT_MEASUREMENTS,
    DEFAULT_Z_ERROR_FRACTION,
    DEFAULT_ZETA,
    STAT_PARAMS_SCHEMA,
    Z_ERROR_FRACTION,
    Scheme,
)
from .exceptions import InvalidParameters
from .schemes import SchemeSpec, run_scheme

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class StatModelParams:
    """Parameters of the statistical readout models."""

    detection_probability: float = DEFAULT_DETECTION_PROBABILITY
    measurements: int = DEFAULT_MEASUREMENTS
    ancilla_presence: float = DEFAULT_ANCILLA_PRESENCE
    detector_working: float = DEFAULT_DETECTOR_WORKING
    cnot_error_free: float = DEFAULT_CNOT_ERROR_FREE
    z_error_fraction: float = DEFAULT_Z_ERROR_FRACTION
    eta: float = DEFAULT_ETA
    epsilon: float = DEFAULT_EPSILON
    zeta: float = DEFAULT_ZETA

    def __post_init__(self) -> None:
        """Validate and coerce every field."""
        try:
            validated = STAT_PARAMS_SCHEMA(self.as_dict())
        except vol.Invalid as err:
            key = str(err.path[0]) if err.path else "stat"
            raise InvalidParameters(key, err.error_message) from err
        for key, value in validated.items():
            object.__setattr__(self, key, value)

    def as_dict(self) -> dict:
        """Return the fields as a plain dict."""
        return {item.name: getattr(self, item.name) for item in fields(self)}


def stat_params_from_error_params(
    params: ErrorParams, n_detectors: int
) -> StatModelParams:
    """Map the simulator's parameters onto the independent-error model."""
    return StatModelParams(
        detection_probability=1 - params.p_dloss,
        measurements=n_detectors,
        ancilla_presence=params.k2,
        detector_working=1 - params.p_dloss,
        cnot_error_free=1 - params.p_c,
        z_error_fraction=Z_ERROR_FRACTION,
        eta=1 - params.p_dloss,
        epsilon=1 - params.p_c,
        zeta=1 - max(params.p_c, params.p_x),
    )


def _probability(name: str, value: float) -> float:
    if not 0 <= value <= 1:
        raise InvalidParameters(name, f"probability {value} outside [0, 1]")
    return float(value)


def deuar_munro_limit(epsilon: float) -> float:
    """Return the limiting detector efficiency 2 - 1/epsilon of a copier."""
    if not 0 < epsilon <= 1:
        raise InvalidParameters("epsilon", f"{epsilon} outside (0, 1]")
    return 2 - 1 / epsilon


def schaetz_pm(detection_probability: float, measurements: int, correct: int) -> float:
    """Return the chance of `correct` right answers over measurements + 1 readings."""
    _probability("detection_probability", detection_probability)
    if measurements < 0:
        raise InvalidParameters("measurements", "must be non-negative")
    if not 0 <= correct <= measurements + 1:
        raise InvalidParameters(
            "correct", f"{correct} outside [0, {measurements + 1}]"
        )
    return float(binom.pmf(correct, measurements + 1, detection_probability))


def schaetz_majority(detection_probability: float, measurements: int) -> float:
    """Sum the binomial terms with more than measurements / 2 right answers."""
    _probability("detection_probability", detection_probability)
    if measurements < 1:
        raise InvalidParameters("measurements", "at least one measurement is needed")
    return float(binom.sf(measurements // 2, measurements + 1, detection_probability))


def cm_correct_prob(
    ancilla_presence: float,
    detector_working: float,
    cnot_error_free: float,
    z_error_fraction: float,
    index: int,
) -> float:
    """Return the probability that detector `index` reads the right value.

    An even number of visible CNOT errors along the chain cancels out.
    """
    for name, value in (
        ("ancilla_presence", ancilla_presence),
        ("detector_working", detector_working),
        ("cnot_error_free", cnot_error_free),
        ("z_error_fraction", z_error_fraction),
    ):
        _probability(name, value)
    if index < 1:
        raise InvalidParameters("index", "detectors are counted from 1")

    visible = (1 - cnot_error_free) * (1 - z_error_fraction)
    harmless = cnot_error_free + z_error_fraction * (1 - cnot_error_free)
    total = sum(
        math.comb(index, index - 2 * j) * visible ** (2 * j) * harmless ** (index - 2 * j)
        for j in range(index // 2 + 1)
    )
    return ancilla_presence * detector_working * total


def cm_majority(
    ancilla_presence: float,
    detector_working: float,
    cnot_error_free: float,
    z_error_fraction: float,
    n_detectors: int,
) -> float:
    """Majority-vote success over non-lost readings with independent errors.

    Ties count as failures.
    """
    if n_detectors < 1:
        raise InvalidParameters("n_detectors", "at least one detector is needed")
    present = ancilla_presence * detector_working

    # lead of correct over incorrect readings -> probability
    leads = {0: 1.0}
    for index in range(1, n_detectors + 1):
        correct = cm_correct_prob(
            ancilla_presence, detector_working, cnot_error_free, z_error_fraction, index
        )
        outcomes = ((1, correct), (-1, max(present - correct, 0.0)), (0, 1 - present))
        stepped: dict[int, float] = {}
        for lead, weight in leads.items():
            for delta, probability in outcomes:
                if probability:
                    stepped[lead + delta] = stepped.get(lead + delta, 0.0) + (
                        weight * probability
                    )
        leads = stepped
    return sum(weight for lead, weight in leads.items() if lead > 0)


def r_ratio(zeta: float, k1: float) -> float:
    """Return the ratio of true to false loss readings.

    Loss detection starts to pay off once the ratio exceeds one; at k1 = 1
    the ratio is infinite.
    """
    if not 0 < zeta <= 1:
        raise InvalidParameters("zeta", f"{zeta} outside (0, 1]")
    _probability("k1", k1)
    if k1 == 1:
        return math.inf
    return ((1 - zeta) * k1) / (zeta * (1 - k1))


@dataclass(frozen=True)
class ModelGap:
    """Independent-error model against the full simulation of scheme 1."""

    model: float
    simulated: float

    @property
    def gap(self) -> float:
        """Return model minus simulation."""
        return self.model - self.simulated


def independent_model_gap(params: ErrorParams, n_detectors: int) -> ModelGap:
    """Compare the independent-error majority vote with scheme 1."""
    stat = stat_params_from_error_params(params, n_detectors)
    model = cm_majority(
        stat.ancilla_presence,
        stat.detector_working,
        stat.cnot_error_free,
        stat.z_error_fraction,
        n_detectors,
    )
    simulated = run_scheme(SchemeSpec(Scheme.S1, n_detectors), params).fidelity
    result = ModelGap(model, simulated)
    _LOGGER.debug(
        "Independent model %.6g vs simulation %.6g at n=%d", model, simulated, n_detectors
    )
    return result
