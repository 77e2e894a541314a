"""Break-even loss probability and its fitted surface.

Scheme 3 detects loss, scheme 4 does not. The break-even point is the loss
probability 1 - k1 above which scheme 3 reaches the higher fidelity; the
surface is linear in the CNOT and X errors and quadratic in the detector
error.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product
import logging

import numpy as np
import voluptuous as vol

from .base.channels import ErrorParams
from .const import (
    CONF_K1,
    CONF_P_C,
    CONF_P_DLOSS,
    CONF_P_X,
    CROSSOVER_BOX_SCHEMA,
    CROSSOVER_K1_TOLERANCE,
    CROSSOVER_MAX_ITERATIONS,
    CROSSOVER_N_DETECTORS,
    CROSSOVER_PARAMS,
    CROSSOVER_SCAN_OFFSETS,
    CROSSOVER_SIGN_TOLERANCE,
    DEFAULT_FIT_POINTS,
    FIT_RANGE_P_C,
    FIT_RANGE_P_D,
    FIT_RANGE_P_X,
    PUBLISHED_SURFACE_COEFFICIENTS,
    SURFACE_TERMS,
    Scheme,
)
from .exceptions import InvalidParameters, RankDeficientError
from .schemes import SchemeSpec
from .sweep import fidelity_at
from .util import fan_out, linear_grid

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrossoverResult:
    """Break-even loss probability with solver diagnostics."""

    p_l: float
    p_c: float
    p_x: float
    p_d: float
    iterations: int
    bracket_width: float


@dataclass(frozen=True)
class NoCrossover:
    """The fidelity difference kept one sign over the whole bracket.

    A positive sign means loss detection wins everywhere.
    """

    p_c: float
    p_x: float
    p_d: float
    sign: int


@dataclass(frozen=True)
class FitCoefficients:
    """Least-squares coefficients of the crossover surface."""

    coefficients: tuple[float, ...]
    residual_norm: float
    condition_number: float

    def as_dict(self) -> dict[str, float]:
        """Map every basis term to its coefficient."""
        return dict(zip(SURFACE_TERMS, self.coefficients))

    def evaluate(self, p_c, p_x, p_d):
        """Return the fitted break-even loss probability."""
        return evaluate_crossover_surface(p_c, p_x, p_d, self.coefficients)


def crossover_params(
    p_c: float, p_x: float, p_d: float, k1: float = 1.0
) -> ErrorParams:
    """Return the parameter set the break-even point is defined on.

    Input |1>, perfect ancillas and lossless gates; the detector loses the
    photon with probability p_d.
    """
    try:
        CROSSOVER_BOX_SCHEMA({CONF_P_C: p_c, CONF_P_X: p_x, CONF_P_DLOSS: p_d})
    except vol.Invalid as err:
        key = str(err.path[0]) if err.path else "crossover"
        raise InvalidParameters(key, err.error_message) from err
    return ErrorParams.from_mapping(
        {
            **CROSSOVER_PARAMS,
            CONF_K1: k1,
            CONF_P_C: p_c,
            CONF_P_X: p_x,
            CONF_P_DLOSS: p_d,
        }
    )


def crossover_loss(
    p_c: float,
    p_x: float,
    p_d: float,
    n_detectors: int = CROSSOVER_N_DETECTORS,
) -> CrossoverResult | NoCrossover:
    """Solve F(scheme 3) = F(scheme 4) for the loss probability by bisection.

    The loss probability is scanned outwards from zero to find the sign change
    nearest k1 = 1, which is then bisected down to the k1 tolerance.
    """
    base = crossover_params(p_c, p_x, p_d)
    detecting = SchemeSpec(Scheme.S3, n_detectors)
    first_click = SchemeSpec(Scheme.S4, n_detectors)

    def detecting_wins(k1: float) -> bool:
        params = base.replace(k1=k1)
        gap = fidelity_at(detecting, params) - fidelity_at(first_click, params)
        return gap > CROSSOVER_SIGN_TOLERANCE

    losing = None
    for offset in CROSSOVER_SCAN_OFFSETS:
        if detecting_wins(1 - offset):
            break
        losing = offset
    else:
        _LOGGER.warning(
            "No crossover for p_c=%s p_x=%s p_d=%s: scheme 4 wins on the bracket",
            p_c,
            p_x,
            p_d,
        )
        return NoCrossover(p_c, p_x, p_d, sign=-1)
    if losing is None:
        _LOGGER.warning(
            "No crossover for p_c=%s p_x=%s p_d=%s: scheme 3 wins at k1=1", p_c, p_x, p_d
        )
        return NoCrossover(p_c, p_x, p_d, sign=1)

    k1_losing, k1_winning = 1 - losing, 1 - offset
    iterations = 0
    while (
        k1_losing - k1_winning > CROSSOVER_K1_TOLERANCE
        and iterations < CROSSOVER_MAX_ITERATIONS
    ):
        middle = (k1_losing + k1_winning) / 2
        if detecting_wins(middle):
            k1_winning = middle
        else:
            k1_losing = middle
        iterations += 1
        _LOGGER.debug("Bisection %d: k1 in [%s, %s]", iterations, k1_winning, k1_losing)

    result = CrossoverResult(
        p_l=1 - (k1_losing + k1_winning) / 2,
        p_c=p_c,
        p_x=p_x,
        p_d=p_d,
        iterations=iterations,
        bracket_width=k1_losing - k1_winning,
    )
    _LOGGER.info(
        "Crossover at p_c=%s p_x=%s p_d=%s: p_l=%.6g", p_c, p_x, p_d, result.p_l
    )
    return result


def _solve(point: tuple[float, float, float, int]) -> CrossoverResult | NoCrossover:
    p_c, p_x, p_d, n_detectors = point
    return crossover_loss(p_c, p_x, p_d, n_detectors)


def crossover_grid(
    p_c_values: Sequence[float],
    p_x_values: Sequence[float],
    p_d_values: Sequence[float],
    n_detectors: int = CROSSOVER_N_DETECTORS,
    workers: int = 1,
) -> list[CrossoverResult | NoCrossover]:
    """Solve the break-even point on the product grid, p_d varying fastest."""
    points = [
        (float(p_c), float(p_x), float(p_d), n_detectors)
        for p_c, p_x, p_d in product(p_c_values, p_x_values, p_d_values)
    ]
    _LOGGER.info("Solving %d crossover points", len(points))
    return fan_out(_solve, points, workers)


def default_fit_axes(
    points_per_axis: int = DEFAULT_FIT_POINTS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return evenly spaced p_c, p_x and p_d axes over the fit ranges."""
    return tuple(
        linear_grid(low, high, points_per_axis)
        for low, high in (FIT_RANGE_P_C, FIT_RANGE_P_X, FIT_RANGE_P_D)
    )


def surface_design_matrix(p_c, p_x, p_d) -> np.ndarray:
    """Return one row of basis terms per point, in SURFACE_TERMS order."""
    p_c, p_x, p_d = np.broadcast_arrays(
        *(np.atleast_1d(np.asarray(value, dtype=float)) for value in (p_c, p_x, p_d))
    )
    bilinear = (np.ones_like(p_c), p_c, p_x, p_x * p_c)
    columns = [term * p_d**2 for term in bilinear]
    columns += [term * p_d for term in bilinear]
    columns += bilinear
    return np.stack(columns, axis=1)


def evaluate_crossover_surface(
    p_c, p_x, p_d, coefficients: Sequence[float] = PUBLISHED_SURFACE_COEFFICIENTS
):
    """Return 1 minus the surface polynomial at the given errors."""
    if len(coefficients) != len(SURFACE_TERMS):
        raise InvalidParameters(
            "coefficients", f"expected {len(SURFACE_TERMS)}, got {len(coefficients)}"
        )
    values = 1 - surface_design_matrix(p_c, p_x, p_d) @ np.asarray(coefficients)
    if np.ndim(p_c) == np.ndim(p_x) == np.ndim(p_d) == 0:
        return float(values[0])
    return values


def fit_crossover_surface(grid: Sequence[CrossoverResult]) -> FitCoefficients:
    """Fit the surface basis to solved break-even points by least squares."""
    results = [result for result in grid if isinstance(result, CrossoverResult)]
    if len(results) < len(grid):
        _LOGGER.warning("Dropping %d points without a crossover", len(grid) - len(results))
    if not results:
        raise RankDeficientError(0, len(SURFACE_TERMS), float("inf"))

    design = surface_design_matrix(
        [result.p_c for result in results],
        [result.p_x for result in results],
        [result.p_d for result in results],
    )
    target = 1 - np.array([result.p_l for result in results])

    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1
    solution, _, rank, singular = np.linalg.lstsq(design / scale, target, rcond=None)
    condition = (
        float(singular[0] / singular[-1]) if singular[-1] > 0 else float("inf")
    )
    if rank < len(SURFACE_TERMS):
        raise RankDeficientError(int(rank), len(SURFACE_TERMS), condition)

    coefficients = solution / scale
    residual_norm = float(np.linalg.norm(design @ coefficients - target))
    _LOGGER.info(
        "Fitted %d points: residual norm %.3e, condition number %.3e",
        len(results),
        residual_norm,
        condition,
    )
    return FitCoefficients(tuple(coefficients.tolist()), residual_norm, condition)


def validate_fit(fit: FitCoefficients, held_out: Sequence[CrossoverResult]) -> float:
    """Return the largest prediction error on held-out points."""
    results = [result for result in held_out if isinstance(result, CrossoverResult)]
    if not results:
        raise InvalidParameters("held_out", "no solved points to validate against")
    predicted = fit.evaluate(
        np.array([result.p_c for result in results]),
        np.array([result.p_x for result in results]),
        np.array([result.p_d for result in results]),
    )
    return float(np.max(np.abs(predicted - np.array([r.p_l for r in results]))))
