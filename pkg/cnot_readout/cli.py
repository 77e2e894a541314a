"""Command line front end."""

from collections.abc import Callable, Sequence
import logging

import colorlog
import numpy as np

from .analytics import cm_majority, deuar_munro_limit, r_ratio, schaetz_majority
from .config import RunConfig, parse_config
from .const import CONF_N_DETECTORS, DOMAIN, Subcommand
from .crossover import (
    crossover_grid,
    crossover_loss,
    default_fit_axes,
    evaluate_crossover_surface,
    fit_crossover_surface,
)
from .exceptions import ConfigError, ReadoutError
from .montecarlo import monte_carlo_run
from .output import (
    emit_plot_script,
    write_coefficients_csv,
    write_crossover_csv,
    write_csv,
    write_quantities_csv,
)
from .schemes import run_scheme
from .sweep import SweepRow, run_sweep

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s.%(msecs)03d %(levelname)s (%(threadName)s) [%(name)s] %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red",
}

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


def setup_logging(verbose: bool = False) -> None:
    """Install a coloured stderr handler on the root logger once."""
    root = logging.getLogger()
    if not any(
        isinstance(handler.formatter, colorlog.ColoredFormatter)
        for handler in root.handlers
    ):
        handler = logging.StreamHandler()
        handler.setFormatter(
            colorlog.ColoredFormatter(
                f"%(log_color)s{LOG_FORMAT}%(reset)s",
                datefmt=LOG_DATE_FORMAT,
                reset=True,
                log_colors=LOG_COLORS,
            )
        )
        root.addHandler(handler)
        root.setLevel(logging.INFO)
    logging.getLogger(DOMAIN).setLevel(logging.DEBUG if verbose else logging.INFO)


def _simulate(config: RunConfig) -> None:
    spec = config.spec
    if config.trials:
        distribution = monte_carlo_run(
            spec, config.params, config.trials, config.seed, config.workers
        )
    else:
        distribution = run_scheme(spec, config.params)
    _LOGGER.info(
        "Scheme %d with %d detectors: fidelity %.9g, readout probability %.9g",
        spec.scheme,
        spec.n_detectors,
        distribution.fidelity,
        distribution.p_readout,
    )
    row = SweepRow(
        spec.scheme, spec.n_detectors, CONF_N_DETECTORS, spec.n_detectors, distribution
    )
    write_csv([row], config.output)


def _sweep(config: RunConfig) -> None:
    rows = run_sweep(config.spec, config.workers)
    write_csv(rows, config.output)
    if config.emit_plot:
        emit_plot_script(config.output)


def _crossover(config: RunConfig) -> None:
    params = config.params
    result = crossover_loss(
        params.p_c, params.p_x, params.p_dloss, config.spec.n_detectors
    )
    _LOGGER.info(
        "Fitted surface predicts p_l=%.6g",
        evaluate_crossover_surface(params.p_c, params.p_x, params.p_dloss),
    )
    write_crossover_csv([result], config.output)


def _fit(config: RunConfig) -> None:
    axes = default_fit_axes(config.fit_points)
    grid = crossover_grid(*axes, config.spec.n_detectors, config.workers)
    fit = fit_crossover_surface(grid)
    p_c = np.array([point.p_c for point in grid])
    p_x = np.array([point.p_x for point in grid])
    p_d = np.array([point.p_d for point in grid])
    deviation = np.max(
        np.abs(fit.evaluate(p_c, p_x, p_d) - evaluate_crossover_surface(p_c, p_x, p_d))
    )
    _LOGGER.info("Largest deviation from the published surface: %.3e", deviation)
    write_coefficients_csv(fit.as_dict(), config.output)


def _analytic(config: RunConfig) -> None:
    stat = config.stat
    limit = deuar_munro_limit(stat.epsilon)
    write_quantities_csv(
        {
            "deuar_munro_limit": limit,
            "deuar_munro_margin": stat.eta - limit,
            "schaetz_majority": schaetz_majority(
                stat.detection_probability, stat.measurements
            ),
            "cm_majority": cm_majority(
                stat.ancilla_presence,
                stat.detector_working,
                stat.cnot_error_free,
                stat.z_error_fraction,
                stat.measurements,
            ),
            "r_ratio": r_ratio(stat.zeta, config.params.k1),
        },
        config.output,
    )


HANDLERS: dict[Subcommand, Callable[[RunConfig], None]] = {
    Subcommand.SIMULATE: _simulate,
    Subcommand.SWEEP: _sweep,
    Subcommand.CROSSOVER: _crossover,
    Subcommand.FIT: _fit,
    Subcommand.ANALYTIC: _analytic,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return the process exit status."""
    setup_logging()
    try:
        config = parse_config(argv)
    except SystemExit as err:
        # argparse exits on usage errors and --help
        return err.code if isinstance(err.code, int) else EXIT_USAGE_ERROR
    except ConfigError as err:
        _LOGGER.error("Invalid configuration: %s", err)
        return EXIT_USAGE_ERROR

    setup_logging(config.verbose)
    try:
        HANDLERS[config.subcommand](config)
    except (ReadoutError, OSError) as err:
        _LOGGER.error("%s failed: %s", config.subcommand, err)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK
