"""Run configuration.

A run is described by command line flags, an optional `key = value` config
file and an optional preset. Values resolve as defaults < preset < file <
flags and are validated by RUN_CONFIG_SCHEMA.
"""

import argparse
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
import logging
from pathlib import Path
from types import MappingProxyType

import voluptuous as vol

from .analytics import StatModelParams
from .base.channels import ErrorParams
from .const import (
    CONF_AXIS,
    CONF_EMIT_PLOT,
    CONF_FIT_POINTS,
    CONF_FROM,
    CONF_LOSS_INTERVAL,
    CONF_N_DETECTORS,
    CONF_OUTPUT,
    CONF_PRESET,
    CONF_SCHEME,
    CONF_SCHEMES,
    CONF_SEED,
    CONF_STEPS,
    CONF_TO,
    CONF_TRIALS,
    CONF_VERBOSE,
    CONF_WORKERS,
    DOMAIN,
    ERROR_PARAM_KEYS,
    PRESETS,
    RUN_CONFIG_SCHEMA,
    STAT_PARAM_KEYS,
    Preset,
    Scheme,
    Subcommand,
)
from .exceptions import BranchOverflowError, ConfigError, InvalidParameters
from .schemes import SchemeSpec
from .sweep import SweepSpec

_LOGGER = logging.getLogger(__name__)

CONF_CONFIG = "config"

# (flag, dest, help) per option group
PARAM_FLAGS = (
    ("--k1", "k1", "presence probability of the measured photon"),
    ("--k2", "k2", "presence probability of every ancilla photon"),
    ("--p0", "p0", "probability an ancilla is prepared in |0>"),
    ("--alpha", "alpha", "|0> amplitude of the input, e.g. 0.6+0.8j"),
    ("--beta", "beta", "|1> amplitude of the input"),
    ("--p-x", "p_x", "Pauli error probability of the X gate"),
    ("--p-c", "p_c", "Pauli error probability of the CNOT"),
    ("--p-xloss", "p_xloss", "loss probability of the X gate"),
    ("--p-closs", "p_closs", "loss probability of the CNOT"),
    ("--closs-dist", "closs_dist", "CNOT loss split over mode 1, mode 2, both"),
    ("--p-dloss", "p_dloss", "probability the detector misses a photon"),
    ("--p-dflip", "p_dflip", "probability the detector misreads a photon"),
)
SCHEME_FLAGS = (
    ("--scheme", CONF_SCHEME, "readout scheme 1-5"),
    ("--detectors", CONF_N_DETECTORS, "number of detectors"),
    ("--loss-interval", CONF_LOSS_INTERVAL, "tally band decoded as loss"),
)
SAMPLING_FLAGS = (
    ("--seed", CONF_SEED, "master seed of the sampler"),
    ("--trials", CONF_TRIALS, "Monte Carlo trials, 0 for exact evolution"),
)
SWEEP_FLAGS = (
    ("--axis", CONF_AXIS, "parameter to sweep"),
    ("--from", CONF_FROM, "first grid value"),
    ("--to", CONF_TO, "last grid value"),
    ("--steps", CONF_STEPS, "number of grid values"),
    ("--schemes", CONF_SCHEMES, "comma separated scheme numbers"),
)
FIT_FLAGS = (("--fit-points", CONF_FIT_POINTS, "grid points per error axis"),)
STAT_FLAGS = tuple(
    (f"--{key.replace('_', '-')}", key, f"statistical model {key}")
    for key in STAT_PARAM_KEYS
)


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run."""

    subcommand: Subcommand
    params: ErrorParams
    spec: SchemeSpec | SweepSpec
    stat: StatModelParams
    output: Path | None
    seed: int
    trials: int
    workers: int
    emit_plot: bool
    fit_points: int
    preset: Preset | None
    verbose: bool
    values: Mapping = field(default_factory=dict, compare=False, repr=False)


def _group(title: str, flags: Sequence[tuple[str, str, str]]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    group = parser.add_argument_group(title)
    for flag, dest, help_text in flags:
        group.add_argument(flag, dest=dest, metavar=dest.upper(), help=help_text)
    return parser


def _common_group() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    group = parser.add_argument_group("run")
    group.add_argument("--config", dest=CONF_CONFIG, type=Path, help="config file")
    group.add_argument(
        "--preset", dest=CONF_PRESET, choices=[str(preset) for preset in Preset]
    )
    group.add_argument("--output", dest=CONF_OUTPUT, help="CSV file, stdout if unset")
    group.add_argument("--workers", dest=CONF_WORKERS, help="worker processes")
    group.add_argument(
        "--verbose", "-v", dest=CONF_VERBOSE, action="store_true", help="debug logging"
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Return the command line parser with one subparser per subcommand."""
    common = _common_group()
    params = _group("error parameters", PARAM_FLAGS)
    scheme = _group("scheme", SCHEME_FLAGS)
    sampling = _group("sampling", SAMPLING_FLAGS)
    sweep = _group("sweep", SWEEP_FLAGS)
    fit = _group("fit", FIT_FLAGS)
    stat = _group("statistical model", STAT_FLAGS)

    parser = argparse.ArgumentParser(
        prog=DOMAIN.replace("_", "-"),
        description="Simulate CNOT chain readout of a lossy photonic qubit.",
        allow_abbrev=False,
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    parents = {
        Subcommand.SIMULATE: [common, params, scheme, sampling],
        Subcommand.SWEEP: [common, params, scheme, sweep],
        Subcommand.CROSSOVER: [common, params, scheme],
        Subcommand.FIT: [common, params, scheme, fit],
        Subcommand.ANALYTIC: [common, params, stat],
    }
    for subcommand, groups in parents.items():
        subparser = subparsers.add_parser(
            str(subcommand), parents=groups, allow_abbrev=False
        )
        if subcommand == Subcommand.SWEEP:
            subparser.add_argument(
                "--emit-plot",
                dest=CONF_EMIT_PLOT,
                action="store_true",
                default=argparse.SUPPRESS,
                help="write a plot script next to the CSV",
            )
    return parser


def read_config_file(path: Path) -> dict[str, str]:
    """Read `key = value` lines; `#` starts a comment."""
    values: dict[str, str] = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {number}", f"expected `key = value`, got {raw!r}")
        if key in values:
            raise ConfigError(key, f"set twice in {path}")
        values[key] = value
    _LOGGER.debug("Read %d keys from %s", len(values), path)
    return values


def _validate(values: Mapping) -> dict:
    try:
        return RUN_CONFIG_SCHEMA(dict(values))
    except vol.Invalid as err:
        key = str(err.path[0]) if err.path else "config"
        raise ConfigError(key, err.error_message) from err


def _preset_values(name) -> dict:
    if name is None:
        return {}
    try:
        return dict(PRESETS[Preset(name)])
    except ValueError as err:
        raise ConfigError(CONF_PRESET, f"unknown preset {name}") from err


def _build(subcommand: Subcommand, values: dict) -> RunConfig:
    output = values.get(CONF_OUTPUT)
    output = Path(output) if output else None
    if output is not None and not output.parent.is_dir():
        raise ConfigError(CONF_OUTPUT, f"directory {output.parent} does not exist")
    if values[CONF_EMIT_PLOT] and subcommand != Subcommand.SWEEP:
        raise ConfigError(CONF_EMIT_PLOT, f"{subcommand} writes no sweep to plot")
    if values[CONF_EMIT_PLOT] and output is None:
        raise ConfigError(CONF_EMIT_PLOT, "a plot script needs an --output CSV")

    if (
        subcommand == Subcommand.SWEEP
        and Scheme.S3 in values[CONF_SCHEMES]
        and values[CONF_N_DETECTORS] % 2
    ):
        _LOGGER.warning(
            "Leaving scheme 3 out of the sweep, %d detectors is odd",
            values[CONF_N_DETECTORS],
        )

    try:
        params = ErrorParams.from_mapping(
            {key: values[key] for key in ERROR_PARAM_KEYS}
        )
        stat = StatModelParams(**{key: values[key] for key in STAT_PARAM_KEYS})
        if subcommand == Subcommand.SWEEP:
            spec = SweepSpec(
                schemes=tuple(
                    SchemeSpec(
                        scheme, values[CONF_N_DETECTORS], values[CONF_LOSS_INTERVAL]
                    )
                    for scheme in values[CONF_SCHEMES]
                    if scheme != Scheme.S3 or not values[CONF_N_DETECTORS] % 2
                ),
                axis=values[CONF_AXIS],
                start=values[CONF_FROM],
                stop=values[CONF_TO],
                steps=values[CONF_STEPS],
                fixed=params,
            )
        else:
            spec = SchemeSpec(
                values[CONF_SCHEME],
                values[CONF_N_DETECTORS],
                values[CONF_LOSS_INTERVAL],
            )
    except InvalidParameters as err:
        raise ConfigError(err.field, str(err)) from err
    except BranchOverflowError as err:
        raise ConfigError(CONF_N_DETECTORS, str(err)) from err

    return RunConfig(
        subcommand=subcommand,
        params=params,
        spec=spec,
        stat=stat,
        output=output,
        seed=values[CONF_SEED],
        trials=values[CONF_TRIALS],
        workers=values[CONF_WORKERS],
        emit_plot=values[CONF_EMIT_PLOT],
        fit_points=values[CONF_FIT_POINTS],
        preset=values.get(CONF_PRESET),
        verbose=values[CONF_VERBOSE],
        values=MappingProxyType(values),
    )


def parse_config(
    args: Sequence[str] | None = None, config_file: Path | None = None
) -> RunConfig:
    """Resolve command line arguments and an optional config file.

    A `--config` flag takes precedence over the config_file argument. Usage
    errors exit through argparse with status 2; everything else raises
    ConfigError naming the offending key.
    """
    flags = vars(build_parser().parse_args(args))
    subcommand = Subcommand(flags.pop("subcommand"))
    config_file = flags.pop(CONF_CONFIG, config_file)

    file_values = {}
    if config_file is not None:
        try:
            file_values = read_config_file(config_file)
        except OSError as err:
            raise ConfigError(CONF_CONFIG, f"cannot read {config_file}: {err}") from err

    preset = flags.get(CONF_PRESET, file_values.get(CONF_PRESET))
    values = _validate({**_preset_values(preset), **file_values, **flags})
    _LOGGER.debug(
        "Resolved %s run (preset %s, %d file keys, %d flags)",
        subcommand,
        preset,
        len(file_values),
        len(flags),
    )
    return _build(subcommand, values)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, tuple):
        return ",".join(_format_value(item) for item in value)
    if isinstance(value, float | complex):
        return repr(value)
    return str(value)


def serialize_config(config: RunConfig) -> str:
    """Return a config file that parses back to an equal RunConfig."""
    lines = [f"# {DOMAIN} {config.subcommand} run"]
    lines.extend(
        f"{key} = {_format_value(value)}"
        for key, value in config.values.items()
        if value is not None
    )
    return "\n".join(lines) + "\n"
