"""Tests for run configuration."""

import logging

import pytest

from cnot_readout.config import (
    build_parser,
    parse_config,
    read_config_file,
    serialize_config,
)
from cnot_readout.const import CONF_K1, Preset, Scheme, Subcommand
from cnot_readout.exceptions import ConfigError
from cnot_readout.schemes import SchemeSpec
from cnot_readout.sweep import SweepSpec

from .common import random_config_args
from .const import MOCK_RANDOM_SETS, MOCK_SIMULATE_ARGS

LOGGER = logging.getLogger(__name__)


def test_simulate_flags():
    """Test the detector study flags of a single simulation."""
    config = parse_config(MOCK_SIMULATE_ARGS)

    assert config.subcommand == Subcommand.SIMULATE
    assert config.spec == SchemeSpec(Scheme.S4, 4)
    assert config.params.k1 == 1.0
    assert config.params.k2 == 0.999
    assert config.params.p_dloss == 0.1
    assert config.params.p_c == config.params.p_x == 0.001
    assert config.params.beta == 1
    assert config.params.alpha == 0
    assert config.output is None
    assert config.trials == 0
    assert config.workers == 1


def test_out_of_range_value_names_key():
    """Test that a bad probability is reported with its key."""
    with pytest.raises(ConfigError) as err:
        parse_config([*MOCK_SIMULATE_ARGS, "--k1", "1.5"])
    assert err.value.key == CONF_K1


def test_bad_normalization_names_key():
    """Test that unnormalized amplitudes are rejected."""
    with pytest.raises(ConfigError) as err:
        parse_config(["simulate", "--alpha", "1", "--beta", "1"])
    assert err.value.key == "alpha"


def test_missing_subcommand_is_a_usage_error():
    """Test that argparse exits with status 2."""
    with pytest.raises(SystemExit) as err:
        parse_config([])
    assert err.value.code == 2

    with pytest.raises(SystemExit) as err:
        parse_config(["simulate", "--emit-plot"])
    assert err.value.code == 2


def test_subcommand_groups():
    """Test that each subcommand only takes its own flags."""
    parser = build_parser()
    assert parser.parse_args(["sweep", "--from", "0.9"]).__dict__["from"] == "0.9"
    with pytest.raises(SystemExit):
        parser.parse_args(["analytic", "--scheme", "1"])
    with pytest.raises(SystemExit):
        parser.parse_args(["crossover", "--trials", "10"])


def test_read_config_file(tmp_path):
    """Test comments, blank lines and whitespace."""
    path = tmp_path / "run.conf"
    path.write_text("# detector study\n\nk1 = 0.99  # lossy\np_dloss=0.1\n")
    assert read_config_file(path) == {"k1": "0.99", "p_dloss": "0.1"}


def test_malformed_config_file(tmp_path):
    """Test lines without a key or an equals sign."""
    path = tmp_path / "run.conf"
    path.write_text("k1 = 0.99\njust words\n")
    with pytest.raises(ConfigError) as err:
        read_config_file(path)
    assert err.value.key == "line 2"

    path.write_text("k1 = 0.99\nk1 = 0.98\n")
    with pytest.raises(ConfigError) as err:
        read_config_file(path)
    assert err.value.key == CONF_K1


def test_unknown_config_key(tmp_path):
    """Test that unknown keys are rejected."""
    path = tmp_path / "run.conf"
    path.write_text("p_gremlin = 0.5\n")
    with pytest.raises(ConfigError) as err:
        parse_config(["simulate"], config_file=path)
    assert err.value.key == "p_gremlin"


def test_missing_config_file(tmp_path):
    """Test that an unreadable file is a configuration error."""
    with pytest.raises(ConfigError) as err:
        parse_config(["simulate", "--config", str(tmp_path / "absent.conf")])
    assert err.value.key == "config"


def test_precedence(tmp_path):
    """Test defaults < preset < file < flags."""
    path = tmp_path / "run.conf"
    path.write_text("p_dloss = 0.05\np_c = 0.002\n")

    config = parse_config(
        ["simulate", "--preset", "detectors", "--config", str(path), "--p-c", "0.003"]
    )
    assert config.preset == Preset.DETECTORS
    assert config.params.k2 == 0.999  # preset
    assert config.params.p_dloss == 0.05  # file over preset
    assert config.params.p_c == 0.003  # flag over file
    assert config.params.p_dflip == 0.0  # default


def test_preset_from_file(tmp_path):
    """Test that a preset named in the file applies below the file keys."""
    path = tmp_path / "run.conf"
    path.write_text("preset = loss\nsteps = 11\n")

    config = parse_config(["sweep"], config_file=path)
    assert isinstance(config.spec, SweepSpec)
    assert config.spec.axis == CONF_K1
    assert config.spec.steps == 11
    assert config.params.p_closs == 0.001


def test_loss_preset():
    """Test the photon presence study grid."""
    config = parse_config(["sweep", "--preset", "loss"])

    assert config.spec.axis == CONF_K1
    assert config.spec.start == 0.99
    assert config.spec.stop == 1.0
    assert config.spec.steps == 101
    assert [spec.n_detectors for spec in config.spec.schemes] == [4] * 5


def test_odd_sweep_drops_scheme_3(caplog):
    """Test that scheme 3 is left out of sweeps with an odd detector count."""
    with caplog.at_level(logging.WARNING):
        config = parse_config(
            ["sweep", "--axis", "k1", "--from", "0.9", "--to", "1", "--detectors", "5"]
        )
    assert Scheme.S3 not in [spec.scheme for spec in config.spec.schemes]
    assert "Leaving scheme 3 out" in caplog.text

    with pytest.raises(ConfigError) as err:
        parse_config(["simulate", "--scheme", "3", "--detectors", "5"])
    assert err.value.key == "n_detectors"


def test_emit_plot_needs_output():
    """Test that a plot script is only written next to a CSV."""
    with pytest.raises(ConfigError) as err:
        parse_config(["sweep", "--emit-plot"])
    assert err.value.key == "emit_plot"


def test_emit_plot_only_for_sweeps(tmp_path):
    """Test that a plot script is refused for runs without a sweep table."""
    path = tmp_path / "run.conf"
    path.write_text("emit_plot = true\n")
    output = str(tmp_path / "out.csv")
    for subcommand in ("simulate", "crossover", "fit", "analytic"):
        with pytest.raises(ConfigError) as err:
            parse_config([subcommand, "--output", output], config_file=path)
        assert err.value.key == "emit_plot"

    config = parse_config(["sweep", "--output", output], config_file=path)
    assert config.emit_plot


def test_output_directory_must_exist(tmp_path):
    """Test that results cannot go to a missing directory."""
    with pytest.raises(ConfigError) as err:
        parse_config(["simulate", "--output", str(tmp_path / "missing" / "out.csv")])
    assert err.value.key == "output"


def test_complex_amplitudes():
    """Test that amplitudes accept complex literals."""
    config = parse_config(["simulate", "--alpha", "0.6", "--beta", "0.8j"])
    assert config.params.alpha == 0.6
    assert config.params.beta == 0.8j

    config = parse_config(["simulate", "--alpha", "0.6+0.8j", "--beta", "0"])
    assert config.params.alpha == 0.6 + 0.8j


def test_serialized_config_parses_back(rng, tmp_path):
    """Test that a written config file reproduces the run."""
    path = tmp_path / "run.conf"
    for _ in range(MOCK_RANDOM_SETS):
        args = random_config_args(rng)
        config = parse_config(args)
        path.write_text(serialize_config(config))

        restored = parse_config([str(config.subcommand)], config_file=path)
        assert restored == config, args
