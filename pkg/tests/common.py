"""Shared functions for tests."""

import logging

import numpy as np

from cnot_readout.base.channels import ErrorParams
from cnot_readout.base.qutrit import DensityMatrix
from cnot_readout.const import Preset, Scheme, Subcommand

LOGGER = logging.getLogger(__name__)


def random_error_params(rng: np.random.Generator, **overrides) -> ErrorParams:
    """Return a valid, moderately noisy parameter set."""
    amplitudes = rng.normal(size=2) + 1j * rng.normal(size=2)
    amplitudes /= np.linalg.norm(amplitudes)
    closs_dist = rng.dirichlet(np.ones(3))
    closs_dist[-1] = 1 - closs_dist[0] - closs_dist[1]
    values = {
        "k1": rng.uniform(0.8, 1.0),
        "k2": rng.uniform(0.9, 1.0),
        "p0": rng.uniform(0.8, 1.0),
        "alpha": complex(amplitudes[0]),
        "beta": complex(amplitudes[1]),
        "p_x": rng.uniform(0, 0.05),
        "p_c": rng.uniform(0, 0.05),
        "p_xloss": rng.uniform(0, 0.05),
        "p_closs": rng.uniform(0, 0.05),
        "closs_dist": tuple(float(value) for value in np.clip(closs_dist, 0, 1)),
        "p_dloss": rng.uniform(0, 0.2),
        "p_dflip": rng.uniform(0, 0.05),
    }
    values.update(overrides)
    return ErrorParams.from_mapping(values)


def random_density_matrix(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """Return a random full-rank mixed state."""
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    entries = matrix @ matrix.conj().T
    return DensityMatrix(entries / np.trace(entries).real)


def random_config_args(rng: np.random.Generator) -> list[str]:
    """Return command line arguments for a random valid run."""
    subcommand = rng.choice([str(item) for item in Subcommand])
    args = [
        subcommand,
        "--k1",
        str(rng.uniform(0.9, 1.0)),
        "--p-c",
        str(rng.uniform(0, 0.01)),
        "--p-x",
        str(rng.uniform(0, 0.01)),
        "--p-dloss",
        str(rng.uniform(0, 0.1)),
        "--alpha",
        "0.6",
        "--beta",
        "0.8j",
    ]
    if rng.random() < 0.5:
        args += ["--preset", str(rng.choice([str(item) for item in Preset]))]
    if subcommand in (Subcommand.SIMULATE, Subcommand.CROSSOVER, Subcommand.FIT):
        args += ["--scheme", str(int(rng.choice([Scheme.S1, Scheme.S4, Scheme.S5])))]
        args += ["--detectors", str(int(rng.integers(1, 8)))]
    if subcommand == Subcommand.SIMULATE:
        args += ["--seed", str(int(rng.integers(0, 1000)))]
    if subcommand == Subcommand.SWEEP:
        args += ["--schemes", "1,4,5", "--steps", str(int(rng.integers(2, 20)))]
    if subcommand == Subcommand.ANALYTIC:
        args += ["--measurements", str(int(rng.integers(1, 30)))]
    return args
