"""Fixtures for testing."""

import numpy as np
import pytest

from cnot_readout.base.channels import ErrorParams
from cnot_readout.const import DETECTOR_STUDY_PARAMS, LOSS_STUDY_PARAMS

from .const import MOCK_SEED


@pytest.fixture
def rng():
    """Return a seeded random generator."""
    return np.random.default_rng(MOCK_SEED)


@pytest.fixture
def detector_study_params():
    """Parameters of the detector count study."""
    return ErrorParams.from_mapping(DETECTOR_STUDY_PARAMS)


@pytest.fixture
def loss_study_params():
    """Parameters of the photon presence study."""
    return ErrorParams.from_mapping(LOSS_STUDY_PARAMS)


@pytest.fixture
def output_path(tmp_path):
    """Return a CSV path inside a temporary directory."""
    return tmp_path / "results.csv"
