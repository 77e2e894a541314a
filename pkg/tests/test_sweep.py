"""Tests for parameter sweeps."""

import logging

import pytest

from cnot_readout.base.channels import ErrorParams
from cnot_readout.const import CONF_K1, CONF_N_DETECTORS, CONF_P_DLOSS, Scheme
from cnot_readout.exceptions import InvalidParameters
from cnot_readout.schemes import SchemeSpec
from cnot_readout.sweep import (
    SweepSpec,
    dip_onset,
    fidelity_at,
    performance_drop_onsets,
    run_sweep,
)

from .const import (
    LOSS_DIP_SCHEMES,
    MOCK_DROP_ONSET,
    MOCK_DROP_ONSET_TOLERANCE,
    MOCK_DROP_ONSETS,
    MOCK_N_DETECTORS,
)

LOGGER = logging.getLogger(__name__)


def _schemes(*schemes: Scheme, n_detectors: int = 2) -> tuple[SchemeSpec, ...]:
    return tuple(SchemeSpec(scheme, n_detectors) for scheme in schemes)


def test_sweep_spec_validation():
    """Test grid checks."""
    params = ErrorParams()
    with pytest.raises(InvalidParameters) as err:
        SweepSpec((), CONF_K1, 0.9, 1.0, 3, params)
    assert err.value.field == "schemes"
    with pytest.raises(InvalidParameters) as err:
        SweepSpec(_schemes(Scheme.S1), "alpha", 0.0, 1.0, 3, params)
    assert err.value.field == "axis"
    with pytest.raises(InvalidParameters) as err:
        SweepSpec(_schemes(Scheme.S1), CONF_K1, 1.0, 0.9, 3, params)
    assert err.value.field == "from"
    with pytest.raises(InvalidParameters) as err:
        SweepSpec(_schemes(Scheme.S1), CONF_K1, 0.9, 1.0, 1, params)
    assert err.value.field == "steps"


def test_detector_sweep_rows(detector_study_params):
    """Test one row per scheme and value, ordered by value then scheme."""
    spec = SweepSpec(
        _schemes(Scheme.S4, Scheme.S1),
        CONF_N_DETECTORS,
        2,
        4,
        2,
        detector_study_params,
    )
    rows = run_sweep(spec)

    assert [(row.axis_value, row.scheme) for row in rows] == [
        (2, Scheme.S4),
        (2, Scheme.S1),
        (4, Scheme.S4),
        (4, Scheme.S1),
    ]
    assert [row.n_detectors for row in rows] == [2, 2, 4, 4]
    assert all(row.axis == CONF_N_DETECTORS for row in rows)


def test_odd_detector_counts_skip_scheme_3(detector_study_params, caplog):
    """Test that scheme 3 only runs at even detector counts."""
    spec = SweepSpec(
        _schemes(Scheme.S3, Scheme.S4),
        CONF_N_DETECTORS,
        2,
        4,
        3,
        detector_study_params,
    )
    with caplog.at_level(logging.WARNING):
        rows = run_sweep(spec)

    assert [(row.scheme, row.n_detectors) for row in rows] == [
        (Scheme.S3, 2),
        (Scheme.S4, 2),
        (Scheme.S4, 3),
        (Scheme.S3, 4),
        (Scheme.S4, 4),
    ]
    assert "Skipping scheme 3 at 3 detectors" in caplog.text


def test_parameter_sweep_updates_axis(detector_study_params):
    """Test that a continuous axis overrides the fixed value."""
    spec = SweepSpec(
        _schemes(Scheme.S4, n_detectors=MOCK_N_DETECTORS),
        CONF_P_DLOSS,
        0.0,
        0.2,
        3,
        detector_study_params,
    )
    rows = run_sweep(spec)

    assert [row.axis_value for row in rows] == pytest.approx([0.0, 0.1, 0.2])
    fidelity = [row.distribution.fidelity for row in rows]
    assert fidelity == sorted(fidelity, reverse=True)


def test_sweep_workers_agree(detector_study_params):
    """Test that a process pool returns the serial result."""
    spec = SweepSpec(
        _schemes(Scheme.S1, Scheme.S5),
        CONF_K1,
        0.99,
        1.0,
        4,
        detector_study_params,
    )
    assert run_sweep(spec, workers=2) == run_sweep(spec)


def test_fidelity_without_errors():
    """Test that the error-free fidelity is one."""
    for scheme in Scheme:
        assert fidelity_at(SchemeSpec(scheme, MOCK_N_DETECTORS), ErrorParams()) == (
            pytest.approx(1.0)
        )


def test_loss_detection_dip(loss_study_params):
    """Test that the loss-detecting votes peak just below k1 = 1."""
    for scheme in LOSS_DIP_SCHEMES:
        spec = SchemeSpec(scheme, MOCK_N_DETECTORS)
        onset = dip_onset(spec, loss_study_params, 0.99, 1.0)

        assert onset is not None
        assert 0.995 < onset < 1
        assert fidelity_at(spec, loss_study_params.replace(k1=onset)) > fidelity_at(
            spec, loss_study_params.replace(k1=1.0)
        )


def test_dip_onset_validation(loss_study_params):
    """Test range and step checks."""
    spec = SchemeSpec(Scheme.S2, MOCK_N_DETECTORS)
    with pytest.raises(InvalidParameters):
        dip_onset(spec, loss_study_params, 1.0, 0.99)
    with pytest.raises(InvalidParameters):
        dip_onset(spec, loss_study_params, 0.99, 1.0, step=0.01)


def test_no_dip_without_loss_detection(loss_study_params):
    """Test that a first-click readout only gains from a present photon."""
    spec = SchemeSpec(Scheme.S4, MOCK_N_DETECTORS)
    assert dip_onset(spec, loss_study_params, 0.99, 1.0, step=1e-3) is None


def test_performance_drop_onsets(loss_study_params):
    """Test that larger gate errors turn over further below k1 = 1."""
    spec = SchemeSpec(Scheme.S2, MOCK_N_DETECTORS)
    onsets = performance_drop_onsets(spec, loss_study_params)

    values = list(onsets.values())
    assert None not in values
    assert values == sorted(values, reverse=True)
    assert onsets[0.0001] == pytest.approx(
        MOCK_DROP_ONSET, abs=MOCK_DROP_ONSET_TOLERANCE
    )


def test_performance_drop_onsets_per_gate_error(loss_study_params):
    """Test the turn-over point of a single mid-chain flip for every gate error."""
    spec = SchemeSpec(Scheme.S3, MOCK_N_DETECTORS)
    onsets = performance_drop_onsets(spec, loss_study_params)

    assert set(onsets) == set(MOCK_DROP_ONSETS)
    for gate_error, expected in MOCK_DROP_ONSETS.items():
        assert onsets[gate_error] == pytest.approx(
            expected, abs=MOCK_DROP_ONSET_TOLERANCE
        ), gate_error
