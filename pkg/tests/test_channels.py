"""Tests for the error model."""

import logging

import numpy as np
import pytest

from cnot_readout.base.channels import (
    CNOT_MATRIX,
    CNOT_PAULI_PAIRS,
    ErrorParams,
    ReadoutChain,
    cnot_channel,
    cnot_kraus,
    detector_measure,
    gate_loss_channel,
    loss_kraus,
    prepare_ancilla,
    prepare_input,
    prepare_measured_qubit,
    x_gate_channel,
    x_gate_kraus,
)
from cnot_readout.base.qutrit import (
    MODE_DIM,
    REGISTER_DIM,
    DensityMatrix,
    kraus_completeness,
    kron,
    partial_trace,
)
from cnot_readout.const import (
    ALGEBRA_TOLERANCE,
    TRACE_TOLERANCE,
    Level,
    Mode,
    Outcome,
)
from cnot_readout.exceptions import InvalidInput, InvalidParameters

from .common import random_density_matrix, random_error_params

LOGGER = logging.getLogger(__name__)


def _register(first: Level, second: Level) -> DensityMatrix:
    return kron(DensityMatrix.basis(first), DensityMatrix.basis(second))


def test_kraus_completeness(rng):
    """Test that every Kraus set sums to the identity."""
    for probability in [0.0, 1.0, *rng.uniform(0, 1, size=10)]:
        probability = float(probability)
        for ops, dim in (
            (x_gate_kraus(probability), MODE_DIM),
            (cnot_kraus(probability), REGISTER_DIM),
            (loss_kraus(probability), MODE_DIM),
        ):
            assert np.allclose(
                kraus_completeness(ops), np.eye(dim), atol=ALGEBRA_TOLERANCE
            )


def test_kraus_set_sizes():
    """Test that the X gate has four and the CNOT sixteen Kraus operators."""
    assert len(x_gate_kraus(0.01)) == 4
    assert len(cnot_kraus(0.01)) == 16
    assert len(CNOT_PAULI_PAIRS) == 15
    with pytest.raises(InvalidParameters):
        cnot_kraus(1.5)


def test_cnot_copies_the_control():
    """Test the ideal CNOT on basis states, including lost photons."""
    for control, target, expected in (
        (Level.ZERO, Level.ZERO, Level.ZERO),
        (Level.ONE, Level.ZERO, Level.ONE),
        (Level.ONE, Level.ONE, Level.ZERO),
        (Level.LOST, Level.ZERO, Level.ZERO),
        (Level.ONE, Level.LOST, Level.LOST),
    ):
        rho = cnot_channel(_register(control, target), 0.0, 0.0)
        assert rho.allclose(_register(control, expected))

    assert np.allclose(CNOT_MATRIX @ CNOT_MATRIX, np.eye(REGISTER_DIM))


def test_channels_preserve_trace(rng):
    """Test trace preservation and positivity of every channel."""
    for _ in range(20):
        params = random_error_params(rng)
        register = random_density_matrix(rng, REGISTER_DIM)
        single = random_density_matrix(rng, MODE_DIM)

        for rho in (
            cnot_channel(register, params.p_c, params.p_closs, params.closs_dist),
            x_gate_channel(register, params.p_x, params.p_xloss, Mode.SECOND),
            x_gate_channel(single, params.p_x, params.p_xloss),
            gate_loss_channel(register, params.p_xloss, (Mode.FIRST, Mode.SECOND)),
        ):
            assert rho.trace == pytest.approx(1.0, abs=TRACE_TOLERANCE)
            rho.validate()

        total = sum(
            branch.probability
            for branch in detector_measure(
                register, Mode.SECOND, params.p_dloss, params.p_dflip
            )
        )
        assert total == pytest.approx(1.0, abs=TRACE_TOLERANCE)


def test_gate_loss_moves_modes_together():
    """Test that full gate loss on both modes empties the register."""
    rho = _register(Level.ONE, Level.ZERO)
    lost = gate_loss_channel(rho, 1.0, (Mode.FIRST, Mode.SECOND))
    assert lost.allclose(_register(Level.LOST, Level.LOST))

    partly = gate_loss_channel(rho, 0.25, (Mode.SECOND,))
    populations = partly.populations()
    assert populations[3] == pytest.approx(0.75)
    assert populations[5] == pytest.approx(0.25)

    with pytest.raises(InvalidInput):
        gate_loss_channel(rho, 0.1, ())


def test_x_gate_flips_and_keeps_loss():
    """Test the ideal X gate on a qubit and on a lost photon."""
    flipped = x_gate_channel(DensityMatrix.basis(Level.ZERO), 0.0, 0.0)
    assert flipped.allclose(DensityMatrix.basis(Level.ONE))

    lost = x_gate_channel(DensityMatrix.basis(Level.LOST), 0.3, 0.0)
    assert lost.allclose(DensityMatrix.basis(Level.LOST))


def test_x_gate_pauli_error_populations():
    """Test that X and Y errors undo the flip with probability 2p/3."""
    rho = x_gate_channel(DensityMatrix.basis(Level.ZERO), 0.3, 0.0)
    assert rho.populations()[Level.ZERO] == pytest.approx(0.2)
    assert rho.populations()[Level.ONE] == pytest.approx(0.8)


def test_cnot_errors_by_enumeration():
    """Test the CNOT channel against a hand-built sum of all sixteen terms."""
    p_c = 0.15
    paulis = [
        np.eye(3),
        np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
        np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 1]]),
        np.diag([1, -1, 1]),
    ]
    # |10> <-> |11>, everything else untouched
    gate = np.eye(9)[[0, 1, 2, 4, 3, 5, 6, 7, 8]]
    start = np.zeros((9, 9))
    start[0, 0] = 1

    total = np.zeros((9, 9), dtype=complex)
    for control, sigma_c in enumerate(paulis):
        for target, sigma_t in enumerate(paulis):
            weight = 1 - p_c if control == target == 0 else p_c / 15
            op = gate @ np.kron(sigma_c, sigma_t)
            total += weight * op @ start @ op.conj().T
    expected = np.einsum("ijil->jl", total.reshape(3, 3, 3, 3))

    rho = cnot_channel(_register(Level.ZERO, Level.ZERO), p_c, 0.0)
    marginal = partial_trace(rho, Mode.SECOND)
    assert np.allclose(marginal.entries, expected, atol=ALGEBRA_TOLERANCE)
    # eight of the fifteen error pairs leave the target flipped
    assert marginal.populations() == pytest.approx([1 - p_c * 8 / 15, p_c * 8 / 15, 0])


def test_cnot_loss_distribution():
    """Test that CNOT loss follows the mode distribution."""
    rho = cnot_channel(_register(Level.ZERO, Level.ZERO), 0.0, 0.5, (0.2, 0.3, 0.5))
    populations = rho.populations()
    assert populations[0] == pytest.approx(0.5)
    assert populations[3 * Level.LOST + Level.ZERO] == pytest.approx(0.1)
    assert populations[3 * Level.ZERO + Level.LOST] == pytest.approx(0.15)
    assert populations[3 * Level.LOST + Level.LOST] == pytest.approx(0.25)

    with pytest.raises(InvalidParameters):
        cnot_channel(rho, 0.0, 0.1, (0.5, 0.6, 0.0))


def test_detector_branches():
    """Test detector loss and flips on a photon in |0>."""
    rho = DensityMatrix.basis(Level.ZERO)
    branches = {
        branch.outcome: branch.probability
        for branch in detector_measure(rho, Mode.FIRST, 0.1, 0.05)
    }
    assert branches[Outcome.ZERO] == pytest.approx(0.9 * 0.95)
    assert branches[Outcome.ONE] == pytest.approx(0.9 * 0.05)
    assert branches[Outcome.NO_CLICK] == pytest.approx(0.1)

    lost = detector_measure(DensityMatrix.basis(Level.LOST), Mode.FIRST, 0.1, 0.05)
    assert [branch.outcome for branch in lost] == [Outcome.NO_CLICK]
    assert lost[0].probability == pytest.approx(1.0)


def test_preparation():
    """Test the measured qubit and ancilla mixtures."""
    params = ErrorParams(k1=0.9, k2=0.8, p0=0.75, alpha=0.6, beta=0.8)
    measured = prepare_measured_qubit(params)
    assert measured.populations() == pytest.approx([0.9 * 0.36, 0.9 * 0.64, 0.1])
    assert measured.entries[0, 1] == pytest.approx(0.9 * 0.48)
    assert prepare_ancilla(params).populations() == pytest.approx([0.6, 0.2, 0.2])
    assert prepare_input(params).trace == pytest.approx(1.0)


def test_error_params_validation():
    """Test range, normalization and distribution checks."""
    with pytest.raises(InvalidParameters) as err:
        ErrorParams(k1=1.5)
    assert err.value.field == "k1"

    with pytest.raises(InvalidParameters) as err:
        ErrorParams(alpha=1, beta=1)
    assert err.value.field == "alpha"

    with pytest.raises(InvalidParameters) as err:
        ErrorParams(closs_dist=(0.5, 0.5, 0.5))
    assert err.value.field == "closs_dist"

    params = ErrorParams(alpha="0.6", beta="0.8j", closs_dist="0.2,0.3,0.5")
    assert params.alpha == 0.6
    assert params.beta == 0.8j
    assert params.closs_dist == (0.2, 0.3, 0.5)


def test_ideal_distribution():
    """Test the target conclusion distribution."""
    params = ErrorParams(k1=0.9, alpha=0.6, beta=0.8)
    assert params.ideal_distribution() == pytest.approx([0.324, 0.576, 0.1, 0.0])


def test_readout_round_preserves_probability(rng):
    """Test that the outcome maps of a round sum to the input trace."""
    for _ in range(10):
        params = random_error_params(rng)
        chain = ReadoutChain.for_params(params)
        vector = chain.initial_vector(params)

        branches = chain.measure_round(vector)
        total = sum(chain.probability(branch) for branch in branches.values())
        assert total == pytest.approx(1.0, abs=TRACE_TOLERANCE)
        assert chain.probability(chain.flip(vector)) == pytest.approx(
            1.0, abs=TRACE_TOLERANCE
        )


def test_readout_chain_is_shared_across_inputs(rng):
    """Test that the compiled chain does not depend on the input state."""
    params = random_error_params(rng)
    other = params.replace(k1=0.5, alpha=1.0, beta=0.0)
    assert ReadoutChain.for_params(params) is ReadoutChain.for_params(other)
