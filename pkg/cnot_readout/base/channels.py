"""Error model of the readout chain.

Pauli channels for the X and CNOT gates, gate loss, preparation of the
measured qubit and the ancillas, and the lossy detector. Gates apply their
Pauli error first, then the ideal unitary, then gate loss.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from itertools import product
import logging
from types import MappingProxyType

import numpy as np
import voluptuous as vol

from ..const import (
    ALGEBRA_TOLERANCE,
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_CLOSS_DIST,
    DEFAULT_K1,
    DEFAULT_K2,
    DEFAULT_P0,
    DEFAULT_P_C,
    DEFAULT_P_CLOSS,
    DEFAULT_P_DFLIP,
    DEFAULT_P_DLOSS,
    DEFAULT_P_X,
    DEFAULT_P_XLOSS,
    ERROR_PARAMS_SCHEMA,
    IMPOSSIBLE_BRANCH,
    Level,
    Mode,
    Outcome,
)
from ..exceptions import InvalidInput, InvalidParameters
from .qutrit import (
    MODE_DIM,
    REGISTER_DIM,
    SIGMA_X,
    DensityMatrix,
    ModeOperator,
    apply_kraus,
    basis_projector,
    embed_qubit_op,
    embedded_paulis,
    identity,
    kron,
    lift_to_modes,
    partial_trace_entries,
    stack_operators,
    transfer_matrix,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorParams:
    """Every error probability of the model plus the input amplitudes."""

    k1: float = DEFAULT_K1
    k2: float = DEFAULT_K2
    p0: float = DEFAULT_P0
    alpha: complex = DEFAULT_ALPHA
    beta: complex = DEFAULT_BETA
    p_x: float = DEFAULT_P_X
    p_c: float = DEFAULT_P_C
    p_xloss: float = DEFAULT_P_XLOSS
    p_closs: float = DEFAULT_P_CLOSS
    closs_dist: tuple[float, float, float] = DEFAULT_CLOSS_DIST
    p_dloss: float = DEFAULT_P_DLOSS
    p_dflip: float = DEFAULT_P_DFLIP

    def __post_init__(self) -> None:
        """Validate and coerce every field."""
        try:
            validated = ERROR_PARAMS_SCHEMA(self.as_dict())
        except vol.Invalid as err:
            key = str(err.path[0]) if err.path else "params"
            raise InvalidParameters(key, err.error_message) from err
        for key, value in validated.items():
            object.__setattr__(self, key, value)

        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > ALGEBRA_TOLERANCE:
            raise InvalidParameters(
                "alpha", f"|alpha|^2 + |beta|^2 must be 1, got {norm!r}"
            )

    @classmethod
    def from_mapping(cls, values: Mapping) -> "ErrorParams":
        """Build from a mapping, ignoring keys that are not fields."""
        names = {item.name for item in fields(cls)}
        return cls(**{key: value for key, value in values.items() if key in names})

    def as_dict(self) -> dict:
        """Return the fields as a plain dict."""
        return {item.name: getattr(self, item.name) for item in fields(self)}

    def replace(self, **changes) -> "ErrorParams":
        """Return a copy with some fields changed."""
        return replace(self, **changes)

    def ideal_distribution(self) -> np.ndarray:
        """Return the ideal (zero, one, loss, mixed) conclusion distribution."""
        return np.array(
            [
                self.k1 * abs(self.alpha) ** 2,
                self.k1 * abs(self.beta) ** 2,
                1 - self.k1,
                0.0,
            ]
        )


@dataclass(frozen=True)
class DetectorBranch:
    """One classical branch of a detector readout."""

    outcome: Outcome
    probability: float
    state: DensityMatrix = field(repr=False)


def _check_probability(name: str, value: float) -> float:
    if not 0 <= value <= 1:
        raise InvalidParameters(name, f"probability {value} outside [0, 1]")
    return float(value)


# Preparation


def prepare_ancilla(params: ErrorParams) -> DensityMatrix:
    """Return the freshly prepared ancilla mixture."""
    return DensityMatrix.from_populations(
        [params.k2 * params.p0, params.k2 * (1 - params.p0), 1 - params.k2]
    )


def prepare_measured_qubit(params: ErrorParams) -> DensityMatrix:
    """Return k1 |psi><psi| + (1 - k1) |L><L| for the measured qubit."""
    ket = np.array([params.alpha, params.beta, 0], dtype=complex)
    entries = params.k1 * np.outer(ket, ket.conj())
    entries[Level.LOST, Level.LOST] += 1 - params.k1
    return DensityMatrix(entries)


def prepare_input(params: ErrorParams) -> DensityMatrix:
    """Return the measured qubit tensored with the first ancilla."""
    return kron(prepare_measured_qubit(params), prepare_ancilla(params))


# Kraus sets


@lru_cache(maxsize=256)
def x_gate_kraus(p_x: float) -> tuple[ModeOperator, ...]:
    """Return the four Kraus operators sigma_x K_i of the noisy X gate."""
    _check_probability("p_x", p_x)
    sigma_x = embed_qubit_op(SIGMA_X, "X")
    weights = (np.sqrt(1 - p_x),) + (np.sqrt(p_x / 3),) * 3
    return tuple(
        ModeOperator(weight * (sigma_x @ pauli).entries, f"X{pauli.label}")
        for weight, pauli in zip(weights, embedded_paulis())
    )


def _cnot_matrix() -> np.ndarray:
    matrix = np.eye(REGISTER_DIM, dtype=complex)
    one_zero = MODE_DIM * Level.ONE + Level.ZERO
    one_one = MODE_DIM * Level.ONE + Level.ONE
    matrix[[one_zero, one_one]] = matrix[[one_one, one_zero]]
    return matrix


CNOT_MATRIX = _cnot_matrix()
CNOT_MATRIX.setflags(write=False)

# Pauli pairs (control, target) in the order of the error Kraus operators
CNOT_PAULI_PAIRS = tuple(
    pair for pair in product(range(4), repeat=2) if pair != (0, 0)
)


@lru_cache(maxsize=256)
def cnot_kraus(p_c: float) -> tuple[ModeOperator, ...]:
    """Return the sixteen Kraus operators C L_i of the noisy CNOT."""
    _check_probability("p_c", p_c)
    paulis = embedded_paulis()
    ops = [ModeOperator(np.sqrt(1 - p_c) * CNOT_MATRIX, "C")]
    for control, target in CNOT_PAULI_PAIRS:
        error = kron(paulis[control], paulis[target])
        ops.append(
            ModeOperator(np.sqrt(p_c / 15) * CNOT_MATRIX @ error.entries, f"C{error.label}")
        )
    return tuple(ops)


def _transfer_ops() -> tuple[ModeOperator, ...]:
    """Return |L><0|, |L><1| and |L><L|."""
    ops = []
    for level in Level:
        entries = np.zeros((MODE_DIM, MODE_DIM), dtype=complex)
        entries[Level.LOST, level] = 1
        ops.append(ModeOperator(entries, f"L{level.name}"))
    return tuple(ops)


def loss_kraus(p_loss: float) -> tuple[ModeOperator, ...]:
    """Return the Kraus operators of single-mode gate loss."""
    _check_probability("p_loss", p_loss)
    return (ModeOperator(np.sqrt(1 - p_loss) * np.eye(MODE_DIM), "I"),) + tuple(
        ModeOperator(np.sqrt(p_loss) * op.entries, op.label) for op in _transfer_ops()
    )


@lru_cache(maxsize=8)
def _full_loss_stack(modes: tuple[Mode, ...], dim: int) -> np.ndarray:
    """Stack the Kraus operators moving every listed mode to |L>."""
    transfers = _transfer_ops()
    if dim == MODE_DIM:
        if modes != (Mode.FIRST,):
            raise InvalidInput(f"a single-mode state has no mode {modes}")
        return stack_operators(transfers)

    first = transfers if Mode.FIRST in modes else (identity(),)
    second = transfers if Mode.SECOND in modes else (identity(),)
    return stack_operators([kron(a, b) for a, b in product(first, second)])


def _normalize_modes(modes: Sequence[Mode]) -> tuple[Mode, ...]:
    try:
        normalized = tuple(sorted({Mode(mode) for mode in modes}))
    except ValueError as err:
        raise InvalidInput(f"invalid mode index in {modes}") from err
    if not normalized:
        raise InvalidInput("gate loss needs at least one mode")
    return normalized


# Channels on raw entries


def gate_loss_entries(
    entries: np.ndarray, p_loss: float, modes: tuple[Mode, ...]
) -> np.ndarray:
    """Apply gate loss to raw entries."""
    if p_loss == 0:
        return entries
    lost = apply_kraus(entries, _full_loss_stack(modes, entries.shape[0]))
    return (1 - p_loss) * entries + p_loss * lost


def x_gate_entries(
    entries: np.ndarray, p_x: float, p_xloss: float, mode: Mode = Mode.FIRST
) -> np.ndarray:
    """Apply the noisy X gate to raw entries."""
    ops = x_gate_kraus(float(p_x))
    if entries.shape[0] == REGISTER_DIM:
        ops = tuple(lift_to_modes(op, mode) for op in ops)
    elif mode != Mode.FIRST:
        raise InvalidInput(f"a single-mode state has no mode {mode}")
    rotated = apply_kraus(entries, stack_operators(ops))
    return gate_loss_entries(rotated, p_xloss, (Mode(mode),))


def cnot_entries(
    entries: np.ndarray,
    p_c: float,
    p_closs: float,
    closs_dist: Sequence[float],
) -> np.ndarray:
    """Apply the noisy CNOT (mode 1 controls mode 2) to raw entries."""
    if entries.shape[0] != REGISTER_DIM:
        raise InvalidInput(f"the CNOT needs a two-mode state, got dim {entries.shape[0]}")
    rotated = apply_kraus(entries, stack_operators(cnot_kraus(float(p_c))))
    if p_closs == 0:
        return rotated
    lost = np.zeros_like(rotated)
    for weight, modes in zip(
        closs_dist, ((Mode.FIRST,), (Mode.SECOND,), (Mode.FIRST, Mode.SECOND))
    ):
        if weight:
            lost += weight * apply_kraus(rotated, _full_loss_stack(modes, REGISTER_DIM))
    return (1 - p_closs) * rotated + p_closs * lost


def detector_branches(
    entries: np.ndarray, mode: Mode, p_dloss: float, p_dflip: float
) -> dict[Outcome, np.ndarray]:
    """Return the unnormalized branch states of a detector on one mode.

    A flipped record keeps the projected state; a detector-lost qubit is
    projected and then reported as no click.
    """
    projectors = [basis_projector(level) for level in Level]
    if entries.shape[0] == REGISTER_DIM:
        projectors = [lift_to_modes(proj, mode) for proj in projectors]
    elif mode != Mode.FIRST:
        raise InvalidInput(f"a single-mode state has no mode {mode}")
    zero, one, lost = (proj.entries @ entries @ proj.entries for proj in projectors)

    return {
        Outcome.ZERO: (1 - p_dloss) * ((1 - p_dflip) * zero + p_dflip * one),
        Outcome.ONE: (1 - p_dloss) * ((1 - p_dflip) * one + p_dflip * zero),
        Outcome.NO_CLICK: lost + p_dloss * (zero + one),
    }


# Channels on density matrices


def gate_loss_channel(
    rho: DensityMatrix, p_loss: float, modes: Sequence[Mode] = (Mode.FIRST,)
) -> DensityMatrix:
    """Move the listed modes to |L> together with probability p_loss."""
    _check_probability("p_loss", p_loss)
    return DensityMatrix(gate_loss_entries(rho.entries, p_loss, _normalize_modes(modes)))


def x_gate_channel(
    rho: DensityMatrix, p_x: float, p_xloss: float, mode: Mode = Mode.FIRST
) -> DensityMatrix:
    """Apply the noisy X gate followed by gate loss."""
    _check_probability("p_x", p_x)
    _check_probability("p_xloss", p_xloss)
    return DensityMatrix(x_gate_entries(rho.entries, p_x, p_xloss, mode))


def cnot_channel(
    rho: DensityMatrix,
    p_c: float,
    p_closs: float,
    closs_dist: Sequence[float] = DEFAULT_CLOSS_DIST,
) -> DensityMatrix:
    """Apply the correlated Pauli CNOT channel followed by gate loss."""
    _check_probability("p_c", p_c)
    _check_probability("p_closs", p_closs)
    if len(closs_dist) != 3 or abs(sum(closs_dist) - 1) > ALGEBRA_TOLERANCE:
        raise InvalidParameters("closs_dist", f"not a distribution: {closs_dist}")
    return DensityMatrix(cnot_entries(rho.entries, p_c, p_closs, closs_dist))


def detector_measure(
    rho: DensityMatrix, mode: Mode, p_dloss: float, p_dflip: float
) -> list[DetectorBranch]:
    """Read one mode out with a lossy, flipping detector."""
    _check_probability("p_dloss", p_dloss)
    _check_probability("p_dflip", p_dflip)

    result = []
    for outcome, entries in detector_branches(rho.entries, mode, p_dloss, p_dflip).items():
        probability = float(np.trace(entries).real)
        if probability <= IMPOSSIBLE_BRANCH:
            continue
        result.append(
            DetectorBranch(
                outcome, min(probability, 1.0), DensityMatrix(entries / probability)
            )
        )
    return result


# Compiled readout rounds


@dataclass(frozen=True, eq=False)
class ReadoutChain:
    """Transfer maps of one readout round and of the X gate.

    Operates on the measured qubit's 3x3 state flattened row by row. A round
    prepares an ancilla, runs the noisy CNOT, reads the ancilla out and traces
    it away, so each outcome map returns the unnormalized branch state.
    """

    round_maps: Mapping[Outcome, np.ndarray]
    x_map: np.ndarray

    @classmethod
    def for_params(cls, params: ErrorParams) -> "ReadoutChain":
        """Return the cached chain for the gate and detector part of params."""
        return _compile_chain(
            replace(params, k1=DEFAULT_K1, alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA)
        )

    @staticmethod
    def initial_vector(params: ErrorParams) -> np.ndarray:
        """Return the flattened state of the measured qubit."""
        return prepare_measured_qubit(params).entries.reshape(-1).copy()

    @staticmethod
    def probability(vector: np.ndarray) -> float:
        """Return the trace of a flattened unnormalized state."""
        return max(float((vector[0] + vector[4] + vector[8]).real), 0.0)

    def measure_round(self, vector: np.ndarray) -> dict[Outcome, np.ndarray]:
        """Run one round and split the state by detector outcome."""
        return {outcome: matrix @ vector for outcome, matrix in self.round_maps.items()}

    def flip(self, vector: np.ndarray) -> np.ndarray:
        """Apply the noisy X gate."""
        return self.x_map @ vector


@lru_cache(maxsize=128)
def _compile_chain(params: ErrorParams) -> ReadoutChain:
    ancilla = prepare_ancilla(params).entries

    def round_map(outcome: Outcome):
        def apply(measured: np.ndarray) -> np.ndarray:
            register = cnot_entries(
                np.kron(measured, ancilla), params.p_c, params.p_closs, params.closs_dist
            )
            branch = detector_branches(
                register, Mode.SECOND, params.p_dloss, params.p_dflip
            )[outcome]
            return partial_trace_entries(branch, Mode.FIRST)

        return apply

    round_maps = {outcome: transfer_matrix(round_map(outcome)) for outcome in Outcome}
    x_map = transfer_matrix(
        lambda measured: x_gate_entries(measured, params.p_x, params.p_xloss)
    )
    _LOGGER.debug("Compiled readout chain for %s", params)
    return ReadoutChain(MappingProxyType(round_maps), x_map)
