"""Dense linear algebra over three-level modes.

Every mode carries the basis {|0>, |1>, |L>}; a register holds one or two
modes and two-mode operators are laid out as mode 1 (x) mode 2.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..const import (
    ALGEBRA_TOLERANCE,
    DISTRIBUTION_TOLERANCE,
    IMPOSSIBLE_BRANCH,
    TRACE_TOLERANCE,
    Level,
    Mode,
)
from ..exceptions import InvalidInput


MODE_DIM = 3
REGISTER_DIM = MODE_DIM * MODE_DIM

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULIS = (IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z)


def _frozen(entries) -> np.ndarray:
    array = np.array(entries, dtype=complex)
    array.setflags(write=False)
    return array


def _check_square(entries: np.ndarray) -> int:
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {entries.shape}")
    dim = entries.shape[0]
    if dim not in (MODE_DIM, REGISTER_DIM):
        raise InvalidInput(f"expected dimension 3 or 9, got {dim}")
    return dim


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """State of one or two three-level modes."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        """Freeze the entries and check the shape."""
        entries = _frozen(self.entries)
        _check_square(entries)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        """Return the matrix dimension."""
        return self.entries.shape[0]

    @property
    def mode_count(self) -> int:
        """Return the number of modes in the register."""
        return 1 if self.dim == MODE_DIM else 2

    @property
    def trace(self) -> float:
        """Return the real part of the trace."""
        return float(np.trace(self.entries).real)

    @classmethod
    def from_ket(cls, ket: Sequence[complex]) -> "DensityMatrix":
        """Build the pure state |ket><ket|."""
        vector = np.asarray(ket, dtype=complex)
        return cls(np.outer(vector, vector.conj()))

    @classmethod
    def from_populations(cls, populations: Sequence[float]) -> "DensityMatrix":
        """Build a diagonal state."""
        return cls(np.diag(np.asarray(populations, dtype=complex)))

    @classmethod
    def basis(cls, level: Level) -> "DensityMatrix":
        """Return |level><level| on a single mode."""
        ket = np.zeros(MODE_DIM, dtype=complex)
        ket[level] = 1
        return cls.from_ket(ket)

    def populations(self) -> np.ndarray:
        """Return the real diagonal."""
        return np.diag(self.entries).real.copy()

    def allclose(self, other: "DensityMatrix", atol: float = ALGEBRA_TOLERANCE) -> bool:
        """Compare entrywise."""
        return self.dim == other.dim and np.allclose(
            self.entries, other.entries, rtol=0, atol=atol
        )

    def validate(self, normalized: bool = True) -> None:
        """Check hermiticity, trace and positivity."""
        entries = self.entries
        asymmetry = np.max(np.abs(entries - entries.conj().T))
        if asymmetry > ALGEBRA_TOLERANCE:
            raise InvalidInput(f"not Hermitian (max deviation {asymmetry:.3e})")
        if normalized and abs(np.trace(entries) - 1) > TRACE_TOLERANCE:
            raise InvalidInput(f"trace {np.trace(entries)} is not 1")
        smallest = np.min(np.linalg.eigvalsh((entries + entries.conj().T) / 2))
        if smallest < -TRACE_TOLERANCE:
            raise InvalidInput(f"negative eigenvalue {smallest:.3e}")


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Operator on one or two three-level modes."""

    entries: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        """Freeze the entries and check the shape."""
        entries = _frozen(self.entries)
        _check_square(entries)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        """Return the matrix dimension."""
        return self.entries.shape[0]

    @property
    def adjoint(self) -> "ModeOperator":
        """Return the conjugate transpose."""
        return ModeOperator(self.entries.conj().T, f"{self.label}^dag")

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        """Compose two operators."""
        if self.dim != other.dim:
            raise InvalidInput(f"cannot compose dims {self.dim} and {other.dim}")
        return ModeOperator(self.entries @ other.entries, f"{self.label}{other.label}")

    def allclose(self, other: "ModeOperator", atol: float = ALGEBRA_TOLERANCE) -> bool:
        """Compare entrywise."""
        return self.dim == other.dim and np.allclose(
            self.entries, other.entries, rtol=0, atol=atol
        )

    def is_projector(self) -> bool:
        """Check P @ P == P within tolerance."""
        return np.allclose(
            self.entries @ self.entries, self.entries, rtol=0, atol=ALGEBRA_TOLERANCE
        )


def identity(dim: int = MODE_DIM) -> ModeOperator:
    """Return the identity on one or two modes."""
    return ModeOperator(np.eye(dim, dtype=complex), "I")


def kron(
    a: DensityMatrix | ModeOperator, b: DensityMatrix | ModeOperator
) -> DensityMatrix | ModeOperator:
    """Tensor two single-mode objects into a two-mode one, mode 1 first."""
    if a.dim != MODE_DIM or b.dim != MODE_DIM:
        raise InvalidInput(f"kron expects two single modes, got {a.dim} and {b.dim}")
    entries = np.kron(a.entries, b.entries)
    if isinstance(a, ModeOperator) and isinstance(b, ModeOperator):
        return ModeOperator(entries, f"{a.label}(x){b.label}")
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(entries)
    raise InvalidInput("kron operands must have the same type")


def embed_qubit_op(op, label: str = "") -> ModeOperator:
    """Embed a 2x2 qubit operator, acting as identity on |L>."""
    qubit = np.asarray(op, dtype=complex)
    if qubit.shape != (2, 2):
        raise InvalidInput(f"expected a 2x2 operator, got shape {qubit.shape}")
    entries = np.zeros((MODE_DIM, MODE_DIM), dtype=complex)
    entries[:2, :2] = qubit
    entries[Level.LOST, Level.LOST] = 1
    return ModeOperator(entries, label)


def embedded_paulis() -> tuple[ModeOperator, ...]:
    """Return I, X, Y, Z embedded on a three-level mode."""
    return tuple(
        embed_qubit_op(pauli, label) for pauli, label in zip(PAULIS, "IXYZ")
    )


def lift_to_modes(op: ModeOperator, mode: Mode) -> ModeOperator:
    """Lift a single-mode operator onto the two-mode register."""
    if op.dim != MODE_DIM:
        raise InvalidInput(f"expected a single-mode operator, got dim {op.dim}")
    try:
        mode = Mode(mode)
    except ValueError as err:
        raise InvalidInput(f"invalid mode index {mode}") from err
    match mode:
        case Mode.FIRST:
            return kron(op, identity())
        case Mode.SECOND:
            return kron(identity(), op)


def partial_trace_entries(entries: np.ndarray, keep: Mode) -> np.ndarray:
    """Partial trace on raw 9x9 entries."""
    tensor = entries.reshape(MODE_DIM, MODE_DIM, MODE_DIM, MODE_DIM)
    if keep == Mode.FIRST:
        return np.einsum("ijkj->ik", tensor)
    return np.einsum("ijil->jl", tensor)


def partial_trace(rho: DensityMatrix, keep: Mode) -> DensityMatrix:
    """Trace out the mode that is not kept."""
    if rho.dim != REGISTER_DIM:
        raise InvalidInput(f"partial trace needs a two-mode state, got dim {rho.dim}")
    try:
        keep = Mode(keep)
    except ValueError as err:
        raise InvalidInput(f"invalid mode index {keep}") from err
    return DensityMatrix(partial_trace_entries(rho.entries, keep))


def basis_projector(level: Level) -> ModeOperator:
    """Return |level><level| on a single mode."""
    entries = np.zeros((MODE_DIM, MODE_DIM), dtype=complex)
    entries[level, level] = 1
    return ModeOperator(entries, f"P{Level(level).name}")


def project(
    rho: DensityMatrix, proj: ModeOperator, mode: Mode = Mode.FIRST
) -> tuple[float, DensityMatrix | None]:
    """Project one mode and renormalize.

    Returns the branch probability and the post-measurement state, or
    ``(0.0, None)`` when the branch is impossible.
    """
    if not proj.is_projector():
        raise InvalidInput(f"{proj.label or 'operator'} is not a projector")
    if proj.dim == MODE_DIM and rho.dim == REGISTER_DIM:
        proj = lift_to_modes(proj, mode)
    if proj.dim != rho.dim:
        raise InvalidInput(f"cannot project dim {rho.dim} with dim {proj.dim}")

    projected = proj.entries @ rho.entries @ proj.entries
    probability = float(np.trace(projected).real)
    if probability < -ALGEBRA_TOLERANCE or probability > 1 + ALGEBRA_TOLERANCE:
        raise InvalidInput(f"projection probability {probability} out of range")
    probability = min(max(probability, 0.0), 1.0)
    if probability <= IMPOSSIBLE_BRANCH:
        return 0.0, None
    return probability, DensityMatrix(projected / probability)


def apply_kraus(entries: np.ndarray, kraus: np.ndarray) -> np.ndarray:
    """Return sum_k A_k rho A_k^dag for a stacked Kraus array."""
    return np.einsum("kab,bc,kdc->ad", kraus, entries, kraus.conj())


def stack_operators(ops: Sequence[ModeOperator]) -> np.ndarray:
    """Stack operators into a (k, d, d) array."""
    return np.stack([op.entries for op in ops])


def kraus_completeness(ops: Sequence[ModeOperator]) -> np.ndarray:
    """Return sum_k A_k^dag A_k."""
    stacked = stack_operators(ops)
    return np.einsum("kba,kbc->ac", stacked.conj(), stacked)


def transfer_matrix(
    channel: Callable[[np.ndarray], np.ndarray], dim: int = MODE_DIM
) -> np.ndarray:
    """Build the row-major transfer matrix of a linear map on dim x dim inputs.

    Column ``dim * a + b`` holds the image of |a><b| flattened row by row.
    """
    columns = []
    for index in range(dim * dim):
        unit = np.zeros(dim * dim, dtype=complex)
        unit[index] = 1
        columns.append(np.asarray(channel(unit.reshape(dim, dim))).reshape(-1))
    return np.stack(columns, axis=1)


def classical_fidelity(p: Sequence[float], q: Sequence[float]) -> float:
    """Return (sum_i sqrt(p_i q_i))^2 for two probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise InvalidInput(f"mismatched distributions {p.shape} and {q.shape}")
    for name, vector in (("p", p), ("q", q)):
        if np.any(vector < -ALGEBRA_TOLERANCE):
            raise InvalidInput(f"{name} has negative entries")
        if abs(vector.sum() - 1) > DISTRIBUTION_TOLERANCE:
            raise InvalidInput(f"{name} sums to {vector.sum()}, not 1")
    overlap = np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None)))
    return float(min(overlap**2, 1.0))
