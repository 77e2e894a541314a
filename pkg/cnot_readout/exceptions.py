"""Exceptions raised by the readout simulator."""


class ReadoutError(Exception):
    """Base class for all errors raised by cnot_readout."""


class InvalidInput(ReadoutError, ValueError):
    """An algebra operation received operands it cannot act on."""


class InvalidParameters(ReadoutError, ValueError):
    """A parameter set or scheme description violates its invariants."""

    def __init__(self, field: str, message: str) -> None:
        """Initialize with the offending field name."""
        super().__init__(f"{field}: {message}")
        self.field = field


class BranchOverflowError(ReadoutError):
    """The requested detector chain would overflow the branch tree."""


class RankDeficientError(ReadoutError):
    """A least-squares design matrix does not determine every coefficient."""

    def __init__(self, rank: int, columns: int, condition_number: float) -> None:
        """Initialize with conditioning diagnostics."""
        super().__init__(
            f"design matrix has rank {rank} for {columns} terms "
            f"(condition number {condition_number:.3e})"
        )
        self.rank = rank
        self.columns = columns
        self.condition_number = condition_number


class ConfigError(ReadoutError):
    """A configuration key or value could not be accepted."""

    def __init__(self, key: str, message: str) -> None:
        """Initialize with the offending configuration key."""
        super().__init__(f"{key}: {message}")
        self.key = key


class OutputFormatError(ReadoutError):
    """A results file does not have the expected layout."""
