"""Constants for CNOT readout."""

from enum import IntEnum, StrEnum

import voluptuous as vol

DOMAIN = "cnot_readout"

# Numerical tolerances
ALGEBRA_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
DISTRIBUTION_TOLERANCE = 1e-9
IMPOSSIBLE_BRANCH = 1e-15

# Branch tree limits
MAX_DETECTORS = 20
MAX_RECORDED_DETECTORS = 10

SIGNIFICANT_DIGITS = 12
SHARD_SIZE = 50_000


class Mode(IntEnum):
    """Position of a mode in the two-mode register."""

    FIRST = 1
    SECOND = 2


class Level(IntEnum):
    """Basis level of a three-level mode."""

    ZERO = 0
    ONE = 1
    LOST = 2


class Outcome(IntEnum):
    """Record produced by a detector."""

    ZERO = 0
    ONE = 1
    NO_CLICK = 2


CLICKS = (Outcome.ZERO, Outcome.ONE)


class Conclusion(StrEnum):
    """Decoded verdict about the measured qubit."""

    ZERO = "zero"
    ONE = "one"
    LOSS = "loss"
    MIXED = "mixed"


CONCLUSION_ORDER = (Conclusion.ZERO, Conclusion.ONE, Conclusion.LOSS, Conclusion.MIXED)


class Scheme(IntEnum):
    """CNOT chain readout schemes."""

    S1 = 1  # majority vote
    S2 = 2  # majority vote, X after every CNOT
    S3 = 3  # majority vote, one X halfway
    S4 = 4  # first click
    S5 = 5  # first click, X, second click


VOTE_SCHEMES = (Scheme.S1, Scheme.S2, Scheme.S3)
LOSS_DETECTING_SCHEMES = (Scheme.S2, Scheme.S3, Scheme.S5)


class Subcommand(StrEnum):
    """Command line subcommands."""

    SIMULATE = "simulate"
    SWEEP = "sweep"
    CROSSOVER = "crossover"
    FIT = "fit"
    ANALYTIC = "analytic"


class Preset(StrEnum):
    """Bundled parameter sets."""

    DETECTORS = "detectors"
    LOSS = "loss"
    CROSSOVER = "crossover"


class StudyKind(StrEnum):
    """Kind of sweep a plot script is generated for."""

    DETECTOR_COUNT = "detector_count"
    PRESENCE = "presence"
    GENERIC = "generic"


# Pauli labels in Kraus order
PAULI_LABELS = ("I", "X", "Y", "Z")

# Fraction of two-mode Pauli errors invisible to the ancilla readout
Z_ERROR_FRACTION = 7 / 15

# Error parameter options
CONF_K1, DEFAULT_K1 = "k1", 1.0
CONF_K2, DEFAULT_K2 = "k2", 1.0
CONF_P0, DEFAULT_P0 = "p0", 1.0
CONF_ALPHA, DEFAULT_ALPHA = "alpha", 0j
CONF_BETA, DEFAULT_BETA = "beta", 1 + 0j
CONF_P_X, DEFAULT_P_X = "p_x", 0.0
CONF_P_C, DEFAULT_P_C = "p_c", 0.0
CONF_P_XLOSS, DEFAULT_P_XLOSS = "p_xloss", 0.0
CONF_P_CLOSS, DEFAULT_P_CLOSS = "p_closs", 0.0
CONF_CLOSS_DIST, DEFAULT_CLOSS_DIST = "closs_dist", (0.5, 0.5, 0.0)
CONF_P_DLOSS, DEFAULT_P_DLOSS = "p_dloss", 0.0
CONF_P_DFLIP, DEFAULT_P_DFLIP = "p_dflip", 0.0

ERROR_PARAM_KEYS = (
    CONF_K1,
    CONF_K2,
    CONF_P0,
    CONF_ALPHA,
    CONF_BETA,
    CONF_P_X,
    CONF_P_C,
    CONF_P_XLOSS,
    CONF_P_CLOSS,
    CONF_CLOSS_DIST,
    CONF_P_DLOSS,
    CONF_P_DFLIP,
)

# Scheme options
CONF_SCHEME, DEFAULT_SCHEME = "scheme", Scheme.S4
CONF_N_DETECTORS, DEFAULT_N_DETECTORS = "n_detectors", 4
CONF_LOSS_INTERVAL, DEFAULT_LOSS_INTERVAL = "loss_interval", 0

# Sweep options
CONF_AXIS, DEFAULT_AXIS = "axis", CONF_N_DETECTORS
CONF_FROM, DEFAULT_FROM = "from", 2.0
CONF_TO, DEFAULT_TO = "to", 10.0
CONF_STEPS, DEFAULT_STEPS = "steps", 9
CONF_SCHEMES, DEFAULT_SCHEMES = "schemes", tuple(Scheme)

SWEEP_AXES = (
    CONF_K1,
    CONF_K2,
    CONF_P0,
    CONF_P_X,
    CONF_P_C,
    CONF_P_XLOSS,
    CONF_P_CLOSS,
    CONF_P_DLOSS,
    CONF_P_DFLIP,
    CONF_N_DETECTORS,
)

# Run options
CONF_SEED, DEFAULT_SEED = "seed", 42
CONF_TRIALS, DEFAULT_TRIALS = "trials", 0  # 0 means exact evolution
CONF_WORKERS, DEFAULT_WORKERS = "workers", 1
CONF_OUTPUT = "output"
CONF_EMIT_PLOT, DEFAULT_EMIT_PLOT = "emit_plot", False
CONF_PRESET = "preset"
CONF_FIT_POINTS, DEFAULT_FIT_POINTS = "fit_points", 8
CONF_VERBOSE, DEFAULT_VERBOSE = "verbose", False

# Statistical model options
CONF_DETECTION_PROBABILITY, DEFAULT_DETECTION_PROBABILITY = (
    "detection_probability",
    0.9,
)
CONF_MEASUREMENTS, DEFAULT_MEASUREMENTS = "measurements", 4
CONF_ANCILLA_PRESENCE, DEFAULT_ANCILLA_PRESENCE = "ancilla_presence", 1.0
CONF_DETECTOR_WORKING, DEFAULT_DETECTOR_WORKING = "detector_working", 0.9
CONF_CNOT_ERROR_FREE, DEFAULT_CNOT_ERROR_FREE = "cnot_error_free", 0.999
CONF_Z_ERROR_FRACTION, DEFAULT_Z_ERROR_FRACTION = (
    "z_error_fraction",
    Z_ERROR_FRACTION,
)
CONF_ETA, DEFAULT_ETA = "eta", 0.9
CONF_EPSILON, DEFAULT_EPSILON = "epsilon", 1.0
CONF_ZETA, DEFAULT_ZETA = "zeta", 0.999

STAT_PARAM_KEYS = (
    CONF_DETECTION_PROBABILITY,
    CONF_MEASUREMENTS,
    CONF_ANCILLA_PRESENCE,
    CONF_DETECTOR_WORKING,
    CONF_CNOT_ERROR_FREE,
    CONF_Z_ERROR_FRACTION,
    CONF_ETA,
    CONF_EPSILON,
    CONF_ZETA,
)

# Crossover solver
CROSSOVER_N_DETECTORS = 4
CROSSOVER_K1_TOLERANCE = 1e-6
CROSSOVER_MAX_ITERATIONS = 40
CROSSOVER_SIGN_TOLERANCE = 1e-12
CROSSOVER_MAX_LOSS = 0.2
CROSSOVER_SCAN_OFFSETS = (
    0.0,
    1e-5,
    3e-5,
    1e-4,
    3e-4,
    1e-3,
    3e-3,
    0.01,
    0.03,
    0.1,
    CROSSOVER_MAX_LOSS,
)
CROSSOVER_MAX_P_D = 0.1
CROSSOVER_MAX_P_X = 0.1
CROSSOVER_MAX_P_C = 0.05

# Crossover surface fit ranges (min, max)
FIT_RANGE_P_C = (0.001, 0.05)
FIT_RANGE_P_X = (0.001, 0.1)
FIT_RANGE_P_D = (0.001, 0.1)
FIT_HELD_OUT_TOLERANCE = 1e-4

# Crossover surface basis, bracket = sum(coefficient * term)
SURFACE_TERMS = (
    "p_d^2",
    "p_c*p_d^2",
    "p_x*p_d^2",
    "p_x*p_c*p_d^2",
    "p_d",
    "p_c*p_d",
    "p_x*p_d",
    "p_x*p_c*p_d",
    "1",
    "p_c",
    "p_x",
    "p_x*p_c",
)
PUBLISHED_SURFACE_COEFFICIENTS = (
    0.0128122,
    -0.575681,
    -0.656495,
    3.75622,
    -0.00117864,
    0.198512,
    0.115926,
    -0.496572,
    0.99986,
    -0.203882,
    -0.13992,
    0.41898,
)

# Performance drop study
DROP_ONSET_GATE_ERRORS = (0.0001, 0.0005, 0.002, 0.005)
DROP_ONSET_WINDOW = 5  # gate errors below k1 = 1
DIP_STEP = 1e-4

# Output
CSV_HEADER = (
    "scheme",
    "n_detectors",
    "axis",
    "axis_value",
    "p_zero",
    "p_one",
    "p_loss",
    "p_mixed",
    "fidelity",
    "expected_gates",
)
CROSSOVER_CSV_HEADER = ("p_c", "p_x", "p_d", "p_l", "iterations", "bracket_width")
COEFFICIENTS_CSV_HEADER = ("term", "coefficient")
QUANTITIES_CSV_HEADER = ("quantity", "value")

# Presets

DETECTOR_STUDY_PARAMS = {
    CONF_K1: 1.0,
    CONF_ALPHA: 0j,
    CONF_BETA: 1 + 0j,
    CONF_K2: 0.999,
    CONF_P0: 1.0,
    CONF_P_X: 0.001,
    CONF_P_C: 0.001,
    CONF_P_XLOSS: 0.0,
    CONF_P_CLOSS: 0.0,
    CONF_P_DLOSS: 0.1,
    CONF_P_DFLIP: 0.0,
}

LOSS_STUDY_PARAMS = {
    **DETECTOR_STUDY_PARAMS,
    CONF_P_XLOSS: 0.001,
    CONF_P_CLOSS: 0.001,
}

CROSSOVER_PARAMS = {
    CONF_K1: 1.0,
    CONF_ALPHA: 0j,
    CONF_BETA: 1 + 0j,
    CONF_K2: 1.0,
    CONF_P0: 1.0,
    CONF_P_XLOSS: 0.0,
    CONF_P_CLOSS: 0.0,
    CONF_P_DFLIP: 0.0,
}

PRESETS = {
    Preset.DETECTORS: {
        **DETECTOR_STUDY_PARAMS,
        CONF_AXIS: CONF_N_DETECTORS,
        CONF_FROM: 2.0,
        CONF_TO: 10.0,
        CONF_STEPS: 9,
    },
    Preset.LOSS: {
        **LOSS_STUDY_PARAMS,
        CONF_N_DETECTORS: 4,
        CONF_AXIS: CONF_K1,
        CONF_FROM: 0.99,
        CONF_TO: 1.0,
        CONF_STEPS: 101,
    },
    Preset.CROSSOVER: {
        **CROSSOVER_PARAMS,
        CONF_N_DETECTORS: CROSSOVER_N_DETECTORS,
    },
}


# Validators


def closs_distribution(value):
    """Validate a CNOT loss distribution over (mode 1, mode 2, both)."""
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    try:
        parts = tuple(float(part) for part in value)
    except (TypeError, ValueError) as err:
        raise vol.Invalid(f"expected three comma separated numbers: {err}") from err
    if len(parts) != 3:
        raise vol.Invalid(f"expected three entries, got {len(parts)}")
    if any(part < 0 or part > 1 for part in parts):
        raise vol.Invalid("entries must lie in [0, 1]")
    if abs(sum(parts) - 1) > DISTRIBUTION_TOLERANCE:
        raise vol.Invalid(f"entries must sum to 1, got {sum(parts)}")
    return parts


def scheme_list(value):
    """Validate a list of scheme numbers."""
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    if isinstance(value, int):
        value = [value]
    try:
        schemes = tuple(Scheme(int(part)) for part in value)
    except (TypeError, ValueError) as err:
        raise vol.Invalid(f"expected scheme numbers 1-5: {err}") from err
    if not schemes:
        raise vol.Invalid("at least one scheme is required")
    return schemes


probability = vol.All(vol.Coerce(float), vol.Range(min=0, max=1))
amplitude = vol.Coerce(complex)
positive_int = vol.All(vol.Coerce(int), vol.Range(min=1))
non_negative_int = vol.All(vol.Coerce(int), vol.Range(min=0))


# Config Schema

ERROR_PARAMS_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_K1): probability,
        vol.Required(CONF_K2): probability,
        vol.Required(CONF_P0): probability,
        vol.Required(CONF_ALPHA): amplitude,
        vol.Required(CONF_BETA): amplitude,
        vol.Required(CONF_P_X): probability,
        vol.Required(CONF_P_C): probability,
        vol.Required(CONF_P_XLOSS): probability,
        vol.Required(CONF_P_CLOSS): probability,
        vol.Required(CONF_CLOSS_DIST): closs_distribution,
        vol.Required(CONF_P_DLOSS): probability,
        vol.Required(CONF_P_DFLIP): probability,
    }
)

STAT_PARAMS_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_DETECTION_PROBABILITY): probability,
        vol.Required(CONF_MEASUREMENTS): positive_int,
        vol.Required(CONF_ANCILLA_PRESENCE): probability,
        vol.Required(CONF_DETECTOR_WORKING): probability,
        vol.Required(CONF_CNOT_ERROR_FREE): probability,
        vol.Required(CONF_Z_ERROR_FRACTION): probability,
        vol.Required(CONF_ETA): probability,
        vol.Required(CONF_EPSILON): probability,
        vol.Required(CONF_ZETA): probability,
    }
)

CROSSOVER_BOX_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_P_C): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=CROSSOVER_MAX_P_C)
        ),
        vol.Required(CONF_P_X): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=CROSSOVER_MAX_P_X)
        ),
        vol.Required(CONF_P_DLOSS): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=CROSSOVER_MAX_P_D)
        ),
    }
)

RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_K1, default=DEFAULT_K1): probability,
        vol.Optional(CONF_K2, default=DEFAULT_K2): probability,
        vol.Optional(CONF_P0, default=DEFAULT_P0): probability,
        vol.Optional(CONF_ALPHA, default=DEFAULT_ALPHA): amplitude,
        vol.Optional(CONF_BETA, default=DEFAULT_BETA): amplitude,
        vol.Optional(CONF_P_X, default=DEFAULT_P_X): probability,
        vol.Optional(CONF_P_C, default=DEFAULT_P_C): probability,
        vol.Optional(CONF_P_XLOSS, default=DEFAULT_P_XLOSS): probability,
        vol.Optional(CONF_P_CLOSS, default=DEFAULT_P_CLOSS): probability,
        vol.Optional(CONF_CLOSS_DIST, default=DEFAULT_CLOSS_DIST): closs_distribution,
        vol.Optional(CONF_P_DLOSS, default=DEFAULT_P_DLOSS): probability,
        vol.Optional(CONF_P_DFLIP, default=DEFAULT_P_DFLIP): probability,
        vol.Optional(CONF_SCHEME, default=DEFAULT_SCHEME): vol.All(
            vol.Coerce(int), vol.Coerce(Scheme)
        ),
        vol.Optional(CONF_N_DETECTORS, default=DEFAULT_N_DETECTORS): vol.All(
            vol.Coerce(int), vol.Range(min=1, max=MAX_DETECTORS)
        ),
        vol.Optional(
            CONF_LOSS_INTERVAL, default=DEFAULT_LOSS_INTERVAL
        ): non_negative_int,
        vol.Optional(CONF_AXIS, default=DEFAULT_AXIS): vol.In(SWEEP_AXES),
        vol.Optional(CONF_FROM, default=DEFAULT_FROM): vol.Coerce(float),
        vol.Optional(CONF_TO, default=DEFAULT_TO): vol.Coerce(float),
        vol.Optional(CONF_STEPS, default=DEFAULT_STEPS): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_SCHEMES, default=DEFAULT_SCHEMES): scheme_list,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): non_negative_int,
        vol.Optional(CONF_TRIALS, default=DEFAULT_TRIALS): non_negative_int,
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): positive_int,
        vol.Optional(CONF_OUTPUT): vol.Any(None, str),
        vol.Optional(CONF_EMIT_PLOT, default=DEFAULT_EMIT_PLOT): vol.Boolean(),
        vol.Optional(CONF_PRESET): vol.Any(None, vol.Coerce(Preset)),
        vol.Optional(CONF_FIT_POINTS, default=DEFAULT_FIT_POINTS): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_VERBOSE, default=DEFAULT_VERBOSE): vol.Boolean(),
        vol.Optional(
            CONF_DETECTION_PROBABILITY, default=DEFAULT_DETECTION_PROBABILITY
        ): probability,
        vol.Optional(CONF_MEASUREMENTS, default=DEFAULT_MEASUREMENTS): positive_int,
        vol.Optional(
            CONF_ANCILLA_PRESENCE, default=DEFAULT_ANCILLA_PRESENCE
        ): probability,
        vol.Optional(
            CONF_DETECTOR_WORKING, default=DEFAULT_DETECTOR_WORKING
        ): probability,
        vol.Optional(
            CONF_CNOT_ERROR_FREE, default=DEFAULT_CNOT_ERROR_FREE
        ): probability,
        vol.Optional(
            CONF_Z_ERROR_FRACTION, default=DEFAULT_Z_ERROR_FRACTION
        ): probability,
        vol.Optional(CONF_ETA, default=DEFAULT_ETA): probability,
        vol.Optional(CONF_EPSILON, default=DEFAULT_EPSILON): probability,
        vol.Optional(CONF_ZETA, default=DEFAULT_ZETA): probability,
    },
    extra=vol.PREVENT_EXTRA,
)
