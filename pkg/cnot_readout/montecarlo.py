"""Monte Carlo oracle for the readout schemes.

All Kraus operators of the error model map basis states onto basis states and
the detectors are diagonal, so the level populations of the two modes follow
a classical Markov chain. Each trajectory therefore carries one level per
mode and samples the Kraus index, the gate loss and the detector record.
"""

import logging

import numpy as np

from .base.channels import CNOT_PAULI_PAIRS, ErrorParams
from .const import (
    CONCLUSION_ORDER,
    DEFAULT_SEED,
    LOSS_DETECTING_SCHEMES,
    SHARD_SIZE,
    VOTE_SCHEMES,
    Conclusion,
    Level,
    Outcome,
    Scheme,
)
from .exceptions import InvalidParameters
from .schemes import ConclusionDistribution, SchemeSpec, vote_sign
from .util import fan_out

_LOGGER = logging.getLogger(__name__)

# Whether I, X, Y, Z flip the qubit value
PAULI_FLIPS = np.array([False, True, True, False])
# sigma_x K_i for K_i = I, X, Y, Z
X_GATE_FLIPS = ~PAULI_FLIPS
CNOT_CONTROL_FLIPS = np.array(
    [False] + [PAULI_FLIPS[control] for control, _ in CNOT_PAULI_PAIRS]
)
CNOT_TARGET_FLIPS = np.array(
    [False] + [PAULI_FLIPS[target] for _, target in CNOT_PAULI_PAIRS]
)
VOTE_VALUES = np.array([1, -1, 0])

ZERO_INDEX = CONCLUSION_ORDER.index(Conclusion.ZERO)
ONE_INDEX = CONCLUSION_ORDER.index(Conclusion.ONE)
LOSS_INDEX = CONCLUSION_ORDER.index(Conclusion.LOSS)
MIXED_INDEX = CONCLUSION_ORDER.index(Conclusion.MIXED)


def _sample(rng: np.random.Generator, probabilities, size: int) -> np.ndarray:
    cumulative = np.cumsum(probabilities)
    picks = np.searchsorted(cumulative, rng.random(size) * cumulative[-1], side="right")
    return np.minimum(picks, len(cumulative) - 1)


def _flip(levels: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask & (levels != Level.LOST), 1 - levels, levels)


def _detect(
    rng: np.random.Generator, ancilla: np.ndarray, params: ErrorParams
) -> np.ndarray:
    size = ancilla.size
    dropped = rng.random(size) < params.p_dloss
    flipped = rng.random(size) < params.p_dflip
    value = np.where(flipped, 1 - ancilla, ancilla)
    return np.where((ancilla != Level.LOST) & ~dropped, value, Outcome.NO_CLICK)


def _noisy_round(
    rng: np.random.Generator, level: np.ndarray, params: ErrorParams
) -> tuple[np.ndarray, np.ndarray]:
    """Prepare an ancilla, run the noisy CNOT and read the ancilla."""
    size = level.size
    ancilla = _sample(
        rng, [params.k2 * params.p0, params.k2 * (1 - params.p0), 1 - params.k2], size
    )

    error = rng.random(size) < params.p_c
    kraus = np.where(error, rng.integers(1, 16, size=size), 0)
    level = _flip(level, CNOT_CONTROL_FLIPS[kraus])
    ancilla = _flip(ancilla, CNOT_TARGET_FLIPS[kraus])
    ancilla = _flip(ancilla, level == Level.ONE)

    lost = rng.random(size) < params.p_closs
    which = _sample(rng, params.closs_dist, size)
    level = np.where(lost & (which != 1), Level.LOST, level)
    ancilla = np.where(lost & (which != 0), Level.LOST, ancilla)

    return level, _detect(rng, ancilla, params)


def _noisy_x(
    rng: np.random.Generator, level: np.ndarray, params: ErrorParams, mask: np.ndarray
) -> np.ndarray:
    """Apply the noisy X gate to the masked trajectories."""
    size = level.size
    error = rng.random(size) < params.p_x
    kraus = np.where(error, rng.integers(1, 4, size=size), 0)
    level = np.where(mask, _flip(level, X_GATE_FLIPS[kraus]), level)
    lost = rng.random(size) < params.p_xloss
    return np.where(mask & lost, Level.LOST, level)


def _run_shard(task: tuple[SchemeSpec, ErrorParams, int, np.random.SeedSequence]):
    """Return conclusion counts, summed CNOT count and readout count."""
    spec, params, trials, seed = task
    rng = np.random.default_rng(seed)
    level = _sample(
        rng,
        [
            params.k1 * abs(params.alpha) ** 2,
            params.k1 * abs(params.beta) ** 2,
            1 - params.k1,
        ],
        trials,
    )

    active = np.ones(trials, dtype=bool)
    verdict = np.full(trials, -1)
    tally = np.zeros(trials, dtype=int)
    clicks = np.zeros(trials, dtype=int)
    first = np.full(trials, int(Outcome.NO_CLICK))
    positions = spec.x_positions
    gates = 0

    for index in range(spec.n_detectors):
        gates += int(active.sum())
        level, outcome = _noisy_round(rng, level, params)
        clicked_now = active & (outcome != Outcome.NO_CLICK)

        if spec.scheme in VOTE_SCHEMES:
            tally += vote_sign(index, positions) * VOTE_VALUES[outcome]
            clicks += clicked_now
            if index in positions:
                level = _noisy_x(rng, level, params, active)
        elif spec.scheme == Scheme.S4:
            verdict = np.where(clicked_now, outcome, verdict)
            active &= ~clicked_now
        else:
            second = clicked_now & (clicks == 1)
            firsts = clicked_now & (clicks == 0)
            verdict = np.where(
                second, np.where(first == outcome, LOSS_INDEX, first), verdict
            )
            first = np.where(firsts, outcome, first)
            clicks += clicked_now
            active &= ~second
            level = _noisy_x(rng, level, params, firsts)

    if spec.scheme in VOTE_SCHEMES:
        undecided = LOSS_INDEX if spec.scheme in LOSS_DETECTING_SCHEMES else MIXED_INDEX
        theta = spec.loss_interval
        verdict = np.where(
            tally > theta, ZERO_INDEX, np.where(tally < -theta, ONE_INDEX, undecided)
        )
        readout = int((clicks > 0).sum())
    elif spec.scheme == Scheme.S4:
        readout = int((~active).sum())
        verdict = np.where(active, MIXED_INDEX, verdict)
    else:
        readout = int((~active).sum())
        verdict = np.where(active, LOSS_INDEX, verdict)

    counts = np.bincount(verdict, minlength=len(CONCLUSION_ORDER))
    return np.concatenate([counts, [gates, readout]]).astype(float)


def monte_carlo_run(
    spec: SchemeSpec,
    params: ErrorParams,
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> ConclusionDistribution:
    """Estimate the conclusion distribution by sampling trajectories.

    Trials are split into fixed-size shards seeded from the master seed, so
    the result does not depend on the number of workers.
    """
    if trials < 1:
        raise InvalidParameters("trials", "at least one trial is needed")

    sizes = [SHARD_SIZE] * (trials // SHARD_SIZE)
    if trials % SHARD_SIZE:
        sizes.append(trials % SHARD_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    _LOGGER.debug(
        "%s: sampling %d trials in %d shards (seed %d)", spec, trials, len(sizes), seed
    )

    shards = fan_out(
        _run_shard,
        [(spec, params, size, child) for size, child in zip(sizes, seeds)],
        workers,
    )
    total = np.sum(shards, axis=0)
    frequencies = total[: len(CONCLUSION_ORDER)] / trials
    return ConclusionDistribution.from_totals(
        dict(zip(CONCLUSION_ORDER, frequencies.tolist())),
        params,
        total[-2] / trials,
        total[-1] / trials,
    )
