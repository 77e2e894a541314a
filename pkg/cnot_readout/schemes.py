"""CNOT chain readout schemes.

Scheme 1 takes a majority vote over n ancilla readings, scheme 2 adds an X
gate on the measured qubit after every CNOT and scheme 3 a single X gate
halfway. Scheme 4 stops at the first click, and scheme 5 flips the qubit
after the first click and compares it with the second.
"""

from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
import logging

import numpy as np

from .base.channels import ErrorParams, ReadoutChain
from .base.qutrit import classical_fidelity
from .const import (
    CLICKS,
    CONCLUSION_ORDER,
    DEFAULT_LOSS_INTERVAL,
    DISTRIBUTION_TOLERANCE,
    IMPOSSIBLE_BRANCH,
    LOSS_DETECTING_SCHEMES,
    MAX_DETECTORS,
    MAX_RECORDED_DETECTORS,
    VOTE_SCHEMES,
    Conclusion,
    Outcome,
    Scheme,
)
from .exceptions import BranchOverflowError, InvalidParameters

_LOGGER = logging.getLogger(__name__)

VOTES = {Outcome.ZERO: 1, Outcome.ONE: -1, Outcome.NO_CLICK: 0}


@dataclass(frozen=True)
class SchemeSpec:
    """A scheme, its detector budget and its loss interval."""

    scheme: Scheme
    n_detectors: int
    loss_interval: int = DEFAULT_LOSS_INTERVAL

    def __post_init__(self) -> None:
        """Validate the detector budget."""
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError as err:
            raise InvalidParameters("scheme", f"unknown scheme {self.scheme}") from err
        if self.n_detectors < 1:
            raise InvalidParameters("n_detectors", "at least one detector is needed")
        if self.n_detectors > MAX_DETECTORS:
            raise BranchOverflowError(
                f"{self.n_detectors} detectors exceed the limit of {MAX_DETECTORS}"
            )
        if self.scheme == Scheme.S3 and self.n_detectors % 2:
            raise InvalidParameters(
                "n_detectors", "scheme 3 needs an even number of detectors"
            )
        if self.loss_interval < 0:
            raise InvalidParameters("loss_interval", "must be non-negative")

    @property
    def x_positions(self) -> frozenset[int]:
        """Reading indices after which an X gate fires, for vote schemes."""
        match self.scheme:
            case Scheme.S2:
                return frozenset(range(self.n_detectors - 1))
            case Scheme.S3:
                return frozenset({self.n_detectors // 2 - 1})
        return frozenset()

    @property
    def clicks_needed(self) -> int:
        """Number of clicks the scheme needs to reach a verdict."""
        return 2 if self.scheme == Scheme.S5 else 1


@dataclass(frozen=True)
class OutcomeBranch:
    """One full detector record and its probability."""

    records: tuple[tuple[int, Outcome], ...]
    probability: float
    conclusion: Conclusion

    @property
    def outcomes(self) -> tuple[Outcome, ...]:
        """Return the outcomes without indices."""
        return tuple(outcome for _, outcome in self.records)


@dataclass(frozen=True)
class ConclusionDistribution:
    """Probabilities of every verdict and the resulting fidelity."""

    p_zero: float
    p_one: float
    p_loss: float
    p_mixed: float
    fidelity: float
    expected_gates: float
    p_readout: float = 1.0

    @classmethod
    def from_totals(
        cls,
        totals: dict[Conclusion, float],
        params: ErrorParams,
        expected_gates: float,
        p_readout: float,
    ) -> "ConclusionDistribution":
        """Build from per-conclusion probabilities.

        The fidelity is taken on the renormalized totals; a sum that drifts
        from one is logged.
        """
        probabilities = np.array(
            [max(totals.get(conclusion, 0.0), 0.0) for conclusion in CONCLUSION_ORDER]
        )
        drift = probabilities.sum() - 1
        if abs(drift) > DISTRIBUTION_TOLERANCE:
            _LOGGER.warning(
                "Conclusion probabilities sum to %s, off by %.3g",
                probabilities.sum(),
                drift,
            )
        fidelity = classical_fidelity(
            probabilities / probabilities.sum(), params.ideal_distribution()
        )
        return cls(*probabilities.tolist(), fidelity, expected_gates, p_readout)

    @property
    def total(self) -> float:
        """Return the summed probability."""
        return self.p_zero + self.p_one + self.p_loss + self.p_mixed

    def probability_of(self, conclusion: Conclusion) -> float:
        """Return the probability of one verdict."""
        return {
            Conclusion.ZERO: self.p_zero,
            Conclusion.ONE: self.p_one,
            Conclusion.LOSS: self.p_loss,
            Conclusion.MIXED: self.p_mixed,
        }[conclusion]


# Decoders


def vote_sign(index: int, x_positions: Iterable[int]) -> int:
    """Return the tally sign of a reading, flipped once per earlier X gate."""
    return -1 if sum(1 for position in x_positions if position < index) % 2 else 1


def decode_tally(tally: int, loss_interval: int) -> Conclusion:
    """Map a tally onto zero, one or mixed."""
    if tally > loss_interval:
        return Conclusion.ZERO
    if tally < -loss_interval:
        return Conclusion.ONE
    return Conclusion.MIXED


def tally_vote(
    records: Sequence[Outcome],
    x_positions: Iterable[int] = (),
    loss_interval: int = DEFAULT_LOSS_INTERVAL,
) -> Conclusion:
    """Decode a majority vote over readings ordered by detector index."""
    positions = frozenset(x_positions)
    tally = sum(
        vote_sign(index, positions) * VOTES[Outcome(outcome)]
        for index, outcome in enumerate(records)
    )
    return decode_tally(tally, loss_interval)


def decode_scheme5(first: Outcome, second: Outcome) -> Conclusion:
    """Decode the two clicks around the X gate."""
    if first not in CLICKS or second not in CLICKS:
        raise InvalidParameters("records", "both readings must be clicks")
    if first == second:
        return Conclusion.LOSS
    return Conclusion.ZERO if first == Outcome.ZERO else Conclusion.ONE


def _vote_conclusion(spec: SchemeSpec, tally: int) -> Conclusion:
    conclusion = decode_tally(tally, spec.loss_interval)
    if conclusion == Conclusion.MIXED and spec.scheme in LOSS_DETECTING_SCHEMES:
        return Conclusion.LOSS
    return conclusion


def conclude(spec: SchemeSpec, outcomes: Sequence[Outcome]) -> Conclusion:
    """Decode a complete record the way the scheme does."""
    clicks = [outcome for outcome in outcomes if outcome in CLICKS]
    match spec.scheme:
        case Scheme.S4:
            if not clicks:
                return Conclusion.MIXED
            return Conclusion.ZERO if clicks[0] == Outcome.ZERO else Conclusion.ONE
        case Scheme.S5:
            if len(clicks) < 2:
                return Conclusion.LOSS
            return decode_scheme5(clicks[0], clicks[1])
    positions = spec.x_positions
    tally = sum(
        vote_sign(index, positions) * VOTES[outcome]
        for index, outcome in enumerate(outcomes)
    )
    return _vote_conclusion(spec, tally)


# Exact evolution


def _run_vote(
    spec: SchemeSpec, chain: ReadoutChain, start: np.ndarray
) -> tuple[dict[Conclusion, float], float, float]:
    positions = spec.x_positions
    states = {(0, False): start}
    for index in range(spec.n_detectors):
        sign = vote_sign(index, positions)
        merged: dict[tuple[int, bool], np.ndarray] = defaultdict(
            lambda: np.zeros(9, dtype=complex)
        )
        for (tally, clicked), vector in states.items():
            for outcome, branch in chain.measure_round(vector).items():
                if chain.probability(branch) <= IMPOSSIBLE_BRANCH:
                    continue
                key = (tally + sign * VOTES[outcome], clicked or outcome in CLICKS)
                merged[key] += branch
        if index in positions:
            merged = {key: chain.flip(vector) for key, vector in merged.items()}
        states = dict(merged)
        _LOGGER.debug("%s: %d tally states after reading %d", spec, len(states), index)

    totals: dict[Conclusion, float] = defaultdict(float)
    readout = 0.0
    for (tally, clicked), vector in states.items():
        probability = chain.probability(vector)
        totals[_vote_conclusion(spec, tally)] += probability
        if clicked:
            readout += probability
    return totals, float(spec.n_detectors), readout


def _run_first_click(
    spec: SchemeSpec, chain: ReadoutChain, start: np.ndarray
) -> tuple[dict[Conclusion, float], float, float]:
    totals: dict[Conclusion, float] = defaultdict(float)
    gates = 0.0
    pending = start
    for _ in range(spec.n_detectors):
        remaining = chain.probability(pending)
        if remaining <= IMPOSSIBLE_BRANCH:
            break
        gates += remaining
        branches = chain.measure_round(pending)
        totals[Conclusion.ZERO] += chain.probability(branches[Outcome.ZERO])
        totals[Conclusion.ONE] += chain.probability(branches[Outcome.ONE])
        pending = branches[Outcome.NO_CLICK]
    totals[Conclusion.MIXED] += chain.probability(pending)
    return totals, gates, totals[Conclusion.ZERO] + totals[Conclusion.ONE]


def _run_two_clicks(
    spec: SchemeSpec, chain: ReadoutChain, start: np.ndarray
) -> tuple[dict[Conclusion, float], float, float]:
    totals: dict[Conclusion, float] = defaultdict(float)
    gates = 0.0
    readout = 0.0
    pending = start
    flipped: dict[Outcome, np.ndarray] = {}
    for _ in range(spec.n_detectors):
        gates += chain.probability(pending) + sum(
            chain.probability(vector) for vector in flipped.values()
        )
        waiting: dict[Outcome, np.ndarray] = {}
        for first, vector in flipped.items():
            branches = chain.measure_round(vector)
            for second in CLICKS:
                probability = chain.probability(branches[second])
                totals[decode_scheme5(first, second)] += probability
                readout += probability
            waiting[first] = branches[Outcome.NO_CLICK]

        branches = chain.measure_round(pending)
        for first in CLICKS:
            if chain.probability(branches[first]) <= IMPOSSIBLE_BRANCH:
                continue
            after_x = chain.flip(branches[first])
            waiting[first] = waiting[first] + after_x if first in waiting else after_x
        pending = branches[Outcome.NO_CLICK]
        flipped = {
            first: vector
            for first, vector in waiting.items()
            if chain.probability(vector) > IMPOSSIBLE_BRANCH
        }

    totals[Conclusion.LOSS] += chain.probability(pending) + sum(
        chain.probability(vector) for vector in flipped.values()
    )
    return totals, gates, readout


def run_scheme(spec: SchemeSpec, params: ErrorParams) -> ConclusionDistribution:
    """Evolve the measured qubit through the scheme exactly.

    Branches that lead to the same decoder state are merged, so the work grows
    with the number of distinct tallies rather than with 3^n.
    """
    chain = ReadoutChain.for_params(params)
    start = chain.initial_vector(params)
    if spec.scheme in VOTE_SCHEMES:
        totals, gates, readout = _run_vote(spec, chain, start)
    elif spec.scheme == Scheme.S4:
        totals, gates, readout = _run_first_click(spec, chain, start)
    else:
        totals, gates, readout = _run_two_clicks(spec, chain, start)
    return ConclusionDistribution.from_totals(totals, params, gates, readout)


def _finished(spec: SchemeSpec, outcomes: Sequence[Outcome]) -> bool:
    if len(outcomes) >= spec.n_detectors:
        return True
    clicks = sum(1 for outcome in outcomes if outcome in CLICKS)
    match spec.scheme:
        case Scheme.S4:
            return clicks >= 1
        case Scheme.S5:
            return clicks >= 2
    return False


def _fires_x(spec: SchemeSpec, outcomes: Sequence[Outcome]) -> bool:
    if spec.scheme == Scheme.S5:
        return outcomes[-1] in CLICKS and sum(
            1 for outcome in outcomes if outcome in CLICKS
        ) == 1
    return len(outcomes) - 1 in spec.x_positions


def enumerate_branches(spec: SchemeSpec, params: ErrorParams) -> list[OutcomeBranch]:
    """List every possible detector record with its probability.

    The tree grows threefold per detector, so recording stops at
    MAX_RECORDED_DETECTORS even though a SchemeSpec allows up to
    MAX_DETECTORS; use run_scheme for longer chains.
    """
    if spec.n_detectors > MAX_RECORDED_DETECTORS:
        raise BranchOverflowError(
            f"recording {spec.n_detectors} detectors exceeds the limit "
            f"of {MAX_RECORDED_DETECTORS}"
        )
    chain = ReadoutChain.for_params(params)
    frontier: list[tuple[tuple[Outcome, ...], np.ndarray]] = [
        ((), chain.initial_vector(params))
    ]
    branches = []
    while frontier:
        outcomes, vector = frontier.pop()
        for outcome, branch in chain.measure_round(vector).items():
            probability = chain.probability(branch)
            if probability <= IMPOSSIBLE_BRANCH:
                continue
            record = outcomes + (outcome,)
            if _finished(spec, record):
                branches.append(
                    OutcomeBranch(
                        tuple(enumerate(record)), probability, conclude(spec, record)
                    )
                )
                continue
            if _fires_x(spec, record):
                branch = chain.flip(branch)
            frontier.append((record, branch))

    branches.sort(key=lambda item: item.outcomes)
    _LOGGER.debug("%s: enumerated %d branches", spec, len(branches))
    return branches


def summarize_branches(
    branches: Iterable[OutcomeBranch], spec: SchemeSpec, params: ErrorParams
) -> ConclusionDistribution:
    """Fold explicit branches into a conclusion distribution."""
    totals: dict[Conclusion, float] = defaultdict(float)
    gates = 0.0
    readout = 0.0
    for branch in branches:
        totals[branch.conclusion] += branch.probability
        gates += branch.probability * len(branch.records)
        clicks = sum(1 for outcome in branch.outcomes if outcome in CLICKS)
        if clicks >= spec.clicks_needed:
            readout += branch.probability
    return ConclusionDistribution.from_totals(totals, params, gates, readout)
