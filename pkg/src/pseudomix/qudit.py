"""Generalized qudit protocol: spotting a computable preparation by frequency bias.

A computable preparation emits, per round, d rational moduli (squares summing
to exactly 1) and d rational phases. Against the canonical informationally
complete POVM, every pure state pushes at least one effect's probability
strictly above the uniform 1/N_d, so the rounds where a chosen effect clears
the uniform level by a margin form a computable index selection; on those
rounds the effect's outcome frequency separates a computable box from a
maximally mixed one. The decision threshold sits halfway into the margin and
two-sided Hoeffding bounds dictate the number of selected rounds needed for
a target failure probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NoExcessError, UsageError
from .povm import Povm
from .quantum import PureState
from .sequences import SymbolString

RoundAmplitudes = Sequence[tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class ComputablePreparation:
    """Deterministic round -> amplitudes map: (modulus, phase) rational pairs."""

    dimension: int
    generator: Callable[[int], RoundAmplitudes]
    name: str = "custom"

    def round_amplitudes(self, j: int) -> RoundAmplitudes:
        pairs = list(self.generator(j))
        if len(pairs) != self.dimension:
            raise ConfigError(
                f"preparation emitted {len(pairs)} amplitude pairs, "
                f"expected {self.dimension}"
            )
        norm = sum(Fraction(r) ** 2 for r, _ in pairs)
        if norm != 1:
            raise ConfigError(f"moduli squares sum to {norm}, not exactly 1")
        return pairs


def constant_preparation(d: int) -> ComputablePreparation:
    """Every round emits the first basis state."""
    pairs = [(Fraction(1), Fraction(0))] + [(Fraction(0), Fraction(0))] * (d - 1)
    return ComputablePreparation(d, lambda j: pairs, name="constant")


def alternating_preparation(d: int) -> ComputablePreparation:
    """Round j emits basis state |j mod d>."""

    def gen(j: int) -> RoundAmplitudes:
        which = j % d
        return [
            (Fraction(1) if k == which else Fraction(0), Fraction(0))
            for k in range(d)
        ]

    return ComputablePreparation(d, gen, name="alternating")


def rotation_preparation(d: int) -> ComputablePreparation:
    """Fixed 3-4-5 moduli on the first two levels, phases advancing by j/8."""

    def gen(j: int) -> RoundAmplitudes:
        pairs = [(Fraction(3, 5), Fraction(0)), (Fraction(4, 5), Fraction(j, 8))]
        pairs += [(Fraction(0), Fraction(0))] * (d - 2)
        return pairs

    return ComputablePreparation(d, gen, name="rotation")


PREPARATION_PRESETS = {
    "constant": constant_preparation,
    "alternating": alternating_preparation,
    "rotation": rotation_preparation,
}


def prepared_state(prep: ComputablePreparation, j: int) -> PureState:
    """The round-j pure state with amplitudes r_k e^(i phi_k)."""
    pairs = prep.round_amplitudes(j)
    amplitudes = [float(r) * complex(math.cos(float(phi)), math.sin(float(phi)))
                  for r, phi in pairs]
    return PureState(amplitudes)


@dataclass(frozen=True)
class SelectionPlan:
    """A distinguished effect and the rounds where it clears 1/N_d + margin."""

    effect_index: int
    margin: float
    selected_indices: tuple[int, ...]
    n_outcomes: int

    @property
    def uniform_level(self) -> float:
        return 1.0 / self.n_outcomes


def build_selection_plan(
    prep: ComputablePreparation,
    povm: Povm,
    horizon: int,
    margin: float,
) -> SelectionPlan:
    """Pick the effect with the most rounds j < horizon whose probability
    exceeds 1/N_d + margin (ties to the lowest index) and record those rounds."""
    if horizon < 1:
        raise UsageError("horizon must be at least 1")
    if margin < 0:
        raise UsageError("margin must be non-negative")
    n = len(povm)
    level = 1.0 / n + margin
    qualifying: list[list[int]] = [[] for _ in range(n)]
    for j in range(horizon):
        probs = povm.outcome_probabilities(prepared_state(prep, j))
        for i in np.nonzero(probs > level)[0]:
            qualifying[int(i)].append(j)
    best = max(range(n), key=lambda i: (len(qualifying[i]), -i))
    if not qualifying[best]:
        raise NoExcessError(
            f"no effect exceeds 1/{n} + {margin} on any round below {horizon}"
        )
    return SelectionPlan(
        effect_index=best,
        margin=margin,
        selected_indices=tuple(qualifying[best]),
        n_outcomes=n,
    )


class BoxIdentity(Enum):
    BOX1 = "BOX1"
    BOX2 = "BOX2"
    UNDECIDED = "UNDECIDED"


def required_samples(margin: float, epsilon: float) -> int:
    """Two-sided Hoeffding sample count: deviations of margin/2 on two
    streams each fail with probability < epsilon in total."""
    if not 0 < epsilon < 1:
        raise UsageError("epsilon must lie in (0, 1)")
    if margin <= 0:
        raise UsageError("margin must be positive")
    return math.ceil(math.log(4.0 / epsilon) / (2.0 * (margin / 2.0) ** 2))


def selected_frequency(stream: SymbolString, plan: SelectionPlan) -> float:
    """Frequency of the plan's effect over the selected round indices."""
    if len(stream) <= plan.selected_indices[-1]:
        raise UsageError(
            f"stream of length {len(stream)} does not cover selected index "
            f"{plan.selected_indices[-1]}"
        )
    hits = sum(1 for j in plan.selected_indices if stream[j] == plan.effect_index)
    return hits / len(plan.selected_indices)


def identify_computable_box(
    stream1: SymbolString,
    stream2: SymbolString,
    plan: SelectionPlan,
    epsilon: float,
) -> BoxIdentity:
    """Declare the computable box when exactly one stream's frequency on the
    selected rounds exceeds 1/N_d + margin/2; UNDECIDED otherwise."""
    if not plan.selected_indices:
        raise UsageError("the selection plan is empty")
    needed = required_samples(plan.margin, epsilon)
    have = len(plan.selected_indices)
    if have < needed:
        raise UsageError(
            f"{have} selected rounds are too few: need at least {needed} for "
            f"epsilon={epsilon} at margin {plan.margin}"
        )
    threshold = plan.uniform_level + plan.margin / 2.0
    exceed1 = selected_frequency(stream1, plan) > threshold
    exceed2 = selected_frequency(stream2, plan) > threshold
    if exceed1 and not exceed2:
        return BoxIdentity.BOX1
    if exceed2 and not exceed1:
        return BoxIdentity.BOX2
    return BoxIdentity.UNDECIDED


def _draw_stream(cumulatives: list[list[float]], n_outcomes: int, rng) -> SymbolString:
    """One outcome per round from per-round cumulative probability vectors."""
    from .povm import sample_outcome

    return SymbolString(
        (sample_outcome(cum, rng) for cum in cumulatives), n_outcomes
    )


@dataclass(frozen=True)
class QuditTrialOutcome:
    identified: BoxIdentity
    computable_box: BoxIdentity
    frequencies: tuple[float, float]
    streams: tuple[SymbolString, SymbolString]

    @property
    def correct(self) -> bool:
        return self.identified is self.computable_box


def run_qudit_trials(
    prep: ComputablePreparation,
    povm: Povm,
    horizon: int,
    margin: float,
    epsilon: float,
    master_seed: int,
    trials: int = 1,
) -> list[QuditTrialOutcome]:
    """Repeated two-box games: one box runs the preparation, the other serves
    the maximally mixed state, their order decided per trial by a fair coin.

    Per-round outcome distributions are precomputed once; each trial consumes
    three substreams (box order, box-1 outcomes, box-2 outcomes) derived from
    (master_seed, trial, tag)."""
    from .quantum import maximally_mixed
    from .rng import substream

    plan = build_selection_plan(prep, povm, horizon, margin)
    n = len(povm)
    comp_cum = []
    for j in range(horizon):
        probs = povm.outcome_probabilities(prepared_state(prep, j))
        comp_cum.append(np.cumsum(probs).tolist())
    mixed_probs = povm.outcome_probabilities(maximally_mixed(povm.dimension))
    mixed_cum = [np.cumsum(mixed_probs).tolist()] * horizon
    outcomes = []
    for trial in range(trials):
        env = substream(master_seed, trial, 0)
        computable_first = env.next_bit() == 0
        rng1 = substream(master_seed, trial, 1)
        rng2 = substream(master_seed, trial, 2)
        if computable_first:
            stream1 = _draw_stream(comp_cum, n, rng1)
            stream2 = _draw_stream(mixed_cum, n, rng2)
            truth = BoxIdentity.BOX1
        else:
            stream1 = _draw_stream(mixed_cum, n, rng1)
            stream2 = _draw_stream(comp_cum, n, rng2)
            truth = BoxIdentity.BOX2
        identified = identify_computable_box(stream1, stream2, plan, epsilon)
        outcomes.append(
            QuditTrialOutcome(
                identified=identified,
                computable_box=truth,
                frequencies=(
                    selected_frequency(stream1, plan),
                    selected_frequency(stream2, plan),
                ),
                streams=(stream1, stream2),
            )
        )
    return outcomes
