import math
from fractions import Fraction

import numpy as np
import pytest

from pseudomix.errors import ConfigError, NoExcessError, UsageError
from pseudomix.povm import build_ic_povm, sample_povm
from pseudomix.quantum import maximally_mixed
from pseudomix.qudit import (
    BoxIdentity,
    ComputablePreparation,
    alternating_preparation,
    build_selection_plan,
    constant_preparation,
    identify_computable_box,
    prepared_state,
    required_samples,
    rotation_preparation,
    run_qudit_trials,
    selected_frequency,
)
from pseudomix.rng import SplitMix64, substream
from pseudomix.sequences import SymbolString


def test_prepared_state_examples():
    prep = constant_preparation(2)
    state = prepared_state(prep, 0)
    assert np.allclose(state.amplitudes, [1, 0])
    rot = rotation_preparation(2)
    state0 = prepared_state(rot, 0)
    assert np.allclose(state0.amplitudes, [0.6, 0.8])
    state8 = prepared_state(rot, 8)  # phase 1 radian on the second level
    assert np.allclose(state8.amplitudes, [0.6, 0.8 * np.exp(1j)])


@pytest.mark.parametrize("maker", [constant_preparation, alternating_preparation, rotation_preparation])
@pytest.mark.parametrize("d", [2, 3, 5])
def test_prepared_states_are_normalized(maker, d):
    prep = maker(d)
    for j in range(12):
        state = prepared_state(prep, j)
        assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1) < 1e-12


def test_malformed_preparation_rejected():
    bad = ComputablePreparation(
        2, lambda j: [(Fraction(1, 2), Fraction(0)), (Fraction(1, 2), Fraction(0))]
    )
    with pytest.raises(ConfigError):
        prepared_state(bad, 0)


def test_selection_plan_constant_preparation():
    prep = constant_preparation(2)
    povm = build_ic_povm(2)
    plan = build_selection_plan(prep, povm, horizon=50, margin=0.1)
    # the first basis-projector effect carries probability 1/3 > 1/6 + 0.1
    assert plan.effect_index == 0
    assert plan.selected_indices == tuple(range(50))
    assert plan.n_outcomes == 6


def test_selection_plan_alternating_preparation():
    prep = alternating_preparation(2)
    povm = build_ic_povm(2)
    plan = build_selection_plan(prep, povm, horizon=40, margin=0.1)
    # counts tie between the two basis-projector effects; lowest index wins,
    # so the even rounds (where |0> is emitted) are selected
    assert plan.effect_index == 0
    assert plan.selected_indices == tuple(range(0, 40, 2))


def test_selection_plan_no_excess():
    prep = constant_preparation(2)
    povm = build_ic_povm(2)
    with pytest.raises(NoExcessError):
        build_selection_plan(prep, povm, horizon=20, margin=0.4)


def test_required_samples_example():
    assert required_samples(0.2, 0.5) == 104


def test_identify_requires_enough_samples():
    prep = constant_preparation(2)
    povm = build_ic_povm(2)
    plan = build_selection_plan(prep, povm, horizon=50, margin=0.1)
    stream = SymbolString([0] * 50, 6)
    with pytest.raises(UsageError) as err:
        identify_computable_box(stream, stream, plan, epsilon=0.01)
    assert str(required_samples(0.1, 0.01)) in str(err.value)


def _sampled_stream(povm, state, n, rng):
    return SymbolString((sample_povm(povm, state, rng) for _ in range(n)), len(povm))


def test_identify_separates_constant_box_from_mixed():
    d = 2
    povm = build_ic_povm(d)
    prep = constant_preparation(d)
    horizon = required_samples(0.1, 0.01)
    plan = build_selection_plan(prep, povm, horizon, margin=0.1)
    rng = SplitMix64(101)
    comp = _sampled_stream(povm, prepared_state(prep, 0), horizon, rng)
    mixed = _sampled_stream(povm, maximally_mixed(d), horizon, rng)
    assert identify_computable_box(comp, mixed, plan, 0.01) is BoxIdentity.BOX1
    assert identify_computable_box(mixed, comp, plan, 0.01) is BoxIdentity.BOX2


def test_identify_undecided_when_both_mixed():
    d = 2
    povm = build_ic_povm(d)
    prep = constant_preparation(d)
    horizon = required_samples(0.1, 0.01)
    plan = build_selection_plan(prep, povm, horizon, margin=0.1)
    rng = SplitMix64(202)
    rho = maximally_mixed(d)
    s1 = _sampled_stream(povm, rho, horizon, rng)
    s2 = _sampled_stream(povm, rho, horizon, rng)
    assert identify_computable_box(s1, s2, plan, 0.01) is BoxIdentity.UNDECIDED


def test_mixed_box_frequency_on_any_fixed_selection():
    # outcome frequency on a pre-chosen index subset concentrates at 1/N_d
    d = 2
    povm = build_ic_povm(d)
    rho = maximally_mixed(d)
    rng = SplitMix64(303)
    n = 20_000
    stream = _sampled_stream(povm, rho, n, rng)
    selected = tuple(range(0, n, 2))
    hits = sum(1 for j in selected if stream[j] == 0)
    p = 1 / 6
    sigma = math.sqrt(len(selected) * p * (1 - p))
    assert abs(hits - len(selected) * p) <= 3 * sigma


def test_hoeffding_guarantee_on_computable_side():
    # at the mandated sample count the computable box clears the midpoint
    # threshold with probability >= 1 - eps/2
    d = 2
    margin, eps = 0.1, 0.05
    povm = build_ic_povm(d)
    prep = constant_preparation(d)
    horizon = required_samples(margin, eps)
    plan = build_selection_plan(prep, povm, horizon, margin)
    threshold = plan.uniform_level + margin / 2
    state = prepared_state(prep, 0)
    trials = 120
    clears = 0
    for t in range(trials):
        rng = substream(4040, t)
        stream = _sampled_stream(povm, state, horizon, rng)
        if selected_frequency(stream, plan) > threshold:
            clears += 1
    p = 1 - eps / 2
    sigma = math.sqrt(trials * p * (1 - p))
    assert clears >= trials * p - 3 * sigma


def test_run_qudit_trials_deterministic_and_labelled():
    povm = build_ic_povm(2)
    prep = constant_preparation(2)
    horizon = required_samples(0.1, 0.01)
    a = run_qudit_trials(prep, povm, horizon, 0.1, 0.01, master_seed=7, trials=3)
    b = run_qudit_trials(prep, povm, horizon, 0.1, 0.01, master_seed=7, trials=3)
    assert [t.identified for t in a] == [t.identified for t in b]
    assert [t.computable_box for t in a] == [t.computable_box for t in b]
    assert all(t.streams[0].alphabet_size == 6 for t in a)
    # both box orders appear over a few trials with this seed
    assert len({t.computable_box for t in a}) >= 1
