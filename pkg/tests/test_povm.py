import math

import numpy as np
import pytest
from scipy import stats

from pseudomix.errors import UsageError
from pseudomix.povm import (
    Effect,
    Povm,
    build_ic_povm,
    check_povm,
    povm_to_json_dict,
    reconstruct_state,
    sample_povm,
)
from pseudomix.quantum import DensityMatrix, PureState, maximally_mixed
from pseudomix.rng import SplitMix64

DIMS = [2, 3, 4, 5, 6]


def random_density(rng: np.random.Generator, d: int) -> DensityMatrix:
    """Ginibre ensemble: G G^dag normalized to unit trace."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho))


@pytest.mark.parametrize("d", DIMS)
def test_effect_count(d):
    povm = build_ic_povm(d)
    assert len(povm) == d * (2 * d - 1)


def test_small_dimension_counts():
    assert len(build_ic_povm(2)) == 6
    assert len(build_ic_povm(3)) == 15


@pytest.mark.parametrize("d", DIMS)
def test_unnormalized_projectors_sum_to_scaled_identity(d):
    povm = build_ic_povm(d)
    total = sum(e.matrix for e in povm.effects) * (2 * d - 1)
    assert np.max(np.abs(total - (2 * d - 1) * np.eye(d))) < 1e-10


@pytest.mark.parametrize("d", DIMS)
def test_effects_are_scaled_rank_one_projectors(d):
    povm = build_ic_povm(d)
    for e in povm.effects:
        pi = e.matrix * (2 * d - 1)
        assert np.max(np.abs(pi @ pi - pi)) < 1e-12
        assert abs(np.trace(pi) - 1.0) < 1e-12


@pytest.mark.parametrize("d", DIMS)
def test_povm_invariants(d):
    povm = build_ic_povm(d)
    report = check_povm(povm)
    assert report.completeness_defect <= 1e-10
    assert report.min_eigenvalue >= -1e-12
    assert report.max_unbiasedness_defect <= 1e-12
    assert report.informational_completeness


def test_effect_ordering_is_fixed():
    povm = build_ic_povm(3)
    tags = [e.provenance_tag for e in povm.effects]
    assert tags[:3] == ["A(0)", "A(1)", "A(2)"]
    assert tags[3:7] == ["B+(0,1)", "B-(0,1)", "C+(0,1)", "C-(0,1)"]
    assert tags[7:11] == ["B+(0,2)", "B-(0,2)", "C+(0,2)", "C-(0,2)"]
    assert tags[11:] == ["B+(1,2)", "B-(1,2)", "C+(1,2)", "C-(1,2)"]


def test_outcome_probabilities_on_maximally_mixed():
    povm = build_ic_povm(2)
    probs = povm.outcome_probabilities(maximally_mixed(2))
    assert np.allclose(probs, np.full(6, 1 / 6), atol=1e-12)


def test_outcome_probability_basis_state():
    # Tr(|0><0|/3 * |0><0|) = 1/3 for the first effect at d=2
    povm = build_ic_povm(2)
    probs = povm.outcome_probabilities(PureState([1, 0]))
    assert probs[0] == pytest.approx(1 / 3, abs=1e-12)
    assert abs(probs.sum() - 1.0) < 1e-10


def test_sample_povm_dimension_mismatch():
    povm = build_ic_povm(2)
    with pytest.raises(UsageError):
        sample_povm(povm, PureState([1, 0, 0]), SplitMix64(1))


def test_sample_povm_uniform_chi_squared():
    povm = build_ic_povm(2)
    rho = maximally_mixed(2)
    rng = SplitMix64(424242)
    n = 100_000
    counts = np.zeros(6, dtype=int)
    for _ in range(n):
        counts[sample_povm(povm, rho, rng)] += 1
    expected = n / 6
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    # significance 1e-3 with 5 degrees of freedom
    assert chi2 < stats.chi2.ppf(1 - 1e-3, df=5)


def test_reconstruct_maximally_mixed_fixed_point():
    povm = build_ic_povm(2)
    rho = reconstruct_state(povm, [1 / 6] * 6)
    assert np.max(np.abs(rho.entries - np.eye(2) / 2)) < 1e-12


def test_reconstruct_basis_state_round_trip():
    povm = build_ic_povm(2)
    target = PureState([1, 0]).to_density()
    probs = povm.outcome_probabilities(target)
    rho = reconstruct_state(povm, probs)
    assert np.max(np.abs(rho.entries - target.entries)) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_reconstruct_round_trip_random(d):
    povm = build_ic_povm(d)
    rng = np.random.default_rng(20240 + d)
    for _ in range(100):
        target = random_density(rng, d)
        probs = povm.outcome_probabilities(target)
        rho = reconstruct_state(povm, probs)
        assert np.max(np.abs(rho.entries - target.entries)) < 1e-10


def test_reconstruct_rejects_bad_input():
    povm = build_ic_povm(2)
    with pytest.raises(UsageError):
        reconstruct_state(povm, [1 / 6] * 5)
    with pytest.raises(UsageError):
        reconstruct_state(povm, [1.5] + [0.0] * 5)


def test_check_povm_flags_informationally_incomplete():
    half = np.eye(2, dtype=complex) / 2
    trivial = Povm([Effect(half, "I/2"), Effect(half, "I/2")], 2)
    report = check_povm(trivial)
    assert not report.informational_completeness
    assert report.completeness_defect <= 1e-12


def test_check_povm_rank_25_for_d5():
    assert check_povm(build_ic_povm(5)).informational_completeness


def test_json_payload_shape():
    povm = build_ic_povm(2)
    payload = povm_to_json_dict(povm, check_povm(povm))
    assert payload["n_effects"] == 6
    assert len(payload["effects"]) == 6
    assert len(payload["effects"][0]["matrix"]) == 4  # row-major re/im pairs
    assert payload["check"]["informational_completeness"] is True


def test_build_rejects_small_dimension():
    with pytest.raises(UsageError):
        build_ic_povm(1)
