"""Minimal single-qudit simulation: states, Born-rule sampling, bit-flip noise.

Complex amplitudes live in double precision; validation tolerances are 1e-12
throughout. All sampling goes through an explicit RandomSource.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .rng import RandomSource

NORM_ATOL = 1e-12


class PureState:
    """Unit-norm complex amplitude vector over a d >= 2 computational basis."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        arr = np.asarray(amplitudes, dtype=complex)
        if arr.ndim != 1 or arr.size < 2:
            raise UsageError("a pure state needs a 1-d amplitude vector, d >= 2")
        norm_sq = float(np.sum(np.abs(arr) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise UsageError(f"state not normalized: sum |a_k|^2 = {norm_sq!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        """|psi><psi| as a plain array."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())

    def __repr__(self) -> str:
        return f"PureState({self.amplitudes.tolist()!r})"


class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix; validation can be bypassed for raw
    linear-inversion estimates which may dip below the PSD cone."""

    __slots__ = ("entries",)

    def __init__(self, entries, *, validate: bool = True):
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise UsageError("a density matrix must be square with d >= 2")
        if validate:
            herm_defect = float(np.max(np.abs(arr - arr.conj().T)))
            if herm_defect > NORM_ATOL:
                raise UsageError(f"not Hermitian: defect {herm_defect!r}")
            trace_defect = abs(complex(np.trace(arr)) - 1.0)
            if trace_defect > NORM_ATOL:
                raise UsageError(f"trace differs from 1 by {trace_defect!r}")
            min_eig = float(np.min(np.linalg.eigvalsh(arr)))
            if min_eig < -NORM_ATOL:
                raise UsageError(f"negative eigenvalue {min_eig!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def psd_defect(self) -> float:
        """How far below zero the smallest eigenvalue sits (0 when PSD)."""
        return max(0.0, -float(np.min(np.linalg.eigvalsh(self.entries))))

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dimension})"


_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class QubitBasis:
    """An orthonormal pair of qubit states addressed by a bit value."""

    __slots__ = ("label", "basis_states")

    def __init__(self, label: str, basis_states: tuple[PureState, PureState]):
        b0, b1 = basis_states
        if b0.dimension != 2 or b1.dimension != 2:
            raise UsageError("qubit basis states must be 2-dimensional")
        overlap = abs(complex(np.vdot(b0.amplitudes, b1.amplitudes)))
        if overlap > NORM_ATOL:
            raise UsageError(f"basis states not orthogonal: |<b0|b1>| = {overlap!r}")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "basis_states", (b0, b1))

    def __setattr__(self, name, value):
        raise AttributeError("QubitBasis is immutable")

    def __repr__(self) -> str:
        return f"QubitBasis({self.label})"


COMPUTATIONAL = QubitBasis(
    "COMPUTATIONAL", (PureState([1.0, 0.0]), PureState([0.0, 1.0]))
)
DIAGONAL = QubitBasis(
    "DIAGONAL",
    (PureState([_INV_SQRT2, _INV_SQRT2]), PureState([_INV_SQRT2, -_INV_SQRT2])),
)


@dataclass(frozen=True)
class NoiseModel:
    """Independent bit-flip with probability f on observed symbols, f < 1/2."""

    flip_probability: float

    def __post_init__(self):
        if not 0.0 <= self.flip_probability < 0.5:
            raise UsageError("flip probability must lie in [0, 1/2)")


def encode_qubit(bit: int, basis: QubitBasis) -> PureState:
    """The basis state carrying the given bit value."""
    if bit not in (0, 1):
        raise UsageError("bit must be 0 or 1")
    return basis.basis_states[bit]


def outcome_probability_one(state: PureState, basis: QubitBasis) -> float:
    """Born probability of reading 1 when measuring state in basis."""
    return float(abs(complex(np.vdot(basis.basis_states[1].amplitudes, state.amplitudes))) ** 2)


def measure_projective(state: PureState, basis: QubitBasis, rng: RandomSource) -> int:
    """Sample a projective measurement outcome; one double consumed per call."""
    if state.dimension != 2:
        raise UsageError("projective qubit measurement needs a 2-dimensional state")
    return int(rng.next_double() < outcome_probability_one(state, basis))


def apply_flip(outcome: int, noise: NoiseModel, rng: RandomSource) -> int:
    """Flip the outcome with the noise model's probability; one double per call."""
    return outcome ^ int(rng.next_double() < noise.flip_probability)


def maximally_mixed(d: int) -> DensityMatrix:
    """The d-dimensional state I/d."""
    if d < 2:
        raise UsageError("dimension must be at least 2")
    return DensityMatrix(np.eye(d, dtype=complex) / d)
