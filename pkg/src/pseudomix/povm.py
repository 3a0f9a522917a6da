"""Informationally complete POVM for arbitrary dimension d.

The measurement is built from N_d = d(2d-1) rank-1 projectors: the d basis
projectors |m><m|, and for every pair m < n the four projectors onto
(|m> +/- |n>)/sqrt(2) and (|m> +/- i|n>)/sqrt(2). Their sum is (2d-1) I, so
dividing by (2d-1) yields a POVM whose effects are all unbiased on I/d:
Tr(E_i I/d) = 1/N_d.

Effect order is fixed and load-bearing for serialization and reconstruction:
first A(m) for m = 0..d-1, then for each (m, n) in lexicographic order the
quadruple B+(m,n), B-(m,n), C+(m,n), C-(m,n).

Expectations of the projectors recover the state entrywise:
    rho_mm = <Pi_a(m)>
    rho_mn = [<Pi_b+> - <Pi_b->]/2 + i [<Pi_c-> - <Pi_c+>]/2   for m < n,
which is what reconstruct_state inverts after rescaling POVM outcome
probabilities by (2d-1).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .quantum import DensityMatrix, PureState
from .rng import RandomSource

COMPLETENESS_ATOL = 1e-10
EFFECT_ATOL = 1e-12


class Effect:
    """One POVM element: Hermitian PSD matrix plus its construction tag."""

    __slots__ = ("matrix", "provenance_tag")

    def __init__(self, matrix, provenance_tag: str):
        arr = np.asarray(matrix, dtype=complex)
        herm_defect = float(np.max(np.abs(arr - arr.conj().T)))
        if herm_defect > EFFECT_ATOL:
            raise UsageError(f"effect not Hermitian: defect {herm_defect!r}")
        min_eig = float(np.min(np.linalg.eigvalsh(arr)))
        if min_eig < -EFFECT_ATOL:
            raise UsageError(f"effect has negative eigenvalue {min_eig!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "provenance_tag", provenance_tag)

    def __setattr__(self, name, value):
        raise AttributeError("Effect is immutable")

    def __repr__(self) -> str:
        return f"Effect({self.provenance_tag})"


class Povm:
    """An ordered list of effects summing to the identity."""

    __slots__ = ("effects", "dimension")

    def __init__(self, effects: list[Effect], dimension: int):
        if not effects:
            raise UsageError("a POVM needs at least one effect")
        for e in effects:
            if e.matrix.shape != (dimension, dimension):
                raise UsageError("all effects must match the declared dimension")
        total = sum(e.matrix for e in effects)
        defect = float(np.max(np.abs(total - np.eye(dimension))))
        if defect > COMPLETENESS_ATOL:
            raise UsageError(f"effects do not sum to identity: defect {defect!r}")
        object.__setattr__(self, "effects", tuple(effects))
        object.__setattr__(self, "dimension", dimension)

    def __setattr__(self, name, value):
        raise AttributeError("Povm is immutable")

    def __len__(self) -> int:
        return len(self.effects)

    def outcome_probabilities(self, state) -> np.ndarray:
        """Born probabilities for all outcomes on a PureState or DensityMatrix."""
        if isinstance(state, PureState):
            if state.dimension != self.dimension:
                raise UsageError("state dimension does not match POVM dimension")
            psi = state.amplitudes
            return np.array(
                [float(np.real(np.vdot(psi, e.matrix @ psi))) for e in self.effects]
            )
        if isinstance(state, DensityMatrix):
            if state.dimension != self.dimension:
                raise UsageError("state dimension does not match POVM dimension")
            rho = state.entries
            return np.array(
                [float(np.real(np.trace(e.matrix @ rho))) for e in self.effects]
            )
        raise UsageError(f"cannot measure object of type {type(state).__name__}")


def build_ic_povm(d: int) -> Povm:
    """The canonical d(2d-1)-outcome informationally complete POVM."""
    if d < 2:
        raise UsageError("dimension must be at least 2")
    scale = 1.0 / (2 * d - 1)
    effects = []
    for m in range(d):
        proj = np.zeros((d, d), dtype=complex)
        proj[m, m] = 1.0
        effects.append(Effect(proj * scale, f"A({m})"))
    for m in range(d):
        for n in range(m + 1, d):
            for sign, kind in ((1.0, "B+"), (-1.0, "B-")):
                proj = np.zeros((d, d), dtype=complex)
                proj[m, m] = 0.5
                proj[n, n] = 0.5
                proj[m, n] = 0.5 * sign
                proj[n, m] = 0.5 * sign
                effects.append(Effect(proj * scale, f"{kind}({m},{n})"))
            for sign, kind in ((1.0, "C+"), (-1.0, "C-")):
                proj = np.zeros((d, d), dtype=complex)
                proj[m, m] = 0.5
                proj[n, n] = 0.5
                proj[m, n] = -0.5j * sign
                proj[n, m] = 0.5j * sign
                effects.append(Effect(proj * scale, f"{kind}({m},{n})"))
    return Povm(effects, d)


def sample_povm(povm: Povm, state, rng: RandomSource) -> int:
    """Sample one outcome index by inverse CDF; one double consumed."""
    probs = povm.outcome_probabilities(state)
    return sample_outcome(np.cumsum(probs).tolist(), rng)


def sample_outcome(cumulative: list[float], rng: RandomSource) -> int:
    """Draw an index from a precomputed cumulative probability vector."""
    u = rng.next_double() * cumulative[-1]
    idx = bisect.bisect_right(cumulative, u)
    return min(idx, len(cumulative) - 1)


def reconstruct_state(povm: Povm, probabilities) -> DensityMatrix:
    """Linear-inversion estimate from outcome probabilities of the canonical POVM.

    Probabilities are rescaled by (2d-1) to projector expectations, then the
    entrywise identities are applied. The result is Hermitian by construction
    but may fail positivity when the probabilities are noisy frequencies; it
    is returned unprojected (inspect DensityMatrix.psd_defect()).
    """
    d = povm.dimension
    n_d = d * (2 * d - 1)
    if len(povm) != n_d:
        raise UsageError("reconstruction requires the canonical IC POVM layout")
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (n_d,):
        raise UsageError(f"expected {n_d} probabilities, got shape {p.shape}")
    if np.any(p < -1e-15) or np.any(p > 1 + 1e-15):
        raise UsageError("probabilities must lie in [0, 1]")
    expect = p * (2 * d - 1)
    rho = np.zeros((d, d), dtype=complex)
    for m in range(d):
        rho[m, m] = expect[m]
    idx = d
    for m in range(d):
        for n in range(m + 1, d):
            b_plus, b_minus, c_plus, c_minus = expect[idx : idx + 4]
            val = 0.5 * (b_plus - b_minus) + 0.5j * (c_minus - c_plus)
            rho[m, n] = val
            rho[n, m] = val.conjugate()
            idx += 4
    return DensityMatrix(rho, validate=False)


@dataclass(frozen=True)
class PovmCheckReport:
    completeness_defect: float
    min_eigenvalue: float
    max_unbiasedness_defect: float
    informational_completeness: bool


def _hermitian_coordinates(matrix: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in an orthogonal d^2 basis."""
    d = matrix.shape[0]
    coords = [float(np.real(matrix[m, m])) for m in range(d)]
    for m in range(d):
        for n in range(m + 1, d):
            coords.append(np.sqrt(2.0) * float(np.real(matrix[m, n])))
            coords.append(np.sqrt(2.0) * float(np.imag(matrix[m, n])))
    return np.array(coords)


def check_povm(povm: Povm, tol: float = COMPLETENESS_ATOL) -> PovmCheckReport:
    """Validate completeness, positivity, unbiasedness and informational
    completeness (the effects spanning the full Hermitian space)."""
    d = povm.dimension
    n = len(povm)
    total = sum(e.matrix for e in povm.effects)
    completeness_defect = float(np.max(np.abs(total - np.eye(d))))
    min_eigenvalue = min(
        float(np.min(np.linalg.eigvalsh(e.matrix))) for e in povm.effects
    )
    max_unbiasedness_defect = max(
        abs(float(np.real(np.trace(e.matrix))) / d - 1.0 / n) for e in povm.effects
    )
    coords = np.stack([_hermitian_coordinates(e.matrix) for e in povm.effects])
    rank = int(np.linalg.matrix_rank(coords, tol=tol))
    return PovmCheckReport(
        completeness_defect=completeness_defect,
        min_eigenvalue=min_eigenvalue,
        max_unbiasedness_defect=max_unbiasedness_defect,
        informational_completeness=(rank == d * d),
    )


def povm_to_json_dict(povm: Povm, report: PovmCheckReport | None = None) -> dict:
    """Serializable form: row-major [re, im] pairs per effect plus tags."""
    payload = {
        "dimension": povm.dimension,
        "n_effects": len(povm),
        "effects": [
            {
                "tag": e.provenance_tag,
                "matrix": [
                    [float(z.real), float(z.imag)] for z in e.matrix.flatten(order="C")
                ],
            }
            for e in povm.effects
        ],
    }
    if report is not None:
        payload["check"] = {
            "completeness_defect": report.completeness_defect,
            "min_eigenvalue": report.min_eigenvalue,
            "max_unbiasedness_defect": report.max_unbiasedness_defect,
            "informational_completeness": report.informational_completeness,
        }
    return payload
