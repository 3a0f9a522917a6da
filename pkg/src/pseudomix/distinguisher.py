"""Deciding which of two measurement records hides a computable stream.

restricted_search scans a bounded seed list in order and accepts the first
candidate whose even (then odd) half sits within Hamming distance
floor(q*k*l) of the corresponding record prefix of k*l bits. The floor is
taken in exact rational arithmetic: q = 0.15 at k*l = 14 must allow exactly
2 flips, and float flooring cannot be trusted at such boundaries.

dovetail_search is the unrestricted form over any step-budgeted program
family, with the strict acceptance d_H < q*k*l. For q = 0 the strict form
degenerates (nothing is < 0), so zero tolerance means exact prefix equality.

error_probability_bound evaluates the closed-form union bound on the
probability of accepting a wrong stream: the per-length acceptance mass is
dominated by r^l with r = 2^(1+qk-k) (e/q)^(qk), whose geometric sum gives
r/(1-r) when r < 1. A bound value of 1 or more carries no information and is
flagged vacuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import UsageError
from .programs import ProgramEntry, ProgramFamily, SearchList, dovetail
from .sequences import BitString

RationalLike = Union[Fraction, int, str, float]


def as_fraction(value: RationalLike) -> Fraction:
    """Exact rational from "3/20", "0.15", ints, Fractions, or floats.

    Floats go through their shortest decimal repr, so 0.15 means 3/20 rather
    than the binary double closest to it.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise UsageError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Tolerance:
    """Accepted flip fraction q in [0, 1/2) and prefix multiplier k >= 1."""

    q: Fraction
    k: int

    def __post_init__(self):
        object.__setattr__(self, "q", as_fraction(self.q))
        if not 0 <= self.q < Fraction(1, 2):
            raise UsageError("q must lie in [0, 1/2)")
        if self.k < 1:
            raise UsageError("k must be at least 1")


def max_errors(q: RationalLike, k: int, length: int) -> int:
    """floor(q * k * length) in exact rational arithmetic."""
    if length < 1:
        raise UsageError("length must be at least 1")
    return math.floor(as_fraction(q) * k * length)


def effective_tolerance(q: RationalLike, k: int, length: int) -> Fraction:
    """floor(q*k*length) / length (the per-length allowance; can exceed 1)."""
    return Fraction(max_errors(q, k, length), length)


def normalized_tolerance(q: RationalLike, k: int, length: int) -> Fraction:
    """floor(q*k*length) / (k*length), the allowance as a flip fraction."""
    return Fraction(max_errors(q, k, length), k * length)


@dataclass(frozen=True)
class BoundValue:
    """Closed-form wrong-acceptance bound; vacuous when it is not below 1."""

    value: Optional[float]
    vacuous: bool


def error_probability_bound(q: RationalLike, k: int) -> BoundValue:
    """Geometric-sum bound r/(1-r) with r = 2^(1+qk-k) (e/q)^(qk).

    q = 0 reduces to r = 2^(1-k) exactly. Returns value None when r >= 1
    (the sum diverges); a finite value >= 1 is kept but flagged vacuous.
    """
    q = as_fraction(q)
    if not 0 <= q < Fraction(1, 2):
        raise UsageError("q must lie in [0, 1/2)")
    if k < 1:
        raise UsageError("k must be at least 1")
    if q == 0:
        r_exact = Fraction(1, 2) ** (k - 1)
        if r_exact >= 1:
            return BoundValue(None, True)
        value = float(r_exact / (1 - r_exact))
        return BoundValue(value, value >= 1.0)
    qk = float(q * k)
    log2_r = 1.0 + qk - k + qk * math.log2(math.e / float(q))
    if log2_r >= 0.0:
        return BoundValue(None, True)
    r = 2.0**log2_r
    value = r / (1.0 - r)
    return BoundValue(value, value >= 1.0)


def decay_exponent(q: float) -> float:
    """Per-k exponent sign driver: negative iff the bound decays with k."""
    return q - 1.0 + q * math.log2(math.e / q)


def decay_threshold() -> float:
    """The tolerance q* in (0, 1/2) where exponential decay in k is lost,
    i.e. the root of q - 1 + q*log2(e/q), bisected to 1e-9."""
    lo, hi = 1e-12, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if decay_exponent(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9:
            break
    return 0.5 * (lo + hi)


class VerdictKind(Enum):
    GUESS_EVEN_STREAM = "EVEN"
    GUESS_ODD_STREAM = "ODD"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    matched_program: Optional[ProgramEntry] = None
    matched_distance: Optional[int] = None
    bits_compared: Optional[int] = None

    def __post_init__(self):
        if self.kind is VerdictKind.INCONCLUSIVE:
            if self.matched_program is not None:
                raise UsageError("inconclusive verdicts carry no matched program")
        elif self.matched_program is None:
            raise UsageError("a guess must carry its matched program")

    @property
    def matched_length(self) -> Optional[int]:
        if self.matched_program is None:
            return None
        return self.matched_program.declared_length


INCONCLUSIVE = Verdict(VerdictKind.INCONCLUSIVE)


def restricted_search(
    m_even: BitString,
    m_odd: BitString,
    search_list: SearchList,
    tol: Tolerance,
) -> Verdict:
    """First entry (list order) whose candidate half matches a record prefix.

    For each entry of length l, the candidate transmission is the first
    2*k*l generator bits for its seed; its even half is compared against
    m_even[:k*l] and its odd half against m_odd[:k*l], even first. A
    comparison matches when d_H <= floor(q*k*l). No entry matching means
    the result is inconclusive.
    """
    k = tol.k
    need = k * search_list.l_max
    if len(m_even) < need or len(m_odd) < need:
        raise UsageError(
            f"records must hold at least k*l_max = {need} bits "
            f"(got {len(m_even)} even, {len(m_odd)} odd)"
        )
    table = search_list.candidate_table(k)
    packed_e = m_even.packed
    packed_o = m_odd.packed
    thresholds = [0] * (search_list.l_max + 1)
    masks = [0] * (search_list.l_max + 1)
    rec_e = [0] * (search_list.l_max + 1)
    rec_o = [0] * (search_list.l_max + 1)
    for length in range(1, search_list.l_max + 1):
        thresholds[length] = max_errors(tol.q, k, length)
        mask = (1 << (k * length)) - 1
        masks[length] = mask
        rec_e[length] = packed_e & mask
        rec_o[length] = packed_o & mask
    lengths = table.lengths
    cand_e = table.even
    cand_o = table.odd
    for i in range(len(lengths)):
        length = lengths[i]
        thr = thresholds[length]
        d = (cand_e[i] ^ rec_e[length]).bit_count()
        if d <= thr:
            return Verdict(
                VerdictKind.GUESS_EVEN_STREAM,
                matched_program=search_list.entries[i],
                matched_distance=d,
                bits_compared=k * length,
            )
        d = (cand_o[i] ^ rec_o[length]).bit_count()
        if d <= thr:
            return Verdict(
                VerdictKind.GUESS_ODD_STREAM,
                matched_program=search_list.entries[i],
                matched_distance=d,
                bits_compared=k * length,
            )
    return INCONCLUSIVE


def dovetail_search(
    x: BitString,
    z: BitString,
    family: ProgramFamily,
    tol: Tolerance,
    budget: int,
) -> Verdict:
    """Interleaved program search over an arbitrary family.

    x is the record taken in the diagonal basis (odd positions of the
    interleaved protocol) and z the computational one (even positions); a
    match on x yields GUESS_ODD_STREAM and a match on z GUESS_EVEN_STREAM.
    Each visit (program p, step budget t) whose output has reached k*|p|
    bits is tested against the x prefix first, then z, with the strict
    acceptance d_H < q*k*|p| (exact equality when q = 0). The search gives
    up after `budget` visits.
    """
    k = tol.k
    q = tol.q
    visits = 0
    for p, _t, output in dovetail(family):
        if visits >= budget:
            break
        visits += 1
        n_cmp = k * family.program_length(p)
        if len(output) < n_cmp or len(x) < n_cmp or len(z) < n_cmp:
            continue
        limit = q * k * family.program_length(p)
        out_packed = output.prefix(n_cmp).packed
        for record, kind in (
            (x, VerdictKind.GUESS_ODD_STREAM),
            (z, VerdictKind.GUESS_EVEN_STREAM),
        ):
            d = (out_packed ^ record.prefix(n_cmp).packed).bit_count()
            if (q == 0 and d == 0) or (q > 0 and d < limit):
                return Verdict(
                    kind,
                    matched_program=_entry_for(family, p),
                    matched_distance=d,
                    bits_compared=n_cmp,
                )
    return INCONCLUSIVE


def _entry_for(family: ProgramFamily, p: int) -> ProgramEntry:
    """The family's own entry when it has one, else a synthetic row for p."""
    if hasattr(family, "entry"):
        return family.entry(p)
    length = family.program_length(p)
    bits = BitString((p >> (length - 1 - i)) & 1 for i in range(length))
    return ProgramEntry(p, bits, length, p)
