"""Monte Carlo harness: repeated transmission + search runs and their statistics.

Every repetition derives its own random substreams from
(master_seed, k, rep_index, stream_tag) through the avalanche mixer, one tag
for protocol choices (sender seed and basis), one for quantum outcomes, one
for channel pulse counting. Results are therefore bit-identical for a fixed
master seed regardless of execution order or worker count, and repetitions
can be farmed out embarrassingly.

The photon channel only affects pulse accounting: each qubit is resent until
detected, so detection losses never change measured bit values, only the
emitted-pulse tally.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .distinguisher import (
    Tolerance,
    Verdict,
    VerdictKind,
    as_fraction,
    effective_tolerance,
    error_probability_bound,
    max_errors,
    restricted_search,
)
from .errors import ConfigError, UsageError
from .programs import SearchList, build_search_list
from .quantum import COMPUTATIONAL, DIAGONAL, QubitBasis, encode_qubit, outcome_probability_one
from .rng import RandomSource, SplitMix64, substream
from .sequences import BitString

TAG_ENV = 1
TAG_PHYS = 2
TAG_CHANNEL = 3

_WILSON_Z95 = 1.959963984540054


@dataclass(frozen=True)
class ChannelModel:
    """Pulse channel: ideal (every qubit costs one pulse) or Poissonian faint
    pulses with mean photon number mu, detected with probability 1 - e^-mu
    (exact) or mu (linearized), then kept with probability 1/2 by the passive
    basis choice."""

    kind: str = "ideal"
    mu: float = 0.0
    approx: str = "exact"

    def __post_init__(self):
        if self.kind not in ("ideal", "poisson"):
            raise ConfigError(f"unknown channel kind {self.kind!r}")
        if self.kind == "poisson":
            if self.mu <= 0:
                raise ConfigError("poisson channel needs mu > 0")
            if self.approx not in ("exact", "linear"):
                raise ConfigError(f"unknown channel approximation {self.approx!r}")
            if self.approx == "linear" and self.mu > 1:
                raise ConfigError("linear detection probability needs mu <= 1")

    def detection_probability(self) -> float:
        if self.approx == "linear":
            return self.mu
        return 1.0 - math.exp(-self.mu)


IDEAL_CHANNEL = ChannelModel()


@dataclass(frozen=True)
class ExperimentConfig:
    l_max: int
    k_values: tuple[int, ...]
    q: Fraction
    f: float
    reps: int
    master_seed: int
    channel: ChannelModel = IDEAL_CHANNEL

    def __post_init__(self):
        object.__setattr__(self, "q", as_fraction(self.q))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if self.l_max < 1:
            raise ConfigError("l_max must be at least 1")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigError("k values must be positive")
        if not 0 <= self.q < Fraction(1, 2):
            raise ConfigError("q must lie in [0, 1/2)")
        if not 0.0 <= self.f < 0.5:
            raise ConfigError("f must lie in [0, 1/2)")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")

    def to_json_dict(self) -> dict:
        d = {
            "l_max": self.l_max,
            "k_values": list(self.k_values),
            "q": str(self.q),
            "f": self.f,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "channel": self.channel.kind,
        }
        if self.channel.kind == "poisson":
            d["mu"] = self.channel.mu
            d["channel_approx"] = self.channel.approx
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        kind = d.get("channel", "ideal")
        channel = (
            ChannelModel("poisson", float(d["mu"]), d.get("channel_approx", "exact"))
            if kind == "poisson"
            else IDEAL_CHANNEL
        )
        return cls(
            l_max=int(d["l_max"]),
            k_values=tuple(int(k) for k in d["k_values"]),
            q=as_fraction(d["q"]),
            f=float(d["f"]),
            reps=int(d["reps"]),
            master_seed=int(d["master_seed"]),
            channel=channel,
        )


class RunResult(Enum):
    CORRECT = "CORRECT"
    ERROR = "ERROR"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class RunRecord:
    rep: int
    k: int
    alice_basis: str
    alice_seed_length: int
    alice_seed_value: int
    verdict: Verdict
    result: RunResult
    pulses_emitted: Optional[int] = None

    @property
    def matched_length(self) -> Optional[int]:
        return self.verdict.matched_length


_BASIS_BY_LABEL = {b.label: b for b in (COMPUTATIONAL, DIAGONAL)}


def _snapped_probability_one(prep_basis: QubitBasis, bit: int, meas_basis: QubitBasis) -> float:
    """Born probability of reading 1, snapped onto {0, 1/2, 1} so the
    fair-coin case is exact."""
    p1 = outcome_probability_one(encode_qubit(bit, prep_basis), meas_basis)
    for exact in (0.0, 0.5, 1.0):
        if abs(p1 - exact) < 1e-12:
            return exact
    return p1


_P_ONE = {
    (prep.label, bit, meas.label): _snapped_probability_one(prep, bit, meas)
    for prep in (COMPUTATIONAL, DIAGONAL)
    for bit in (0, 1)
    for meas in (COMPUTATIONAL, DIAGONAL)
}


def run_transmission(
    alice_bits: BitString,
    alice_basis: QubitBasis,
    f: float,
    rng: RandomSource,
) -> tuple[BitString, BitString]:
    """Send each bit in alice_basis; measure even positions in the
    computational basis and odd positions in the diagonal basis, flipping every
    observed symbol with probability f.

    Two doubles are consumed per qubit, measurement draw first: the outcome is
    1 when the first draw falls below the Born probability, and the flip fires
    when the second falls below f.
    """
    n = len(alice_bits)
    if n % 2 != 0:
        raise UsageError("transmission length must be even")
    if isinstance(rng, SplitMix64):
        u = rng.doubles(2 * n)
        u_meas = u[0::2]
        u_flip = u[1::2]
        p_one = np.empty(n)
        bits = np.fromiter(alice_bits.symbols, dtype=np.float64, count=n)
        even_idx = np.arange(n) % 2 == 0
        meas_matches_prep = even_idx == (alice_basis is COMPUTATIONAL)
        p_one[meas_matches_prep] = bits[meas_matches_prep]
        p_one[~meas_matches_prep] = 0.5
        outcomes = (u_meas < p_one).astype(np.int8) ^ (u_flip < f).astype(np.int8)
        m_even = BitString(int(b) for b in outcomes[0::2])
        m_odd = BitString(int(b) for b in outcomes[1::2])
        return m_even, m_odd
    outcomes = []
    for j in range(n):
        meas = COMPUTATIONAL if j % 2 == 0 else DIAGONAL
        p_one = _P_ONE[(alice_basis.label, alice_bits[j], meas.label)]
        outcome = int(rng.next_double() < p_one)
        outcome ^= int(rng.next_double() < f)
        outcomes.append(outcome)
    return BitString(outcomes[0::2]), BitString(outcomes[1::2])


def _pulses_for_run(n_qubits: int, channel: ChannelModel, rng: SplitMix64) -> int:
    """Total pulses to get n_qubits accepted: geometric resend-until-detect
    with per-pulse success p_detect/2, sampled by inversion (one draw each)."""
    p = channel.detection_probability() * 0.5
    u = rng.doubles(n_qubits)
    counts = np.floor(np.log1p(-u) / math.log1p(-p)).astype(np.int64) + 1
    return int(counts.sum())


def run_single(
    config: ExperimentConfig,
    k: int,
    rep_index: int,
    search_list: Optional[SearchList] = None,
) -> RunRecord:
    """One repetition: draw the sender's seed and basis, transmit, search."""
    if search_list is None:
        search_list = _shared_search_list(config.l_max)
    env = substream(config.master_seed, k, rep_index, TAG_ENV)
    alice_seed = env.next_below(1 << config.l_max)
    alice_basis = COMPUTATIONAL if env.next_bit() == 0 else DIAGONAL
    n_bits = 2 * k * config.l_max
    alice_bits = search_list.stream(alice_seed, n_bits)
    phys = substream(config.master_seed, k, rep_index, TAG_PHYS)
    m_even, m_odd = run_transmission(alice_bits, alice_basis, config.f, phys)
    verdict = restricted_search(m_even, m_odd, search_list, Tolerance(config.q, k))
    if verdict.kind is VerdictKind.INCONCLUSIVE:
        result = RunResult.INCONCLUSIVE
    else:
        guessed = (
            COMPUTATIONAL
            if verdict.kind is VerdictKind.GUESS_EVEN_STREAM
            else DIAGONAL
        )
        result = RunResult.CORRECT if guessed is alice_basis else RunResult.ERROR
    pulses = None
    if config.channel.kind == "poisson":
        chan = substream(config.master_seed, k, rep_index, TAG_CHANNEL)
        pulses = _pulses_for_run(n_bits, config.channel, chan)
    return RunRecord(
        rep=rep_index,
        k=k,
        alice_basis=alice_basis.label,
        alice_seed_length=config.l_max,
        alice_seed_value=alice_seed,
        verdict=verdict,
        result=result,
        pulses_emitted=pulses,
    )


_SEARCH_LISTS: dict[int, SearchList] = {}


def _shared_search_list(l_max: int) -> SearchList:
    sl = _SEARCH_LISTS.get(l_max)
    if sl is None:
        sl = build_search_list(l_max)
        _SEARCH_LISTS[l_max] = sl
    return sl


def _run_chunk(config_dict: dict, k: int, rep_lo: int, rep_hi: int) -> list[RunRecord]:
    config = ExperimentConfig.from_json_dict(config_dict)
    sl = _shared_search_list(config.l_max)
    return [run_single(config, k, rep, sl) for rep in range(rep_lo, rep_hi)]


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise UsageError("trials must be positive")
    p_hat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class KStats:
    k: int
    reps: int
    errors: int
    inconclusive: int
    error_rate: float
    wilson_lo: float
    wilson_hi: float
    bound_noiseless: Optional[float]
    bound_noisy: Optional[float]
    n_err_l1: int
    q_eff_l1: Fraction
    errors_by_length: dict[int, int] = field(compare=False)

    @property
    def errors_from_l1(self) -> int:
        return self.errors_by_length.get(1, 0)

    @property
    def inconclusive_rate(self) -> float:
        return self.inconclusive / self.reps


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    runs: tuple[RunRecord, ...]
    per_k: dict[int, KStats]
    mean_pulses_per_qubit: Optional[float]


def _aggregate_k(config: ExperimentConfig, k: int, records: list[RunRecord]) -> KStats:
    errors = sum(1 for r in records if r.result is RunResult.ERROR)
    inconclusive = sum(1 for r in records if r.result is RunResult.INCONCLUSIVE)
    by_length: dict[int, int] = {}
    for r in records:
        if r.result is RunResult.ERROR:
            by_length[r.matched_length] = by_length.get(r.matched_length, 0) + 1
    lo, hi = wilson_interval(errors, len(records))
    return KStats(
        k=k,
        reps=len(records),
        errors=errors,
        inconclusive=inconclusive,
        error_rate=errors / len(records),
        wilson_lo=lo,
        wilson_hi=hi,
        bound_noiseless=error_probability_bound(0, k).value,
        bound_noisy=error_probability_bound(config.q, k).value,
        n_err_l1=max_errors(config.q, k, 1),
        q_eff_l1=effective_tolerance(config.q, k, 1),
        errors_by_length=by_length,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Every (k, rep) pair once; aggregation independent of execution order."""
    chunks: list[tuple[int, int, int]] = []
    chunk_size = config.reps if workers <= 1 else max(64, math.ceil(config.reps / (workers * 8)))
    for k in config.k_values:
        lo = 0
        while lo < config.reps:
            hi = min(config.reps, lo + chunk_size)
            chunks.append((k, lo, hi))
            lo = hi
    config_dict = config.to_json_dict()
    if workers <= 1:
        chunk_results = [_run_chunk(config_dict, *c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(
                pool.map(
                    _run_chunk,
                    (config_dict for _ in chunks),
                    (c[0] for c in chunks),
                    (c[1] for c in chunks),
                    (c[2] for c in chunks),
                )
            )
    runs: list[RunRecord] = []
    for result in chunk_results:
        runs.extend(result)
    per_k = {}
    for k in config.k_values:
        per_k[k] = _aggregate_k(config, k, [r for r in runs if r.k == k])
    mean_pulses = None
    if config.channel.kind == "poisson":
        total_pulses = sum(r.pulses_emitted for r in runs)
        total_qubits = sum(2 * r.k * config.l_max for r in runs)
        mean_pulses = total_pulses / total_qubits
    return ExperimentResult(
        config=config,
        runs=tuple(runs),
        per_k=per_k,
        mean_pulses_per_qubit=mean_pulses,
    )


@dataclass(frozen=True)
class SweepRow:
    l_max: int
    reps: int
    errors: int
    error_rate: float


def sweep_lmax(
    base_config: ExperimentConfig,
    l_max_values: list[int],
    k: int,
    q,
    workers: int = 1,
) -> list[SweepRow]:
    """Rerun the experiment at fixed (k, q) for each list size 2^(l+1) - 2."""
    rows = []
    for l_max in l_max_values:
        config = replace(
            base_config, l_max=l_max, k_values=(k,), q=as_fraction(q)
        )
        result = run_experiment(config, workers=workers)
        stats = result.per_k[k]
        rows.append(SweepRow(l_max, stats.reps, stats.errors, stats.error_rate))
    return rows


def channel_stats(mu: float, approx: str, trials: int, rng: RandomSource) -> float:
    """Mean emitted pulses per accepted qubit, by per-pulse simulation:
    each pulse is detected with the channel's probability and then kept with
    probability 1/2."""
    if mu <= 0:
        raise UsageError("mu must be positive")
    channel = ChannelModel("poisson", mu, approx)
    p_detect = channel.detection_probability()
    total_pulses = 0
    for _ in range(trials):
        while True:
            total_pulses += 1
            if rng.next_double() < p_detect and rng.next_bit() == 0:
                break
    return total_pulses / trials


def _fmt(value) -> str:
    """CSV cell: floats at 9 significant digits, None empty."""
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return f"{float(value):.9g}"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


RUNS_CSV_COLUMNS = [
    "rep", "k", "alice_basis", "alice_seed", "verdict", "result",
    "matched_program_index", "matched_length", "d_H", "bits_compared",
    "pulses_emitted",
]

AGGREGATE_CSV_COLUMNS = [
    "k", "reps", "errors", "inconclusive", "error_rate", "wilson_lo",
    "wilson_hi", "bound_noiseless", "bound_noisy", "n_err_l1", "q_eff_l1",
    "errors_from_l1",
]

LMAX_SWEEP_CSV_COLUMNS = ["lmax", "reps", "errors", "error_rate"]


def write_runs_csv(runs, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_CSV_COLUMNS)
        for r in runs:
            v = r.verdict
            matched_index = (
                v.matched_program.program_index if v.matched_program else None
            )
            writer.writerow(
                [
                    _fmt(r.rep), _fmt(r.k), r.alice_basis, _fmt(r.alice_seed_value),
                    v.kind.value, r.result.value, _fmt(matched_index),
                    _fmt(v.matched_length), _fmt(v.matched_distance),
                    _fmt(v.bits_compared), _fmt(r.pulses_emitted),
                ]
            )


def write_aggregate_csv(per_k: dict[int, KStats], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_CSV_COLUMNS)
        for k in sorted(per_k):
            s = per_k[k]
            writer.writerow(
                [
                    _fmt(s.k), _fmt(s.reps), _fmt(s.errors), _fmt(s.inconclusive),
                    _fmt(s.error_rate), _fmt(s.wilson_lo), _fmt(s.wilson_hi),
                    _fmt(s.bound_noiseless), _fmt(s.bound_noisy),
                    _fmt(s.n_err_l1), _fmt(s.q_eff_l1), _fmt(s.errors_from_l1),
                ]
            )


def write_lmax_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LMAX_SWEEP_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [_fmt(row.l_max), _fmt(row.reps), _fmt(row.errors), _fmt(row.error_rate)]
            )


def default_worker_count() -> int:
    return max(1, os.cpu_count() or 1)
