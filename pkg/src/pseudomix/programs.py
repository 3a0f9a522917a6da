"""The program family a computable sender can run.

The generator is a from-scratch 32-bit Mersenne Twister (standard Knuth-style
integer seeding, standard tempering) binarized through the usual 53-bit double
conversion: each output double in [0, 1) becomes one bit, 1 iff the double is
at least 0.5. Programs are seeds: the search list enumerates every seed of
every bit-length up to l_max, shorter lengths first, so the same seed value
reappears at each length it fits in, with an identical output stream.
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass
from typing import Iterator, Protocol

from .errors import UsageError
from .sequences import BitString

_U32 = 0xFFFFFFFF


class MT19937:
    """32-bit Mersenne Twister (period 2^19937 - 1)."""

    def __init__(self, seed: int):
        mt = [0] * 624
        mt[0] = seed & _U32
        for i in range(1, 624):
            mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> 30)) + i) & _U32
        self._mt = mt
        self._index = 624

    def _twist(self):
        mt = self._mt
        for i in range(624):
            y = (mt[i] & 0x80000000) | (mt[(i + 1) % 624] & 0x7FFFFFFF)
            v = mt[(i + 397) % 624] ^ (y >> 1)
            if y & 1:
                v ^= 0x9908B0DF
            mt[i] = v
        self._index = 0

    def next_uint32(self) -> int:
        if self._index >= 624:
            self._twist()
        y = self._mt[self._index]
        self._index += 1
        y ^= y >> 11
        y ^= (y << 7) & 0x9D2C5680
        y ^= (y << 15) & 0xEFC60000
        y ^= y >> 18
        return y

    def next_double(self) -> float:
        """53-bit uniform double in [0, 1) from two consecutive outputs."""
        a = self.next_uint32() >> 5
        b = self.next_uint32() >> 6
        return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)


def mt19937_bits(seed_value: int, n: int) -> BitString:
    """First n binarized bits of the generator stream for a 32-bit seed."""
    if n < 0:
        raise UsageError("bit count must be non-negative")
    gen = MT19937(seed_value)
    return BitString(int(gen.next_double() >= 0.5) for _ in range(n))


@dataclass(frozen=True)
class ProgramEntry:
    """One search-list row: a seed at a declared bit-length."""

    program_index: int
    seed_bits: BitString
    declared_length: int
    seed_value: int

    def __post_init__(self):
        if self.declared_length < 1:
            raise UsageError("program length must be at least 1")
        if len(self.seed_bits) != self.declared_length:
            raise UsageError("seed_bits length must equal the declared length")
        if self.seed_value >= 1 << self.declared_length:
            raise UsageError("seed value does not fit in the declared length")


def _seed_bits(value: int, length: int) -> BitString:
    """Big-endian bit representation of value, zero-padded to length."""
    return BitString((value >> (length - 1 - i)) & 1 for i in range(length))


class SearchList:
    """All seeds of lengths 1..l_max, ordered by (length, seed value).

    2^(l_max+1) - 2 entries in total. Seed values with leading zeros repeat
    at every length they fit in and generate identical streams, which is what
    lets short pseudo-programs resemble prefixes of longer ones. The list is
    immutable; a private per-seed stream cache and per-k candidate tables are
    grown lazily for the search hot path.
    """

    def __init__(self, l_max: int):
        if l_max < 1:
            raise UsageError("l_max must be at least 1")
        entries = []
        index = 0
        for length in range(1, l_max + 1):
            for value in range(1 << length):
                entries.append(
                    ProgramEntry(index, _seed_bits(value, length), length, value)
                )
                index += 1
        self.l_max = l_max
        self.entries = tuple(entries)
        self._streams: dict[int, BitString] = {}
        self._tables: dict[int, "CandidateTable"] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ProgramEntry]:
        return iter(self.entries)

    def stream(self, seed_value: int, n_bits: int) -> BitString:
        """Cached generator stream prefix for a seed value; the cache grows
        geometrically so ascending-k table builds do not regenerate per k."""
        cached = self._streams.get(seed_value)
        if cached is None or len(cached) < n_bits:
            grown = max(n_bits, 2 * len(cached) if cached is not None else 0, 64)
            cached = mt19937_bits(seed_value, grown)
            self._streams[seed_value] = cached
        return cached.prefix(n_bits)

    def candidate_table(self, k: int) -> "CandidateTable":
        """Packed per-entry candidate halves for comparisons of k bits per
        program-length unit; built once per k and reused across searches."""
        table = self._tables.get(k)
        if table is None:
            with self._lock:
                table = self._tables.get(k)
                if table is None:
                    table = CandidateTable(self, k)
                    self._tables[k] = table
        return table


def build_search_list(l_max: int) -> SearchList:
    return SearchList(l_max)


def export_search_list_csv(search_list: SearchList, path) -> None:
    """Write the list as CSV: program_index, seed_bits, length, first 32 bits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["program_index", "seed_bits", "length", "bit_string"])
        for entry in search_list:
            writer.writerow(
                [
                    entry.program_index,
                    entry.seed_bits.to_text(),
                    entry.declared_length,
                    search_list.stream(entry.seed_value, 32).to_text(),
                ]
            )


class CandidateTable:
    """Per-entry packed candidate bits for a fixed k.

    For an entry of length l the candidate transmission is the first 2*k*l
    stream bits; its even/odd halves are packed LSB-first into integers and
    masked to k*l bits so a search is two xor+popcount operations per entry.
    """

    def __init__(self, search_list: SearchList, k: int):
        if k < 1:
            raise UsageError("k must be at least 1")
        self.k = k
        self.lengths = []
        self.even = []
        self.odd = []
        packed_cache: dict[int, tuple[int, int]] = {}
        for entry in search_list.entries:
            n_cmp = k * entry.declared_length
            packed = packed_cache.get(entry.seed_value)
            if packed is None:
                full = search_list.stream(entry.seed_value, 2 * k * search_list.l_max)
                pe = po = 0
                sym = full.symbols
                for i in range(len(sym) // 2):
                    if sym[2 * i]:
                        pe |= 1 << i
                    if sym[2 * i + 1]:
                        po |= 1 << i
                packed = (pe, po)
                packed_cache[entry.seed_value] = packed
            mask = (1 << n_cmp) - 1
            self.lengths.append(entry.declared_length)
            self.even.append(packed[0] & mask)
            self.odd.append(packed[1] & mask)


class ProgramFamily(Protocol):
    """A step-budgeted enumerable program collection.

    evaluate(p, t) is deterministic and prefix-monotone in t: the output under
    budget t is a prefix of the output under any larger budget.
    """

    def evaluate(self, program: int, budget: int) -> BitString: ...

    def program_length(self, program: int) -> int: ...

    def size(self) -> int | None: ...


class SeedProgramFamily:
    """Search-list entries as programs; one budget step emits one bit."""

    def __init__(self, search_list: SearchList):
        self._list = search_list

    def evaluate(self, program: int, budget: int) -> BitString:
        entry = self._list.entries[program]
        return self._list.stream(entry.seed_value, budget)

    def program_length(self, program: int) -> int:
        return self._list.entries[program].declared_length

    def size(self) -> int | None:
        return len(self._list)

    def entry(self, program: int) -> ProgramEntry:
        return self._list.entries[program]


class RepeatingPatternFamily:
    """Toy family for exercising the enumerator: program p emits the binary
    representation of p repeated forever, one bit per budget step."""

    def evaluate(self, program: int, budget: int) -> BitString:
        pattern = [(program >> (self.program_length(program) - 1 - i)) & 1
                   for i in range(self.program_length(program))]
        return BitString(pattern[i % len(pattern)] for i in range(budget))

    def program_length(self, program: int) -> int:
        return max(1, program.bit_length())

    def size(self) -> int | None:
        return None


def dovetail(family: ProgramFamily) -> Iterator[tuple[int, int, BitString]]:
    """Visit (program, budget) pairs in the interleaved enumeration order
    (budget 0: program 0; budget 1: programs 0, 1; ...), yielding the
    budget-limited output at each visit. Runs forever unless the family is
    finite and exhausted, so the consumer owns the stopping rule."""
    size = family.size()
    t = 0
    while True:
        last = t if size is None else min(t, size - 1)
        for p in range(last + 1):
            yield p, t, family.evaluate(p, t)
        t += 1
