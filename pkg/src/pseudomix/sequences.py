"""Finite bit/symbol string algebra.

Strings are immutable value types. Indexing is 0-based everywhere; the "even
elements" of a transmission are those at 0-based even indices, i.e. the first
transmitted element is an even one. Frequencies are exact rationals so that
sum-to-one is an identity, not a tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .errors import UsageError


class SymbolString:
    """Immutable finite sequence over the alphabet {0, ..., alphabet_size-1}."""

    __slots__ = ("symbols", "alphabet_size", "_packed")

    def __init__(self, symbols: Iterable[int], alphabet_size: int):
        if alphabet_size < 2:
            raise UsageError("alphabet_size must be at least 2")
        syms = tuple(int(s) for s in symbols)
        for s in syms:
            if not 0 <= s < alphabet_size:
                raise UsageError(f"symbol {s} outside alphabet of size {alphabet_size}")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "alphabet_size", alphabet_size)
        object.__setattr__(self, "_packed", None)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, type(self))
            and self.symbols == other.symbols
            and self.alphabet_size == other.alphabet_size
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.symbols, self.alphabet_size))

    def __reduce__(self):
        return (type(self), (self.symbols, self.alphabet_size))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_text()!r})"

    def prefix(self, n: int) -> "SymbolString":
        if n > len(self):
            raise UsageError(f"prefix length {n} exceeds string length {len(self)}")
        return type(self)._wrap(self.symbols[:n], self.alphabet_size)

    def to_text(self) -> str:
        """Digit run for alphabets up to 10, space-separated decimals beyond."""
        if self.alphabet_size <= 10:
            return "".join(str(s) for s in self.symbols)
        return " ".join(str(s) for s in self.symbols)

    @classmethod
    def from_text(cls, text: str, alphabet_size: int) -> "SymbolString":
        text = text.strip()
        if alphabet_size <= 10:
            syms = [int(c) for c in text]
        else:
            syms = [int(tok) for tok in text.split()]
        return cls(syms, alphabet_size)

    @classmethod
    def _wrap(cls, symbols: tuple, alphabet_size: int) -> "SymbolString":
        return cls(symbols, alphabet_size)


class BitString(SymbolString):
    """SymbolString over {0, 1} with fast packed-integer Hamming support."""

    __slots__ = ()

    def __init__(self, bits: Iterable[int] = ()):
        super().__init__(bits, 2)

    @property
    def bits(self) -> tuple:
        return self.symbols

    @property
    def packed(self) -> int:
        """Bits packed into one integer, position i at bit i (LSB first)."""
        if self._packed is None:
            p = 0
            for i, b in enumerate(self.symbols):
                if b:
                    p |= 1 << i
            object.__setattr__(self, "_packed", p)
        return self._packed

    def __reduce__(self):
        return (type(self), (self.symbols,))

    @classmethod
    def from_text(cls, text: str, alphabet_size: int = 2) -> "BitString":
        return cls(int(c) for c in text.strip())

    @classmethod
    def _wrap(cls, symbols: tuple, alphabet_size: int) -> "BitString":
        return cls(symbols)


def hamming_distance(a: BitString, b: BitString) -> int:
    """Number of positions where a and b differ; strings must be equal length."""
    if len(a) != len(b):
        raise UsageError(f"length mismatch: {len(a)} vs {len(b)}")
    return (a.packed ^ b.packed).bit_count()


def split_even_odd(s: BitString) -> tuple[BitString, BitString]:
    """Subsequences at 0-based even and odd indices, in order."""
    return BitString(s.symbols[0::2]), BitString(s.symbols[1::2])


def interleave(even: BitString, odd: BitString) -> BitString:
    """Inverse of split_even_odd; even may be one element longer than odd."""
    if len(even) - len(odd) not in (0, 1):
        raise UsageError("interleave needs len(even) - len(odd) in {0, 1}")
    out = []
    for e, o in zip(even.symbols, odd.symbols):
        out.append(e)
        out.append(o)
    if len(even) > len(odd):
        out.append(even.symbols[-1])
    return BitString(out)


def prefix(s: SymbolString, n: int) -> SymbolString:
    """First n symbols of s, same type as s."""
    return s.prefix(n)


def symbol_frequencies(s: SymbolString) -> list[Fraction]:
    """Per-symbol relative frequencies as exact rationals; sums to exactly 1."""
    if len(s) == 0:
        raise UsageError("frequencies of an empty string are undefined")
    counts = [0] * s.alphabet_size
    for sym in s.symbols:
        counts[sym] += 1
    total = len(s)
    return [Fraction(c, total) for c in counts]


BitsLike = Union[BitString, SymbolString]
