"""Bijection between positive integers and bit strings.

Index 1 maps to the empty string, then "0", "1", "00", "01", ... so that
numeric order on indices equals length-then-lexicographic order on strings.
The code of n is the binary expansion of n with the leading 1 removed, which
gives len(bits_of_index(n)) == n.bit_length() - 1 and the sandwich
2**len(x) <= index_of_bits(x) < 2**(len(x)+1).
"""

from __future__ import annotations

from collections.abc import Iterator

_BITSET = frozenset("01")


def bits_of_index(n: int) -> str:
    """Code of index n >= 1: binary expansion without its leading 1."""
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    return format(n, "b")[1:]


def index_of_bits(x: str) -> int:
    """Inverse of bits_of_index; the empty string maps to 1."""
    if x and set(x) - _BITSET:
        raise ValueError(f"not a bit string: {x!r}")
    return int("1" + x, 2)


def enumerate_program_bits(limit: int) -> Iterator[str]:
    """Yield the codes of indices 1..limit in index (= length-lex) order."""
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    for n in range(1, limit + 1):
        yield bits_of_index(n)


def code_length_of_index(n: int) -> int:
    """len(bits_of_index(n)) without building the string."""
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    return n.bit_length() - 1
