"""Finite-word bookkeeping: canonical ordering and normalization of symbol sequences.

Words are tuples of symbols. Everything that enumerates words does so in the
same fixed order, by length first and lexicographically (in alphabet order)
within each length, so that matrices indexed by words are comparable across
runs.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

Word = tuple


def normalize_word(word, alphabet: Sequence[str]) -> Word:
    """Coerce ``word`` to a tuple of symbols from ``alphabet``.

    Plain strings are split into characters when every alphabet symbol is a
    single character; for multi-character alphabets pass an explicit sequence.
    """
    if isinstance(word, str):
        if word == "":
            return ()
        if any(len(s) != 1 for s in alphabet):
            raise ValueError(
                "string words are ambiguous for multi-character alphabets; "
                "pass a sequence of symbols"
            )
        word = tuple(word)
    else:
        word = tuple(word)
    known = set(alphabet)
    for s in word:
        if s not in known:
            raise ValueError(f"unknown symbol {s!r}; alphabet is {list(alphabet)}")
    return word


def words_of_length(alphabet: Sequence[str], length: int) -> list[Word]:
    """All words of exactly ``length`` symbols, lexicographic in alphabet order."""
    return list(product(alphabet, repeat=length))


def words_up_to(alphabet: Sequence[str], max_length: int) -> list[Word]:
    """All words of length 0..max_length, by length then lexicographically."""
    out: list[Word] = []
    for n in range(max_length + 1):
        out.extend(words_of_length(alphabet, n))
    return out


def word_count_up_to(n_symbols: int, max_length: int) -> int:
    return sum(n_symbols**k for k in range(max_length + 1))
