"""Exact combinatorics of finitely generated free semigroups.

Words over the generators ``z_0, ..., z_{m-1}`` form the free semigroup
under concatenation, with the empty word ``e`` as unit.  This module
provides the graded-lexicographic well-order, prefix/suffix division,
commutation and primitive roots, the transport relation ``u*w == w*v``
used to conjugate convolution symbols, and deterministic enumeration.

Words are immutable, hashable value objects; the text form is ``e`` for
the unit and concatenated letters like ``z0z1z0`` otherwise.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional

_WORD_GRAMMAR = re.compile(r"(?:z\d+)+")
_LETTER = re.compile(r"z(\d+)")


@dataclass(frozen=True)
class Alphabet:
    """A finite generator set; the generators are the indices ``0..size-1``.

    The well-order on the generators is the numeric index order.
    """

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("alphabet must have at least one generator")

    def letters(self) -> range:
        return range(self.size)

    def unit(self) -> "Word":
        return Word(self, ())

    def generator(self, index: int) -> "Word":
        return Word(self, (index,))

    def word(self, letters: Iterable[int]) -> "Word":
        return Word(self, tuple(letters))

    def parse(self, text: str) -> "Word":
        """Inverse of ``str(word)``: ``e`` or a run of ``z<i>`` letters."""
        if text == "e":
            return self.unit()
        if not _WORD_GRAMMAR.fullmatch(text):
            raise ValueError(f"not a word: {text!r}")
        return self.word(int(digits) for digits in _LETTER.findall(text))


class Word:
    """An immutable word of generator indices; the empty word is the unit.

    Ordering is by length first, then letterwise by generator index.  This
    is a total well-order compatible with multiplication on both sides.
    """

    __slots__ = ("alphabet", "letters", "_hash")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = ()):
        letters = tuple(letters)
        size = alphabet.size
        for letter in letters:
            if not 0 <= letter < size:
                raise ValueError(f"letter {letter} outside alphabet of size {size}")
        self.alphabet = alphabet
        self.letters = letters
        self._hash = hash((size, letters))

    def __len__(self) -> int:
        return len(self.letters)

    def is_unit(self) -> bool:
        return not self.letters

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.letters), self.letters)

    def _require_same_alphabet(self, other: "Word") -> None:
        if self.alphabet != other.alphabet:
            raise ValueError("words over different alphabets")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Word") -> bool:
        self._require_same_alphabet(other)
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Word") -> bool:
        self._require_same_alphabet(other)
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "Word") -> bool:
        return not self <= other

    def __ge__(self, other: "Word") -> bool:
        return not self < other

    def __mul__(self, other: "Word") -> "Word":
        self._require_same_alphabet(other)
        return Word(self.alphabet, self.letters + other.letters)

    def __pow__(self, exponent: int) -> "Word":
        if exponent < 0:
            raise ValueError("no inverses in a free semigroup")
        return Word(self.alphabet, self.letters * exponent)

    def strip_prefix(self, u: "Word") -> Optional["Word"]:
        """The word v with ``self == u * v``, or None if u is not a prefix."""
        self._require_same_alphabet(u)
        n = len(u.letters)
        if self.letters[:n] != u.letters:
            return None
        return Word(self.alphabet, self.letters[n:])

    def strip_suffix(self, u: "Word") -> Optional["Word"]:
        """The word v with ``self == v * u``, or None if u is not a suffix."""
        self._require_same_alphabet(u)
        n = len(u.letters)
        if n == 0:
            return self
        if n > len(self.letters) or self.letters[-n:] != u.letters:
            return None
        return Word(self.alphabet, self.letters[:-n])

    def commutes_with(self, other: "Word") -> bool:
        self._require_same_alphabet(other)
        return self.letters + other.letters == other.letters + self.letters

    def primitive_root(self) -> tuple["Word", int]:
        """The shortest v and largest m with ``self == v**m``; unit rejected.

        Two nonempty words commute exactly when they share a primitive root.
        """
        n = len(self.letters)
        if n == 0:
            raise ValueError("the unit has no primitive root")
        for d in range(1, n + 1):
            if n % d == 0 and self.letters[:d] * (n // d) == self.letters:
                return Word(self.alphabet, self.letters[:d]), n // d
        raise AssertionError("unreachable: every word is its own root")

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(f"z{letter}" for letter in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


def min_word(words: Iterable[Word]) -> Word:
    """Least element of a nonempty collection under the graded-lex order.

    Staged filtering: keep the words of minimal length, then repeatedly
    keep those with the least letter at the next position.
    """
    survivors = list(words)
    if not survivors:
        raise ValueError("empty collection has no least word")
    n = min(len(w) for w in survivors)
    survivors = [w for w in survivors if len(w) == n]
    for position in range(n):
        least = min(w.letters[position] for w in survivors)
        survivors = [w for w in survivors if w.letters[position] == least]
    return survivors[0]


def transport(w: Word, u: Word) -> Optional[Word]:
    """The unique v with ``u * w == w * v``, or None if there is none.

    Uniqueness is cancellation: ``u*w`` determines v once w is a prefix.
    """
    return (u * w).strip_prefix(w)


def power_shift_check(w: Word, u: Word, v: Word, k: int) -> bool:
    """Check one instance of the power-shift implication.

    If ``v * w**k == w**k * u`` then u and w commute and ``u == v``; the
    instance passes vacuously when the hypothesis fails.  The implication
    is guaranteed for ``k >= len(u)/len(w) + 1``; the unit w is rejected.
    """
    if w.is_unit():
        raise ValueError("base word must not be the unit")
    wk = w**k
    if v * wk != wk * u:
        return True
    return u.commutes_with(w) and u == v


def enumerate_words(alphabet: Alphabet, max_len: int) -> list[Word]:
    """All words of length <= max_len, ascending in the graded-lex order."""
    if max_len < 0:
        raise ValueError("negative length bound")
    out: list[Word] = []
    for n in range(max_len + 1):
        for letters in itertools.product(alphabet.letters(), repeat=n):
            out.append(Word(alphabet, letters))
    return out
