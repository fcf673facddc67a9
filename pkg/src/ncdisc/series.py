"""Finitely supported complex series on a free semigroup.

A series plays two roles: a vector in the square-summable sequence space
over the semigroup, and the symbol of the convolution operator it induces
there.  The product is convolution,

    (phi * psi)(w) = sum over prefixes u of w of phi(u) * psi(u^{-1} w),

which on basis elements is concatenation: ``xi_u * xi_v = xi_{uv}``.
All operations preserve finite support; coefficients below ``PRUNE_EPS``
in magnitude are dropped so that cancellation leaves no dust.
"""

from __future__ import annotations

import math
from typing import Iterable, ItemsView, Mapping, Optional

from .words import Alphabet, Word, transport

PRUNE_EPS = 1e-14

#: Degree of the zero series; keeps max-degree arithmetic total.
ZERO_DEGREE = float("-inf")


class Series:
    """Immutable finitely supported map from words to complex coefficients."""

    __slots__ = ("alphabet", "_coeffs")

    def __init__(
        self,
        alphabet: Alphabet,
        coeffs: Optional[Mapping[Word, complex]] = None,
    ):
        table: dict[Word, complex] = {}
        if coeffs:
            for word, value in coeffs.items():
                if word.alphabet != alphabet:
                    raise ValueError("coefficient at a word over a different alphabet")
                value = complex(value)
                if abs(value) > PRUNE_EPS:
                    table[word] = value
        self.alphabet = alphabet
        self._coeffs = table

    @classmethod
    def zero(cls, alphabet: Alphabet) -> "Series":
        return cls(alphabet)

    @classmethod
    def basis(cls, word: Word) -> "Series":
        """The indicator series xi_w."""
        return cls(word.alphabet, {word: 1.0})

    @classmethod
    def unit(cls, alphabet: Alphabet) -> "Series":
        """The convolution unit delta_e."""
        return cls.basis(alphabet.unit())

    # -- inspection ------------------------------------------------------

    def coeff(self, word: Word) -> complex:
        return self._coeffs.get(word, 0j)

    def iter_terms(self) -> ItemsView[Word, complex]:
        return self._coeffs.items()

    def items(self) -> list[tuple[Word, complex]]:
        """Terms sorted by word, for deterministic output."""
        return sorted(self._coeffs.items(), key=lambda kv: kv[0].sort_key())

    def support(self) -> frozenset[Word]:
        return frozenset(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def degree(self) -> float:
        """Max word length over the support; ``ZERO_DEGREE`` for the zero series."""
        if not self._coeffs:
            return ZERO_DEGREE
        return max(len(w) for w in self._coeffs)

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self._coeffs.values()))

    def l1_norm(self) -> float:
        return sum(abs(c) for c in self._coeffs.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def letters_used(self) -> frozenset[int]:
        return frozenset(letter for w in self._coeffs for letter in w.letters)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Series)
            and self.alphabet == other.alphabet
            and self._coeffs == other._coeffs
        )

    def allclose(self, other: "Series", tol: float = 1e-12) -> bool:
        return max_coeff_diff(self, other) <= tol

    def __repr__(self) -> str:
        if not self._coeffs:
            return "Series(0)"
        body = " + ".join(f"({c})*{w}" for w, c in self.items())
        return f"Series({body})"

    # -- linear structure and convolution --------------------------------

    def _require_same_alphabet(self, other: "Series") -> None:
        if self.alphabet != other.alphabet:
            raise ValueError("series over different alphabets")

    def __add__(self, other: "Series") -> "Series":
        self._require_same_alphabet(other)
        table = dict(self._coeffs)
        for w, c in other._coeffs.items():
            table[w] = table.get(w, 0j) + c
        return Series(self.alphabet, table)

    def __neg__(self) -> "Series":
        return Series(self.alphabet, {w: -c for w, c in self._coeffs.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scaled(self, scalar: complex) -> "Series":
        scalar = complex(scalar)
        return Series(self.alphabet, {w: scalar * c for w, c in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Series):
            return convolve(self, other)
        return self.scaled(other)

    def __rmul__(self, scalar: complex) -> "Series":
        return self.scaled(scalar)

    # -- interchange format ----------------------------------------------

    def to_json_dict(self) -> dict:
        terms = [
            {"word": str(w), "re": c.real, "im": c.imag} for w, c in self.items()
        ]
        return {"alphabet": self.alphabet.size, "terms": terms}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Series":
        alphabet = Alphabet(int(data["alphabet"]))
        table: dict[Word, complex] = {}
        for term in data.get("terms", ()):
            word = alphabet.parse(term["word"])
            value = complex(float(term["re"]), float(term.get("im", 0.0)))
            table[word] = table.get(word, 0j) + value
        return cls(alphabet, table)


def convolve(phi: Series, psi: Series) -> Series:
    """Convolution product; the bilinear extension of ``xi_u * xi_v = xi_{uv}``."""
    phi._require_same_alphabet(psi)
    table: dict[Word, complex] = {}
    for u, a in phi.iter_terms():
        for v, b in psi.iter_terms():
            w = u * v
            table[w] = table.get(w, 0j) + a * b
    return Series(phi.alphabet, table)


def right_apply(phi: Series, psi: Series) -> Series:
    """The right convolution operator with symbol phi applied to psi: ``psi * phi``."""
    return convolve(psi, phi)


def adjoint_shift(u: Word, phi: Series) -> Series:
    """Apply the adjoint of the isometry ``xi_w -> xi_{uw}`` to phi.

    Keeps the terms left-divisible by u and strips the prefix; everything
    else is annihilated.
    """
    table: dict[Word, complex] = {}
    for w, c in phi.iter_terms():
        rest = w.strip_prefix(u)
        if rest is not None:
            table[rest] = c
    return Series(phi.alphabet, table)


def conjugate_by(w: Word, phi: Series) -> Series:
    """Symbol of the conjugated convolution operator.

    Each term at u moves to the unique v with ``u*w == w*v`` and is dropped
    when no such v exists; this is the series-level form of sandwiching the
    convolution operator between the shift by w and its adjoint.
    """
    table: dict[Word, complex] = {}
    for u, c in phi.iter_terms():
        v = transport(w, u)
        if v is not None:
            table[v] = c
    return Series(phi.alphabet, table)


def degree_part(phi: Series, j: int) -> Series:
    """Restriction of phi to words of length exactly j."""
    return Series(phi.alphabet, {w: c for w, c in phi.iter_terms() if len(w) == j})


def cesaro(phi: Series, k: int) -> Series:
    """Fejer-weighted truncation: degree-j part scaled by ``1 - j/k`` for j < k."""
    if k < 1:
        raise ValueError("order must be positive")
    table = {
        w: c * (1.0 - len(w) / k) for w, c in phi.iter_terms() if len(w) < k
    }
    return Series(phi.alphabet, table)


def conditional_expectation(phi: Series, letters: Iterable[int]) -> Series:
    """Restriction of phi to words using only the given generator indices.

    A multiplicative idempotent contraction; it fixes phi exactly once the
    index set covers every letter in the support.
    """
    allowed = frozenset(letters)
    size = phi.alphabet.size
    for letter in allowed:
        if not 0 <= letter < size:
            raise ValueError(f"letter {letter} outside alphabet of size {size}")
    table = {
        w: c
        for w, c in phi.iter_terms()
        if all(letter in allowed for letter in w.letters)
    }
    return Series(phi.alphabet, table)


def first_letter_part(phi: Series, letter: int) -> Series:
    """Restriction of phi to words whose first letter is the given generator."""
    if not 0 <= letter < phi.alphabet.size:
        raise ValueError(f"letter {letter} outside alphabet of size {phi.alphabet.size}")
    table = {
        w: c for w, c in phi.iter_terms() if w.letters and w.letters[0] == letter
    }
    return Series(phi.alphabet, table)


def max_coeff_diff(phi: Series, psi: Series) -> float:
    """Largest coefficientwise deviation between two series."""
    phi._require_same_alphabet(psi)
    words = set(phi._coeffs) | set(psi._coeffs)
    return max((abs(phi.coeff(w) - psi.coeff(w)) for w in words), default=0.0)
