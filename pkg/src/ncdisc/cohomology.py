"""Hochschild cochain complex with scalar coefficients.

Cochains are finitely supported coefficient tables on tuples of words,
representing multilinear functionals on the span of the basis shifts with
values in the scalars.  Both module actions multiply by the coefficient at
the unit word, so the bimodule is symmetric and the degree-zero coboundary
vanishes.  The coboundary of a table is again a finitely supported table,
and every cocycle of arity at least two is trivialized by an explicit
homotopy that cuts the first word after its first letter.
"""

from __future__ import annotations

from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .series import PRUNE_EPS, Series, adjoint_shift, first_letter_part
from .words import Alphabet, Word, enumerate_words

WordTuple = tuple[Word, ...]


class NonCocycleError(ValueError):
    """A cochain whose coboundary is nonzero where a cocycle was required."""

    def __init__(self, message: str, witness: Optional[WordTuple] = None):
        super().__init__(message)
        self.witness = witness


class CutPair(NamedTuple):
    """First letter of a word and the remainder; the unit cuts to (e, e)."""

    first: Word
    rest: Word


def cut(w: Word) -> CutPair:
    """Split off the first letter: ``w == first * rest``, with first the unit
    only for the unit word."""
    alphabet = w.alphabet
    return CutPair(
        Word(alphabet, w.letters[:1]), Word(alphabet, w.letters[1:])
    )


def module_left(gamma: complex, phi: Series) -> complex:
    """Left module action of a series on a scalar: multiply by the unit weight."""
    return complex(gamma) * phi.coeff(phi.alphabet.unit())


def module_right(phi: Series, gamma: complex) -> complex:
    """Right module action; agrees with the left action."""
    return phi.coeff(phi.alphabet.unit()) * complex(gamma)


class Cochain:
    """Finitely supported table on n-tuples of words; arity zero is a scalar."""

    __slots__ = ("arity", "alphabet", "table")

    def __init__(
        self,
        arity: int,
        alphabet: Alphabet,
        table: Optional[Mapping[WordTuple, complex]] = None,
    ):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        pruned: dict[WordTuple, complex] = {}
        if table:
            for key, value in table.items():
                key = tuple(key)
                if len(key) != arity:
                    raise ValueError(f"key {key} does not have arity {arity}")
                for w in key:
                    if w.alphabet != alphabet:
                        raise ValueError("key word over a different alphabet")
                value = complex(value)
                if abs(value) > PRUNE_EPS:
                    pruned[key] = value
        self.arity = arity
        self.alphabet = alphabet
        self.table = pruned

    @classmethod
    def scalar(cls, alphabet: Alphabet, value: complex) -> "Cochain":
        return cls(0, alphabet, {(): value})

    def scalar_value(self) -> complex:
        if self.arity != 0:
            raise ValueError("not an arity-zero cochain")
        return self.table.get((), 0j)

    def coeff(self, key: WordTuple) -> complex:
        return self.table.get(tuple(key), 0j)

    def items(self) -> list[tuple[WordTuple, complex]]:
        """Terms sorted tuple-lexicographically in the word order."""
        return sorted(
            self.table.items(), key=lambda kv: tuple(w.sort_key() for w in kv[0])
        )

    def is_zero(self) -> bool:
        return not self.table

    def evaluate(self, *args: Series) -> complex:
        """Multilinear extension: weight each table entry by the argument
        coefficients at its words."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        total = 0j
        for key, c in self.table.items():
            factor = c
            for series, w in zip(args, key):
                factor *= series.coeff(w)
                if factor == 0:
                    break
            total += factor
        return total

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Cochain)
            and self.arity == other.arity
            and self.alphabet == other.alphabet
            and self.table == other.table
        )

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.arity != other.arity or self.alphabet != other.alphabet:
            raise ValueError("cochains of different shape")
        table = dict(self.table)
        for key, value in other.table.items():
            table[key] = table.get(key, 0j) + value
        return Cochain(self.arity, self.alphabet, table)

    def __neg__(self) -> "Cochain":
        return Cochain(
            self.arity, self.alphabet, {k: -v for k, v in self.table.items()}
        )

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "Cochain":
        scalar = complex(scalar)
        return Cochain(
            self.arity, self.alphabet, {k: scalar * v for k, v in self.table.items()}
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Cochain(arity={self.arity}, terms={len(self.table)})"

    def to_json_dict(self) -> dict:
        terms = [
            {"words": [str(w) for w in key], "re": c.real, "im": c.imag}
            for key, c in self.items()
        ]
        return {"arity": self.arity, "alphabet": self.alphabet.size, "terms": terms}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Cochain":
        arity = int(data["arity"])
        alphabet = Alphabet(int(data["alphabet"]))
        table: dict[WordTuple, complex] = {}
        for term in data.get("terms", ()):
            key = tuple(alphabet.parse(text) for text in term["words"])
            value = complex(float(term["re"]), float(term.get("im", 0.0)))
            table[key] = table.get(key, 0j) + value
        return cls(arity, alphabet, table)


def coboundary(phi: Cochain) -> Cochain:
    """The coboundary of an n-cochain as an (n+1)-cochain table.

    On word tuples the value is the unit weight of the first slot times the
    remaining evaluation, minus-plus the alternating sum over adjacent
    products, plus the sign ``(-1)^(n+1)`` times the unit weight of the
    last slot.  The output support enumerates, for each support word, all
    of its two-factor splittings, so no truncation is involved.  Degree
    zero maps to the zero one-cochain: the scalar bimodule is symmetric.
    """
    n = phi.arity
    alphabet = phi.alphabet
    if n == 0:
        return Cochain(1, alphabet, {})
    e = alphabet.unit()
    out: dict[WordTuple, complex] = {}

    def accumulate(key: WordTuple, value: complex) -> None:
        out[key] = out.get(key, 0j) + value

    last_sign = 1.0 if (n + 1) % 2 == 0 else -1.0
    for key, c in phi.table.items():
        accumulate((e, *key), c)
        for i in range(n):
            s = key[i]
            sign = -1.0 if i % 2 == 0 else 1.0
            for cut_at in range(len(s) + 1):
                head = Word(alphabet, s.letters[:cut_at])
                tail = Word(alphabet, s.letters[cut_at:])
                accumulate((*key[:i], head, tail, *key[i + 1 :]), sign * c)
        accumulate((*key, e), last_sign * c)
    return Cochain(n + 1, alphabet, out)


def is_cocycle(phi: Cochain) -> bool:
    return coboundary(phi).is_zero()


def first_cocycle_violation(phi: Cochain) -> Optional[WordTuple]:
    """Least tuple where the coboundary is nonzero, or None for a cocycle."""
    boundary = coboundary(phi)
    if boundary.is_zero():
        return None
    return min(boundary.table, key=lambda key: tuple(w.sort_key() for w in key))


def homotopy(phi: Cochain) -> Cochain:
    """For a cocycle of arity n >= 2, an (n-1)-cochain psi with coboundary phi.

    Cut the first word after its first letter:

        psi(w1, ...) = -phi(first(w1), rest(w1), ...)   for w1 != e,
        psi(e,  ...) =  phi(e, e, ...).

    Non-cocycles are rejected with the least violating tuple as witness.
    """
    if phi.arity < 2:
        raise ValueError("homotopy needs arity at least 2")
    witness = first_cocycle_violation(phi)
    if witness is not None:
        raise NonCocycleError(
            f"not a cocycle: coboundary is nonzero at ({', '.join(str(w) for w in witness)})",
            witness=witness,
        )
    alphabet = phi.alphabet
    e = alphabet.unit()
    out: dict[WordTuple, complex] = {}
    for key, c in phi.table.items():
        s1, s2 = key[0], key[1]
        tail = key[2:]
        if len(s1) == 1:
            target = (s1 * s2, *tail)
            out[target] = out.get(target, 0j) - c
        elif s1 == e and s2 == e:
            target = (e, *tail)
            out[target] = out.get(target, 0j) + c
    return Cochain(phi.arity - 1, alphabet, out)


def homotopy_on_series(phi: Cochain, args: Sequence[Series]) -> complex:
    """Evaluate the homotopy of a cocycle on series arguments directly.

    Filter the first argument by its leading letter, strip that letter, and
    feed both through the cocycle; the unit weight of the first argument
    contributes through the doubled-unit slot.  Agrees with the multilinear
    extension of :func:`homotopy` on every argument tuple.
    """
    if len(args) != phi.arity - 1:
        raise ValueError(f"expected {phi.arity - 1} arguments, got {len(args)}")
    alphabet = phi.alphabet
    first = args[0]
    rest = args[1:]
    total = 0j
    for a in alphabet.letters():
        gen = alphabet.generator(a)
        stripped = adjoint_shift(gen, first_letter_part(first, a))
        total -= phi.evaluate(Series.basis(gen), stripped, *rest)
    unit = Series.unit(alphabet)
    total += first.coeff(alphabet.unit()) * phi.evaluate(unit, unit, *rest)
    return total


def generator_cocycles(alphabet: Alphabet) -> list[Cochain]:
    """The canonical one-cocycles: weight one at a single generator.

    None is a coboundary since the degree-zero coboundary vanishes, and
    they are linearly independent, one per generator.
    """
    return [
        Cochain(1, alphabet, {(alphabet.generator(a),): 1.0})
        for a in alphabet.letters()
    ]


def one_cocycle_constraints(
    alphabet: Alphabet, max_len: int
) -> tuple[np.ndarray, list[Word]]:
    """Linear system cutting out the one-cocycles supported on short words.

    Variables are the coefficients at words of length <= max_len; each row
    is the cocycle condition at a pair (u, v) with every term inside the
    support window.  Returns the constraint matrix and the variable order.
    """
    words = enumerate_words(alphabet, max_len)
    index = {w: i for i, w in enumerate(words)}
    e = alphabet.unit()
    pairs: set[tuple[Word, Word]] = set()
    for w in words:
        pairs.add((e, w))
        pairs.add((w, e))
    for u in words:
        for v in words:
            if len(u) + len(v) <= max_len:
                pairs.add((u, v))
    rows = []
    for u, v in sorted(pairs, key=lambda p: (p[0].sort_key(), p[1].sort_key())):
        row = np.zeros(len(words))
        if u == e:
            row[index[v]] += 1.0
        if len(u) + len(v) <= max_len:
            row[index[u * v]] -= 1.0
        if v == e:
            row[index[u]] += 1.0
        rows.append(row)
    return np.array(rows), words


def one_cocycle_dimension(alphabet: Alphabet, max_len: int) -> int:
    """Dimension of the space of one-cocycles supported on words of length
    <= max_len; equals the number of generators."""
    matrix, words = one_cocycle_constraints(alphabet, max_len)
    rank = int(np.linalg.matrix_rank(matrix))
    return len(words) - rank
