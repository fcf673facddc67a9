"""Derivations with series values, determined on generators by the Leibniz rule.

A derivation D of the algebra spanned by the basis shifts is fixed by its
values on the generators; the value on a word expands by the Leibniz rule.
For consistent generator data the solver reconstructs a single series t
whose commutator reproduces the derivation:

    D(phi) = phi * t - t * phi.

The reconstruction sums conjugate-transport iterates of the generator
values; on finitely supported consistent data the iterates vanish after
finitely many steps, so every stage is exact.  Necessary conditions are
surfaced as typed errors: a consistent value can have no weight on words
commuting with its base word, no weight below the base word's length, and,
once the first generator is trivialized, values at other generators must
pair words against powers of the first generator with opposite weights.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .series import (
    Series,
    adjoint_shift,
    cesaro,
    conditional_expectation,
    conjugate_by,
    convolve,
    max_coeff_diff,
)
from .words import Alphabet, Word

#: Coefficient deviations below this are treated as zero in solver checks.
CHECK_TOL = 1e-12


class InconsistentDerivationError(ValueError):
    """Generator data that cannot extend to a derivation with series values.

    ``check`` names the violated screen; ``word`` and ``coefficient`` carry
    the offending term when one exists.
    """

    def __init__(
        self,
        check: str,
        message: str,
        word: Optional[Word] = None,
        coefficient: Optional[complex] = None,
    ):
        super().__init__(message)
        self.check = check
        self.word = word
        self.coefficient = coefficient


def inner_derivation(t: Series, phi: Series) -> Series:
    """The commutator derivation with symbol t: ``phi * t - t * phi``."""
    return convolve(phi, t) - convolve(t, phi)


class GeneratorDerivation:
    """A derivation given by one finitely supported series per generator."""

    __slots__ = ("alphabet", "values")

    def __init__(self, alphabet: Alphabet, values: Mapping[int, Series]):
        for key in values:
            if not 0 <= key < alphabet.size:
                raise ValueError(f"no generator with index {key}")
        table: dict[int, Series] = {}
        for a in alphabet.letters():
            value = values.get(a)
            if value is None:
                value = Series.zero(alphabet)
            elif value.alphabet != alphabet:
                raise ValueError("generator value over a different alphabet")
            table[a] = value
        self.alphabet = alphabet
        self.values = table

    @classmethod
    def inner(cls, t: Series) -> "GeneratorDerivation":
        """The restriction of the commutator derivation with symbol t."""
        alphabet = t.alphabet
        return cls(
            alphabet,
            {
                a: inner_derivation(t, Series.basis(alphabet.generator(a)))
                for a in alphabet.letters()
            },
        )

    def value(self, letter: int) -> Series:
        return self.values[letter]

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def of_word(self, w: Word) -> Series:
        """Leibniz expansion: sum over positions of prefix * value * suffix.

        The unit maps to zero.
        """
        alphabet = self.alphabet
        letters = w.letters
        table: dict[Word, complex] = {}
        for i, a in enumerate(letters):
            prefix = letters[:i]
            suffix = letters[i + 1 :]
            for u, c in self.values[a].iter_terms():
                key = Word(alphabet, prefix + u.letters + suffix)
                table[key] = table.get(key, 0j) + c
        return Series(alphabet, table)

    def of_word_power(self, w: Word, k: int) -> Series:
        """Value at ``w**k`` as the k-term sum of ``w``-power sandwiches."""
        if k < 1:
            raise ValueError("power must be positive")
        alphabet = self.alphabet
        dw = self.of_word(w)
        table: dict[Word, complex] = {}
        for m in range(k):
            prefix = (w ** (k - 1 - m)).letters
            suffix = (w**m).letters
            for u, c in dw.iter_terms():
                key = Word(alphabet, prefix + u.letters + suffix)
                table[key] = table.get(key, 0j) + c
        return Series(alphabet, table)

    def subtract_inner(self, t: Series) -> "GeneratorDerivation":
        """The derivation minus the commutator derivation with symbol t."""
        alphabet = self.alphabet
        return GeneratorDerivation(
            alphabet,
            {
                a: self.values[a]
                - inner_derivation(t, Series.basis(alphabet.generator(a)))
                for a in alphabet.letters()
            },
        )

    def to_json_dict(self) -> dict:
        return {
            "alphabet": self.alphabet.size,
            "values": {
                str(a): self.values[a].to_json_dict() for a in self.alphabet.letters()
            },
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GeneratorDerivation":
        alphabet = Alphabet(int(data["alphabet"]))
        values: dict[int, Series] = {}
        for key, sub in data.get("values", {}).items():
            series = Series.from_json_dict(sub)
            if series.alphabet != alphabet:
                raise ValueError("generator value over a different alphabet")
            values[int(key)] = series
        return cls(alphabet, values)


def commuting_support_vanishes(derivation: GeneratorDerivation, w: Word) -> bool:
    """The value at w carries no weight on words commuting with w.

    A necessary condition: weight on a commuting word grows linearly along
    powers of w, contradicting boundedness.
    """
    return all(
        not u.commutes_with(w) for u, _ in derivation.of_word(w).iter_terms()
    )


def short_support_vanishes(derivation: GeneratorDerivation, w: Word) -> bool:
    """The value at w carries no weight on words shorter than w."""
    return all(len(u) >= len(w) for u, _ in derivation.of_word(w).iter_terms())


def conjugate_vanishing_index(w: Word, phi: Series, cap: int) -> int:
    """Smallest m with the m-fold conjugate transport of phi empty.

    Raises when no iterate vanishes by the cap, which happens exactly when
    phi has weight on a word commuting with w.
    """
    term = phi
    for m in range(cap + 1):
        if term.is_zero():
            return m
        term = conjugate_by(w, term)
    raise InconsistentDerivationError(
        "persistent_conjugates",
        f"conjugate transport iterates along {w} did not vanish within {cap} steps",
        word=w,
    )


def stabilized_conjugate_sum(
    derivation: GeneratorDerivation, w: Word, k_max: Optional[int] = None
) -> Series:
    """Sum of the conjugate-transport iterates of the value at w.

    The partial sums stabilize once an iterate vanishes; the stabilized sum
    s satisfies ``D(w) = s - conjugate_by(w, s)`` exactly.  For consistent
    data the iterates die within about ``deg / |w|`` steps; the default cap
    is ``deg + 3``.
    """
    if w.is_unit():
        raise ValueError("the unit has value zero; no sum to stabilize")
    phi = derivation.of_word(w)
    if k_max is None:
        k_max = (0 if phi.is_zero() else int(phi.degree())) + 3
    total = Series.zero(derivation.alphabet)
    term = phi
    for _ in range(k_max + 1):
        if term.is_zero():
            return total
        total = total + term
        term = conjugate_by(w, term)
    raise InconsistentDerivationError(
        "persistent_conjugates",
        f"partial sums along {w} did not stabilize within {k_max} steps; "
        "the value has weight on words commuting with the base word",
        word=w,
    )


def solve_local_inner(
    derivation: GeneratorDerivation, w: Word, k_max: Optional[int] = None
) -> Series:
    """A series t with ``D(w) = xi_w * t - t * xi_w``, for consistent data.

    Built from the stabilized conjugate sum: terms below the length of w
    are dropped (they vanish for consistent data), the remaining terms must
    all be left-divisible by w, and stripping that prefix yields t.  The
    commutator identity is re-verified before returning; the weight of t at
    the unit is normalized to zero.
    """
    if w.is_unit():
        raise ValueError("cannot solve at the unit")
    alphabet = derivation.alphabet
    total = stabilized_conjugate_sum(derivation, w, k_max)
    high = Series(
        alphabet, {u: c for u, c in total.iter_terms() if len(u) >= len(w)}
    )
    for u, c in high.iter_terms():
        if u.strip_prefix(w) is None:
            raise InconsistentDerivationError(
                "residual",
                f"stabilized sum has weight {c} at {u}, not left-divisible by {w}",
                word=u,
                coefficient=c,
            )
    t = adjoint_shift(w, high)
    t = Series(alphabet, {u: c for u, c in t.iter_terms() if not u.is_unit()})
    expected = derivation.of_word(w)
    produced = inner_derivation(t, Series.basis(w))
    if max_coeff_diff(produced, expected) > CHECK_TOL:
        raise InconsistentDerivationError(
            "local_commutator",
            f"commutator with the recovered series does not reproduce the value at {w}",
            word=w,
        )
    return t


def _check_pair_structure(value: Series, beta: int, alpha: int) -> None:
    """Screen for generator values once the generator alpha is trivialized.

    Every term must be the generator beta against a positive power of the
    generator alpha, on one side or the other, and the two sides must carry
    opposite weights.
    """
    alphabet = value.alphabet
    for u, c in value.iter_terms():
        letters = u.letters
        if len(letters) >= 2 and letters[0] == beta and all(
            l == alpha for l in letters[1:]
        ):
            partner = Word(alphabet, letters[1:] + (beta,))
        elif len(letters) >= 2 and letters[-1] == beta and all(
            l == alpha for l in letters[:-1]
        ):
            partner = Word(alphabet, (beta,) + letters[:-1])
        else:
            raise InconsistentDerivationError(
                "pair_structure",
                f"value at generator z{beta} has weight {c} at {u}, outside the "
                f"family pairing z{beta} with powers of z{alpha}",
                word=u,
                coefficient=c,
            )
        if abs(value.coeff(partner) + c) > CHECK_TOL:
            raise InconsistentDerivationError(
                "pair_structure",
                f"weight {c} at {u} is not matched by the opposite weight at {partner}",
                word=u,
                coefficient=c,
            )


def solve_inner_symbol(
    derivation: GeneratorDerivation, k_max: Optional[int] = None
) -> Series:
    """Recover a series t with ``D(z_a) = [xi_{z_a}, t]`` for every generator.

    Pipeline: screen the generator values, solve locally at the first
    generator and subtract the resulting commutator derivation, then peel
    each remaining generator via the pair structure of its updated value.
    The recovered series is unique up to its weight at the unit, which is
    normalized to zero.
    """
    alphabet = derivation.alphabet
    for a in alphabet.letters():
        gen = alphabet.generator(a)
        offender = next(
            (
                (u, c)
                for u, c in derivation.value(a).iter_terms()
                if u.commutes_with(gen)
            ),
            None,
        )
        if offender is not None:
            raise InconsistentDerivationError(
                "commuting_support",
                f"value at generator z{a} has weight {offender[1]} at {offender[0]}, "
                f"which commutes with z{a}",
                word=offender[0],
                coefficient=offender[1],
            )

    total = solve_local_inner(derivation, alphabet.generator(0), k_max)
    current = derivation.subtract_inner(total)
    for b in range(1, alphabet.size):
        value = current.value(b)
        _check_pair_structure(value, b, 0)
        t_b = adjoint_shift(alphabet.generator(b), value)
        total = total + t_b
        current = current.subtract_inner(t_b)

    for a in alphabet.letters():
        residue = current.value(a)
        if residue.max_abs_coeff() > CHECK_TOL:
            raise InconsistentDerivationError(
                "generator_residual",
                f"recovered series leaves a residue of size "
                f"{residue.max_abs_coeff():.3e} at generator z{a}",
            )
    return Series(
        alphabet, {u: c for u, c in total.iter_terms() if not u.is_unit()}
    )


def normal_approx_check(
    t: Series,
    phi: Series,
    k: int,
    letters: frozenset[int] | set[int],
    tol: float = 1e-12,
) -> bool:
    """Approximation pipeline for the commutator derivation with symbol t.

    Smoothing phi with the order-k Fejer weights and restricting to a
    sub-alphabet commutes with applying the derivation; once the letters
    cover the support of phi the restriction acts as the identity, and the
    smoothed value approaches the true value with the explicit error bound

        || D_t(smoothed) - D_t(phi) ||_2 <= 2 ||t||_1 (deg phi / k) ||phi||_2,

    using that left and right shifts are isometries.
    """
    letters = frozenset(letters)
    smoothed = cesaro(phi, k)
    projected = conditional_expectation(smoothed, letters)
    approx = inner_derivation(t, projected)
    ok = True
    if letters >= phi.letters_used():
        ok = ok and projected == smoothed
        ok = ok and approx == inner_derivation(t, smoothed)
    if not phi.is_zero():
        error = (inner_derivation(t, smoothed) - inner_derivation(t, phi)).l2_norm()
        bound = 2.0 * t.l1_norm() * (phi.degree() / k) * phi.l2_norm()
        ok = ok and error <= bound + tol
    return ok
