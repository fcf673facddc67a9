import io
import random

import numpy as np
import pytest

from ncdisc.operators import (
    PowerIterationError,
    TruncatedOperator,
    TruncationBasis,
    cesaro_op,
    commutant_check,
    conjugation_check,
    degree_band,
    isometry_relations,
    left_matrix,
    max_column_deviation,
    mobius_coefficients,
    mobius_witness_ratio,
    norm_estimate,
    q_projection,
    right_matrix,
    write_csv,
)
from ncdisc.series import (
    Series,
    cesaro,
    conjugate_by,
    convolve,
    degree_part,
    first_letter_part,
    max_coeff_diff,
)
from ncdisc.words import Alphabet

A2 = Alphabet(2)
E = A2.unit()
Z0 = A2.generator(0)
Z1 = A2.generator(1)


def w2(*letters):
    return A2.word(letters)


def xi(*letters):
    return Series.basis(A2.word(letters))


def random_series(rng, alphabet, max_len, terms=4):
    table = {}
    for _ in range(rng.randint(1, terms)):
        w = alphabet.word(rng.randrange(alphabet.size) for _ in range(rng.randint(0, max_len)))
        table[w] = table.get(w, 0j) + complex(rng.randint(-3, 3), rng.randint(-3, 3))
    return Series(alphabet, table)


def random_operator(basis, seed):
    gen = np.random.default_rng(seed)
    n = basis.dimension
    return TruncatedOperator.from_dense(
        basis, gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    )


# -- basis -------------------------------------------------------------------


def test_basis_dimension_is_geometric_sum():
    assert TruncationBasis(A2, 4).dimension == 1 + 2 + 4 + 8 + 16
    assert TruncationBasis(Alphabet(3), 3).dimension == 40
    assert TruncationBasis(A2, 0).dimension == 1


def test_basis_order_and_index():
    basis = TruncationBasis(A2, 3)
    assert list(basis.words) == sorted(basis.words)
    for i, w in enumerate(basis.words):
        assert basis.index[w] == i
    with pytest.raises(ValueError):
        TruncationBasis(A2, -1)


# -- compressions -------------------------------------------------------------


def test_left_matrix_examples():
    basis = TruncationBasis(A2, 2)
    shift = left_matrix(xi(0), basis)
    assert shift.coefficient(Z0, E) == 1
    assert shift.coefficient(w2(0, 1), Z1) == 1
    assert shift.coefficient(Z1, E) == 0
    assert left_matrix(Series.unit(A2), basis).entries == TruncatedOperator.identity(basis).entries


def test_left_matrix_action_matches_convolution():
    basis = TruncationBasis(A2, 5)
    rng = random.Random(2)
    for _ in range(30):
        phi = random_series(rng, A2, 2)
        psi = random_series(rng, A2, 3)
        acted = left_matrix(phi, basis).apply(psi)
        assert max_coeff_diff(acted, convolve(phi, psi)) == 0


def test_right_matrix_acts_on_the_right():
    basis = TruncationBasis(A2, 4)
    column = right_matrix(xi(1), basis).column(w2(0, 1))
    assert column == {w2(0, 1, 1): 1 + 0j}


def test_compression_product_identity():
    basis = TruncationBasis(A2, 5)
    rng = random.Random(3)
    for _ in range(30):
        phi = random_series(rng, A2, 2)
        psi = random_series(rng, A2, 2)
        product = left_matrix(phi, basis) @ left_matrix(psi, basis)
        direct = left_matrix(convolve(phi, psi), basis)
        degrees = int(max(phi.degree(), 0) + max(psi.degree(), 0))
        assert max_column_deviation(product, direct, basis.cutoff - degrees) == 0


def test_apply_requires_support_in_basis():
    basis = TruncationBasis(A2, 1)
    with pytest.raises(ValueError):
        left_matrix(xi(0), basis).apply(xi(0, 1))


# -- band structure -------------------------------------------------------------


def test_degree_band_examples():
    basis = TruncationBasis(A2, 3)
    op = left_matrix(xi(0) + 2 * Series.unit(A2), basis)
    diagonal = degree_band(op, 0)
    assert diagonal.entries == (2 * TruncatedOperator.identity(basis)).entries
    assert degree_band(left_matrix(xi(0), basis), -1).entries == {}
    with pytest.raises(ValueError):
        degree_band(op, 5)


def test_degree_band_matches_series_filter():
    basis = TruncationBasis(A2, 4)
    rng = random.Random(5)
    for _ in range(20):
        phi = random_series(rng, A2, 3)
        op = left_matrix(phi, basis)
        for j in range(4):
            banded = degree_band(op, j)
            filtered = left_matrix(degree_part(phi, j), basis)
            assert max_column_deviation(banded, filtered) == 0


def test_degree_band_matches_projection_sum():
    basis = TruncationBasis(A2, 3)
    op = random_operator(basis, 11)
    for j in range(-3, 4):
        summed = TruncatedOperator.zero(basis)
        for k in range(max(0, j), basis.cutoff + 1):
            if 0 <= k - j <= basis.cutoff:
                summed = summed + q_projection(basis, k) @ op @ q_projection(basis, k - j)
        assert max_column_deviation(degree_band(op, j), summed) == 0


def test_bands_are_orthogonal_projections():
    basis = TruncationBasis(A2, 3)
    op = random_operator(basis, 13)
    for j in range(-2, 3):
        banded = degree_band(op, j)
        assert degree_band(banded, j).entries == banded.entries
        assert degree_band(banded, j + 1).entries == {}


def test_band_contractive():
    basis = TruncationBasis(A2, 3)
    op = random_operator(basis, 17)
    reference = norm_estimate(op)
    for j in range(-3, 4):
        assert norm_estimate(degree_band(op, j)) <= reference + 1e-6


# -- Fejer smoothing -------------------------------------------------------------


def test_cesaro_op_matches_series_cesaro():
    basis = TruncationBasis(A2, 4)
    rng = random.Random(19)
    for _ in range(20):
        phi = random_series(rng, A2, 3)
        for k in (1, 2, 3, 5):
            smoothed = cesaro_op(left_matrix(phi, basis), k)
            direct = left_matrix(cesaro(phi, k), basis)
            assert max_column_deviation(smoothed, direct) == 0


def test_cesaro_op_fixes_identity():
    basis = TruncationBasis(A2, 3)
    identity = TruncatedOperator.identity(basis)
    for k in (1, 2, 7):
        assert cesaro_op(identity, k).entries == identity.entries
    with pytest.raises(ValueError):
        cesaro_op(identity, 0)


def test_cesaro_op_contractive_on_random_operators():
    basis = TruncationBasis(A2, 4)
    for trial in range(10):
        op = random_operator(basis, 100 + trial)
        reference = norm_estimate(op)
        assert norm_estimate(cesaro_op(op, 1 + trial % 5)) <= reference + 1e-6


def test_cesaro_vector_convergence_surrogate():
    basis = TruncationBasis(A2, 4)
    rng = random.Random(23)
    unit = Series.unit(A2)
    for _ in range(20):
        phi = random_series(rng, A2, 4)
        if phi.is_zero():
            continue
        op = left_matrix(phi, basis)
        for k in (2, 4, 16, 64):
            drift = (cesaro_op(op, k).apply(unit) - phi).l2_norm()
            assert drift <= (phi.degree() / k) * phi.l2_norm() + 1e-12


# -- norm estimation -------------------------------------------------------------


def test_norm_estimate_examples():
    basis = TruncationBasis(A2, 3)
    assert norm_estimate(TruncatedOperator.identity(basis)) == pytest.approx(1.0, abs=1e-9)
    assert norm_estimate(left_matrix(xi(0, 1), basis)) == pytest.approx(1.0, abs=1e-9)
    rank_one = TruncatedOperator(
        basis, {(basis.index[w2(0, 1)], basis.index[Z1]): 3.0}
    )
    assert norm_estimate(rank_one) == pytest.approx(3.0, abs=1e-8)
    assert norm_estimate(TruncatedOperator.zero(basis)) == 0.0
    with pytest.raises(ValueError):
        norm_estimate(rank_one, tol=0.0)


def test_norm_estimate_matches_svd_oracle():
    basis = TruncationBasis(A2, 3)
    for trial in range(5):
        op = random_operator(basis, 200 + trial)
        exact = float(np.linalg.svd(op.to_dense(), compute_uv=False)[0])
        estimate = norm_estimate(op, tol=1e-12)
        assert estimate == pytest.approx(exact, rel=1e-6)
        assert estimate <= exact + 1e-9


def test_norm_estimate_sparse_path_matches_dense(monkeypatch):
    import ncdisc.operators as ops

    basis = TruncationBasis(A2, 3)
    op = random_operator(basis, 300)
    dense_value = norm_estimate(op, tol=1e-11)
    monkeypatch.setattr(ops, "DENSE_LIMIT", 1)
    sparse_value = norm_estimate(op, tol=1e-11)
    assert sparse_value == pytest.approx(dense_value, rel=1e-8)


def test_norm_estimate_nonconvergence_reported():
    basis = TruncationBasis(A2, 2)
    op = random_operator(basis, 7)
    with pytest.raises(PowerIterationError):
        norm_estimate(op, tol=1e-15, max_iter=2)


# -- relation checks -------------------------------------------------------------


def test_commutant_examples():
    basis = TruncationBasis(A2, 4)
    assert commutant_check(Z0, Z1, basis)
    assert commutant_check(E, E, basis)
    rng = random.Random(29)
    five = TruncationBasis(A2, 5)
    for _ in range(20):
        u = A2.word(rng.randrange(2) for _ in range(rng.randint(0, 2)))
        v = A2.word(rng.randrange(2) for _ in range(rng.randint(0, 1)))
        assert commutant_check(u, v, five)


def test_isometry_relations_hold_exactly():
    for cutoff in (1, 2, 3):
        report = isometry_relations(TruncationBasis(A2, cutoff))
        assert report == {"orthogonality": 0.0, "range_sum": 0.0, "unit_defect": 0.0}
    report3 = isometry_relations(TruncationBasis(Alphabet(3), 2))
    assert all(v == 0.0 for v in report3.values())
    with pytest.raises(ValueError):
        isometry_relations(TruncationBasis(A2, 0))


def test_conjugation_check_examples():
    basis = TruncationBasis(A2, 4)
    assert conjugation_check(Z0, xi(0), basis)  # both sides the shift itself
    assert conjugation_check(Z0, xi(1), basis)  # both sides vanish
    with pytest.raises(ValueError):
        conjugation_check(w2(0, 1), xi(0, 1), TruncationBasis(A2, 3))


def test_conjugation_check_randomized():
    basis = TruncationBasis(A2, 7)
    rng = random.Random(31)
    for _ in range(15):
        w = A2.word(rng.randrange(2) for _ in range(rng.randint(0, 2)))
        phi = random_series(rng, A2, 3)
        assert conjugation_check(w, phi, basis)


def test_conjugated_sandwich_matches_series_route_entrywise():
    basis = TruncationBasis(A2, 6)
    phi = 2 * xi(0, 1) - xi(1) + 3j * xi(0, 0)
    w = Z0
    shift = left_matrix(xi(0), basis)
    sandwiched = shift.adjoint() @ left_matrix(phi, basis) @ shift
    direct = left_matrix(conjugate_by(w, phi), basis)
    assert max_column_deviation(sandwiched, direct, 2) == 0


# -- constant-removal norm witness ------------------------------------------------


def test_mobius_coefficients_against_polynomial_oracle():
    # (1 - conj(c) z) * sum a_n z^n must equal c - z up to the cutoff
    for c in (0.3, 0.9):
        coeffs = mobius_coefficients(c, 30)
        reconstructed = [coeffs[0]]
        for n in range(1, 30):
            reconstructed.append(coeffs[n] - c * coeffs[n - 1])
        assert reconstructed[0] == pytest.approx(c)
        assert reconstructed[1] == pytest.approx(-1.0)
        for value in reconstructed[2:]:
            assert value == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        mobius_coefficients(1.0, 5)


def test_mobius_witness_degenerate_and_bounded():
    assert mobius_witness_ratio(0.0, 30) == pytest.approx(1.0, abs=1e-9)
    for c, cutoff in ((0.5, 40), (0.9, 60)):
        assert mobius_witness_ratio(c, cutoff) <= 2.0 + 1e-6


def test_mobius_witness_against_svd_oracle():
    # frozen from the dense SVD of the 61x61 truncation at c = 0.9
    ratio = mobius_witness_ratio(0.9, 60, tol=1e-11)
    assert ratio == pytest.approx(1.7461337691581407, abs=1e-6)


def test_mobius_witness_increases_toward_limit():
    values = [mobius_witness_ratio(0.9, n) for n in (20, 60, 120)]
    assert values[0] < values[1] < values[2] < 1.9


def test_filter_norm_upper_bound():
    basis = TruncationBasis(A2, 4)
    rng = random.Random(37)
    for _ in range(15):
        phi = random_series(rng, A2, 4)
        reference = norm_estimate(left_matrix(phi, basis))
        for a in range(2):
            filtered = norm_estimate(left_matrix(first_letter_part(phi, a), basis))
            assert filtered <= 2 * reference + 1e-6


# -- export ------------------------------------------------------------------------


def test_write_csv():
    basis = TruncationBasis(A2, 1)
    op = left_matrix(xi(0), basis)
    buffer = io.StringIO()
    write_csv(op, buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert lines[0] == "row,col,re,im"
    assert "z0,e,1.0,0.0" in lines
    assert len(lines) == 1 + len(op.entries)
