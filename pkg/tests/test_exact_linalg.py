"""Exact integer linear algebra: normal forms, quotients, saturation."""

import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlat import (
    AbelianQuotient,
    IntMatrix,
    PreconditionError,
    hermite_normal_form,
    hnf_basis,
    integer_kernel,
    lattice_intersection,
    lattices_equal,
    quotient_structure,
    saturate,
    smith_normal_form,
    unimodular_inverse,
)

small_entries = st.integers(min_value=-9, max_value=9)


def matrices(rows, cols):
    return st.lists(
        st.lists(small_entries, min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    ).map(IntMatrix.from_rows)


# ---------------------------------------------------------------------------
# IntMatrix basics
# ---------------------------------------------------------------------------


def test_matrix_construction_and_accessors():
    M = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert (M.rows, M.cols) == (2, 3)
    assert M.row(1) == (4, 5, 6)
    assert M.column(2) == (3, 6)
    assert M.transpose().entries == ((1, 4), (2, 5), (3, 6))
    assert IntMatrix.from_columns([(1, 4), (2, 5), (3, 6)]) == M
    assert M.mul_vector((1, 1, 1)) == (6, 15)
    assert (M @ IntMatrix.identity(3)) == M


def test_matrix_rejects_bad_input():
    with pytest.raises(PreconditionError):
        IntMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(PreconditionError):
        IntMatrix(((1, 2.5),))
    with pytest.raises(PreconditionError):
        IntMatrix.from_columns([], rows=None)


def test_determinant_small_cases():
    assert IntMatrix.identity(4).det() == 1
    assert IntMatrix.from_rows([[2, 0], [0, 3]]).det() == 6
    assert IntMatrix.from_rows([[0, 1], [1, 0]]).det() == -1
    assert IntMatrix.zero(3, 3).det() == 0


def test_abelian_quotient_validation():
    q = AbelianQuotient(0, (2, 6))
    assert q.order() == 12 and q.is_finite and not q.is_trivial
    assert AbelianQuotient(0, ()).is_trivial
    with pytest.raises(PreconditionError):
        AbelianQuotient(0, (3, 4))  # no divisibility chain
    with pytest.raises(PreconditionError):
        AbelianQuotient(0, (1,))
    with pytest.raises(PreconditionError):
        AbelianQuotient(1, ()).order()


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def test_snf_identity_is_identity():
    U, D, V = smith_normal_form(IntMatrix.identity(3))
    assert D == IntMatrix.identity(3)


def test_snf_diag_2_3_gives_1_6():
    M = IntMatrix.from_rows([[2, 0], [0, 3]])
    U, D, V = smith_normal_form(M)
    assert [D.entries[i][i] for i in range(2)] == [1, 6]
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1


def test_snf_zero_matrix():
    U, D, V = smith_normal_form(IntMatrix.zero(2, 2))
    assert D == IntMatrix.zero(2, 2)
    assert abs(U.det()) == 1 and abs(V.det()) == 1


@settings(derandomize=True, deadline=None, max_examples=120)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_snf_reconstruction_and_divisibility(r, c, data):
    M = data.draw(matrices(r, c))
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    diag = [D.entries[i][i] for i in range(min(r, c))]
    for i in range(r):
        for j in range(c):
            if i != j:
                assert D.entries[i][j] == 0
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    assert diag[len(nonzero):] == [0] * (len(diag) - len(nonzero))
    if r == c:
        assert abs(D.det()) == abs(M.det())


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------


def test_hnf_identity():
    H, T = hermite_normal_form(IntMatrix.identity(3))
    assert H == IntMatrix.identity(3)


def test_hnf_gcd_column():
    M = IntMatrix.from_columns([(2, 0), (3, 0)])
    H = hnf_basis(M)
    assert H.entries == ((1,), (0,))


def test_hnf_already_canonical():
    M = IntMatrix.from_rows([[5, 0], [0, 5]])
    assert hnf_basis(M) == M


@settings(derandomize=True, deadline=None, max_examples=120)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_hnf_transform_and_span(r, c, data):
    M = data.draw(matrices(r, c))
    H, T = hermite_normal_form(M)
    assert abs(T.det()) == 1
    assert M @ T == H
    # the column span is unchanged: stacking adds nothing to either side
    assert lattices_equal(hnf_basis(M), hnf_basis(M.hstack(H)))


def test_lattices_equal_detects_proper_sublattice():
    A = IntMatrix.identity(2)
    B = IntMatrix.from_rows([[2, 0], [0, 1]])
    assert lattices_equal(A, A)
    assert not lattices_equal(A, B)


# ---------------------------------------------------------------------------
# quotient structure
# ---------------------------------------------------------------------------


def _brute_coset_count(n, gens: IntMatrix) -> int:
    """Independent coset count of a full-rank sublattice of Z^n via a box."""
    d = abs(hnf_basis(gens).det())
    assert d != 0
    basis = hnf_basis(gens)

    def member(v):
        # Cramer's rule: basis @ x = v has integral solution?
        det = basis.det()
        cols = basis.columns()
        for j in range(n):
            repl = IntMatrix.from_columns(
                [v if t == j else cols[t] for t in range(n)]
            )
            if repl.det() % det:
                return False
        return True

    reps = []
    for v in product(range(d), repeat=n):
        if not any(member(tuple(x - y for x, y in zip(v, r))) for r in reps):
            reps.append(v)
    return len(reps)


def test_quotient_identity_is_trivial():
    assert quotient_structure(3, IntMatrix.identity(3)).is_trivial


def test_quotient_single_prime_column():
    for p in (2, 3, 5):
        q = quotient_structure(1, IntMatrix.from_rows([[p]]))
        assert q.free_rank == 0 and q.torsion == (p,)
        assert q.order() == _brute_coset_count(1, IntMatrix.from_rows([[p]]))


def test_quotient_diag_2_6():
    gens = IntMatrix.from_rows([[2, 0], [0, 6]])
    q = quotient_structure(2, gens)
    assert q.torsion == (2, 6)
    assert q.order() == 12 == _brute_coset_count(2, gens)


def test_quotient_nondiagonal_matches_brute_force():
    gens = IntMatrix.from_rows([[2, 1], [0, 3]])
    q = quotient_structure(2, gens)
    assert q.order() == _brute_coset_count(2, gens) == 6


def test_quotient_with_free_part():
    q = quotient_structure(2, IntMatrix.from_columns([(2, 0)], rows=2))
    assert q.free_rank == 1 and q.torsion == (2,)


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------


def test_saturate_unimodular_is_summand():
    sat, summand = saturate(2, IntMatrix.from_rows([[1, 1], [0, 1]]))
    assert summand


def test_saturate_scaled_column():
    sat, summand = saturate(2, IntMatrix.from_columns([(2, 0)], rows=2))
    assert not summand
    assert lattices_equal(sat, IntMatrix.from_columns([(1, 0)], rows=2))


def test_saturate_unit_divisor_column():
    _, summand = saturate(2, IntMatrix.from_columns([(1, 2)], rows=2))
    assert summand


@settings(derandomize=True, deadline=None, max_examples=100)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_saturate_idempotent(n, k, data):
    gens = data.draw(matrices(n, min(k, n)))
    sat, _ = saturate(n, gens)
    again, summand_flag = saturate(n, sat)
    assert lattices_equal(sat, again)
    if sat.cols:
        assert summand_flag  # a saturation is always a direct summand


# ---------------------------------------------------------------------------
# lattice intersection
# ---------------------------------------------------------------------------


def test_intersection_identity():
    I2 = IntMatrix.identity(2)
    assert lattices_equal(lattice_intersection(I2, I2), I2)


def test_intersection_diag_lattices():
    A = IntMatrix.from_rows([[2, 0], [0, 1]])
    B = IntMatrix.from_rows([[1, 0], [0, 2]])
    got = lattice_intersection(A, B)
    assert lattices_equal(got, IntMatrix.from_rows([[2, 0], [0, 2]]))


def test_intersection_transverse_lines_is_zero():
    A = IntMatrix.from_columns([(1, 1)], rows=2)
    B = IntMatrix.from_columns([(1, -1)], rows=2)
    got = lattice_intersection(A, B)
    assert got.cols == 0


def test_intersection_rejects_dependent_basis():
    bad = IntMatrix.from_columns([(1, 1), (2, 2)])
    with pytest.raises(PreconditionError):
        lattice_intersection(bad, IntMatrix.identity(2))


@settings(derandomize=True, deadline=None, max_examples=80)
@given(st.data())
def test_intersection_commutative_and_contained(data):
    A = data.draw(matrices(2, 2).filter(lambda m: m.det() != 0))
    B = data.draw(matrices(2, 2).filter(lambda m: m.det() != 0))
    AB = lattice_intersection(A, B)
    BA = lattice_intersection(B, A)
    assert lattices_equal(AB, BA)
    # containment: adjoining the intersection to either lattice changes nothing
    for M in (A, B):
        assert lattices_equal(hnf_basis(M.hstack(AB)), hnf_basis(M))


# ---------------------------------------------------------------------------
# kernels and inverses
# ---------------------------------------------------------------------------


def test_integer_kernel_of_projection():
    M = IntMatrix.from_rows([[1, 0, 2]])
    K = integer_kernel(M)
    assert K.cols == 2
    for col in K.columns():
        assert M.mul_vector(col) == (0,)


def test_unimodular_inverse_round_trip():
    T = IntMatrix.from_rows([[1, 2], [0, 1]])
    assert T @ unimodular_inverse(T) == IntMatrix.identity(2)
    with pytest.raises(PreconditionError):
        unimodular_inverse(IntMatrix.from_rows([[2, 0], [0, 1]]))
