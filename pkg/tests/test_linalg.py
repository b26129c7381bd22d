from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix as SMatrix

from defcomplex.linalg import (
    GF,
    QQ,
    DimensionError,
    FieldMismatchError,
    Matrix,
    Mod,
    Subspace,
    block_matrix,
    intersect,
    inverse,
    is_invertible,
    kernel_basis,
    membership,
    rank,
    rref,
    solve_certificate,
    solve_linear,
)

small = st.integers(min_value=-4, max_value=4)


@st.composite
def int_matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[draw(small) for _ in range(c)] for _ in range(r)]


# -- scalars -----------------------------------------------------------------


def test_mod_arithmetic():
    F = GF(7)
    a, b = F(3), F(5)
    assert a + b == 1 and a * b == 1 and a - b == 5
    assert (a / b) * b == a
    assert -a == 4
    assert F(Fraction(1, 2)) * 2 == 1


def test_mod_rejects_other_modulus():
    with pytest.raises(FieldMismatchError):
        GF(5)(Mod(1, 7))


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError, match="modulus not prime: 4"):
        GF(4)


def test_parse_scalars():
    assert QQ.parse("-3/4") == Fraction(-3, 4)
    assert QQ.parse(2) == 2
    assert GF(5).parse("1/2") == 3
    for bad in ("x", 1.5, None, True):
        with pytest.raises(ValueError):
            QQ.parse(bad)


def test_fraction_with_p_in_denominator_has_no_image():
    with pytest.raises(ZeroDivisionError):
        GF(5)(Fraction(1, 5))


# -- matrices ------------------------------------------------------------------


def test_rref_small_example():
    m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
    r, pivots, rk = rref(m)
    assert rk == 1 and pivots == [0]
    assert r.to_lists() == [[1, 2], [0, 0]]


def test_identity_and_zero_rank():
    assert rank(Matrix.identity(QQ, 4)) == 4
    assert rank(Matrix.zeros(QQ, 3, 5)) == 0


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionError):
        Matrix.identity(QQ, 2) @ Matrix.identity(QQ, 3)


def test_block_matrix_places_blocks():
    a = Matrix.from_rows(QQ, [[1]])
    b = Matrix.from_rows(QQ, [[2, 3]])
    m = block_matrix([[a, None], [None, b]], [1, 1], [1, 2], QQ)
    assert m.to_lists() == [[1, 0, 0], [0, 2, 3]]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rref_matches_sympy(rows):
    ours, pivots, rk = rref(Matrix.from_rows(QQ, rows))
    theirs, their_pivots = SMatrix(rows).rref()
    assert rk == len(their_pivots)
    assert tuple(pivots) == tuple(their_pivots)
    assert ours.to_lists() == [[Fraction(int(x.p), int(x.q)) for x in theirs.row(i)] for i in range(theirs.rows)]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_nullity_and_kernel(rows):
    m = Matrix.from_rows(QQ, rows)
    ker = kernel_basis(m)
    assert ker.dim + rank(m) == m.ncols
    for v in ker.vectors:
        assert all(x == 0 for x in m.apply(v))


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.data())
def test_solve_linear_consistent_systems(rows, data):
    m = Matrix.from_rows(QQ, rows)
    x0 = [data.draw(small) for _ in range(m.ncols)]
    b = m.apply(x0)
    x = solve_linear(m, b)
    assert x is not None and m.apply(x) == tuple(b)
    cert = solve_certificate(m, b)
    assert cert["rank"] == cert["rank_augmented"]


@settings(max_examples=40, deadline=None)
@given(int_matrices(max_cols=3), st.integers(0, 6))
def test_rank_over_f5_matches_sympy(rows, shift):
    rows = [[x + shift for x in r] for r in rows]
    ours = rank(Matrix.from_rows(GF(5), rows))
    from sympy import GF as SGF
    from sympy.polys.matrices import DomainMatrix

    theirs = DomainMatrix([[SGF(5)(x) for x in r] for r in rows], (len(rows), len(rows[0])), SGF(5)).rank()
    assert ours == theirs


def test_inconsistent_system_certificate():
    m = Matrix.from_rows(QQ, [[1, 1], [1, 1]])
    assert solve_linear(m, [1, 2]) is None
    assert solve_certificate(m, [1, 2]) == {"rank": 1, "rank_augmented": 2}


def test_solve_rejects_wrong_length():
    with pytest.raises(DimensionError):
        solve_linear(Matrix.identity(QQ, 2), [1, 2, 3])


def test_inverse_and_singular():
    m = Matrix.from_rows(QQ, [[2, 1], [1, 1]])
    assert inverse(m) @ m == Matrix.identity(QQ, 2)
    assert not is_invertible(Matrix.from_rows(QQ, [[1, 2], [2, 4]]))
    with pytest.raises(ZeroDivisionError):
        inverse(Matrix.from_rows(QQ, [[1, 2], [2, 4]]))


# -- subspaces -----------------------------------------------------------------


def test_subspace_canonical_form_is_basis_independent():
    a = Subspace(QQ, 3, [(1, 1, 0), (0, 1, 1)])
    b = Subspace(QQ, 3, [(1, 2, 1), (1, 0, -1)])
    assert a == b and hash(a) == hash(b)


def test_coordinates_round_trip():
    s = Subspace(QQ, 4, [(1, 0, 2, 0), (0, 1, 0, 3)])
    v = s.combine([5, -2])
    ok, coords = membership(v, s)
    assert ok and s.combine(coords) == tuple(v)
    assert (1, 0, 0, 0) not in s


def test_intersection():
    a = Subspace(QQ, 3, [(1, 0, 0), (0, 1, 0)])
    b = Subspace(QQ, 3, [(0, 1, 0), (0, 0, 1)])
    assert intersect([a, b]) == Subspace(QQ, 3, [(0, 1, 0)])
    assert intersect([], ambient_dim=2, field=QQ).dim == 2


@settings(max_examples=40, deadline=None)
@given(int_matrices(max_rows=4, max_cols=5))
def test_span_dimension_is_rank(rows):
    m = Matrix.from_rows(QQ, rows)
    assert Subspace.span(m).dim == rank(m)
