from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgecyc.errors import InvariantError
from hodgecyc.exactlin import (
    Echelon,
    SparseMat,
    fmt_rat,
    image_basis,
    induced_map,
    kernel_basis,
    quotient_space,
    rank,
    solve_columns,
    subquotient,
)


def dense_rank(rows: list[list[Fraction]]) -> int:
    """Textbook Gaussian elimination, kept separate from the library."""
    m = [list(r) for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


entries = st.integers(-3, 3).map(Fraction) | st.fractions(-2, 2, max_denominator=4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    # bias towards sparse and low rank inputs
    data = draw(st.lists(st.lists(entries | st.just(Fraction(0)), min_size=c, max_size=c),
                         min_size=r, max_size=r))
    return SparseMat.from_dense(data)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_dense_oracle(M):
    assert rank(M) == dense_rank(M.to_dense())
    assert rank(M) == rank(M.transpose())


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_plus_nullity(M):
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    assert rank(M) + K.cols == M.cols
    assert rank(K) == K.cols


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_image_basis_spans_image(M):
    B = image_basis(M)
    assert B.cols == rank(M)
    X = solve_columns(B, M)
    assert B @ X == M


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=5, max_cols=5), matrices(max_rows=5, max_cols=5))
def test_subquotient_dimension(Z, extra):
    # boundaries inside the cycles: take images of Z
    C = SparseMat.zeros(Z.cols, extra.cols)
    if extra.rows == Z.cols:
        C = extra
    Bd = Z @ C
    S = subquotient(Z, Bd)
    assert S.dim == rank(Z) - rank(Bd)
    for j in range(Bd.cols):
        assert S.is_boundary(Bd.col(j))


def test_subquotient_containment_violation():
    Z = SparseMat.from_dense([[1], [0]])
    Bd = SparseMat.from_dense([[0], [1]])
    with pytest.raises(InvariantError):
        subquotient(Z, Bd)


def test_canonical_basis_independent_of_generators():
    Z1 = SparseMat.from_dense([[1, 0], [0, 1], [1, 1]])
    Z2 = SparseMat.from_dense([[1, 1], [1, 0], [2, 1]])
    Bd1 = SparseMat.from_dense([[1], [1], [2]])
    Bd2 = SparseMat.from_dense([[2], [2], [4]])
    assert subquotient(Z1, Bd1).basis == subquotient(Z2, Bd2).basis


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_induced_map_composition(n, data):
    mat = lambda r, c: SparseMat.from_dense(
        data.draw(st.lists(st.lists(st.integers(-2, 2), min_size=c, max_size=c), min_size=r, max_size=r)))
    f = mat(n, n)
    g = mat(n, n)
    full = quotient_space(n, SparseMat.zeros(n, 0))
    assert induced_map(g @ f, full, full) == induced_map(g, full, full) @ induced_map(f, full, full)


def test_induced_map_on_quotients():
    # V = Q^2 / <e1>, f swaps coordinates: the class of e2 maps to the class of e1 = 0
    V = quotient_space(2, SparseMat.from_dense([[1], [0]]))
    f = SparseMat.from_dense([[0, 1], [1, 0]])
    with pytest.raises(InvariantError):
        induced_map(f, V, V)
    g = SparseMat.from_dense([[5, 0], [0, 3]])
    assert induced_map(g, V, V).to_dense() == [[3]]


def test_echelon_express_and_residue():
    E = Echelon(track=True)
    E.insert({0: 1, 1: 1})
    E.insert({1: 2})
    assert E.contains({0: 3, 1: 1})
    assert not E.contains({2: 1})
    assert E.residue({2: 1}) == {2: 1}


def test_solve_columns_rejects_outside_span():
    with pytest.raises(InvariantError):
        solve_columns(SparseMat.from_dense([[1], [0]]), SparseMat.from_dense([[0], [1]]))


def test_fmt_rat():
    assert fmt_rat(Fraction(3)) == "3"
    assert fmt_rat(Fraction(-1, 2)) == "-1/2"


def test_sparse_arithmetic():
    A = SparseMat.from_dense([[1, 2], [3, 4]])
    I = SparseMat.identity(2)
    assert A @ I == A
    assert (A - A).is_zero()
    assert A.transpose().to_dense() == [[1, 3], [2, 4]]
    assert A.scale(Fraction(1, 2))[1, 1] == 2
    with pytest.raises(ValueError):
        A @ SparseMat.zeros(3, 1)
