from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgecyc.algebras import (
    FinAlgebra,
    TowerSpec,
    algebra_map_matrix,
    de_rham_mixed,
    ground_field,
    ideal,
    ideal_power,
    kaehler,
    level_algebra,
    monomial_quotient,
    nilpotency_index,
    parse_poly,
    poly_mul,
    quotient_algebra,
    tensor,
    truncated_polynomial,
    truncation_tower,
    univariate_quotient,
    zero_ideal,
)
from hodgecyc.errors import InputError, InvariantError, NotNilpotentError


def test_parse_poly_basic():
    p = parse_poly("2*x^2 - 3*x*y + 1", ["x", "y"])
    assert p == {(2, 0): 2, (1, 1): -3, (0, 0): 1}
    assert parse_poly("(x + 1)^2", ["x"]) == {(2,): 1, (1,): 2, (0,): 1}
    assert parse_poly("x - x", ["x"]) == {}


@pytest.mark.parametrize("text, offset", [("x^2 + * 1", 6), ("x + z", 4), ("x^", 2), ("(x + 1", 6)])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(InputError) as info:
        parse_poly(text, ["x"])
    assert info.value.offset == offset


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_parser_agrees_with_poly_mul(a, b):
    def text(cs):
        return " + ".join(f"({c})*x^{i}" for i, c in enumerate(cs))
    prod = parse_poly(f"({text(a)}) * ({text(b)})", ["x"])
    assert prod == poly_mul(parse_poly(text(a), ["x"]), parse_poly(text(b), ["x"]))


def test_truncated_polynomial():
    L = truncated_polynomial(2)
    assert L.dim == 3
    x = L.element("x")
    assert L.mul(x, L.mul(x, x)) == {}
    assert L.element("x^2") == {2: 1}


def test_univariate_quotient_requires_monic():
    with pytest.raises(InputError):
        univariate_quotient("2*x^2 + 1")
    A = univariate_quotient("x^2 + 1")
    i = A.element("x")
    assert A.mul(i, i) == {0: Fraction(-1)}


def test_monomial_quotient_basis():
    A = monomial_quotient(["x", "y"], ["x^3", "x*y", "y^2"])
    assert A.basis == ("1", "x", "y", "x^2")
    with pytest.raises(InputError, match="y"):
        monomial_quotient(["x", "y"], ["x^2"])


def test_tensor_product():
    A = tensor(truncated_polynomial(1, "x"), truncated_polynomial(1, "y"))
    assert A.dim == 4
    assert A.element("x*y") != {}
    assert A.element("x^2 * y") == {}


def test_structure_constant_checks():
    # x^2 = y, y^2 = x, xy = 0 is not associative
    mult = [[{0: 1}, {1: 1}, {2: 1}],
            [{1: 1}, {2: 1}, {}],
            [{2: 1}, {}, {1: 1}]]
    with pytest.raises(InvariantError, match="associative"):
        FinAlgebra(["1", "x", "y"], mult, {0: 1})
    bad = [[{0: 1}, {1: 1}], [{0: 1}, {1: 1}]]
    with pytest.raises(InvariantError):
        FinAlgebra(["1", "x"], bad, {0: 1})


def test_ideals_and_nilpotency():
    L = truncated_polynomial(2)
    I = ideal(L, ["x"])
    assert I.dim == 2
    assert ideal_power(I, 2).dim == 1
    assert nilpotency_index(I) == 3
    assert nilpotency_index(zero_ideal(L)) == 1
    D = tensor(truncated_polynomial(1, "x"), truncated_polynomial(1, "y"))
    assert nilpotency_index(ideal(D, ["x", "y"])) == 3
    with pytest.raises(NotNilpotentError):
        nilpotency_index(ideal(univariate_quotient("x^2 - x"), ["x"]))


def test_quotient_algebra():
    L = truncated_polynomial(3)
    Q, proj = quotient_algebra(ideal(L, ["x^2"]))
    assert Q.dim == 2
    assert proj.shape == (2, 4)


def test_algebra_map_by_variables():
    f = algebra_map_matrix(truncated_polynomial(3), truncated_polynomial(1))
    assert f.to_dense() == [[1, 0, 0, 0], [0, 1, 0, 0]]


def test_level_algebras_and_tower():
    spec = TowerSpec(("x",), ("x",))
    assert [level_algebra(spec, m).dim for m in (1, 2, 3)] == [1, 2, 3]
    T = truncation_tower(spec, 3)
    assert len(T) == 3


def test_kaehler_dimensions():
    L2 = truncated_polynomial(2)
    # Omega^1 of Q[x]/(x^3) is spanned by dx and x dx (x^2 dx = d(x^3)/3 = 0)
    assert kaehler(L2, 1).dim == 2
    assert kaehler(L2, 2).dim == 0
    assert kaehler(ground_field(), 1).dim == 0
    D = tensor(truncated_polynomial(1, "x"), truncated_polynomial(1, "y"))
    # free module dims 4, 8, 4 minus relations from d(x^2), d(y^2)
    assert kaehler(D, 0).dim == 4


def test_de_rham_mixed_is_a_mixed_complex():
    for A in (truncated_polynomial(2), tensor(truncated_polynomial(1, "x"), truncated_polynomial(1, "y"))):
        M = de_rham_mixed(A)
        M.check()
        assert M.bounded
