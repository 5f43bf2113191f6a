from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from hodgecyc.algebras import ground_field, ideal, truncated_polynomial, zero_ideal
from hodgecyc.errors import InvariantError
from hodgecyc.exactlin import SparseMat
from hodgecyc.volodin import (
    FinLieAlgebra,
    ce_complex,
    check_lie_map,
    check_triangularity,
    exterior_power_lie,
    gl,
    loday_quillen,
    t_sigma,
    theta_lambda_report,
    theta_scalar,
    x_complex,
)


def dual():
    A = truncated_polynomial(1, "e")
    return A, ideal(A, ["e"])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gl_dimension(n):
    A, _ = dual()
    assert gl(A, n).dim == n * n * A.dim
    assert gl(ground_field(), n).dim == n * n


def test_jacobi_checked():
    # [a, b] = c, [b, c] = a, [c, a] = a violates Jacobi
    z = {}
    table = [[z, {2: 1}, {0: -1}],
             [{2: -1}, z, {0: 1}],
             [{0: 1}, {0: -1}, z]]
    with pytest.raises(InvariantError):
        FinLieAlgebra(["a", "b", "c"], table)


def test_t_sigma_dimensions():
    A, I = dual()
    for n in (2, 3):
        upper = comb(n, 2)
        want = upper * A.dim + (n * n - upper) * I.dim
        assert t_sigma(A, I, n).dim == want
        assert t_sigma(A, I, n, tuple(reversed(range(n)))).dim == want
        assert t_sigma(A, zero_ideal(A), n).dim == upper * A.dim


def test_ce_complex_dims_and_d_squared():
    A, _ = dual()
    ce = ce_complex(gl(A, 2), 4)
    assert [ce.complex.dim(q) for q in range(5)] == [comb(8, q) for q in range(5)]
    ce.complex.check()


def test_ce_homology_of_gl2_over_q():
    # gl_2 = sl_2 + Q: H_0 = H_1 = Q, H_2 = 0
    ce = ce_complex(gl(ground_field(), 2), 3)
    assert [ce.complex.homology(q).dim for q in range(3)] == [1, 1, 0]


def test_x_complex_is_a_subcomplex():
    A, I = dual()
    X = x_complex(A, I, 2, 3)
    assert X.dim(0) == 1
    X.check()


def test_theta_scalars():
    assert [theta_scalar(q) for q in (1, 2, 3, 4)] == [1, 1, -1, 1]
    assert all(isinstance(theta_scalar(q), Fraction) for q in (1, 2))


@pytest.mark.parametrize("n", [1, 2])
def test_loday_quillen_chain_map(n):
    A, _ = dual()
    lq = loday_quillen(A, n, 3)
    # Lambda^q gl_n(A) vanishes above dim gl_n(A)
    assert set(lq.theta) == set(range(1, min(3, n * n * A.dim) + 1))
    # degree one is the trace gl_n(A) -> A, which is onto
    from hodgecyc.exactlin import rank
    assert rank(lq.theta[1]) == A.dim


@pytest.mark.parametrize("n, k", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_exterior_power_maps(n, k):
    A, I = dual()
    phi, src, dst = exterior_power_lie(A, n, k)
    assert dst.dim == comb(n, k) ** 2 * A.dim
    assert check_lie_map(phi, src, dst)
    assert check_triangularity(phi, A, I, n, k)


def test_exterior_power_identity_case():
    A, _ = dual()
    phi, src, dst = exterior_power_lie(A, 2, 1)
    assert phi == SparseMat.identity(src.dim)


def test_report_k_equal_one():
    A, I = dual()
    r = theta_lambda_report(A, I, 2, 1, 1)
    assert r["equal"] and r["theta_surjective"] and r["theta_chain_map"]


def test_report_degree_one_surjective():
    A, I = dual()
    r = theta_lambda_report(A, I, 2, 2, 1)
    assert r["theta_surjective"]
    assert r["hc_dim"] == I.dim
