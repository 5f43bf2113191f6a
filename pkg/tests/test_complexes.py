from __future__ import annotations

import pytest

from hodgecyc.complexes import (
    ChainComplex,
    ChainMap,
    MixedComplex,
    Tower,
    TowerMap,
    connes_total,
    identity_map,
    induced_on_homology,
    kernel_complex,
    pro_iso_certificate,
    pro_zero_certificate,
)
from hodgecyc.errors import InvariantError
from hodgecyc.exactlin import SparseMat


def circle() -> ChainComplex:
    # simplicial circle with two vertices and two edges
    d1 = SparseMat.from_dense([[-1, 1], [1, -1]])
    return ChainComplex({0: 2, 1: 2}, {1: d1})


def test_circle_homology():
    C = circle()
    assert [C.homology(n).dim for n in (0, 1)] == [1, 1]
    assert C.euler_characteristic() == 0


def test_d_squared_checked():
    d1 = SparseMat.from_dense([[1]])
    d2 = SparseMat.from_dense([[1]])
    with pytest.raises(InvariantError):
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: d1, 2: d2})


def test_chain_map_check_and_homology():
    C = circle()
    swap = SparseMat.from_dense([[0, 1], [1, 0]])
    f = ChainMap(C, C, {0: swap, 1: swap})
    assert induced_on_homology(f, 1).to_dense() == [[1]]
    assert induced_on_homology(identity_map(C), 0).to_dense() == [[1]]
    with pytest.raises(InvariantError):
        ChainMap(C, C, {0: SparseMat.identity(2), 1: swap})


def test_kernel_complex():
    C = circle()
    collapse = ChainComplex({0: 1, 1: 0})
    f = ChainMap(C, collapse, {0: SparseMat.from_dense([[1, 1]]), 1: SparseMat.zeros(0, 2)})
    K = kernel_complex(f)
    assert K.dims == {0: 1, 1: 2}
    assert K.homology(0).dim == 0 and K.homology(1).dim == 1


def ground_mixed(N: int) -> MixedComplex:
    # Q in degree 0, bounded: HC_n = Q for even n
    return MixedComplex(ChainComplex({0: 1}), {}, bounded=True)


def test_connes_total_of_ground_field():
    M = ground_mixed(0)
    dims = [connes_total(M, "HC", n).homology(n).dim for n in range(5)]
    assert dims == [1, 0, 1, 0, 1]


def test_mixed_identities_checked():
    C = ChainComplex({0: 1, 1: 1, 2: 1})
    B = {0: SparseMat.identity(1), 1: SparseMat.identity(1)}
    with pytest.raises(InvariantError):
        MixedComplex(C, B)


def constant_tower(L: int, transition: SparseMat) -> Tower:
    return Tower([transition.rows] * L, [transition] * (L - 1))


def test_pro_zero_zero_transitions():
    T = constant_tower(4, SparseMat.zeros(1, 1))
    cert = pro_zero_certificate(T, 4)
    assert cert.certified
    assert cert.witnesses == {1: 2, 2: 3, 3: 4}


def test_pro_zero_identity_transitions_inconclusive():
    T = constant_tower(4, SparseMat.identity(1))
    cert = pro_zero_certificate(T, 4)
    assert not cert.certified
    assert cert.failed_level == 1
    assert cert.as_dict()["status"] == "inconclusive"


def test_pro_zero_nilpotent_transitions():
    # transitions are a nilpotent shift of order 2: composites of length 2 vanish
    N = SparseMat.from_dense([[0, 1], [0, 0]])
    T = constant_tower(5, N)
    cert = pro_zero_certificate(T, 5)
    assert cert.witnesses == {1: 3, 2: 4, 3: 5}
    assert cert.failed_level == 4


def test_zero_objects_give_least_witness():
    T = Tower([0, 0, 0], [SparseMat.zeros(0, 0)] * 2)
    assert pro_zero_certificate(T, 3).witnesses == {1: 2, 2: 3}


def test_pro_iso_identity():
    T = constant_tower(3, SparseMat.identity(2))
    f = TowerMap(T, T, [SparseMat.identity(2)] * 3)
    cert = pro_iso_certificate(f, 3)
    assert cert.certified
    assert cert.as_dict()["kernel"]["witnesses"] == {"1": 2, "2": 3}


def test_tower_map_strictness_checked():
    T = constant_tower(2, SparseMat.identity(1))
    S = constant_tower(2, SparseMat.zeros(1, 1))
    f = TowerMap(T, S, [SparseMat.identity(1)] * 2)
    with pytest.raises(InvariantError):
        f.check_strict()
