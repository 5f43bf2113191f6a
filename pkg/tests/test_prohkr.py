from __future__ import annotations

import pytest

from hodgecyc.algebras import TowerSpec, ideal, tensor, truncated_polynomial
from hodgecyc.errors import InputError
from hodgecyc.prohkr import (
    artin_rees_witness,
    build_hkr_tower,
    certify_pro_hkr,
    koszul_epsilon,
    lemma33_image,
)

LINE = TowerSpec(("x",), ("x",))


def test_tower_dimensions():
    # Omega^1 of Q[x]/(x^m) has dim m-1; HH_1 agrees
    T = build_hkr_tower(LINE, 1, 4)
    assert [s.dim for s in T.omega_tower.levels] == [0, 1, 2, 3]
    assert [s.dim for s in T.hh_tower.levels] == [0, 1, 2, 3]


def test_hkr_is_levelwise_iso_in_degree_one():
    from hodgecyc.exactlin import rank

    T = build_hkr_tower(LINE, 1, 4)
    for f, H in zip(T.maps, T.hh_tower.levels):
        assert rank(f) == H.dim


@pytest.mark.parametrize("p", [0, 1, 2])
def test_certificate_witnesses_bounded(p):
    cert = certify_pro_hkr(build_hkr_tower(LINE, p, 8), 8, 3)
    assert cert.certified
    for part in (cert.kernel, cert.cokernel):
        assert set(part.witnesses) == {1, 2, 3}
        assert all(m < j <= 2 * m + 1 for m, j in part.witnesses.items())


def test_small_search_bound_is_inconclusive():
    cert = certify_pro_hkr(build_hkr_tower(LINE, 2, 3), 2, 3)
    assert not cert.certified
    assert cert.as_dict()["status"] == "inconclusive"


def test_certificate_extends_short_towers():
    T = build_hkr_tower(LINE, 1, 2)
    assert certify_pro_hkr(T, 6, 2).certified


def test_two_variable_tower_strict():
    spec = TowerSpec(("x", "y"), ("x", "y"))
    T = build_hkr_tower(spec, 1, 3)
    T.tower_map().check_strict()
    assert [A.dim for A in T.algebras] == [1, 3, 6]


@pytest.mark.parametrize("n", [2, 3])
def test_transition_image_on_tensor_product(n):
    out = lemma33_image(truncated_polynomial(1, "y"), n, 1, 3)
    assert out["computed"] == 3
    assert out["match"]


def test_artin_rees_monomial_case():
    S = tensor(truncated_polynomial(3, "x"), truncated_polynomial(3, "y"))
    # J^m cap (x) = x J^(m-1) for monomial ideals, so c = 1
    out = artin_rees_witness(ideal(S, ["1"]), ideal(S, ["x"]), ideal(S, ["x", "y"]), 3)
    assert out == {"found": True, "c": 1, "m_max": 3}
    with pytest.raises(InputError):
        artin_rees_witness(ideal(S, ["x"]), ideal(S, ["y"]), ideal(S, ["x", "y"]), 3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_koszul_epsilon(m):
    k = koszul_epsilon(m)
    assert k.report["covers_identity"]
    assert k.report["hh1_agrees_with_hkr"]
    assert k.report["hh1_rank"] == m - 1
