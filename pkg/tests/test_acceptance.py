"""Acceptance criteria AC-1 .. AC-11.

Each test prints one line ``AC-k PASS|FAIL <detail>`` and asserts.  The lines
are repeated in the terminal summary of any pytest run (see conftest.py).
"""

from __future__ import annotations

import subprocess
import sys
import time
from pathlib import Path

from hodgecyc.algebras import (
    TowerSpec,
    algebra_map_matrix,
    ideal,
    truncated_polynomial,
    univariate_quotient,
)
from hodgecyc.exactlin import SparseMat
from hodgecyc.hochcyc import (
    bar_mixed,
    check_e_map,
    eulerian_on_bar,
    group_action_matrix,
    hc_rel,
    hh,
    hh_map,
    hodge_hc_rel,
    hodge_hh,
    shuffle_element,
)
from hodgecyc.prohkr import build_hkr_tower, certify_pro_hkr, lemma33_image
from hodgecyc.volodin import (
    ce_complex,
    check_lie_map,
    check_triangularity,
    exterior_power_lie,
    gl,
    loday_quillen,
    theta_lambda_report,
)

FIX = Path(__file__).parent / "fixtures"


def verdict(record, ac: str, ok: bool, detail: str, start: float) -> None:
    line = f"{ac} {'PASS' if ok else 'FAIL'} ({time.perf_counter() - start:.1f}s) {detail}"
    print(line)
    record("acceptance", line)
    assert ok, line


def test_ac1_hh_dimension_law(record_property):
    t = time.perf_counter()
    got = {(m, n): hh(truncated_polynomial(m), n).dim for m in (1, 2, 3) for n in (1, 2, 3, 4)}
    bad = {k: v for k, v in got.items() if v != k[0]}
    verdict(record_property, "AC-1", not bad, f"dim HH_n(Q[x]/(x^(m+1))) = m for 12 cases; mismatches {bad}", t)


def test_ac2_transition_vanishing(record_property):
    t = time.perf_counter()
    nonzero = []
    for n in (2, 3):
        for m, M in ((1, 3), (2, 5)):
            src, dst = truncated_polynomial(M), truncated_polynomial(m)
            F = hh_map(algebra_map_matrix(src, dst), bar_mixed(src, n + 1), bar_mixed(dst, n + 1), n)
            if not F.is_zero() or F.shape != (m, M):
                nonzero.append((n, m, M))
    verdict(record_property, "AC-2", not nonzero, f"HH_n(L_M) -> HH_n(L_m) zero; failures {nonzero}", t)


def test_ac3_pro_hkr_certificate(record_property):
    t = time.perf_counter()
    spec = TowerSpec(("x",), ("x",))
    summary = {}
    ok = True
    for p in (0, 1, 2):
        cert = certify_pro_hkr(build_hkr_tower(spec, p, 8), 8, 3)
        wit = [cert.kernel.witnesses, cert.cokernel.witnesses]
        summary[p] = wit
        ok &= cert.certified and all(set(w) == {1, 2, 3} and all(j <= 2 * m + 1 for m, j in w.items())
                                     for w in wit)
    verdict(record_property, "AC-3", ok, f"witnesses (kernel, cokernel) by p: {summary}", t)


def test_ac4_kunneth_image(record_property):
    t = time.perf_counter()
    R = truncated_polynomial(1, "y")
    outs = {n: lemma33_image(R, n, 1, 3) for n in (2, 3)}
    ok = outs[2]["computed"] == 3 and all(o["match"] for o in outs.values())
    detail = "; ".join(
        f"n={n}: computed {o['computed']}, n-1 form {o['predicted_n_minus_1']}, "
        f"m-1 form {o['predicted_m_minus_1']}" for n, o in outs.items())
    verdict(record_property, "AC-4", ok, detail, t)


def _idempotent_failures(A) -> list[str]:
    bar = bar_mixed(A, 4, normalized=False)
    fails = []
    for n in range(1, 5):
        E = eulerian_on_bar(bar, n)
        d = bar.dim(n)
        I = SparseMat.identity(d)
        total = SparseMat.zeros(d, d)
        for e in E.values():
            total = total + e
        if total != I:
            fails.append(f"sum n={n}")
        for i, ei in E.items():
            for j, ej in E.items():
                if ei @ ej != (ei if i == j else SparseMat.zeros(d, d)):
                    fails.append(f"orth n={n} ({i},{j})")
        sh = group_action_matrix(bar, n, shuffle_element(n))
        low = eulerian_on_bar(bar, n - 1)
        for i, ei in E.items():
            if not ((sh - I.scale(2 ** i - 2)) @ ei).is_zero():
                fails.append(f"shuffle n={n} i={i}")
            lower = low.get(i, SparseMat.zeros(bar.dim(n - 1), bar.dim(n - 1)))
            if bar.b(n) @ ei != lower @ bar.b(n):
                fails.append(f"b-equivariance n={n} i={i}")
    return fails


def test_ac5_idempotent_suite(record_property):
    t = time.perf_counter()
    fails = _idempotent_failures(truncated_polynomial(1)) + _idempotent_failures(truncated_polynomial(2))
    verdict(record_property, "AC-5", not fails, f"C_n(L_1), C_n(L_2), n <= 4; failures {fails}", t)


def test_ac6_hodge_sums(record_property):
    t = time.perf_counter()
    fails = []
    for m in (1, 2):
        A = truncated_polynomial(m)
        I = ideal(A, ["x"])
        for n in range(4):
            if sum(hodge_hh(A, n).dims().values()) != hh(A, n).dim:
                fails.append(("HH", m, n))
            if sum(hodge_hc_rel(A, I, n).dims().values()) != hc_rel(A, I, n).dim:
                fails.append(("HC", m, n))
    verdict(record_property, "AC-6", not fails, f"HH and relative HC piece sums for L_1, L_2, n <= 3; failures {fails}", t)


def test_ac7_mixed_and_e_identities(record_property):
    t = time.perf_counter()
    fails = []
    for m in (1, 2):
        A = truncated_polynomial(m)
        for normalized in (True, False):
            try:
                bar_mixed(A, 5, normalized=normalized, check=True)
            except AssertionError as e:
                fails.append(f"L_{m} {'norm' if normalized else 'unnorm'}: {e}")
        rep = check_e_map(A, 4)
        if not rep["ok"]:
            fails.append(f"L_{m} e-map {rep}")
    verdict(record_property, "AC-7", not fails, f"b^2, B^2, bB+Bb through degree 5; e o b, e o B, e o hkr; failures {fails}", t)


def test_ac8_etale_vanishing(record_property):
    t = time.perf_counter()
    dims = {rel: [hh(univariate_quotient(rel), n).dim for n in (1, 2, 3)] for rel in ("x^2 + 1", "x^2 - x")}
    ok = all(d == [0, 0, 0] for d in dims.values())
    verdict(record_property, "AC-8", ok, f"HH_1..3 of Q[x]/(x^2+1) and Q x Q: {dims}", t)


def test_ac9_ce_and_theta(record_property):
    t = time.perf_counter()
    A = truncated_polynomial(1, "e")
    I = ideal(A, ["e"])
    fails = []
    try:
        ce = ce_complex(gl(A, 2), 4)
        ce.complex.check()
        loday_quillen(A, 2, 3, ce=ce)
    except AssertionError as e:
        fails.append(str(e))
    r = theta_lambda_report(A, I, 2, 1, 1)
    if not (r["theta_surjective"] and r["hc_dim"] == I.dim and r["theta_rank"] == I.dim):
        fails.append("degree-one surjectivity")
    verdict(record_property, "AC-9", not fails, f"d_CE^2 through 4, theta chain map through 3, theta onto I; failures {fails}", t)


def test_ac10_exterior_power_lie_maps(record_property):
    t = time.perf_counter()
    A = truncated_polynomial(1, "e")
    I = ideal(A, ["e"])
    fails = []
    for n, k in ((2, 1), (2, 2), (3, 2)):
        phi, src, dst = exterior_power_lie(A, n, k)
        if not check_lie_map(phi, src, dst):
            fails.append(f"bracket ({n},{k})")
        if not check_triangularity(phi, A, I, n, k):
            fails.append(f"triangularity ({n},{k})")
    verdict(record_property, "AC-10", not fails, f"(n,k) in (2,1),(2,2),(3,2); failures {fails}", t)


def _ac_commands() -> list[list[str]]:
    f = lambda name: str(FIX / name)
    cmds: list[list[str]] = []
    for m in (1, 2, 3):
        for n in (1, 2, 3, 4):
            cmds.append(["hh", f(f"lambda{m}.json"), "--degree", str(n)])
    for n in (2, 3):
        cmds.append(["hh", f("lambda3.json"), "--degree", str(n), "--map", f("lambda1.json")])
        cmds.append(["hh", f("lambda5.json"), "--degree", str(n), "--map", f("lambda2.json")])
    for p in (0, 1, 2):
        cmds.append(["prohkr", f("tower_x.json"), "--p", str(p), "--m-max", "3", "--search-max", "8"])
    for m in (1, 2):
        for n in range(4):
            cmds.append(["hh", f(f"lambda{m}.json"), "--degree", str(n), "--hodge"])
            cmds.append(["hc", f(f"lambda{m}.json"), "--degree", str(n), "--relative", "x", "--hodge"])
    for name in ("gaussian.json", "split.json"):
        for n in (1, 2, 3):
            cmds.append(["hh", f(name), "--degree", str(n)])
    for suite in ("idempotents", "mixed-identities", "ce", "towers"):
        cmds.append(["check", "--suite", suite])
    cmds.append(["volodin", f("dual.json"), "--ideal", "e", "--n", "2", "--k", "1", "--m", "1"])
    cmds.append(["volodin", f("dual.json"), "--ideal", "e", "--n", "2", "--k", "2", "--m", "2"])
    return [[sys.executable, "-m", "hodgecyc"] + c for c in cmds]


AC4_SCRIPT = ("import json; from hodgecyc.algebras import truncated_polynomial as t; "
              "from hodgecyc.prohkr import lemma33_image as f; "
              "print(json.dumps([f(t(1, 'y'), n, 1, 3) for n in (2, 3)], sort_keys=True))")


def test_ac11_determinism(record_property):
    t = time.perf_counter()
    cmds = _ac_commands() + [[sys.executable, "-c", AC4_SCRIPT]]
    differ = []
    failed = []
    for cmd in cmds:
        a = subprocess.run(cmd, capture_output=True)
        b = subprocess.run(cmd, capture_output=True)
        if a.returncode != 0:
            failed.append(" ".join(cmd[3:]))
        if a.stdout != b.stdout or not a.stdout:
            differ.append(" ".join(cmd[3:]))
    ok = not differ and not failed
    verdict(record_property, "AC-11", ok, f"{len(cmds)} commands run twice, byte-identical; "
                         f"differing {differ}; nonzero exit {failed}", t)
