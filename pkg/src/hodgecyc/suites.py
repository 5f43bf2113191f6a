"""Named invariant suites for ``hodgecyc check``.

Each suite is a list of (name, thunk) pairs; a thunk returns normally when the
assertion holds and raises (or returns False) when it does not.  Running stops
at the first failure, which is reported by name.
"""

from __future__ import annotations

from typing import Callable

from .algebras import FinAlgebra, ideal, truncated_polynomial
from .errors import HodgecycError
from .exactlin import SparseMat

Check = tuple[str, Callable[[], object]]


def _lambdas() -> list[FinAlgebra]:
    return [truncated_polynomial(1), truncated_polynomial(2)]


def mixed_identity_checks(algebras: list[FinAlgebra]) -> list[Check]:
    from .hochcyc import bar_mixed, check_e_map, check_mixed_identities

    out: list[Check] = []
    for A in algebras:
        for normalized in (True, False):
            model = "normalized" if normalized else "unnormalized"
            top = 5 if normalized else min(5, _unnormalized_top(A))
            out.append((f"b^2 = B^2 = bB+Bb = 0 on {A.name} ({model}, n <= {top})",
                        lambda A=A, N=top, nz=normalized:
                        check_mixed_identities(bar_mixed(A, N, nz).mixed)))
        out.append((f"e o b = 0, e o B = d o e, e o hkr = id on {A.name}",
                    lambda A=A: _all_true(check_e_map(A, 4, normalized=False))))
    return out


def _unnormalized_top(A: FinAlgebra) -> int:
    # keep dim A^(n+1) within a few thousand
    n = 0
    while A.dim ** (n + 2) <= 4096 and n < 5:
        n += 1
    return n


def _all_true(report: dict) -> bool:
    bad = [k for k, v in report.items() if v is not True]
    if bad:
        raise AssertionError(f"failed: {', '.join(sorted(bad))}")
    return True


def idempotent_checks(algebras: list[FinAlgebra]) -> list[Check]:
    from .hochcyc import bar_mixed

    out: list[Check] = []
    for A in algebras:
        bars: dict[str, object] = {}

        def bar_of(A=A, bars=bars):
            if "bar" not in bars:
                bars["bar"] = bar_mixed(A, 4, normalized=False)
            return bars["bar"]

        for n in range(1, 5):
            out.append((f"Eulerian idempotents on C_{n}({A.name})",
                        lambda bar_of=bar_of, n=n: _idempotent_identities(bar_of(), n)))
    return out


def _idempotent_identities(bar, n: int) -> bool:
    from .hochcyc import eulerian_on_bar, group_action_matrix, shuffle_element

    E = eulerian_on_bar(bar, n)
    dim = bar.dim(n)
    total = SparseMat.zeros(dim, dim)
    for e in E.values():
        total = total + e
    if total != SparseMat.identity(dim):
        raise AssertionError("sum of idempotents is not the identity")
    for i, ei in E.items():
        for j, ej in E.items():
            want = ei if i == j else SparseMat.zeros(dim, dim)
            if ei @ ej != want:
                raise AssertionError(f"e^({i}) e^({j}) != delta e^({i})")
    sh = group_action_matrix(bar, n, shuffle_element(n))
    for i, ei in E.items():
        if not ((sh - SparseMat.identity(dim).scale(2 ** i - 2)) @ ei).is_zero():
            raise AssertionError(f"(sh_{n} - (2^{i} - 2)) e^({i}) != 0")
    Elow = eulerian_on_bar(bar, n - 1)
    b = bar.b(n)
    for i, ei in E.items():
        lower = Elow.get(i, SparseMat.zeros(bar.dim(n - 1), bar.dim(n - 1)))
        if b @ ei != lower @ b:
            raise AssertionError(f"b e^({i}) != e^({i}) b in degree {n}")
    return True


def ce_checks() -> list[Check]:
    from .volodin import (check_lie_map, check_triangularity, ce_complex, exterior_power_lie,
                          gl, loday_quillen)

    A = truncated_polynomial(1, "e")
    I = ideal(A, ["e"])
    out: list[Check] = [
        ("d_CE^2 = 0 on Lambda^* gl_2(Q[e]) through degree 4",
         lambda: ce_complex(gl(A, 2), 4).complex.check() or True),
        ("theta is a chain map through degree 3 for gl_2(Q[e])",
         lambda: loday_quillen(A, 2, 3) is not None),
    ]
    for n, k in ((2, 1), (2, 2), (3, 2)):
        def lie(n=n, k=k):
            phi, src, dst = exterior_power_lie(A, n, k)
            if not check_lie_map(phi, src, dst):
                raise AssertionError("bracket not preserved")
            if not check_triangularity(phi, A, I, n, k):
                raise AssertionError("triangularity mod I not preserved")
            return True
        out.append((f"Lambda^{k} on gl_{n}(Q[e]) is a Lie map preserving t^id", lie))
    return out


def tower_checks() -> list[Check]:
    from .algebras import TowerSpec, algebra_map_matrix
    from .hochcyc import bar_mixed, hh_map
    from .prohkr import build_hkr_tower, certify_pro_hkr

    out: list[Check] = []
    for n in (2, 3):
        for m, M in ((1, 3), (2, 5)):
            def vanish(n=n, m=m, M=M):
                src, dst = truncated_polynomial(M), truncated_polynomial(m)
                f = algebra_map_matrix(src, dst)
                F = hh_map(f, bar_mixed(src, n + 1), bar_mixed(dst, n + 1), n)
                if not F.is_zero():
                    raise AssertionError("transition map is nonzero")
                return True
            out.append((f"HH_{n}(Lambda_{M}) -> HH_{n}(Lambda_{m}) is zero", vanish))
    spec = TowerSpec(("x",), ("x",))
    for p in (0, 1, 2):
        def cert(p=p):
            c = certify_pro_hkr(build_hkr_tower(spec, p, 8), 8, 3)
            if not c.certified:
                raise AssertionError("certificate inconclusive")
            for part in (c.kernel, c.cokernel):
                for m, j in part.witnesses.items():
                    if j > 2 * m + 1:
                        raise AssertionError(f"witness {j} > 2m+1 at m = {m}")
            return True
        out.append((f"pro-HKR certificate for (Q[x], (x)), p = {p}", cert))
    return out


def suite_checks(name: str, fixture: FinAlgebra | None = None) -> list[Check]:
    algebras = [fixture] if fixture is not None else _lambdas()
    pre: list[Check] = []
    if fixture is not None:
        pre = [(f"structure constants of {fixture.name}: unit, commutativity, associativity",
                lambda: fixture.check() or True)]
    table = {
        "mixed-identities": lambda: mixed_identity_checks(algebras),
        "idempotents": lambda: idempotent_checks(algebras),
        "ce": ce_checks,
        "towers": tower_checks,
    }
    if name == "all":
        return pre + [c for key in ("mixed-identities", "idempotents", "ce", "towers")
                      for c in table[key]()]
    return pre + table[name]()


SUITES = ("mixed-identities", "idempotents", "ce", "towers", "all")


def run_suite(name: str, fixture: FinAlgebra | None = None) -> dict:
    """Run until the first failure.  Returns a JSON-ready summary."""
    results = []
    failure = None
    for label, thunk in suite_checks(name, fixture):
        try:
            ok = thunk()
            msg = None if ok is not False else "returned False"
        except (AssertionError, HodgecycError, ValueError) as e:
            ok, msg = False, str(e) or type(e).__name__
        if ok is False or msg is not None:
            failure = {"check": label, "message": msg}
            results.append({"check": label, "passed": False})
            break
        results.append({"check": label, "passed": True})
    return {"suite": name, "passed": failure is None, "checks": results,
            "first_failure": failure}
