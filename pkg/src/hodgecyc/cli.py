"""Command-line interface.

    hodgecyc hh ALGEBRA --degree N [--hodge] [--map TARGET]
    hodgecyc hc ALGEBRA --degree N [--relative GENS] [--hodge] [--as-hn]
    hodgecyc prohkr TOWER --p P --m-max M --search-max S
    hodgecyc volodin ALGEBRA --ideal GENS --n N --k K --m M
    hodgecyc check --suite NAME [--fixture ALGEBRA]

Input documents are JSON objects; see README.md for the grammar.  Reports
are JSON with sorted keys; rational numbers are rendered as "p/q" strings.
Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .algebras import (
    FinAlgebra,
    IdealSpan,
    TowerSpec,
    algebra_map_matrix,
    ideal,
    monomial_quotient,
    parse_poly,
    tensor,
    univariate_quotient,
)
from .errors import HodgecycError, InputError
from .exactlin import Rat, SparseMat, rank
from .hochcyc import (
    CONVENTIONS,
    DEFAULT_BUDGET,
    bar_mixed,
    hc,
    hc_rel,
    hh_map,
    hn_rel,
    hodge_hc,
    hodge_hc_rel,
    hodge_hh,
    hodge_hn_rel,
)

KINDS = ("univariate", "monomial", "tensor", "tower", "table")


# ---------------------------------------------------------------------------
# input documents

def _line_col(text: str, index: int) -> tuple[int, int]:
    line = text.count("\n", 0, index) + 1
    col = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, col


class Document:
    """A parsed input document that can locate its string fields for error messages."""

    def __init__(self, text: str, source: str = "<input>"):
        self.text = text
        self.source = source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{source}: invalid JSON: {e.msg}", e.lineno, e.colno) from None
        self.sha256 = hashlib.sha256(text.encode()).hexdigest()

    def locate(self, needle: str, key: str | None = None) -> tuple[int, int] | tuple[None, None]:
        probe = json.dumps(needle)
        idx = self.text.find(probe)
        if idx < 0 and key is not None:
            idx = self.text.find(json.dumps(key))
        if idx < 0:
            return None, None
        return _line_col(self.text, idx)

    def error(self, msg: str, needle: str | None = None, offset: int = 0) -> InputError:
        if needle is None:
            return InputError(f"{self.source}: {msg}")
        line, col = self.locate(needle)
        if line is None:
            return InputError(f"{self.source}: {msg}")
        # column of the offending character inside the string literal
        return InputError(f"{self.source}: {msg}", line, col + 1 + offset)


def _require(doc: Document, obj: dict, key: str, kind: type, where: str):
    if key not in obj:
        raise doc.error(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise doc.error(f"{where}: field {key!r} must be {kind.__name__}", None)
    return val


def _vars(doc: Document, obj: dict, where: str) -> list[str]:
    vs = _require(doc, obj, "vars", list, where)
    if not vs or not all(isinstance(v, str) and v.isidentifier() for v in vs):
        raise doc.error(f"{where}: 'vars' must be a non-empty array of identifiers")
    if len(set(vs)) != len(vs):
        raise doc.error(f"{where}: repeated variable")
    return vs


def _parse(doc: Document, text: str, vs: Sequence[str]):
    try:
        return parse_poly(text, vs)
    except InputError as e:
        raise doc.error(str(e), text, getattr(e, "offset", 0)) from None


def _algebra_from(doc: Document, obj: Any, where: str = "document",
                  check: bool = True) -> FinAlgebra:
    if not isinstance(obj, dict):
        raise doc.error(f"{where}: expected an object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise doc.error(f"{where}: 'kind' must be one of {', '.join(KINDS)}",
                        kind if isinstance(kind, str) else None)
    if kind == "univariate":
        vs = _vars(doc, obj, where)
        if len(vs) != 1:
            raise doc.error(f"{where}: univariate algebras take exactly one variable")
        rel = _require(doc, obj, "relation", str, where)
        f = _parse(doc, rel, vs)
        try:
            return univariate_quotient(f, vs[0])
        except InputError as e:
            raise doc.error(str(e), rel) from None
    if kind == "monomial":
        vs = _vars(doc, obj, where)
        gens = _require(doc, obj, "gens", list, where)
        polys = []
        for g in gens:
            if not isinstance(g, str):
                raise doc.error(f"{where}: generators must be strings")
            p = _parse(doc, g, vs)
            if len(p) != 1:
                raise doc.error(f"{where}: generator is not a monomial", g)
            polys.append(next(iter(p)))
        return monomial_quotient(vs, polys)
    if kind == "tensor":
        factors = _require(doc, obj, "factors", list, where)
        if not factors:
            raise doc.error(f"{where}: 'factors' must be non-empty")
        out = _algebra_from(doc, factors[0], f"{where}.factors[0]")
        for i, f in enumerate(factors[1:], start=1):
            B = _algebra_from(doc, f, f"{where}.factors[{i}]")
            if out.presentation and B.presentation and \
                    set(out.presentation.variables) & set(B.presentation.variables):
                raise doc.error(f"{where}: tensor factors must use disjoint variables")
            out = tensor(out, B)
        return out
    if kind == "table":
        basis = _require(doc, obj, "basis", list, where)
        mult = _require(doc, obj, "mult", list, where)
        unit = _require(doc, obj, "unit", dict, where)

        def vec(d: Any) -> dict[int, Rat]:
            if not isinstance(d, dict):
                raise doc.error(f"{where}: structure constants must be objects")
            try:
                return {int(k): Fraction(v) for k, v in d.items()}
            except (ValueError, TypeError):
                raise doc.error(f"{where}: bad structure constant entry") from None

        table = [[vec(e) for e in row] for row in mult]
        return FinAlgebra([str(b) for b in basis], table, vec(unit), None,
                          name=str(obj.get("name", "table")), check=check)
    raise doc.error(f"{where}: a tower document does not describe a single algebra")


def load_algebra(path: str, check: bool = True) -> tuple[FinAlgebra, Document]:
    """``check=False`` defers the structure-constant checks (table documents only)."""
    doc = _read(path)
    return _algebra_from(doc, doc.data, check=check), doc


def load_tower(path: str) -> tuple[TowerSpec, int | None, Document]:
    doc = _read(path)
    obj = doc.data
    if not isinstance(obj, dict) or obj.get("kind") != "tower":
        raise doc.error("expected a document of kind 'tower'")
    vs = _vars(doc, obj, "document")
    gens = _require(doc, obj, "gens", list, "document")
    for g in gens:
        if not isinstance(g, str):
            raise doc.error("generators must be strings")
        _parse(doc, g, vs)
    m_max = obj.get("m_max")
    if m_max is not None and (not isinstance(m_max, int) or m_max < 1):
        raise doc.error("'m_max' must be a positive integer", None)
    return TowerSpec(tuple(vs), tuple(gens)), m_max, doc


def _read(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return Document(text, path)


def parse_ideal(A: FinAlgebra, spec: str) -> IdealSpan:
    """Comma-separated generators in the algebra's variables; "0" is the zero ideal."""
    if A.presentation is None:
        raise InputError("ideals need a presented algebra")
    gens = []
    for g in spec.split(","):
        g = g.strip()
        if not g:
            raise InputError(f"empty generator in ideal {spec!r}")
        try:
            gens.append(A.presentation.reduce(parse_poly(g, A.presentation.variables)))
        except InputError as e:
            raise InputError(f"ideal {spec!r}: {e}") from None
    return ideal(A, gens)


# ---------------------------------------------------------------------------
# reports

def matrix_strings(M: SparseMat) -> list[list[str]]:
    return M.to_strings()


def make_report(command: str, args: dict, fingerprint: str, result: dict) -> dict:
    return {
        "command": command,
        "args": args,
        "input_sha256": fingerprint,
        "conventions": CONVENTIONS.as_dict(),
        "version": __version__,
        "result": result,
    }


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines: list[str] = []

    def walk(prefix: str, obj: Any) -> None:
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list) and obj and all(isinstance(r, list) for r in obj):
            lines.append(f"{prefix}:")
            width = max((len(x) for r in obj for x in r), default=1)
            for r in obj:
                lines.append("    " + " ".join(x.rjust(width) for x in r))
        else:
            lines.append(f"{prefix}: {json.dumps(obj, sort_keys=True)}")

    walk("", report)
    return "\n".join(lines) + "\n"


def _hodge_table(D) -> dict:
    return {str(i): dim for i, dim in D.dims().items()}


# ---------------------------------------------------------------------------
# commands

def cmd_hh(ns) -> dict:
    A, doc = load_algebra(ns.algebra)
    n = ns.degree
    bar = bar_mixed(A, n + 1, budget=ns.budget)
    H = bar.complex.homology(n)
    result: dict[str, Any] = {"algebra": A.name, "algebra_dim": A.dim, "degree": n, "dim": H.dim}
    if ns.hodge:
        result["hodge"] = _hodge_table(hodge_hh(A, n, bar=bar))
    fp = doc.sha256
    if ns.map:
        B, tdoc = load_algebra(ns.map)
        f = algebra_map_matrix(A, B)
        tbar = bar_mixed(B, n + 1, budget=ns.budget)
        M = hh_map(f, bar, tbar, n)
        result["map"] = {"target": B.name, "target_dim": M.rows, "matrix": matrix_strings(M),
                         "rank": rank(M)}
        fp = hashlib.sha256((doc.sha256 + tdoc.sha256).encode()).hexdigest()
    return make_report("hh", {"degree": n, "hodge": ns.hodge, "map": bool(ns.map)}, fp, result)


def cmd_hc(ns) -> dict:
    A, doc = load_algebra(ns.algebra)
    n = ns.degree
    result: dict[str, Any] = {"algebra": A.name, "degree": n}
    if ns.relative is None:
        if ns.as_hn:
            raise InputError("--as-hn needs --relative (absolute HN is not finitary)")
        result["theory"] = "HC"
        result["dim"] = hc(A, n, ns.budget).dim
        if ns.hodge:
            result["hodge"] = _hodge_table(hodge_hc(A, n, ns.budget))
    else:
        I = parse_ideal(A, ns.relative)
        result["ideal_dim"] = I.dim
        if ns.as_hn:
            r = hn_rel(A, I, n, ns.budget)
            result["theory"] = "HN_rel"
            result["dim"] = r.homology.dim
            result["identification"] = r.identification
            if ns.hodge:
                result["hodge"] = _hodge_table(hodge_hn_rel(A, I, n, ns.budget))
        else:
            result["theory"] = "HC_rel"
            result["dim"] = hc_rel(A, I, n, ns.budget).dim
            if ns.hodge:
                result["hodge"] = _hodge_table(hodge_hc_rel(A, I, n, ns.budget))
    args = {"degree": n, "relative": ns.relative, "hodge": ns.hodge, "as_hn": ns.as_hn}
    return make_report("hc", args, doc.sha256, result)


def cmd_prohkr(ns) -> dict:
    from .prohkr import build_hkr_tower, certify_pro_hkr

    spec, doc_m, doc = load_tower(ns.tower)
    m_max = ns.m_max if ns.m_max is not None else doc_m
    if m_max is None:
        raise InputError("--m-max not given and the tower document has no 'm_max'")
    depth = max(m_max, ns.search_max)
    T = build_hkr_tower(spec, ns.p, depth, ns.budget)
    cert = certify_pro_hkr(T, ns.search_max, m_max, ns.budget)
    result = {
        "tower": {"vars": list(spec.variables), "gens": list(spec.gens)},
        "p": ns.p,
        "omega_dims": [s.dim for s in T.omega_tower.levels],
        "hh_dims": [s.dim for s in T.hh_tower.levels],
        "certificate": cert.as_dict(),
        "witness_bound_2m_plus_1": all(
            j <= 2 * m + 1 for c in (cert.kernel, cert.cokernel) for m, j in c.witnesses.items()),
    }
    args = {"p": ns.p, "m_max": m_max, "search_max": ns.search_max}
    return make_report("prohkr", args, doc.sha256, result)


def cmd_volodin(ns) -> dict:
    from .volodin import theta_lambda_report

    A, doc = load_algebra(ns.algebra)
    I = parse_ideal(A, ns.ideal)
    result = theta_lambda_report(A, I, ns.n, ns.k, ns.m, ns.budget)
    args = {"ideal": ns.ideal, "n": ns.n, "k": ns.k, "m": ns.m}
    return make_report("volodin", args, doc.sha256, result)


def cmd_check(ns) -> tuple[dict, int]:
    from .suites import run_suite

    fixture = None
    fp = hashlib.sha256(b"").hexdigest()
    if ns.fixture:
        fixture, doc = load_algebra(ns.fixture, check=False)
        fp = doc.sha256
    outcome = run_suite(ns.suite, fixture)
    report = make_report("check", {"suite": ns.suite, "fixture": bool(ns.fixture)}, fp, outcome)
    return report, 0 if outcome["passed"] else 4


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hodgecyc", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="largest chain-group dimension allowed (default %(default)s)")
    common.add_argument("--timing", action="store_true",
                        help="add wall-clock seconds to the report (breaks byte determinism)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hh", parents=[common], help="Hochschild homology")
    s.add_argument("algebra")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--hodge", action="store_true")
    s.add_argument("--map", metavar="TARGET", help="algebra document; variables map to variables")
    s.set_defaults(func=cmd_hh)

    s = sub.add_parser("hc", parents=[common], help="cyclic homology")
    s.add_argument("algebra")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--relative", metavar="GENS", help="ideal generators, comma separated")
    s.add_argument("--hodge", action="store_true")
    s.add_argument("--as-hn", action="store_true", help="report relative HN_n = HC_{n-1}")
    s.set_defaults(func=cmd_hc)

    s = sub.add_parser("prohkr", parents=[common], help="pro-HKR certificate for a tower")
    s.add_argument("tower")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--m-max", type=int)
    s.add_argument("--search-max", type=int, required=True)
    s.set_defaults(func=cmd_prohkr)

    s = sub.add_parser("volodin", parents=[common], help="Loday-Quillen / exterior power report")
    s.add_argument("algebra")
    s.add_argument("--ideal", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_volodin)

    s = sub.add_parser("check", parents=[common], help="run an invariant suite")
    s.add_argument("--suite", required=True,
                   choices=("mixed-identities", "idempotents", "ce", "towers", "all"))
    s.add_argument("--fixture", metavar="ALGEBRA", help="run algebra-level suites on this document")
    s.set_defaults(func=cmd_check)
    return p


def _validate(ns) -> None:
    for name in ("degree", "p", "n", "k", "m", "m_max", "search_max"):
        v = getattr(ns, name, None)
        if v is not None and v < 0:
            raise InputError(f"--{name.replace('_', '-')} must be >= 0")
    if ns.budget < 1:
        raise InputError("--budget must be positive")


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    start = time.perf_counter()
    code = 0
    try:
        _validate(ns)
        out = ns.func(ns)
        if isinstance(out, tuple):
            report, code = out
        else:
            report = out
    except HodgecycError as e:
        print(f"error: {e}", file=stderr)
        return e.exit_code
    if ns.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    stdout.write(render(report, ns.format))
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
