"""Finite-dimensional commutative Q-algebras with monomial bases.

Supported presentations: Q[x]/(f) for monic f, monomial quotients of
Q[x_1..x_r], and tensor products of presented algebras with disjoint
variables.  Every constructor returns an algebra whose first basis
element is the unit.
"""

from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from .complexes import ChainComplex, MixedComplex, Tower
from .errors import InputError, InvariantError, NotNilpotentError
from .exactlin import (
    Echelon,
    Rat,
    SparseMat,
    Subquotient,
    induced_map,
    quotient_space,
    rat,
    rank,
    solve_columns,
)

Monomial = tuple[int, ...]
Poly = dict[Monomial, Rat]


# ---------------------------------------------------------------------------
# polynomials

def poly_add(p: Poly, q: Poly, s: Rat = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + s * c
        if v:
            out[m] = rat(v)
        else:
            out.pop(m, None)
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: dict[Monomial, Rat] = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {m: rat(c) for m, c in out.items() if c}


def poly_pow(p: Poly, e: int, nvars: int) -> Poly:
    out: Poly = {(0,) * nvars: 1}
    for _ in range(e):
        out = poly_mul(out, p)
    return out


def poly_diff(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = rat(c * m[i])
    return out


def monomial_str(m: Monomial, variables: Sequence[str]) -> str:
    parts = []
    for v, e in zip(variables, m):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts) if parts else "1"


def poly_str(p: Poly, variables: Sequence[str]) -> str:
    if not p:
        return "0"
    terms = []
    for m in sorted(p, key=lambda m: (-sum(m), tuple(-e for e in m))):
        c = Fraction(p[m])
        mon = monomial_str(m, variables)
        if mon == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mon
        else:
            body = f"{abs(c)}*{mon}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = list(variables)
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.group(0).strip() == "":
                break
            start = m.start(m.lastindex)
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("var", m.group(2), start))
            else:
                ch = m.group(3)
                if ch not in "+-*^()":
                    raise _with_offset(
                        InputError(f"unexpected character {ch!r} at offset {start}"), start)
                self.tokens.append(("op", ch, start))
            pos = m.end()
        self.i = 0

    def error(self, msg: str) -> InputError:
        pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        return _with_offset(InputError(f"{msg} at offset {pos} in {self.text!r}"), pos)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Poly:
        if not self.tokens:
            raise self.error("empty polynomial")
        p = self.expr()
        if self.i != len(self.tokens):
            raise self.error("trailing input")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = poly_add(p, q, 1 if op == "+" else -1)
        return p

    def term(self) -> Poly:
        sign = 1
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            if self.take()[1] == "-":
                sign = -sign
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = poly_mul(p, self.factor())
        return {m: c * sign for m, c in p.items()}

    def factor(self) -> Poly:
        p = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, _ = self.take()
            if kind != "int":
                self.i -= 1
                raise self.error("expected integer exponent")
            p = poly_pow(p, int(val), len(self.variables))
        return p

    def atom(self) -> Poly:
        kind, val, _ = self.peek()
        n = len(self.variables)
        if kind == "int":
            self.take()
            v = int(val)
            return {(0,) * n: v} if v else {}
        if kind == "var":
            if val not in self.variables:
                raise self.error(f"unknown variable {val!r}")
            self.take()
            m = [0] * n
            m[self.variables.index(val)] = 1
            return {tuple(m): 1}
        if kind == "op" and val == "(":
            self.take()
            p = self.expr()
            if self.peek()[1] != ")":
                raise self.error("expected ')'")
            self.take()
            return p
        raise self.error("expected a number, variable or '('")


def _with_offset(err: InputError, pos: int) -> InputError:
    err.offset = pos
    return err


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse integer-coefficient polynomials built from + - * ^ and parentheses.

    Parse errors carry ``.offset``, the 0-based character position.
    """
    try:
        return _Parser(text, variables).parse()
    except InputError as e:
        if not hasattr(e, "offset"):
            e.offset = 0
        raise


# ---------------------------------------------------------------------------
# algebras

@dataclass(frozen=True, eq=False)
class Presentation:
    """Q[variables]/(relations) with a monomial basis and a normal-form map."""

    variables: tuple[str, ...]
    relations: tuple[tuple[tuple[Monomial, Rat], ...], ...]
    monomials: tuple[Monomial, ...]
    reducer: Callable[[Poly], dict[int, Rat]] = field(repr=False)

    def reduce(self, p: Poly) -> dict[int, Rat]:
        return self.reducer(p)

    def relation_polys(self) -> list[Poly]:
        return [dict(r) for r in self.relations]


def _freeze(p: Poly) -> tuple[tuple[Monomial, Rat], ...]:
    return tuple(sorted(p.items()))


class FinAlgebra:
    """Commutative unital Q-algebra given by structure constants.

    ``mult[i][j]`` is the product of basis elements i and j as a sparse
    coordinate dict.  Unit, associativity and commutativity are checked
    exhaustively on construction.
    """

    def __init__(self, basis: Sequence[str], mult: Sequence[Sequence[dict[int, Rat]]],
                 unit: dict[int, Rat], presentation: Presentation | None = None,
                 name: str = "", check: bool = True):
        self.basis = tuple(basis)
        self.dim = len(self.basis)
        self.mult = tuple(tuple({k: rat(v) for k, v in m.items() if v} for m in row) for row in mult)
        self.unit = {k: rat(v) for k, v in unit.items() if v}
        self.presentation = presentation
        self.name = name or "A"
        if len(self.mult) != self.dim or any(len(r) != self.dim for r in self.mult):
            raise InputError("structure constant table has the wrong shape")
        if check:
            self.check()

    def check(self) -> None:
        n = self.dim
        for i in range(n):
            if self.mul(self.unit, {i: 1}) != {i: 1}:
                raise InvariantError(f"unit law fails on basis element {self.basis[i]}")
            for j in range(i + 1, n):
                if self.mult[i][j] != self.mult[j][i]:
                    raise InvariantError(
                        f"not commutative: {self.basis[i]}*{self.basis[j]}")
        for i in range(n):
            for j in range(n):
                left_ij = self.mult[i][j]
                for k in range(n):
                    a = self.mul(left_ij, {k: 1})
                    b = self.mul({i: 1}, self.mult[j][k])
                    if a != b:
                        raise InvariantError(
                            f"not associative on ({self.basis[i]}, {self.basis[j]}, {self.basis[k]})")

    def mul(self, u: dict[int, Rat], v: dict[int, Rat]) -> dict[int, Rat]:
        out: dict[int, Rat] = {}
        for i, a in u.items():
            row = self.mult[i]
            for j, b in v.items():
                ab = a * b
                for k, c in row[j].items():
                    out[k] = out.get(k, 0) + ab * c
        return {k: rat(x) for k, x in out.items() if x}

    @cached_property
    def unit_index(self) -> int | None:
        if len(self.unit) == 1:
            (k, v), = self.unit.items()
            if v == 1:
                return k
        return None

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.basis).encode())
        for row in self.mult:
            for m in row:
                h.update(repr(sorted((k, str(v)) for k, v in m.items())).encode())
        return h.hexdigest()[:16]

    def mult_matrix(self, u: dict[int, Rat]) -> SparseMat:
        """Matrix of multiplication by u."""
        return SparseMat(self.dim, self.dim, [self.mul(u, {j: 1}) for j in range(self.dim)])

    def element(self, text: str) -> dict[int, Rat]:
        if self.presentation is None:
            if text.strip() in self.basis:
                return {self.basis.index(text.strip()): 1}
            raise InputError(f"cannot parse {text!r} without a presentation")
        return self.presentation.reduce(parse_poly(text, self.presentation.variables))

    def __repr__(self) -> str:
        return f"FinAlgebra({self.name}, dim={self.dim})"


def _mult_from_reducer(monomials: Sequence[Monomial], reduce: Callable[[Poly], dict[int, Rat]]):
    n = len(monomials)
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            m = tuple(a + b for a, b in zip(monomials[i], monomials[j]))
            row.append(reduce({m: 1}))
        table.append(row)
    return table


def ground_field() -> FinAlgebra:
    pres = Presentation((), (), ((),), lambda p: {0: rat(p.get((), 0))} if p.get((), 0) else {})
    return FinAlgebra(("1",), [[{0: 1}]], {0: 1}, pres, name="Q")


def univariate_quotient(f: Poly | str, var: str = "x") -> FinAlgebra:
    """Q[var]/(f) for monic f of degree >= 1, basis 1, x, ..., x^(deg-1)."""
    if isinstance(f, str):
        f = parse_poly(f, [var])
    if any(len(m) != 1 for m in f):
        raise InputError("univariate relation expected")
    deg = max((m[0] for m in f), default=-1)
    if deg < 1:
        raise InputError("relation must have degree >= 1")
    if f[(deg,)] != 1:
        raise InputError("relation must be monic")
    # x^deg = -sum_{e<deg} c_e x^e
    tail = {m[0]: -c for m, c in f.items() if m[0] < deg}
    powers: list[dict[int, Rat]] = [{e: 1} for e in range(deg)]

    def power(e: int) -> dict[int, Rat]:
        while len(powers) <= e:
            prev = powers[-1]
            nxt: dict[int, Rat] = {}
            for k, c in prev.items():
                if k + 1 < deg:
                    nxt[k + 1] = nxt.get(k + 1, 0) + c
                else:
                    for t, tc in tail.items():
                        nxt[t] = nxt.get(t, 0) + c * tc
            powers.append({k: rat(v) for k, v in nxt.items() if v})
        return powers[e]

    def reduce(p: Poly) -> dict[int, Rat]:
        out: dict[int, Rat] = {}
        for m, c in p.items():
            for k, v in power(m[0]).items():
                out[k] = out.get(k, 0) + c * v
        return {k: rat(v) for k, v in out.items() if v}

    monos = tuple((e,) for e in range(deg))
    pres = Presentation((var,), (_freeze(f),), monos, reduce)
    basis = [monomial_str(m, [var]) for m in monos]
    return FinAlgebra(basis, _mult_from_reducer(monos, reduce), {0: 1}, pres,
                      name=f"Q[{var}]/({poly_str(f, [var])})")


def truncated_polynomial(m: int, var: str = "x") -> FinAlgebra:
    """Lambda_m = Q[x]/(x^(m+1))."""
    mono = {(m + 1,): 1}
    return univariate_quotient(mono, var)


def _deglex_key(m: Monomial):
    return (sum(m), tuple(-e for e in m))


def _divides(g: Monomial, m: Monomial) -> bool:
    return all(a <= b for a, b in zip(g, m))


def monomial_quotient(variables: Sequence[str], gens: Sequence[Poly | str | Monomial]) -> FinAlgebra:
    """Q[variables]/(monomials); basis = standard monomials in degree-lex order."""
    variables = tuple(variables)
    monos: list[Monomial] = []
    for g in gens:
        if isinstance(g, str):
            g = parse_poly(g, variables)
        if isinstance(g, dict):
            if len(g) != 1 or next(iter(g.values())) == 0:
                raise InputError(f"generator {poly_str(g, variables)} is not a monomial")
            g = next(iter(g))
        monos.append(tuple(g))
    if any(sum(g) == 0 for g in monos):
        raise InputError("the unit ideal gives the zero algebra")
    bounds = []
    for i, v in enumerate(variables):
        pure = [g[i] for g in monos if sum(g) == g[i] and g[i] > 0]
        if not pure:
            raise InputError(f"quotient is infinite-dimensional: no pure power of {v} in the ideal")
        bounds.append(min(pure))
    std = [m for m in itertools.product(*(range(b) for b in bounds))
           if not any(_divides(g, m) for g in monos)]
    std.sort(key=_deglex_key)
    index = {m: k for k, m in enumerate(std)}

    def reduce(p: Poly) -> dict[int, Rat]:
        out: dict[int, Rat] = {}
        for m, c in p.items():
            k = index.get(m)
            if k is not None:
                out[k] = out.get(k, 0) + c
        return {k: rat(v) for k, v in out.items() if v}

    rels = tuple(_freeze({g: 1}) for g in monos)
    pres = Presentation(variables, rels, tuple(std), reduce)
    basis = [monomial_str(m, variables) for m in std]
    gens_s = ", ".join(monomial_str(g, variables) for g in monos)
    return FinAlgebra(basis, _mult_from_reducer(std, reduce), {0: 1}, pres,
                      name=f"Q[{','.join(variables)}]/({gens_s})")


def tensor(A: FinAlgebra, B: FinAlgebra) -> FinAlgebra:
    """A (x) B with basis ordered lexicographically by (i, j)."""
    nb = B.dim
    basis = []
    pa, pb = A.presentation, B.presentation
    joint = None
    if pa is not None and pb is not None and not set(pa.variables) & set(pb.variables):
        variables = pa.variables + pb.variables
        ra = len(pa.variables)
        monos = tuple(ma + mb for ma in pa.monomials for mb in pb.monomials)

        def reduce(p: Poly) -> dict[int, Rat]:
            out: dict[int, Rat] = {}
            for m, c in p.items():
                u = pa.reduce({m[:ra]: 1})
                v = pb.reduce({m[ra:]: 1})
                for i, x in u.items():
                    for j, y in v.items():
                        k = i * nb + j
                        out[k] = out.get(k, 0) + c * x * y
            return {k: rat(v) for k, v in out.items() if v}

        pad_b = (0,) * len(pb.variables)
        pad_a = (0,) * ra
        rels = tuple(_freeze({m + pad_b: c for m, c in dict(r).items()}) for r in pa.relations) + \
            tuple(_freeze({pad_a + m: c for m, c in dict(r).items()}) for r in pb.relations)
        joint = Presentation(variables, rels, monos, reduce)
        basis = [monomial_str(m, variables) for m in monos]
    else:
        basis = [f"{a}(x){b}" for a in A.basis for b in B.basis]
    mult = []
    for i1 in range(A.dim):
        for j1 in range(nb):
            row = []
            for i2 in range(A.dim):
                u = A.mult[i1][i2]
                for j2 in range(nb):
                    v = B.mult[j1][j2]
                    row.append({i * nb + j: x * y for i, x in u.items() for j, y in v.items()})
            mult.append(row)
    unit = {i * nb + j: x * y for i, x in A.unit.items() for j, y in B.unit.items()}
    return FinAlgebra(basis, mult, unit, joint, name=f"{A.name} (x) {B.name}")


def algebra_map_matrix(src: FinAlgebra, dst: FinAlgebra, images: Sequence[dict[int, Rat]] | None = None,
                       check: bool = True) -> SparseMat:
    """Matrix of the algebra map src -> dst.

    With ``images`` None the variables of src are sent to the equally named
    variables of dst (absent ones to 0); otherwise images[k] is the image of
    basis element k.  Multiplicativity and unitality are checked.
    """
    if images is None:
        ps, pd = src.presentation, dst.presentation
        if ps is None or pd is None:
            raise InputError("variable-matching maps need presentations")
        idx = [pd.variables.index(v) if v in pd.variables else None for v in ps.variables]
        images = []
        for m in ps.monomials:
            if any(e and i is None for e, i in zip(m, idx)):
                images.append({})
                continue
            mm = [0] * len(pd.variables)
            for e, i in zip(m, idx):
                if i is not None:
                    mm[i] += e
            images.append(pd.reduce({tuple(mm): 1}))
    f = SparseMat(dst.dim, src.dim, list(images))
    if check:
        if f.apply(src.unit) != dst.unit:
            raise InvariantError("map is not unital")
        for i in range(src.dim):
            for j in range(i, src.dim):
                if f.apply(src.mult[i][j]) != dst.mul(f.col(i), f.col(j)):
                    raise InvariantError(
                        f"map is not multiplicative on ({src.basis[i]}, {src.basis[j]})")
    return f


# ---------------------------------------------------------------------------
# ideals

class IdealSpan:
    """An ideal stored as a Q-subspace; closure under multiplication is checked."""

    def __init__(self, parent: FinAlgebra, span: SparseMat, check: bool = True):
        self.parent = parent
        ech = Echelon()
        for c in span.columns:
            if c:
                ech.insert(c)
        cols = [ech.pivots[p] for p in sorted(ech.pivots)]
        self.span = SparseMat(parent.dim, len(cols), cols)
        self._ech = ech
        if check:
            for k in range(parent.dim):
                for j, c in enumerate(self.span.columns):
                    if not ech.contains(parent.mul({k: 1}, c)):
                        raise InvariantError(
                            f"subspace is not an ideal: {parent.basis[k]} * column {j} escapes")

    @property
    def dim(self) -> int:
        return self.span.cols

    def contains(self, vec: dict[int, Rat]) -> bool:
        return self._ech.contains(vec)

    def __repr__(self) -> str:
        return f"IdealSpan(dim={self.dim} in {self.parent.name})"


def ideal(A: FinAlgebra, generators: Sequence[dict[int, Rat] | str]) -> IdealSpan:
    gens = [A.element(g) if isinstance(g, str) else g for g in generators]
    cols = [A.mul({k: 1}, g) for g in gens for k in range(A.dim)]
    return IdealSpan(A, SparseMat(A.dim, len(cols), cols), check=True)


def zero_ideal(A: FinAlgebra) -> IdealSpan:
    return IdealSpan(A, SparseMat.zeros(A.dim, 0))


def ideal_product(I: IdealSpan, J: IdealSpan) -> IdealSpan:
    A = I.parent
    cols = [A.mul(a, b) for a in I.span.columns for b in J.span.columns]
    return IdealSpan(A, SparseMat(A.dim, len(cols), cols), check=False)


def ideal_power(I: IdealSpan, r: int) -> IdealSpan:
    A = I.parent
    if r == 0:
        return IdealSpan(A, SparseMat.identity(A.dim), check=False)
    out = I
    for _ in range(r - 1):
        out = ideal_product(out, I)
    return out


def nilpotency_index(I: IdealSpan) -> int:
    """Least r with I^r = 0."""
    if I.dim == 0:
        return 1
    power = I
    r = 1
    while power.dim:
        nxt = ideal_product(power, I)
        r += 1
        if nxt.dim == power.dim:
            raise NotNilpotentError("ideal is not nilpotent (its powers stabilize at dimension "
                                    f"{power.dim})")
        power = nxt
    return r


def quotient_algebra(I: IdealSpan) -> tuple[FinAlgebra, SparseMat]:
    """A/I with basis the cosets of a greedy subset of A's basis (unit first),
    and the projection matrix A -> A/I."""
    A = I.parent
    ech = Echelon()
    for c in I.span.columns:
        ech.insert(c)
    chosen = []
    for k in range(A.dim):
        piv, _ = ech.insert({k: 1})
        if piv is not None:
            chosen.append(k)
    if A.unit_index is not None and chosen and chosen[0] != A.unit_index:
        raise InvariantError("unit does not survive in the quotient")
    # coordinates of every basis element modulo I in terms of chosen cosets
    basis_mat = SparseMat.hstack(A.dim, [SparseMat(A.dim, len(chosen), [{k: 1} for k in chosen]),
                                         I.span])
    coords = solve_columns(basis_mat, SparseMat.identity(A.dim))
    q = len(chosen)
    proj_cols = [{i: v for i, v in c.items() if i < q} for c in coords.columns]
    proj = SparseMat(q, A.dim, proj_cols)
    mult = [[proj.apply(A.mult[a][b]) for b in chosen] for a in chosen]
    unit = proj.apply(A.unit)
    pres = None
    if A.presentation is not None:
        pa = A.presentation
        ideal_polys = []
        for c in I.span.columns:
            p: Poly = {}
            for k, v in c.items():
                p = poly_add(p, {pa.monomials[k]: v})
            ideal_polys.append(p)
        monos = tuple(pa.monomials[k] for k in chosen)

        def reduce(p: Poly) -> dict[int, Rat]:
            return proj.apply(pa.reduce(p))

        pres = Presentation(pa.variables, pa.relations + tuple(_freeze(p) for p in ideal_polys),
                            monos, reduce)
    Q = FinAlgebra([A.basis[k] for k in chosen], mult, unit, pres, name=f"{A.name}/I")
    return Q, proj


# ---------------------------------------------------------------------------
# truncation towers

@dataclass(frozen=True)
class TowerSpec:
    """S = Q[variables] with the ideal I generated by ``gens``."""

    variables: tuple[str, ...]
    gens: tuple[str, ...]

    def polys(self) -> list[Poly]:
        return [parse_poly(g, self.variables) for g in self.gens]

    @property
    def univariate(self) -> bool:
        return len(self.variables) == 1 and len(self.gens) == 1


def level_algebra(spec: TowerSpec, m: int) -> FinAlgebra:
    """S / I^m."""
    if m < 1:
        raise ValueError("tower levels start at m = 1")
    polys = spec.polys()
    r = len(spec.variables)
    if spec.univariate:
        f = polys[0]
        lead = max(k[0] for k in f)
        if f[(lead,)] != 1:
            raise InputError("univariate tower generator must be monic")
        return univariate_quotient(poly_pow(f, m, 1), spec.variables[0])
    for p in polys:
        if len(p) != 1:
            raise InputError("multivariate towers need monomial generators")
    monos = [next(iter(p)) for p in polys]
    power = set()
    for combo in itertools.combinations_with_replacement(range(len(monos)), m):
        power.add(tuple(sum(monos[i][v] for i in combo) for v in range(r)))
    return monomial_quotient(spec.variables, sorted(power))


def truncation_tower(spec: TowerSpec, m_max: int) -> Tower:
    """Levels S/I^m, m = 1..m_max, with the canonical surjections."""
    levels = [level_algebra(spec, m) for m in range(1, m_max + 1)]
    trans = []
    for m in range(1, m_max):
        f = algebra_map_matrix(levels[m], levels[m - 1])
        if rank(f) != levels[m - 1].dim:
            raise InvariantError(f"transition {m + 1} -> {m} is not surjective")
        trans.append(f)
    return Tower(levels, trans)


# ---------------------------------------------------------------------------
# Kaehler differentials

def _subsets(r: int, p: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(r), p))


def wedge_sign(i: int, S: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """dx_i ^ dx_S = sign * dx_{S+i}, or None when i is in S."""
    if i in S:
        return None
    pos = sum(1 for s in S if s < i)
    return (-1) ** pos, tuple(sorted(S + (i,)))


class OmegaModule:
    """Omega^p of a presented algebra as a quotient of the free module
    A (x) Lambda^p Q^r by the submodule generated by df ^ dx_T."""

    def __init__(self, A: FinAlgebra, p: int):
        if A.presentation is None:
            raise InputError("Kaehler differentials need a presentation")
        self.parent = A
        self.p = p
        pres = A.presentation
        r = len(pres.variables)
        self.subsets = _subsets(r, p) if 0 <= p <= r else []
        self.sindex = {S: k for k, S in enumerate(self.subsets)}
        n = A.dim
        self.free_dim = n * len(self.subsets)
        self.free_labels = []
        for S in self.subsets:
            form = "".join("d" + pres.variables[i] for i in S)
            for k in range(n):
                mono = A.basis[k]
                if not form:
                    self.free_labels.append(mono)
                elif mono == "1":
                    self.free_labels.append(form)
                else:
                    self.free_labels.append(f"{mono} {form}")
        rels = []
        if p >= 1:
            for f in pres.relation_polys():
                grads = [pres.reduce(poly_diff(f, i)) for i in range(r)]
                for T in _subsets(r, p - 1):
                    base: dict[int, Rat] = {}
                    for i, g in enumerate(grads):
                        ws = wedge_sign(i, T)
                        if ws is None or not g:
                            continue
                        sgn, S = ws
                        off = self.sindex[S] * n
                        for k, c in g.items():
                            base[off + k] = base.get(off + k, 0) + sgn * c
                    if not base:
                        continue
                    for k in range(n):
                        rels.append(self.mul_free({k: 1}, base))
        self.relations = SparseMat(self.free_dim, len(rels), rels)
        self.space: Subquotient = quotient_space(self.free_dim, self.relations)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> list[str]:
        out = []
        for c in self.space.basis.columns:
            out.append(self.free_labels[min(c)])
        return out

    def mul_free(self, a: dict[int, Rat], form: dict[int, Rat]) -> dict[int, Rat]:
        """a * form on the free module."""
        A = self.parent
        n = A.dim
        out: dict[int, Rat] = {}
        for idx, c in form.items():
            s, k = divmod(idx, n)
            for t, v in A.mul(a, {k: c}).items():
                out[s * n + t] = out.get(s * n + t, 0) + v
        return {k: rat(v) for k, v in out.items() if v}

    def free_index(self, k: int, S: tuple[int, ...]) -> int:
        return self.sindex[S] * self.parent.dim + k

    @cached_property
    def grad(self) -> list[list[dict[int, Rat]]]:
        """grad[k][i] = d(basis_k)/dx_i as a coordinate vector."""
        pres = self.parent.presentation
        r = len(pres.variables)
        return [[pres.reduce(poly_diff({m: 1}, i)) for i in range(r)] for m in pres.monomials]

    def project(self, free_vec: dict[int, Rat]) -> dict[int, Rat]:
        return self.space.coords(free_vec)


def kaehler(A: FinAlgebra, p: int) -> OmegaModule:
    return OmegaModule(A, p)


def de_rham_free(src: OmegaModule, dst: OmegaModule) -> SparseMat:
    """d: A (x) Lambda^p -> A (x) Lambda^(p+1) on the free modules."""
    A = src.parent
    n = A.dim
    cols = []
    for S in src.subsets:
        for k in range(n):
            col: dict[int, Rat] = {}
            for i, g in enumerate(src.grad[k]):
                ws = wedge_sign(i, S)
                if ws is None or not g:
                    continue
                sgn, T = ws
                off = dst.sindex[T] * n
                for t, c in g.items():
                    col[off + t] = col.get(off + t, 0) + sgn * c
            cols.append(col)
    return SparseMat(dst.free_dim, src.free_dim, cols)


def de_rham_differential(src: OmegaModule, dst: OmegaModule) -> SparseMat:
    """d: Omega^p -> Omega^(p+1) in canonical quotient coordinates; well-definedness
    on the relation submodule is checked."""
    return induced_map(de_rham_free(src, dst), src.space, dst.space)


def de_rham_mixed(A: FinAlgebra) -> MixedComplex:
    """(Omega_A, 0, d) as a bounded mixed complex."""
    if A.presentation is None:
        raise InputError("de Rham complex needs a presentation")
    r = len(A.presentation.variables)
    omegas = [kaehler(A, p) for p in range(r + 2)]
    dims = {p: omegas[p].dim for p in range(r + 1)}
    C = ChainComplex(dims, {}, check=False)
    B = {p: de_rham_differential(omegas[p], omegas[p + 1]) for p in range(r)}
    return MixedComplex(C, B, bounded=True, meta={"omegas": omegas[: r + 1]})
