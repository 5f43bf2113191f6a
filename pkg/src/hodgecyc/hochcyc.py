"""Hochschild and cyclic homology of finite-dimensional commutative algebras.

Two models of the cyclic mixed complex are provided.  The unnormalized
one has C_n = A^{(x)(n+1)} with Connes' B = (1 - t) s N.  The normalized
one, C_n = A (x) Abar^{(x)n} with Abar = A/Q.1, is quasi-isomorphic and
much smaller; homology is computed there unless stated otherwise.

Chains are indexed in mixed radix: (a_0, a_1, ..., a_n) has index
a_0 r^n + (a_1 - o) r^(n-1) + ... + (a_n - o), where o = 1 and r = dim A - 1
in the normalized model, o = 0 and r = dim A otherwise.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebras import (
    FinAlgebra,
    IdealSpan,
    OmegaModule,
    de_rham_differential,
    kaehler,
    nilpotency_index,
    quotient_algebra,
    wedge_sign,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    MixedComplex,
    connes_total,
    induced_on_homology,
    kernel_complex,
    restrict_operator,
    total_operator,
)
from .errors import BudgetError, InputError, InvariantError
from .exactlin import (
    Rat,
    SparseMat,
    Subquotient,
    induced_map,
    quotient_space,
    rank,
    rat,
    solve_columns,
    subquotient,
)

DEFAULT_BUDGET = 250_000


# ---------------------------------------------------------------------------
# bar complexes

class BarMixed:
    """The cyclic mixed complex (C(A), b, B) truncated at degree N."""

    def __init__(self, A: FinAlgebra, N: int, normalized: bool = True,
                 budget: int = DEFAULT_BUDGET, check: bool = False):
        if A.unit_index != 0:
            raise InputError("bar complexes need the unit as basis element 0")
        if N < 0:
            raise ValueError("degree bound must be >= 0")
        self.algebra = A
        self.N = N
        self.normalized = normalized
        self.offset = 1 if normalized else 0
        self.radix = A.dim - self.offset
        dims = {n: A.dim * self.radix ** n for n in range(N + 1)}
        self.dims = dims
        required = max(dims.values())
        if required > budget:
            raise BudgetError(f"bar complex of {A.name} through degree {N}", required, budget)
        d = {n: self._b(n) for n in range(1, N + 1)}
        C = ChainComplex(dims, d, check=check)
        B = {n: self._B(n) for n in range(N)}
        self.mixed = MixedComplex(C, B, bounded=False, check=check,
                                  meta={"model": "normalized" if normalized else "unnormalized"})

    @property
    def complex(self) -> ChainComplex:
        return self.mixed.underlying

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def encode(self, t: Sequence[int]) -> int:
        idx = t[0]
        o, r = self.offset, self.radix
        for a in t[1:]:
            idx = idx * r + (a - o)
        return idx

    def decode(self, idx: int, n: int) -> tuple[int, ...]:
        o, r = self.offset, self.radix
        out = []
        for _ in range(n):
            idx, a = divmod(idx, r)
            out.append(a + o)
        out.append(idx)
        return tuple(reversed(out))

    def tuples(self, n: int):
        """All basis tuples of C_n in index order."""
        rest = range(self.offset, self.algebra.dim)
        return itertools.product(range(self.algebra.dim), *([rest] * n))

    def label(self, t: Sequence[int]) -> str:
        return "|".join(self.algebra.basis[a] for a in t)

    def _b(self, n: int) -> SparseMat:
        mult = self.algebra.mult
        o = self.offset
        cols = []
        for t in self.tuples(n):
            col: dict[int, Rat] = {}
            for k in range(n):
                sign = -1 if k % 2 else 1
                for c, v in mult[t[k]][t[k + 1]].items():
                    if k > 0 and c < o:
                        continue
                    i = self.encode(t[:k] + (c,) + t[k + 2:])
                    col[i] = col.get(i, 0) + sign * v
            sign = -1 if n % 2 else 1
            for c, v in mult[t[n]][t[0]].items():
                i = self.encode((c,) + t[1:n])
                col[i] = col.get(i, 0) + sign * v
            cols.append(col)
        return SparseMat(self.dim(n - 1), self.dim(n), cols)

    def _B(self, n: int) -> SparseMat:
        cols = []
        if self.normalized:
            for t in self.tuples(n):
                col: dict[int, Rat] = {}
                if t[0] != 0:
                    for i in range(n + 1):
                        s = -1 if (n * i) % 2 else 1
                        j = self.encode((0,) + t[i:] + t[:i])
                        col[j] = col.get(j, 0) + s
                cols.append(col)
        else:
            for t in self.tuples(n):
                col = {}
                for j in range(n + 1):
                    # t^j, then s, then (1 - t) on C_{n+1}
                    s = -1 if (n * j) % 2 else 1
                    rot = t[n + 1 - j:] + t[:n + 1 - j]
                    y = (0,) + rot
                    k1 = self.encode(y)
                    col[k1] = col.get(k1, 0) + s
                    s2 = -s if (n + 1) % 2 else s
                    k2 = self.encode(y[-1:] + y[:-1])
                    col[k2] = col.get(k2, 0) - s2
                cols.append(col)
        return SparseMat(self.dim(n + 1), self.dim(n), cols)

    def b(self, n: int) -> SparseMat:
        return self.mixed.b(n)

    def Bop(self, n: int) -> SparseMat:
        return self.mixed.Bop(n)

    def chain(self, terms: dict[tuple[int, ...], Rat]) -> dict[int, Rat]:
        """Coordinate vector of a linear combination of basis tuples."""
        out: dict[int, Rat] = {}
        for t, c in terms.items():
            if any(a < self.offset for a in t[1:]):
                continue
            k = self.encode(t)
            out[k] = out.get(k, 0) + c
        return {k: rat(v) for k, v in out.items() if v}


def bar_mixed(A: FinAlgebra, N: int, normalized: bool = True,
              budget: int = DEFAULT_BUDGET, check: bool = False) -> BarMixed:
    return BarMixed(A, N, normalized, budget, check)


def check_mixed_identities(M: MixedComplex) -> None:
    """b^2 = 0, B^2 = 0, bB + Bb = 0 through the truncation degree."""
    M.check()


def bar_map(src: BarMixed, dst: BarMixed, f: SparseMat, check: bool = True) -> ChainMap:
    """Chain map induced by the algebra map f: src.algebra -> dst.algebra."""
    if src.normalized != dst.normalized:
        raise ValueError("bar models differ")
    o = src.offset
    N = min(src.N, dst.N)
    fcols = [f.col(a) for a in range(src.algebra.dim)]
    reduced = [{k: v for k, v in c.items() if k >= o} for c in fcols]
    maps = {}
    for n in range(N + 1):
        cols = []
        for t in src.tuples(n):
            factors = [fcols[t[0]].items()] + [reduced[a].items() for a in t[1:]]
            col: dict[int, Rat] = {}
            for combo in itertools.product(*factors):
                c = 1
                for _, v in combo:
                    c *= v
                k = dst.encode(tuple(i for i, _ in combo))
                col[k] = col.get(k, 0) + c
            cols.append(col)
        maps[n] = SparseMat(dst.dim(n), src.dim(n), cols)
    return ChainMap(src.complex, dst.complex, maps, check=check)


def bar_projection(unnorm: BarMixed, norm: BarMixed) -> dict[int, SparseMat]:
    """C_n -> Cbar_n, killing chains with a unit in positions >= 1."""
    out = {}
    for n in range(min(unnorm.N, norm.N) + 1):
        cols = []
        for t in unnorm.tuples(n):
            if any(a == 0 for a in t[1:]):
                cols.append({})
            else:
                cols.append({norm.encode(t): 1})
        out[n] = SparseMat(norm.dim(n), unnorm.dim(n), cols)
    return out


# ---------------------------------------------------------------------------
# Hochschild homology

def hh(A: FinAlgebra, n: int, budget: int = DEFAULT_BUDGET, bar: BarMixed | None = None) -> Subquotient:
    """HH_n(A) in canonical coordinates of the normalized bar complex."""
    if bar is None:
        bar = bar_mixed(A, n + 1, budget=budget)
    return bar.complex.homology(n)


def hh_map(f: SparseMat, src: BarMixed, dst: BarMixed, n: int) -> SparseMat:
    """HH_n(f) for an algebra map f in canonical homology coordinates."""
    return induced_on_homology(bar_map(src, dst, f, check=False), n)


def shuffle_product(bar: BarMixed, u: dict[tuple[int, ...], Rat],
                    v: dict[tuple[int, ...], Rat]) -> dict[tuple[int, ...], Rat]:
    """(a_0, a_1..a_p) * (b_0, b_1..b_q) = sum over (p,q)-shuffles of
    sgn * (a_0 b_0, shuffle of a_1..a_p, b_1..b_q).  Works on tuple dicts."""
    A = bar.algebra
    out: dict[tuple[int, ...], Rat] = {}
    for ta, ca in u.items():
        for tb, cb in v.items():
            p, q = len(ta) - 1, len(tb) - 1
            prod = A.mult[ta[0]][tb[0]]
            for pos in itertools.combinations(range(p + q), p):
                slots = [0] * (p + q)
                posset = set(pos)
                ia = iter(ta[1:])
                ib = iter(tb[1:])
                for s in range(p + q):
                    slots[s] = next(ia) if s in posset else next(ib)
                inv = sum(1 for i in pos for j in range(p + q) if j not in posset and j < i)
                sign = -1 if inv % 2 else 1
                for c, w in prod.items():
                    key = (c,) + tuple(slots)
                    out[key] = out.get(key, 0) + sign * ca * cb * w
    return {k: rat(v) for k, v in out.items() if v}


def hh_generators_check(m: int, i: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Check that x t_m^i and u t_m^i generate HH_{2i}(L_m), HH_{2i+1}(L_m)
    for L_m = Q[x]/(x^(m+1)), where u = (1, x) and t_m = sum_{a+b=m} (x^a, x^b, x)."""
    from .algebras import truncated_polynomial

    A = truncated_polynomial(m)
    bar = bar_mixed(A, 2 * i + 2, budget=budget)
    one = {(0,): 1}
    u = {(0, 1): 1} if m >= 1 else {}
    t = {}
    for a in range(m + 1):
        key = (a, m - a, 1)
        t[key] = t.get(key, 0) + 1
    t_pow = one
    for _ in range(i):
        t_pow = shuffle_product(bar, t_pow, t)
    even = shuffle_product(bar, {(1,): 1} if m >= 1 else {}, t_pow)
    odd = shuffle_product(bar, u, t_pow)
    out = {"m": m, "i": i}
    for name, deg, gen in (("x*t^i", 2 * i, even), ("u*t^i", 2 * i + 1, odd)):
        H = hh(A, deg, bar=bar)
        vec = bar.chain(gen)
        is_cycle = bar.b(deg).apply(vec) == {} if deg > 0 else True
        coords = H.coords(vec) if is_cycle else {}
        # the module generated over A: multiply the chain by powers of x in slot 0
        span = []
        for k in range(A.dim):
            shifted = shuffle_product(bar, {(k,): 1}, gen)
            span.append(H.coords(bar.chain(shifted)))
        r = rank(SparseMat(H.dim, len(span), span))
        out[name] = {"degree": deg, "cycle": is_cycle, "nonzero": bool(coords),
                     "generated_rank": r, "hh_dim": H.dim, "generates": r == H.dim}
    out["ok"] = all(out[k]["cycle"] and out[k]["generates"] for k in ("x*t^i", "u*t^i"))
    return out


# ---------------------------------------------------------------------------
# HKR and e

def _antisym_terms(S: Sequence[int]):
    for perm in itertools.permutations(range(len(S))):
        inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
        yield (-1 if inv % 2 else 1), tuple(S[k] for k in perm)


def _variable_vectors(A: FinAlgebra) -> list[dict[int, Rat]]:
    pres = A.presentation
    r = len(pres.variables)
    return [pres.reduce({tuple(1 if k == i else 0 for k in range(r)): 1}) for i in range(r)]


def hkr_free(A: FinAlgebra, p: int, bar: BarMixed, omega: OmegaModule | None = None) -> SparseMat:
    """a_0 dx_{s_1}...dx_{s_p} -> sum sgn(sigma) a_0 (x) x_{s_sigma(1)} (x) ... on the
    free module A (x) Lambda^p."""
    if A.presentation is None:
        raise InputError("HKR needs a presentation")
    omega = omega or kaehler(A, p)
    xs = _variable_vectors(A)
    n = A.dim
    cols = []
    for S in omega.subsets:
        words: dict[tuple[int, ...], Rat] = {}
        for sign, word in _antisym_terms(list(S)):
            for combo in itertools.product(*(xs[s].items() for s in word)):
                c = sign
                for _, v in combo:
                    c *= v
                key = tuple(i for i, _ in combo)
                words[key] = words.get(key, 0) + c
        for k in range(n):
            cols.append(bar.chain({(k,) + w: c for w, c in words.items() if c}))
    return SparseMat(bar.dim(p), omega.free_dim, cols)


def hkr(A: FinAlgebra, p: int, bar: BarMixed | None = None, check: bool = True) -> SparseMat:
    """HKR map Omega^p -> HH_p in canonical coordinates (well-definedness checked)."""
    bar = bar or bar_mixed(A, p + 1)
    omega = kaehler(A, p)
    f = hkr_free(A, p, bar, omega)
    if check and p > 0:
        if not (bar.b(p) @ f).is_zero():
            raise InvariantError("HKR image contains a non-cycle")
    return induced_map(f, omega.space, bar.complex.homology(p), check=check)


def e_map(A: FinAlgebra, n: int, bar: BarMixed, omega: OmegaModule | None = None) -> SparseMat:
    """e(a_0 (x) ... (x) a_n) = (1/n!) a_0 da_1 ... da_n, into Omega^n coordinates."""
    if A.presentation is None:
        raise InputError("the map e needs a presentation")
    omega = omega or kaehler(A, n)
    dA = A.dim
    grad = omega.grad if omega.subsets else kaehler(A, 1).grad
    scale = Fraction(1, math.factorial(n))
    cols = []
    for t in bar.tuples(n):
        # expand d a_1 ... d a_n over wedge monomials
        forms: dict[tuple[int, ...], dict[int, Rat]] = {(): {t[0]: 1}}
        for a in t[1:]:
            nxt: dict[tuple[int, ...], dict[int, Rat]] = {}
            for S, coef in forms.items():
                for i, g in enumerate(grad[a]):
                    if not g:
                        continue
                    ws = wedge_sign(i, S)
                    if ws is None:
                        continue
                    sgn, T = ws
                    # dx_S ^ dx_i = (-1)^{|S|} dx_i ^ dx_S
                    sgn *= (-1) ** len(S)
                    prod = A.mul(coef, g)
                    tgt = nxt.setdefault(T, {})
                    for k, v in prod.items():
                        tgt[k] = tgt.get(k, 0) + sgn * v
            forms = {S: {k: v for k, v in c.items() if v} for S, c in nxt.items()}
            forms = {S: c for S, c in forms.items() if c}
        free: dict[int, Rat] = {}
        for S, coef in forms.items():
            if S not in omega.sindex:
                continue
            for k, v in coef.items():
                free[omega.sindex[S] * dA + k] = v * scale
        cols.append(omega.project(free) if free else {})
    return SparseMat(omega.dim, bar.dim(n), cols)


def check_e_map(A: FinAlgebra, N: int, normalized: bool = False) -> dict:
    """Verify e b = 0, e B = d e through degree N and e hkr = id on forms."""
    bar = bar_mixed(A, N + 1, normalized=normalized)
    r = len(A.presentation.variables)
    omegas = [kaehler(A, p) for p in range(N + 2)]
    es = [e_map(A, n, bar, omegas[n]) for n in range(N + 2)]
    report = {"e_b": True, "e_B": True, "e_hkr": True}
    for n in range(1, N + 1):
        if not (es[n - 1] @ bar.b(n)).is_zero():
            report["e_b"] = False
    for n in range(N + 1):
        lhs = es[n + 1] @ bar.Bop(n)
        if n < r:
            rhs = de_rham_differential(omegas[n], omegas[n + 1]) @ es[n]
        else:
            rhs = SparseMat.zeros(omegas[n + 1].dim, bar.dim(n))
        if lhs != rhs:
            report["e_B"] = False
    for p in range(min(r, N) + 1):
        f = hkr_free(A, p, bar, omegas[p])
        comp = es[p] @ f
        # compare on the quotient: columns of comp are classes of free generators
        want = SparseMat(omegas[p].dim, omegas[p].free_dim,
                         [omegas[p].project({j: 1}) for j in range(omegas[p].free_dim)])
        if comp != want:
            report["e_hkr"] = False
    report["ok"] = all(report.values())
    return report


# ---------------------------------------------------------------------------
# Eulerian idempotents

Perm = tuple[int, ...]
GroupElt = dict[Perm, Fraction]

_EULER_LOCK = threading.Lock()
_EULER_CACHE: dict[int, list[GroupElt]] = {}


def _perm_sign(p: Perm) -> int:
    inv = sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])
    return -1 if inv % 2 else 1


def _ga_mul(x: GroupElt, y: GroupElt) -> GroupElt:
    out: dict[Perm, Fraction] = {}
    for s, a in x.items():
        for t, b in y.items():
            st = tuple(s[k] for k in t)
            out[st] = out.get(st, 0) + a * b
    return {k: v for k, v in out.items() if v}


def _ga_add(x: GroupElt, y: GroupElt, c: Rat = 1) -> GroupElt:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


def shuffle_element(n: int) -> GroupElt:
    """sh_n = sum over p+q = n, p,q >= 1 of the signed (p,q)-shuffles in Q[S_n].

    sigma is stored as (sigma(0), ..., sigma(n-1)); it moves the factor in
    slot k to slot sigma(k)."""
    out: dict[Perm, Fraction] = {}
    for p in range(1, n):
        for pos in itertools.combinations(range(n), p):
            rest = [s for s in range(n) if s not in pos]
            sigma = tuple(pos) + tuple(rest)
            out[sigma] = out.get(sigma, 0) + _perm_sign(sigma)
    return {k: Fraction(v) for k, v in out.items() if v}


def eulerian_elements(n: int) -> list[GroupElt]:
    """[e^(1), ..., e^(n)] in Q[S_n] by Lagrange interpolation in sh_n."""
    with _EULER_LOCK:
        if n in _EULER_CACHE:
            return _EULER_CACHE[n]
    ident: GroupElt = {tuple(range(n)): Fraction(1)}
    if n == 1:
        out = [ident]
    else:
        sh = shuffle_element(n)
        eig = [2 ** j - 2 for j in range(1, n + 1)]
        out = []
        for i in range(n):
            e = ident
            for j in range(n):
                if j == i:
                    continue
                factor = _ga_add(sh, ident, -eig[j])
                e = _ga_mul(e, factor)
                e = {k: v / (eig[i] - eig[j]) for k, v in e.items()}
            out.append(e)
    with _EULER_LOCK:
        _EULER_CACHE.setdefault(n, out)
        return _EULER_CACHE[n]


def group_action_matrix(bar: BarMixed, n: int, elt: GroupElt) -> SparseMat:
    """Action of a group-algebra element on the last n factors of C_n."""
    cols = []
    items = list(elt.items())
    for t in bar.tuples(n):
        col: dict[int, Rat] = {}
        tail = t[1:]
        for sigma, c in items:
            new = [0] * n
            for k in range(n):
                new[sigma[k]] = tail[k]
            key = bar.encode((t[0],) + tuple(new))
            col[key] = col.get(key, 0) + c
        cols.append({k: v for k, v in col.items() if v})
    return SparseMat(bar.dim(n), bar.dim(n), cols)


def signed_shuffle_operator(A: FinAlgebra, n: int) -> SparseMat:
    """sh_n on A^{(x)n} (no zeroth factor)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return _tensor_action(A, n, shuffle_element(n))


def _tensor_action(A: FinAlgebra, n: int, elt: GroupElt) -> SparseMat:
    d = A.dim
    cols = []
    for t in itertools.product(range(d), repeat=n):
        col: dict[int, Rat] = {}
        for sigma, c in elt.items():
            new = [0] * n
            for k in range(n):
                new[sigma[k]] = t[k]
            key = 0
            for a in new:
                key = key * d + a
            col[key] = col.get(key, 0) + c
        cols.append({k: v for k, v in col.items() if v})
    return SparseMat(d ** n, d ** n, cols)


def eulerian_idempotents(A: FinAlgebra, n: int) -> list[SparseMat]:
    """[e^(1), ..., e^(n)] as matrices on A^{(x)n}."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return [_tensor_action(A, n, e) for e in eulerian_elements(n)]


def eulerian_on_bar(bar: BarMixed, n: int) -> dict[int, SparseMat]:
    """weight i -> e^(i) acting on C_n (weight 0 only in degree 0)."""
    if n == 0:
        return {0: SparseMat.identity(bar.dim(0))}
    return {i + 1: group_action_matrix(bar, n, e) for i, e in enumerate(eulerian_elements(n))}


# ---------------------------------------------------------------------------
# conventions and Hodge decompositions

@dataclass(frozen=True)
class ConventionTable:
    """psi^k acts on the weight-i piece by k^(i + shift[theory]);
    lambda^k = (-1)^(k-1) psi^k / k."""

    version: str = "ct-1"
    shifts: tuple[tuple[str, int], ...] = (("HH", 0), ("HC", 1), ("HC_rel", 1),
                                           ("HN", 1), ("HN_rel", 1), ("K", 0))
    hn_weight_shift: int = 1  # HN_n^(i) is carried by HC_{n-1}^(i - 1)

    def exponent(self, theory: str, i: int) -> int:
        return i + dict(self.shifts)[theory]

    def psi(self, theory: str, i: int, k: int) -> Fraction:
        return Fraction(k) ** self.exponent(theory, i)

    def lam(self, theory: str, i: int, k: int) -> Fraction:
        return (-1) ** (k - 1) * self.psi(theory, i, k) / k

    def as_dict(self) -> dict:
        return {"version": self.version,
                "psi_exponent": {t: f"k^(i+{s})" if s else "k^i" for t, s in self.shifts},
                "lambda": "(-1)^(k-1) psi^k / k",
                "hn_identification": "HN_n^(i) = HC_{n-1}^(i-1) (relative, nilpotent ideal)",
                "connes_B": "normalized: B(a_0..a_n) = sum_i (-1)^(ni) (1, a_i..a_n, a_0..a_(i-1)); "
                            "unnormalized: (1 - t) s N, so B(a) = 1|a + a|1 on C_0",
                "homology_model": "normalized"}


CONVENTIONS = ConventionTable()


@dataclass
class HodgeDecomp:
    theory: str
    degree: int
    homology: Subquotient
    pieces: dict[int, tuple[int, SparseMat]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.homology.dim

    def check(self) -> None:
        d = self.dim
        total = SparseMat.zeros(d, d)
        for i, (_, P) in self.pieces.items():
            if P @ P != P:
                raise InvariantError(f"weight {i} projector is not idempotent")
            for j, (_, Q) in self.pieces.items():
                if i != j and not (P @ Q).is_zero():
                    raise InvariantError(f"weight {i} and {j} projectors are not orthogonal")
            total = total + P
        if total != SparseMat.identity(d):
            raise InvariantError("Hodge projectors do not sum to the identity")
        if sum(dim for dim, _ in self.pieces.values()) != d:
            raise InvariantError("Hodge piece dimensions do not add up")

    def dims(self) -> dict[int, int]:
        return {i: dim for i, (dim, _) in sorted(self.pieces.items())}


def _decomp(theory: str, n: int, H: Subquotient, projectors: dict[int, SparseMat]) -> HodgeDecomp:
    pieces = {}
    for i, P in sorted(projectors.items()):
        Ph = induced_map(P, H, H)
        pieces[i] = (rank(Ph), Ph)
    D = HodgeDecomp(theory, n, H, pieces)
    D.check()
    return D


def hodge_hh(A: FinAlgebra, n: int, bar: BarMixed | None = None,
             budget: int = DEFAULT_BUDGET) -> HodgeDecomp:
    bar = bar or bar_mixed(A, n + 1, budget=budget)
    return _decomp("HH", n, bar.complex.homology(n), eulerian_on_bar(bar, n))


def relative_mixed(A: FinAlgebra, I: IdealSpan, N: int, normalized: bool = True,
                   budget: int = DEFAULT_BUDGET) -> MixedComplex:
    """Kernel of the surjection C(A) -> C(A/I) with restricted b and B.

    ``meta`` holds the ambient bar complex and the degreewise embeddings.
    """
    nilpotency_index(I)
    Q, proj = quotient_algebra(I)
    bar_a = bar_mixed(A, N, normalized, budget)
    bar_q = bar_mixed(Q, N, normalized, budget)
    f = bar_map(bar_a, bar_q, proj, check=False)
    K = kernel_complex(f)
    emb = K.meta["embedding"]
    B = {n: restrict_operator(bar_a.Bop(n), emb[n], emb[n + 1]) for n in range(N)}
    return MixedComplex(K, B, bounded=False, check=False,
                        meta={"bar": bar_a, "embedding": emb, "quotient": Q})


def _hc_total(M: MixedComplex, n: int) -> ChainComplex:
    return connes_total(M, "HC", n)


def hc(A: FinAlgebra, n: int, budget: int = DEFAULT_BUDGET) -> Subquotient:
    bar = bar_mixed(A, n + 1, budget=budget)
    return _hc_total(bar.mixed, n).homology(n)


def hc_rel(A: FinAlgebra, I: IdealSpan, n: int, budget: int = DEFAULT_BUDGET,
           M: MixedComplex | None = None) -> Subquotient:
    M = M or relative_mixed(A, I, n + 1, budget=budget)
    return _hc_total(M, n).homology(n)


@dataclass
class HNResult:
    degree: int
    homology: Subquotient
    identification: str


def hn_rel(A: FinAlgebra, I: IdealSpan, n: int, budget: int = DEFAULT_BUDGET) -> HNResult:
    """HN_n(A, I), carried by HC_{n-1}(A, I) through the Connes operator."""
    nilpotency_index(I)
    if n <= 0:
        H = subquotient(SparseMat.zeros(0, 0), SparseMat.zeros(0, 0))
    else:
        H = hc_rel(A, I, n - 1, budget)
    return HNResult(n, H, f"HN_{n}(A,I) = HC_{n - 1}(A,I) via B (nilpotent ideal)")


def _weight_operators(M: MixedComplex, T: ChainComplex, k: int, bar: BarMixed,
                      emb: dict[int, SparseMat] | None) -> dict[int, SparseMat]:
    """weight i -> block operator on Tot_k with e^(i-p) on column p."""
    weights = range(0, k + 1)
    per_deg: dict[int, dict[int, SparseMat]] = {}
    for p, deg, _off, _w in T.meta["cells"][k]:
        if deg not in per_deg:
            ops = eulerian_on_bar(bar, deg)
            if emb is not None:
                ops = {w: restrict_operator(op, emb[deg], emb[deg]) for w, op in ops.items()}
            per_deg[deg] = ops
    out = {}
    for i in weights:
        ops: dict[int, dict[int, SparseMat]] = {}
        for p, deg, _off, _w in T.meta["cells"][k]:
            op = per_deg[deg].get(i - p)
            if op is not None:
                ops.setdefault(p, {})[deg] = op
        out[i] = total_operator(T, k, ops)
    return out


def _hodge_hc(theory: str, M: MixedComplex, n: int, bar: BarMixed,
              emb: dict[int, SparseMat] | None, check: bool = True) -> HodgeDecomp:
    T = _hc_total(M, n)
    projs = _weight_operators(M, T, n, bar, emb)
    if check and n + 1 in T.dims:
        up = _weight_operators(M, T, n + 1, bar, emb)
        for i in projs:
            if T.diff(n + 1) @ up[i] != projs[i] @ T.diff(n + 1):
                raise InvariantError(f"weight {i} operator does not commute with the total differential")
        if n - 1 in T.dims and n >= 1:
            down = _weight_operators(M, T, n - 1, bar, emb)
            for i in projs:
                if T.diff(n) @ projs[i] != down.get(i, SparseMat.zeros(T.dim(n - 1), T.dim(n - 1))) @ T.diff(n):
                    raise InvariantError(f"weight {i} operator does not commute with the total differential")
    return _decomp(theory, n, T.homology(n), projs)


def hodge_hc(A: FinAlgebra, n: int, budget: int = DEFAULT_BUDGET) -> HodgeDecomp:
    bar = bar_mixed(A, n + 1, budget=budget)
    return _hodge_hc("HC", bar.mixed, n, bar, None)


def hodge_hc_rel(A: FinAlgebra, I: IdealSpan, n: int, budget: int = DEFAULT_BUDGET) -> HodgeDecomp:
    M = relative_mixed(A, I, n + 1, budget=budget)
    return _hodge_hc("HC_rel", M, n, M.meta["bar"], M.meta["embedding"])


def hodge_hn_rel(A: FinAlgebra, I: IdealSpan, n: int, budget: int = DEFAULT_BUDGET) -> HodgeDecomp:
    """HN_n^(i)(A, I) carried by HC_{n-1}^(i-1)(A, I)."""
    if n <= 0:
        return HodgeDecomp("HN_rel", n, subquotient(SparseMat.zeros(0, 0), SparseMat.zeros(0, 0)))
    D = hodge_hc_rel(A, I, n - 1, budget)
    shift = CONVENTIONS.hn_weight_shift
    return HodgeDecomp("HN_rel", n, D.homology, {i + shift: piece for i, piece in D.pieces.items()})


def adams(D: HodgeDecomp, k: int, table: ConventionTable = CONVENTIONS) -> SparseMat:
    if k < 1:
        raise ValueError("k >= 1 required")
    out = SparseMat.zeros(D.dim, D.dim)
    for i, (_, P) in D.pieces.items():
        out = out + P.scale(table.psi(D.theory, i, k))
    return out


def lambda_op(D: HodgeDecomp, k: int, table: ConventionTable = CONVENTIONS) -> SparseMat:
    return adams(D, k, table).scale(Fraction((-1) ** (k - 1), k))


# ---------------------------------------------------------------------------
# Connes' cyclic quotient complex

class CyclicQuotient:
    """C^lambda_n = A^{(x)(n+1)} / (1 - t) with the induced b, n = 0..N,
    optionally relative to a nilpotent ideal (kernel of C^lambda(A) -> C^lambda(A/I))."""

    def __init__(self, A: FinAlgebra, N: int, I: IdealSpan | None = None,
                 budget: int = DEFAULT_BUDGET):
        self.algebra = A
        self.N = N
        self.bar = bar_mixed(A, N, normalized=False, budget=budget)
        self.spaces = [quotient_space(self.bar.dim(n), self._one_minus_t(self.bar, n))
                       for n in range(N + 1)]
        dims = {n: s.dim for n, s in enumerate(self.spaces)}
        d = {n: induced_map(self.bar.b(n), self.spaces[n], self.spaces[n - 1])
             for n in range(1, N + 1)}
        full = ChainComplex(dims, d, check=True)
        self.ideal = I
        if I is None:
            self.complex = full
            self.embedding = {n: SparseMat.identity(dims[n]) for n in dims}
        else:
            nilpotency_index(I)
            Q, proj = quotient_algebra(I)
            qbar = bar_mixed(Q, N, normalized=False, budget=budget)
            qspaces = [quotient_space(qbar.dim(n), self._one_minus_t(qbar, n)) for n in range(N + 1)]
            qd = {n: induced_map(qbar.b(n), qspaces[n], qspaces[n - 1]) for n in range(1, N + 1)}
            qc = ChainComplex({n: s.dim for n, s in enumerate(qspaces)}, qd, check=False)
            f = bar_map(self.bar, qbar, proj, check=False)
            maps = {n: induced_map(f.at(n), self.spaces[n], qspaces[n]) for n in range(N + 1)}
            K = kernel_complex(ChainMap(full, qc, maps, check=True))
            self.complex = K
            self.embedding = K.meta["embedding"]
        self.full = full

    @staticmethod
    def _one_minus_t(bar: BarMixed, n: int) -> SparseMat:
        cols = []
        s = -1 if n % 2 else 1
        for t in bar.tuples(n):
            col = {bar.encode(t): 1}
            k = bar.encode(t[-1:] + t[:-1])
            col[k] = col.get(k, 0) - s
            cols.append({a: v for a, v in col.items() if v})
        return SparseMat(bar.dim(n), bar.dim(n), cols)

    def cls(self, n: int, terms: dict[tuple[int, ...], Rat]) -> dict[int, Rat]:
        """Class of a chain of A^{(x)(n+1)} in C^lambda_n coordinates."""
        return self.spaces[n].coords(self.bar.chain(terms))

    def homology(self, n: int) -> Subquotient:
        return self.complex.homology(n)


def lambda_comparison(A: FinAlgebra, I: IdealSpan | None, n: int,
                      budget: int = DEFAULT_BUDGET) -> dict:
    """Isomorphism H_n(C^lambda(A, I)) -> HC_n(A, I) of the normalized (b, B) model.

    Both sides receive quasi-isomorphisms from the unnormalized total complex:
    projection onto column 0 followed by the quotient by (1 - t), and the
    cellwise projection onto normalized chains.
    """
    N = n + 1
    lam = CyclicQuotient(A, N, I, budget)
    if I is None:
        ubar = bar_mixed(A, N, normalized=False, budget=budget)
        nbar = bar_mixed(A, N, normalized=True, budget=budget)
        un, nm = ubar.mixed, nbar.mixed
        emb_u = {k: SparseMat.identity(un.dim(k)) for k in range(N + 1)}
        emb_n = {k: SparseMat.identity(nm.dim(k)) for k in range(N + 1)}
    else:
        un = relative_mixed(A, I, N, normalized=False, budget=budget)
        nm = relative_mixed(A, I, N, normalized=True, budget=budget)
        emb_u = un.meta["embedding"]
        emb_n = nm.meta["embedding"]
        ubar = un.meta["bar"]
        nbar = nm.meta["bar"]
    Tu = _hc_total(un, n)
    Tn = _hc_total(nm, n)
    proj = bar_projection(ubar, nbar)

    def to_normalized(k: int) -> SparseMat:
        tgt = {p: (deg, off) for p, deg, off, _w in Tn.meta["cells"][k]}
        cols: list[dict] = [dict() for _ in range(Tu.dim(k))]
        for p, deg, off, _w in Tu.meta["cells"][k]:
            if p not in tgt:
                continue
            m = restrict_operator(proj[deg] @ emb_u[deg], SparseMat.identity(emb_u[deg].cols),
                                  emb_n[deg]) if I is not None else proj[deg]
            toff = tgt[p][1]
            for j, c in enumerate(m.columns):
                cols[off + j] = {toff + i: v for i, v in c.items()}
        return SparseMat(Tn.dim(k), Tu.dim(k), cols)

    def to_lambda(k: int) -> SparseMat:
        cols: list[dict] = [dict() for _ in range(Tu.dim(k))]
        for p, deg, off, w in Tu.meta["cells"][k]:
            if p != 0:
                continue
            for j in range(w):
                vec = emb_u[deg].col(j)
                c = lam.spaces[deg].coords(vec)
                if I is not None:
                    c = solve_columns(lam.embedding[deg], SparseMat(lam.full.dim(deg), 1, [c])).col(0)
                cols[off + j] = dict(c)
        return SparseMat(lam.complex.dim(k), Tu.dim(k), cols)

    Hu = Tu.homology(n)
    Hn = Tn.homology(n)
    Hl = lam.homology(n)
    P = induced_map(to_lambda(n), Hu, Hl)
    Q = induced_map(to_normalized(n), Hu, Hn)
    if rank(P) != Hu.dim or rank(Q) != Hu.dim or Hl.dim != Hu.dim or Hn.dim != Hu.dim:
        raise InvariantError("comparison maps are not isomorphisms")
    # comparison = Q P^{-1}
    Pinv = solve_columns(P, SparseMat.identity(Hl.dim))
    return {"lambda": lam, "matrix": Q @ Pinv, "dim": Hu.dim, "total": Tn}
