"""Matrix Lie algebras over finite algebras, Chevalley-Eilenberg complexes,
the Loday-Quillen trace map and exterior-power operations.

gl_n(A) has basis a_k E_ij indexed by ((i * n + j) * dim A + k).
Lambda^q of a Lie algebra uses the increasing q-subsets of its basis in
lexicographic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Sequence

from .algebras import FinAlgebra, IdealSpan, nilpotency_index
from .complexes import ChainComplex, ChainMap, subcomplex
from .errors import BudgetError, InputError, InvariantError
from .exactlin import (
    Echelon,
    Rat,
    SparseMat,
    fmt_rat,
    induced_map,
    rank,
    rat,
    solve_columns,
)
from .hochcyc import (
    CONVENTIONS,
    CyclicQuotient,
    DEFAULT_BUDGET,
    hodge_hc_rel,
    lambda_comparison,
    lambda_op,
)

Vec = dict[int, Rat]


def _add_into(out: dict, vec: dict, c: Rat = 1) -> None:
    for k, v in vec.items():
        out[k] = out.get(k, 0) + c * v


def _clean(vec: dict) -> dict:
    return {k: rat(v) for k, v in vec.items() if v}


class FinLieAlgebra:
    """Finite-dimensional Lie algebra over Q given by bracket structure constants.

    ``embedding`` optionally records the inclusion into a parent Lie algebra
    (columns = images of the basis).
    """

    def __init__(self, basis: Sequence[str], bracket: Sequence[Sequence[Vec]], name: str = "g",
                 parent: FinLieAlgebra | None = None, embedding: SparseMat | None = None,
                 check: bool = True):
        self.basis = tuple(basis)
        self.dim = len(self.basis)
        self.table = tuple(tuple(_clean(v) for v in row) for row in bracket)
        self.name = name
        self.parent = parent
        self.embedding = embedding
        if check:
            self.check()

    def bracket(self, u: Vec, v: Vec) -> Vec:
        out: dict[int, Rat] = {}
        for i, a in u.items():
            row = self.table[i]
            for j, b in v.items():
                _add_into(out, row[j], a * b)
        return _clean(out)

    def check(self) -> None:
        n = self.dim
        for i in range(n):
            if self.table[i][i]:
                raise InvariantError(f"[{self.basis[i]}, {self.basis[i]}] != 0")
            for j in range(i + 1, n):
                neg = {k: -v for k, v in self.table[j][i].items()}
                if self.table[i][j] != neg:
                    raise InvariantError(f"bracket not antisymmetric on ({self.basis[i]}, {self.basis[j]})")
        for i, j, k in itertools.combinations(range(n), 3):
            s: dict[int, Rat] = {}
            _add_into(s, self.bracket({i: 1}, self.table[j][k]))
            _add_into(s, self.bracket({j: 1}, self.table[k][i]))
            _add_into(s, self.bracket({k: 1}, self.table[i][j]))
            if _clean(s):
                raise InvariantError(
                    f"Jacobi fails on ({self.basis[i]}, {self.basis[j]}, {self.basis[k]})")

    def __repr__(self) -> str:
        return f"FinLieAlgebra({self.name}, dim={self.dim})"


def gl_index(A: FinAlgebra, n: int, i: int, j: int, k: int) -> int:
    return (i * n + j) * A.dim + k


def gl(A: FinAlgebra, n: int, check: bool = True) -> FinLieAlgebra:
    """gl_n(A) with [a E_ij, b E_kl] = d_jk ab E_il - d_li ba E_kj."""
    d = A.dim
    labels = []
    keys = []
    for i in range(n):
        for j in range(n):
            for k in range(d):
                labels.append(f"{A.basis[k]}E{i + 1}{j + 1}")
                keys.append((i, j, k))
    table = []
    for (i, j, a) in keys:
        row = []
        for (k, l, b) in keys:
            out: dict[int, Rat] = {}
            if j == k:
                for c, v in A.mult[a][b].items():
                    key = gl_index(A, n, i, l, c)
                    out[key] = out.get(key, 0) + v
            if l == i:
                for c, v in A.mult[b][a].items():
                    key = gl_index(A, n, k, j, c)
                    out[key] = out.get(key, 0) - v
            row.append(out)
        table.append(row)
    g = FinLieAlgebra(labels, table, name=f"gl_{n}({A.name})", check=check)
    g.algebra = A
    g.n = n
    return g


def sub_lie_algebra(g: FinLieAlgebra, span: SparseMat, name: str, check: bool = True) -> FinLieAlgebra:
    """The Lie subalgebra spanned by independent columns; closure is verified."""
    brackets = []
    for a in span.columns:
        row_targets = [g.bracket(a, b) for b in span.columns]
        brackets.append(row_targets)
    flat = [v for row in brackets for v in row]
    try:
        coords = solve_columns(span, SparseMat(g.dim, len(flat), flat))
    except InvariantError as e:
        raise InvariantError(f"{name} is not closed under the bracket") from e
    s = span.cols
    table = [[coords.col(i * s + j) for j in range(s)] for i in range(s)]
    labels = []
    for c in span.columns:
        if len(c) == 1 and next(iter(c.values())) == 1:
            labels.append(g.basis[next(iter(c))])
        else:
            labels.append("+".join(f"{fmt_rat(v)}*{g.basis[k]}" for k, v in sorted(c.items())))
    return FinLieAlgebra(labels, table, name=name, parent=g, embedding=span, check=check)


def _tsigma_span(A: FinAlgebra, I: IdealSpan, n: int, sigma: Sequence[int]) -> SparseMat:
    """Columns spanning t_n^sigma(A, I) inside gl_n(A)."""
    free_pos = set()
    for i in range(n):
        for j in range(i + 1, n):
            free_pos.add((sigma[i], sigma[j]))
    cols = []
    for r in range(n):
        for c in range(n):
            if (r, c) in free_pos:
                for k in range(A.dim):
                    cols.append({gl_index(A, n, r, c, k): 1})
            else:
                for v in I.span.columns:
                    cols.append({gl_index(A, n, r, c, k): x for k, x in v.items()})
    return SparseMat(n * n * A.dim, len(cols), cols)


def t_sigma(A: FinAlgebra, I: IdealSpan, n: int, sigma: Sequence[int] | None = None,
            g: FinLieAlgebra | None = None) -> FinLieAlgebra:
    """Matrices whose entry (sigma i, sigma j) lies in I whenever i >= j."""
    nilpotency_index(I)
    sigma = tuple(range(n)) if sigma is None else tuple(sigma)
    if sorted(sigma) != list(range(n)):
        raise InputError(f"{sigma} is not a permutation of 0..{n - 1}")
    g = g or gl(A, n)
    return sub_lie_algebra(g, _tsigma_span(A, I, n, sigma), f"t_{n}^{sigma}")


# ---------------------------------------------------------------------------
# exterior algebra and CE complexes

def _subsets(dim: int, q: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(dim), q))


def _sort_sign(t: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    if len(set(t)) != len(t):
        return None
    inv = sum(1 for a in range(len(t)) for b in range(a + 1, len(t)) if t[a] > t[b])
    return (-1 if inv % 2 else 1), tuple(sorted(t))


class Exterior:
    """Lambda^q(Q^dim) for q = 0..top in the lex subset basis."""

    def __init__(self, dim: int, top: int, budget: int = DEFAULT_BUDGET):
        self.dim = dim
        self.top = top
        req = max(comb(dim, q) for q in range(top + 1))
        if req > budget:
            raise BudgetError(f"exterior powers of a {dim}-dimensional space through degree {top}",
                              req, budget)
        self.bases = [_subsets(dim, q) for q in range(top + 1)]
        self.index = [{S: k for k, S in enumerate(b)} for b in self.bases]

    def size(self, q: int) -> int:
        return len(self.bases[q]) if 0 <= q <= self.top else 0

    def wedge(self, vecs: Sequence[Vec]) -> Vec:
        """v_1 ^ ... ^ v_q in coordinates."""
        q = len(vecs)
        out: dict[int, Rat] = {}
        for combo in itertools.product(*(v.items() for v in vecs)):
            ss = _sort_sign([k for k, _ in combo])
            if ss is None:
                continue
            sign, S = ss
            c = sign
            for _, v in combo:
                c *= v
            key = self.index[q][S]
            out[key] = out.get(key, 0) + c
        return _clean(out)


@dataclass
class CEComplex:
    lie: FinLieAlgebra
    top: int
    complex: ChainComplex
    exterior: Exterior


def ce_differential(g: FinLieAlgebra, ext: Exterior, q: int) -> SparseMat:
    """d(x_1 ^ ... ^ x_q) = sum_{i<j} (-1)^(i+j) [x_i, x_j] ^ x_1 ... ^ x_q with x_i, x_j omitted."""
    cols = []
    for S in ext.bases[q]:
        col: dict[int, Rat] = {}
        for a, b in itertools.combinations(range(q), 2):
            br = g.table[S[a]][S[b]]
            if not br:
                continue
            rest = [S[t] for t in range(q) if t != a and t != b]
            sign = -1 if (a + b) % 2 else 1
            for c, v in br.items():
                ss = _sort_sign([c] + rest)
                if ss is None:
                    continue
                s2, T = ss
                key = ext.index[q - 1][T]
                col[key] = col.get(key, 0) + sign * s2 * v
        cols.append(_clean(col))
    return SparseMat(ext.size(q - 1), ext.size(q), cols)


def ce_complex(g: FinLieAlgebra, top: int, budget: int = DEFAULT_BUDGET) -> CEComplex:
    ext = Exterior(g.dim, min(top, g.dim), budget)
    dims = {q: ext.size(q) for q in range(ext.top + 1)}
    d = {q: ce_differential(g, ext, q) for q in range(2, ext.top + 1)}
    return CEComplex(g, top, ChainComplex(dims, d, check=True), ext)


def x_complex(A: FinAlgebra, I: IdealSpan, n: int, top: int, budget: int = DEFAULT_BUDGET,
              ce: CEComplex | None = None) -> ChainComplex:
    """sum over sigma of Lambda^* t_n^sigma(A, I) inside Lambda^* gl_n(A)."""
    nilpotency_index(I)
    if ce is None:
        ce = ce_complex(gl(A, n), top, budget)
    ext = ce.exterior
    spans = [_tsigma_span(A, I, n, s) for s in itertools.permutations(range(n))]
    emb = {}
    for q in range(ext.top + 1):
        ech = Echelon()
        for sp in spans:
            for sub in itertools.combinations(range(sp.cols), q):
                w = ext.wedge([sp.col(c) for c in sub])
                if w:
                    ech.insert(w)
        cols = [ech.pivots[p] for p in sorted(ech.pivots)]
        emb[q] = SparseMat(ext.size(q), len(cols), cols)
    X = subcomplex(ce.complex, emb)
    X.meta["ce"] = ce
    return X


def ce_map(phi: SparseMat, src: CEComplex, dst: CEComplex) -> ChainMap:
    """Lambda^q(phi) for a Lie algebra map phi (matrix dst.dim x src.dim)."""
    top = min(src.exterior.top, dst.exterior.top)
    maps = {}
    for q in range(top + 1):
        cols = [dst.exterior.wedge([phi.col(i) for i in S]) for S in src.exterior.bases[q]]
        maps[q] = SparseMat(dst.exterior.size(q), src.exterior.size(q), cols)
    return ChainMap(src.complex, dst.complex, maps, check=True)


# ---------------------------------------------------------------------------
# Loday-Quillen

def _gl_key(g: FinLieAlgebra, idx: int) -> tuple[int, int, int]:
    d = g.algebra.dim
    ij, k = divmod(idx, d)
    i, j = divmod(ij, g.n)
    return i, j, k


def _raw_theta(g: FinLieAlgebra, ext: Exterior, lam: CyclicQuotient, q: int) -> SparseMat:
    """Generalized trace sum_{sigma fixing the first slot} sgn(sigma) tr(x_1 (x) x_sigma(2) ...)."""
    cols = []
    width = lam.full.dim(q - 1)
    for S in ext.bases[q]:
        keys = [_gl_key(g, s) for s in S]
        terms: dict[tuple[int, ...], Rat] = {}
        for perm in itertools.permutations(range(1, q)):
            order = (0,) + perm
            ok = all(keys[order[t]][1] == keys[order[(t + 1) % q]][0] for t in range(q))
            if not ok:
                continue
            inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
            sign = -1 if inv % 2 else 1
            word = tuple(keys[o][2] for o in order)
            terms[word] = terms.get(word, 0) + sign
        cols.append(lam.spaces[q - 1].coords(lam.bar.chain(terms)) if terms else {})
    return SparseMat(width, ext.size(q), cols)


def theta_scalar(q: int) -> Fraction:
    """Sign attached to the raw generalized trace in degree q: 1 for q = 1,
    (-1)^q for q >= 2.  With the CE differential of this module this is the
    choice making theta_{q-1} d = b theta_q; loday_quillen re-verifies it."""
    return Fraction(1) if q == 1 else Fraction((-1) ** q)


@dataclass
class LodayQuillen:
    """theta_q: Lambda^q gl_n(A) -> C^lambda_{q-1}(A), q = 1..top, scaled by theta_scalar."""

    ce: CEComplex
    cyclic: CyclicQuotient
    theta: dict[int, SparseMat]
    scalars: dict[int, Fraction]
    target: ChainComplex
    chain_map: ChainMap


def _shifted(lam: CyclicQuotient, top: int) -> ChainComplex:
    full = lam.full
    dims = {0: 0}
    d = {}
    for q in range(1, top + 1):
        dims[q] = full.dim(q - 1)
        if q >= 2:
            d[q] = full.diff(q - 1)
    return ChainComplex(dims, d, check=False)


def loday_quillen(A: FinAlgebra, n: int, top: int, budget: int = DEFAULT_BUDGET,
                  ce: CEComplex | None = None, cyclic: CyclicQuotient | None = None) -> LodayQuillen:
    g = ce.lie if ce is not None else gl(A, n)
    ce = ce or ce_complex(g, top, budget)
    top = min(top, ce.exterior.top)
    lam = cyclic or CyclicQuotient(A, max(top - 1, 0), None, budget)
    raw = {q: _raw_theta(g, ce.exterior, lam, q) for q in range(1, top + 1)}
    scalars = {q: theta_scalar(q) for q in raw}
    theta = {q: raw[q].scale(scalars[q]) for q in raw}
    target = _shifted(lam, top)
    maps = {0: SparseMat.zeros(0, ce.complex.dim(0))}
    maps.update(theta)
    cm = ChainMap(ce.complex, target, maps, check=True)
    return LodayQuillen(ce, lam, theta, scalars, target, cm)


# ---------------------------------------------------------------------------
# exterior powers

def exterior_power_lie(A: FinAlgebra, n: int, k: int, src: FinLieAlgebra | None = None,
                       dst: FinLieAlgebra | None = None) -> tuple[SparseMat, FinLieAlgebra, FinLieAlgebra]:
    """X -> derivation action of X on Lambda^k(A^n), as a matrix gl_n(A) -> gl_N(A), N = C(n, k)."""
    if not 1 <= k <= n:
        raise InputError("need 1 <= k <= n")
    src = src or gl(A, n)
    N = comb(n, k)
    dst = dst or gl(A, N)
    subsets = list(itertools.combinations(range(n), k))
    sidx = {S: t for t, S in enumerate(subsets)}
    cols = []
    for i in range(n):
        for j in range(n):
            for a in range(A.dim):
                col: dict[int, Rat] = {}
                # (a E_ij) e_S = sum over the slot holding j: replace e_j by a e_i
                for S in subsets:
                    if j not in S:
                        continue
                    new = [i if s == j else s for s in S]
                    ss = _sort_sign(new)
                    if ss is None:
                        continue
                    sign, T = ss
                    key = gl_index(A, N, sidx[T], sidx[S], a)
                    col[key] = col.get(key, 0) + sign
                cols.append(_clean(col))
    return SparseMat(dst.dim, src.dim, cols), src, dst


def check_lie_map(phi: SparseMat, src: FinLieAlgebra, dst: FinLieAlgebra) -> bool:
    for i in range(src.dim):
        for j in range(i + 1, src.dim):
            left = phi.apply(src.table[i][j])
            right = dst.bracket(phi.col(i), phi.col(j))
            if left != right:
                return False
    return True


def check_triangularity(phi: SparseMat, A: FinAlgebra, I: IdealSpan, n: int, k: int) -> bool:
    """phi(t_n^id(A, I)) inside t_N^id(A, I) for the lex order on k-subsets."""
    N = comb(n, k)
    src = _tsigma_span(A, I, n, tuple(range(n)))
    dst = _tsigma_span(A, I, N, tuple(range(N)))
    ech = Echelon()
    for c in dst.columns:
        ech.insert(c)
    return all(ech.contains(phi.apply(c)) for c in src.columns)


# ---------------------------------------------------------------------------
# diagram report

def _mat_strings(M: SparseMat) -> list[list[str]]:
    return M.to_strings()


def theta_lambda_report(A: FinAlgebra, I: IdealSpan, n: int, k: int, m: int,
                        budget: int = DEFAULT_BUDGET) -> dict[str, Any]:
    """Compare theta_* o (Lambda^k)_* with lambda^k o theta_* on H_m(x_n(A, I)),
    in canonical coordinates of HC_{m-1}(A, I) = H_{m-1}(C^lambda(A, I))."""
    if m < 1:
        raise InputError("homology degree m >= 1 required")
    nilpotency_index(I)
    top = m + 1
    N = comb(n, k)
    gn = gl(A, n)
    gN = gl(A, N)
    ce_n = ce_complex(gn, top, budget)
    ce_N = ce_complex(gN, top, budget)
    lam = CyclicQuotient(A, top - 1, I, budget)
    lq_n = loday_quillen(A, n, top, budget, ce=ce_n, cyclic=lam)
    lq_N = loday_quillen(A, N, top, budget, ce=ce_N, cyclic=lam)
    X_n = x_complex(A, I, n, top, budget, ce=ce_n)
    X_N = x_complex(A, I, N, top, budget, ce=ce_N)
    phi, _, _ = exterior_power_lie(A, n, k, gn, gN)
    cem = ce_map(phi, ce_n, ce_N)
    rel_emb = lam.embedding

    def theta_on_x(X: ChainComplex, lq: LodayQuillen, q: int) -> SparseMat:
        full = lq.theta[q] @ X.meta["embedding"][q]
        return solve_columns(rel_emb[q - 1], full)

    Hx = X_n.homology(m)
    Hc = lam.homology(m - 1)
    # theta_n restricted to x_n lands in the relative cyclic complex
    th_n = theta_on_x(X_n, lq_n, m)
    th_n_up = theta_on_x(X_n, lq_n, m + 1) if m + 1 <= top else None
    theta_star = induced_map(th_n, Hx, Hc)
    # Lambda^k restricted to x complexes
    emb_n = X_n.meta["embedding"][m]
    emb_N = X_N.meta["embedding"][m]
    lam_k = solve_columns(emb_N, cem.at(m) @ emb_n)
    lam_k_star = induced_map(lam_k, Hx, X_N.homology(m))
    th_N = theta_on_x(X_N, lq_N, m)
    theta_N_star = induced_map(th_N, X_N.homology(m), Hc)
    left = theta_N_star @ lam_k_star
    comp = lambda_comparison(A, I, m - 1, budget)
    Phi = comp["matrix"]
    D = hodge_hc_rel(A, I, m - 1, budget)
    Phi_inv = solve_columns(Phi, SparseMat.identity(Phi.rows))
    lam_op = Phi_inv @ lambda_op(D, k) @ Phi
    right = lam_op @ theta_star
    pieces = {}
    for i, (dim, P) in sorted(D.pieces.items()):
        Pi = Phi_inv @ P @ Phi
        pieces[str(i)] = {"dim": dim,
                          "lambda_scalar": fmt_rat(CONVENTIONS.lam("HC_rel", i, k)),
                          "theta_Lambda": _mat_strings(Pi @ left),
                          "lambda_theta": _mat_strings(Pi @ right),
                          "equal": Pi @ left == Pi @ right}
    chain_ok = True
    if th_n_up is not None:
        dX = X_n.diff(m + 1)
        dC = lam.complex.diff(m)
        chain_ok = th_n @ dX == dC @ th_n_up
    return {
        "algebra": A.name,
        "ideal_dim": I.dim,
        "n": n, "k": k, "m": m, "N": N,
        "x_dims": {str(q): X_n.dim(q) for q in sorted(X_n.dims)},
        "hx_dim": Hx.dim,
        "hc_dim": Hc.dim,
        "theta_scalars": {str(q): fmt_rat(v) for q, v in sorted(lq_n.scalars.items())},
        "theta_chain_map": chain_ok,
        "theta_rank": rank(theta_star),
        "theta_surjective": rank(theta_star) == Hc.dim,
        "theta_star": _mat_strings(theta_star),
        "theta_Lambda": _mat_strings(left),
        "lambda_theta": _mat_strings(right),
        "equal": left == right,
        "pieces": pieces,
        "conventions": CONVENTIONS.version,
    }
