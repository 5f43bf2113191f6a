"""Towers {Omega^p_{S/I^m}} -> {HH_p(S/I^m)} and their pro-isomorphism certificates.

Also: the image computation for truncated polynomial algebras over a base R,
Artin-Rees witness search, and the univariate Koszul comparison map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from .algebras import (
    FinAlgebra,
    IdealSpan,
    OmegaModule,
    TowerSpec,
    algebra_map_matrix,
    kaehler,
    level_algebra,
    tensor,
    truncated_polynomial,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    ProIsoCertificate,
    Tower,
    TowerMap,
    pro_iso_certificate,
)
from .errors import InputError, InvariantError
from .exactlin import (
    Echelon,
    Rat,
    SparseMat,
    image_basis,
    induced_map,
    kernel_basis,
    rank,
    subquotient,
)
from .hochcyc import DEFAULT_BUDGET, BarMixed, bar_map, bar_mixed, hh, hkr_free


def _omega_transition(src: OmegaModule, dst: OmegaModule, f: SparseMat) -> SparseMat:
    """f (x) id on the free modules A (x) Lambda^p (variables map to variables)."""
    cols = []
    for S in src.subsets:
        off = dst.sindex[S] * dst.parent.dim
        for k in range(src.parent.dim):
            cols.append({off + i: v for i, v in f.col(k).items()})
    return SparseMat(dst.free_dim, src.free_dim, cols)


@dataclass
class HkrTowerMap:
    spec: TowerSpec
    p: int
    algebras: list[FinAlgebra]
    omega_tower: Tower
    hh_tower: Tower
    maps: list[SparseMat]
    bars: list[BarMixed] = field(repr=False, default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.algebras)

    def tower_map(self) -> TowerMap:
        return TowerMap(self.omega_tower, self.hh_tower, self.maps)


def build_hkr_tower(spec: TowerSpec, p: int, m_max: int,
                    budget: int = DEFAULT_BUDGET) -> HkrTowerMap:
    """Levels m = 1..m_max of Omega^p(S/I^m) -> HH_p(S/I^m); strictness is verified."""
    if p < 0 or m_max < 1:
        raise InputError("need p >= 0 and m_max >= 1")
    algs = [level_algebra(spec, m) for m in range(1, m_max + 1)]
    omegas = [kaehler(A, p) for A in algs]
    bars = [bar_mixed(A, p + 1, budget=budget) for A in algs]
    hhs = [hh(A, p, bar=bar) for A, bar in zip(algs, bars)]
    level_maps = []
    for A, om, bar, H in zip(algs, omegas, bars, hhs):
        free = hkr_free(A, p, bar, om)
        if p > 0 and not (bar.b(p) @ free).is_zero():
            raise InvariantError(f"HKR image is not a cycle at level {A.name}")
        level_maps.append(induced_map(free, om.space, H))
    om_trans = []
    hh_trans = []
    for m in range(1, m_max):
        f = algebra_map_matrix(algs[m], algs[m - 1])
        om_trans.append(induced_map(_omega_transition(omegas[m], omegas[m - 1], f),
                                    omegas[m].space, omegas[m - 1].space))
        g = bar_map(bars[m], bars[m - 1], f, check=False)
        hh_trans.append(induced_map(g.at(p), hhs[m], hhs[m - 1]))
    T = HkrTowerMap(spec, p, algs, Tower([om.space for om in omegas], om_trans),
                    Tower(hhs, hh_trans), level_maps, bars)
    T.tower_map().check_strict()
    return T


def certify_pro_hkr(T: HkrTowerMap, M_max: int, m_max: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> ProIsoCertificate:
    """Pro-zero certificates for kernel and cokernel towers at levels 1..m_max,
    searching witnesses j <= M_max.  The tower is extended to depth M_max if needed."""
    if m_max is None:
        m_max = T.depth
    if T.depth < M_max:
        T = build_hkr_tower(T.spec, T.p, M_max, budget)
    levels = list(range(1, min(m_max, M_max) + 1))
    return pro_iso_certificate(T.tower_map(), M_max, levels)


# ---------------------------------------------------------------------------
# images HH_n(L_M (x) R) -> HH_n(L_m (x) R)

def image_dim(f: SparseMat, src: BarMixed, dst: BarMixed, n: int) -> int:
    """dim of the image of HH_n(src) -> HH_n(dst): rank(f(Z) + B') - rank(B')."""
    g = bar_map(src, dst, f, check=False).at(n)
    Z = kernel_basis(src.b(n)) if n > 0 else SparseMat.identity(src.dim(0))
    ech = Echelon()
    for c in dst.b(n + 1).columns:
        if c:
            ech.insert(c)
    base = len(ech)
    for c in (g @ Z).columns:
        if c:
            ech.insert(c)
    return len(ech) - base


def lemma33_image(R: FinAlgebra, n: int, m: int, M: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Image of HH_n(L_M^R) -> HH_n(L_m^R) where L_k^R = Q[x]/(x^(k+1)) (x) R,
    with the two candidate dimension formulas."""
    if M <= 2 * m:
        raise InputError("need M > 2m")
    if R.presentation is None:
        raise InputError("R needs a presentation")
    if "x" in R.presentation.variables:
        raise InputError("R must not use the variable x")
    big = tensor(truncated_polynomial(M), R)
    small = tensor(truncated_polynomial(m), R)
    f = algebra_map_matrix(big, small)
    src = bar_mixed(big, n, budget=budget)
    dst = bar_mixed(small, n + 1, budget=budget)
    computed = image_dim(f, src, dst, n)
    rbar = bar_mixed(R, max(n, m) + 1, budget=budget)
    hh_r = {k: hh(R, k, bar=rbar).dim for k in range(0, max(n, m) + 1)}
    omega1 = kaehler(truncated_polynomial(m), 1).dim
    pred_n = hh_r[n] * (m + 1) + (hh_r[n - 1] if n >= 1 else 0) * omega1
    pred_m = hh_r[n] * (m + 1) + (hh_r[m - 1] if m >= 1 else 0) * omega1
    return {
        "R": R.name, "n": n, "m": m, "M": M,
        "computed": computed,
        "predicted_n_minus_1": pred_n,
        "predicted_m_minus_1": pred_m,
        "match_n_minus_1": computed == pred_n,
        "match_m_minus_1": computed == pred_m,
        "match": computed == pred_n,
    }


# ---------------------------------------------------------------------------
# Artin-Rees

def _module_product(J: IdealSpan, M: SparseMat) -> SparseMat:
    A = J.parent
    cols = [A.mul(a, v) for a in J.span.columns for v in M.columns]
    return SparseMat(A.dim, len(cols), cols)


def _power_times(J: IdealSpan, M: SparseMat, r: int) -> SparseMat:
    out = M
    for _ in range(r):
        out = image_basis(_module_product(J, out))
    return out


def _intersection(U: SparseMat, V: SparseMat) -> SparseMat:
    """Basis of span U cap span V."""
    K = kernel_basis(SparseMat.hstack(U.rows, [U, V]))
    cols = [U.apply({i: v for i, v in c.items() if i < U.cols}) for c in K.columns]
    cols = [c for c in cols if c]
    return SparseMat(U.rows, len(cols), cols)


def _contained(U: SparseMat, V: SparseMat) -> bool:
    ech = Echelon()
    for c in V.columns:
        if c:
            ech.insert(c)
    return all(ech.contains(c) for c in U.columns)


def artin_rees_witness(M: IdealSpan | SparseMat, L: IdealSpan | SparseMat, J: IdealSpan,
                       m_max: int) -> dict:
    """Least c <= m_max with J^m M cap L inside J^(m-c) L for all c < m <= m_max.

    M and L are A-submodules of A (ideals, or spans of column vectors closed
    under A), L inside M.
    """
    Mm = M.span if isinstance(M, IdealSpan) else M
    Lm = L.span if isinstance(L, IdealSpan) else L
    if not _contained(Lm, Mm):
        raise InputError("L is not contained in M")
    powers_M = {m: _power_times(J, Mm, m) for m in range(m_max + 1)}
    powers_L = {m: _power_times(J, Lm, m) for m in range(m_max + 1)}
    inter = {m: _intersection(powers_M[m], Lm) for m in range(m_max + 1)}
    for c in range(m_max + 1):
        if all(_contained(inter[m], powers_L[m - c]) for m in range(c + 1, m_max + 1)):
            return {"found": True, "c": c, "m_max": m_max}
    return {"found": False, "c": None, "m_max": m_max}


# ---------------------------------------------------------------------------
# Koszul comparison (S = Q[x])

@dataclass
class KoszulData:
    level: int
    algebra: FinAlgebra
    koszul: ChainComplex
    bar_resolution: ChainComplex
    epsilon: ChainMap
    hh1_from_epsilon: SparseMat
    hh1_from_hkr: SparseMat
    report: dict[str, Any]


def _enveloping_index(d: int, t: tuple[int, ...]) -> int:
    k = 0
    for a in t:
        k = k * d + a
    return k


def koszul_epsilon(m_level: int, degree_bound: int = 3) -> KoszulData:
    """epsilon: L_* -> bar resolution over A = Q[x]/(x^m), with A^e = S^e / J^(m).

    L_0 = A^e, L_1 = A^e v_1 with d(v_1) = x (x) 1 - 1 (x) x; epsilon_0 = id,
    epsilon_1(a v_1 b) = a (x) x (x) b.  The bar resolution has B_n = A^{(x)(n+2)}
    with differential b'.
    """
    if m_level < 1:
        raise InputError("level m >= 1 required")
    A = truncated_polynomial(m_level - 1)
    d = A.dim
    x = 1 if d > 1 else None
    top = max(degree_bound, 1)
    bdims = {n: d ** (n + 2) for n in range(top + 1)}
    bprime = {}
    for n in range(1, top + 1):
        cols = []
        for t in itertools.product(range(d), repeat=n + 2):
            col: dict[int, Rat] = {}
            for k in range(n + 1):
                s = -1 if k % 2 else 1
                for c, v in A.mult[t[k]][t[k + 1]].items():
                    key = _enveloping_index(d, t[:k] + (c,) + t[k + 2:])
                    col[key] = col.get(key, 0) + s * v
            cols.append({a: v for a, v in col.items() if v})
        bprime[n] = SparseMat(bdims[n - 1], bdims[n], cols)
    Bres = ChainComplex(bdims, bprime, check=True)
    kdims = {n: (d * d if n <= 1 else 0) for n in range(top + 1)}
    # d(a v_1 b) = a x (x) b - a (x) x b
    dcols = []
    for a, b in itertools.product(range(d), repeat=2):
        col: dict[int, Rat] = {}
        if x is not None:
            for c, v in A.mult[a][x].items():
                key = _enveloping_index(d, (c, b))
                col[key] = col.get(key, 0) + v
            for c, v in A.mult[x][b].items():
                key = _enveloping_index(d, (a, c))
                col[key] = col.get(key, 0) - v
        dcols.append({k: v for k, v in col.items() if v})
    K = ChainComplex(kdims, {1: SparseMat(d * d, d * d, dcols)}, check=True)
    emaps = {0: SparseMat.identity(d * d)}
    ecols = []
    for a, b in itertools.product(range(d), repeat=2):
        ecols.append({_enveloping_index(d, (a, x, b)): 1} if x is not None else {})
    emaps[1] = SparseMat(bdims[1], d * d, ecols)
    for n in range(2, top + 1):
        emaps[n] = SparseMat.zeros(bdims[n], 0)
    eps = ChainMap(K, Bres, emaps, check=True)

    # tensor down over A^e: a_0 (x) ... (x) a_{n+1} -> a_{n+1} a_0 (x) a_1 ... a_n
    bar = bar_mixed(A, 2, normalized=False)
    down_cols = []
    for t in itertools.product(range(d), repeat=3):
        col = {}
        for c, v in A.mult[t[2]][t[0]].items():
            key = bar.encode((c, t[1]))
            col[key] = col.get(key, 0) + v
        down_cols.append(col)
    down1 = SparseMat(bar.dim(1), bdims[1], down_cols)
    # L_1 (x)_{A^e} A = A v_1: a v_1 -> (a (x) 1) v_1
    up = SparseMat(d * d, d, [{_enveloping_index(d, (a, 0)): 1} for a in range(d)])
    chain_eps = down1 @ emaps[1] @ up
    H1 = bar.complex.homology(1)
    omega = kaehler(A, 1)
    eps_on_hh = induced_map(chain_eps, subquotient(SparseMat.identity(d), SparseMat.zeros(d, 0)), H1)
    hk = hkr_free(A, 1, bar, omega)
    hkr_on_hh = induced_map(hk, subquotient(SparseMat.identity(d), SparseMat.zeros(d, 0)), H1)
    report = {
        "level": m_level,
        "algebra": A.name,
        "epsilon_v1": "1|x|1" if x is not None else "0",
        "chain_map_through_degree": top,
        "covers_identity": emaps[0] == SparseMat.identity(d * d),
        "hh1_agrees_with_hkr": eps_on_hh == hkr_on_hh,
        "hh1_rank": rank(eps_on_hh),
    }
    return KoszulData(m_level, A, K, Bres, eps, eps_on_hh, hkr_on_hh, report)
