"""Bounded chain complexes, mixed complexes, Connes totalizations and towers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import InvariantError, NotSurjectiveError, UnboundedError
from .exactlin import (
    SparseMat,
    Subquotient,
    induced_map,
    kernel_basis,
    rank,
    solve_columns,
    subquotient,
)


class ChainComplex:
    """C_lo, ..., C_hi with d(n): C_n -> C_{n-1}; everything outside is zero."""

    def __init__(self, dims: dict[int, int], d: dict[int, SparseMat] | None = None,
                 check: bool = True, meta: dict[str, Any] | None = None):
        if not dims:
            raise ValueError("a chain complex needs at least one degree")
        self.lo = min(dims)
        self.hi = max(dims)
        self.dims = {n: dims.get(n, 0) for n in range(self.lo, self.hi + 1)}
        self.d = dict(d or {})
        self.meta = meta or {}
        self._homology: dict[int, Subquotient] = {}
        for n, m in self.d.items():
            if m.shape != (self.dim(n - 1), self.dim(n)):
                raise ValueError(f"d({n}) has shape {m.shape}, expected "
                                 f"{(self.dim(n - 1), self.dim(n))}")
        if check:
            self.check()

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> SparseMat:
        m = self.d.get(n)
        if m is None:
            return SparseMat.zeros(self.dim(n - 1), self.dim(n))
        return m

    def check(self) -> None:
        for n in range(self.lo + 1, self.hi + 1):
            if n in self.d and n - 1 in self.d:
                if not (self.d[n - 1] @ self.d[n]).is_zero():
                    raise InvariantError(f"d({n - 1}) d({n}) != 0")

    def homology(self, n: int) -> Subquotient:
        if n not in self._homology:
            dn = self.diff(n)
            if dn.is_zero():
                cycles = SparseMat.identity(self.dim(n))
            else:
                cycles = kernel_basis(dn)
            self._homology[n] = subquotient(cycles, self.diff(n + 1), check=False)
        return self._homology[n]

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * self.dim(n) for n in self.dims)

    def __repr__(self) -> str:
        return f"ChainComplex({self.dims})"


def homology(C: ChainComplex, n: int) -> Subquotient:
    """ker d(n) / im d(n+1) with the canonical coset basis."""
    return C.homology(n)


class ChainMap:
    def __init__(self, source: ChainComplex, target: ChainComplex,
                 maps: dict[int, SparseMat], check: bool = True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        for n, m in self.maps.items():
            if m.shape != (target.dim(n), source.dim(n)):
                raise ValueError(f"map in degree {n} has shape {m.shape}")
        if check:
            self.check()

    def at(self, n: int) -> SparseMat:
        m = self.maps.get(n)
        if m is None:
            return SparseMat.zeros(self.target.dim(n), self.source.dim(n))
        return m

    def check(self) -> None:
        lo = max(self.source.lo, self.target.lo)
        hi = min(self.source.hi, self.target.hi)
        for n in range(lo + 1, hi + 1):
            left = self.target.diff(n) @ self.at(n)
            right = self.at(n - 1) @ self.source.diff(n)
            if left != right:
                raise InvariantError(f"chain map does not commute with d in degree {n}")

    def compose(self, first: ChainMap) -> ChainMap:
        """self o first."""
        maps = {n: self.at(n) @ first.at(n) for n in first.maps if n in self.maps}
        return ChainMap(first.source, self.target, maps, check=False)


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {n: SparseMat.identity(C.dim(n)) for n in C.dims}, check=False)


def induced_on_homology(f: ChainMap, n: int, check: bool = True) -> SparseMat:
    return induced_map(f.at(n), f.source.homology(n), f.target.homology(n), check=check)


def kernel_complex(f: ChainMap) -> ChainComplex:
    """Degreewise kernels of a degreewise surjective chain map.

    The result carries ``meta["embedding"][n]``, the inclusion into the source.
    """
    src = f.source
    emb: dict[int, SparseMat] = {}
    for n in src.dims:
        fn = f.at(n)
        if rank(fn) != f.target.dim(n):
            raise NotSurjectiveError(n)
        emb[n] = kernel_basis(fn)
    return _subcomplex(src, emb)


def _subcomplex(src: ChainComplex, emb: dict[int, SparseMat]) -> ChainComplex:
    d = {}
    for n in src.dims:
        if n - 1 in emb and n in src.d:
            d[n] = solve_columns(emb[n - 1], src.d[n] @ emb[n])
    return ChainComplex({n: e.cols for n, e in emb.items()}, d, check=False,
                        meta={"embedding": emb, "parent": src})


def subcomplex(src: ChainComplex, emb: dict[int, SparseMat]) -> ChainComplex:
    """Subcomplex spanned by the given independent columns; d-stability is checked."""
    return _subcomplex(src, emb)


def restrict_operator(op: SparseMat, emb_src: SparseMat, emb_dst: SparseMat) -> SparseMat:
    """Matrix of op on subspaces, given op(span emb_src) inside span emb_dst."""
    return solve_columns(emb_dst, op @ emb_src)


def restrict_chain_map(f: ChainMap, sub_src: ChainComplex, sub_dst: ChainComplex) -> ChainMap:
    es = sub_src.meta["embedding"]
    ed = sub_dst.meta["embedding"]
    maps = {n: restrict_operator(f.at(n), es[n], ed[n]) for n in es if n in ed}
    return ChainMap(sub_src, sub_dst, maps, check=False)


# ---------------------------------------------------------------------------
# mixed complexes

class MixedComplex:
    """(C, b, B) with B: C_n -> C_{n+1}, B^2 = 0 and bB + Bb = 0.

    ``bounded`` means C is genuinely zero above ``hi``; otherwise ``hi`` is
    only a truncation degree of an infinite complex.
    """

    def __init__(self, underlying: ChainComplex, B: dict[int, SparseMat],
                 bounded: bool = False, check: bool = True, meta: dict[str, Any] | None = None):
        self.underlying = underlying
        self.B = dict(B)
        self.bounded = bounded
        self.meta = meta or {}
        C = underlying
        for n, m in self.B.items():
            if m.shape != (C.dim(n + 1), C.dim(n)):
                raise ValueError(f"B({n}) has shape {m.shape}")
        if check:
            self.check()

    @property
    def lo(self) -> int:
        return self.underlying.lo

    @property
    def hi(self) -> int:
        return self.underlying.hi

    def dim(self, n: int) -> int:
        return self.underlying.dim(n)

    def b(self, n: int) -> SparseMat:
        return self.underlying.diff(n)

    def Bop(self, n: int) -> SparseMat:
        m = self.B.get(n)
        if m is None:
            return SparseMat.zeros(self.dim(n + 1), self.dim(n))
        return m

    def check(self) -> None:
        self.underlying.check()
        for n in range(self.lo, self.hi):
            if n in self.B and n + 1 in self.B:
                if not (self.B[n + 1] @ self.B[n]).is_zero():
                    raise InvariantError(f"B B != 0 on C_{n}")
            if n + 1 <= self.hi:
                s = self.b(n + 1) @ self.Bop(n) + self.Bop(n - 1) @ self.b(n)
                if not s.is_zero():
                    raise InvariantError(f"bB + Bb != 0 on C_{n}")


def _cells(M: MixedComplex, mode: str, k: int, columns: int | None) -> list[tuple[int, int]]:
    """(column p, chain degree) pairs making up total degree k."""
    lo = M.lo
    hi = M.hi
    out = []
    if mode == "HC":
        p = 0
        while k - 2 * p >= lo:
            if columns is not None and p > columns:
                break
            if k - 2 * p <= hi:
                out.append((p, k - 2 * p))
            p += 1
    elif mode == "HN":
        p = 0
        while k - 2 * p <= hi:
            if k - 2 * p >= lo:
                out.append((p, k - 2 * p))
            p -= 1
    else:
        for p in range(-((hi - k) // 2), (k - lo) // 2 + 1):
            out.append((p, k - 2 * p))
    return out


def connes_total(M: MixedComplex, mode: str, n: int, columns: int | None = None) -> ChainComplex:
    """Finite total complex of the (b, B) bicomplex around degree n.

    Covers total degrees n-2 .. n+2 where the data allows; homology at n is
    exact as soon as total degree n+1 is fully present.  The cell layout
    is recorded in ``meta["cells"][k]`` as (column, chain degree, offset, width).
    """
    mode = mode.upper()
    if mode not in ("HC", "HN", "HP"):
        raise ValueError(f"unknown mode {mode}")
    if mode in ("HN", "HP") and not M.bounded:
        raise UnboundedError(
            f"{mode} needs a bounded mixed complex; for a nilpotent ideal use the "
            "relative HC route (HN(A, I) = HC(A, I) shifted by one)")
    if mode == "HC" and columns is None:
        columns = -(-(n + 1) // 2) + 1
    top = n + 2
    if mode == "HC" and not M.bounded:
        top = min(top, M.hi)
        if top < n + 1:
            raise ValueError(f"mixed complex truncated at {M.hi}; HC_{n} needs degree {n + 1}")
    bottom = n - 2
    if mode == "HC":
        bottom = max(bottom, M.lo)
    cells = {}
    dims = {}
    for k in range(bottom, top + 1):
        layout = []
        off = 0
        for p, deg in _cells(M, mode, k, columns if mode == "HC" else None):
            layout.append((p, deg, off, M.dim(deg)))
            off += M.dim(deg)
        cells[k] = layout
        dims[k] = off
    d = {}
    for k in range(bottom + 1, top + 1):
        tgt = {p: (deg, off) for p, deg, off, _w in cells[k - 1]}
        cols: list[dict] = [dict() for _ in range(dims[k])]
        for p, deg, off, _w in cells[k]:
            blocks = []
            if p in tgt and tgt[p][0] == deg - 1:
                blocks.append((M.b(deg), tgt[p][1]))
            if p - 1 in tgt and tgt[p - 1][0] == deg + 1:
                blocks.append((M.Bop(deg), tgt[p - 1][1]))
            for mat, toff in blocks:
                for j, c in enumerate(mat.columns):
                    col = cols[off + j]
                    for i, v in c.items():
                        col[toff + i] = col.get(toff + i, 0) + v
        d[k] = SparseMat(dims[k - 1], dims[k], cols)
    return ChainComplex(dims, d, check=True, meta={"cells": cells, "mode": mode})


def total_operator(T: ChainComplex, k: int, ops: dict[int, dict[int, SparseMat]]) -> SparseMat:
    """Block-diagonal operator on Tot_k: ops[p][deg] acts on cell (p, deg)."""
    cols: list[dict] = []
    for p, deg, off, width in T.meta["cells"][k]:
        m = ops.get(p, {}).get(deg)
        if m is None:
            cols.extend({} for _ in range(width))
            continue
        for c in m.columns:
            cols.append({off + i: v for i, v in c.items()})
    return SparseMat(T.dim(k), T.dim(k), cols)


# ---------------------------------------------------------------------------
# towers and pro-objects

def _dim(obj) -> int:
    if isinstance(obj, int):
        return obj
    return obj.dim


@dataclass
class Tower:
    """Levels m = 1..len with transitions m+1 -> m.

    ``transitions[i]`` maps level i+2 to level i+1 (1-based levels).
    Transitions are SparseMat (on level coordinates) or ChainMap.
    """

    levels: list
    transitions: list

    def __post_init__(self):
        if len(self.transitions) != max(len(self.levels) - 1, 0):
            raise ValueError("a tower with L levels needs L-1 transitions")

    def __len__(self) -> int:
        return len(self.levels)

    def level(self, m: int):
        return self.levels[m - 1]

    def transition(self, m: int):
        """The map level m+1 -> level m."""
        return self.transitions[m - 1]

    def composite(self, j: int, m: int):
        if not m <= j <= len(self.levels):
            raise IndexError(f"no composite {j} -> {m}")
        if j == m:
            obj = self.level(m)
            if isinstance(obj, ChainComplex):
                return identity_map(obj)
            return SparseMat.identity(_dim(obj))
        out = self.transition(m)
        for i in range(m + 1, j):
            out = _compose(out, self.transition(i))
        return out


def _compose(f, g):
    """f o g for matrices or chain maps."""
    if isinstance(f, ChainMap):
        return f.compose(g)
    return f @ g


@dataclass
class TowerMap:
    source: Tower
    target: Tower
    maps: list  # maps[m-1]: level m of source -> level m of target

    def check_strict(self) -> None:
        for m in range(1, min(len(self.source), len(self.target))):
            left = _compose(self.target.transition(m), self.maps[m])
            right = _compose(self.maps[m - 1], self.source.transition(m))
            if left != right:
                raise InvariantError(f"tower map is not strict: square at level {m} "
                                     "does not commute")


@dataclass
class ProCertificate:
    certified: bool
    witnesses: dict[int, int]
    search_bound: int
    failed_level: int | None = None
    levels: list[int] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "certified" if self.certified else "inconclusive"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "search_bound": self.search_bound,
            "levels": list(self.levels),
            "witnesses": {str(m): j for m, j in sorted(self.witnesses.items())},
            "failed_level": self.failed_level,
        }


def pro_zero_certificate(T: Tower, search_bound: int, levels: Sequence[int] | None = None) -> ProCertificate:
    """For each level m, the least j with m < j <= search_bound and the
    composite j -> m equal to zero.  A missing witness is reported, not raised."""
    top = min(search_bound, len(T))
    if levels is None:
        levels = list(range(1, max(top, 1)))
    witnesses: dict[int, int] = {}
    for m in levels:
        found = None
        if m + 1 <= top:
            comp = T.transition(m)
            j = m + 1
            while True:
                if _is_zero(comp):
                    found = j
                    break
                if j + 1 > top:
                    break
                comp = _compose(comp, T.transition(j))
                j += 1
        if found is None:
            return ProCertificate(False, witnesses, search_bound, failed_level=m, levels=list(levels))
        witnesses[m] = found
    return ProCertificate(True, witnesses, search_bound, levels=list(levels))


def _is_zero(f) -> bool:
    if isinstance(f, ChainMap):
        return all(m.is_zero() for m in f.maps.values())
    return f.is_zero()


@dataclass
class ProIsoCertificate:
    kernel: ProCertificate
    cokernel: ProCertificate

    @property
    def certified(self) -> bool:
        return self.kernel.certified and self.cokernel.certified

    @property
    def status(self) -> str:
        return "certified" if self.certified else "inconclusive"

    def as_dict(self) -> dict:
        return {"status": self.status, "kernel": self.kernel.as_dict(),
                "cokernel": self.cokernel.as_dict()}


def kernel_tower(f: TowerMap) -> Tower:
    L = min(len(f.source), len(f.target))
    levels = [subquotient(kernel_basis(f.maps[m]), SparseMat.zeros(f.maps[m].cols, 0), check=False)
              for m in range(L)]
    trans = [induced_map(f.source.transition(m), levels[m], levels[m - 1])
             for m in range(1, L)]
    return Tower(levels, trans)


def cokernel_tower(f: TowerMap) -> Tower:
    L = min(len(f.source), len(f.target))
    levels = [subquotient(SparseMat.identity(f.maps[m].rows), f.maps[m], check=False)
              for m in range(L)]
    trans = [induced_map(f.target.transition(m), levels[m], levels[m - 1])
             for m in range(1, L)]
    return Tower(levels, trans)


def pro_iso_certificate(f: TowerMap, search_bound: int,
                        levels: Sequence[int] | None = None) -> ProIsoCertificate:
    f.check_strict()
    return ProIsoCertificate(pro_zero_certificate(kernel_tower(f), search_bound, levels),
                             pro_zero_certificate(cokernel_tower(f), search_bound, levels))
