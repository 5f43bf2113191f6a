"""Exact linear algebra over Q.

Matrices are stored column-wise as sparse dicts.  Entries are exact
rationals: Python ``int`` where the value is integral, ``Fraction``
otherwise.  Elimination is done on primitive integer vectors
(fraction-free row operations with content removal); small matrices go
through a dense Bareiss elimination instead.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import ContainmentError, InvariantError, WellDefinednessError

Rat = int | Fraction

DENSE_CUTOFF = 64


def rat(x) -> Rat:
    """Normalize a rational to int when integral."""
    if isinstance(x, int):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def fmt_rat(x: Rat) -> str:
    return str(Fraction(x))


def _clean(col: Mapping[int, Rat]) -> dict[int, Rat]:
    return {k: rat(v) for k, v in col.items() if v}


class SparseMat:
    """Immutable sparse matrix over Q, stored as a tuple of column dicts."""

    def __init__(self, rows: int, cols: int, columns: Sequence[Mapping[int, Rat]] | None = None,
                 *, _trusted: bool = False):
        self.rows = rows
        self.cols = cols
        if columns is None:
            self._columns = tuple({} for _ in range(cols))
            return
        if len(columns) != cols:
            raise ValueError(f"expected {cols} columns, got {len(columns)}")
        if _trusted:
            self._columns = tuple(columns)
            return
        out = []
        for j, c in enumerate(columns):
            c = _clean(c)
            for i in c:
                if not 0 <= i < rows:
                    raise IndexError(f"row index {i} out of range in column {j}")
            out.append(c)
        self._columns = tuple(out)

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> SparseMat:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> SparseMat:
        return cls(n, n, [{i: 1} for i in range(n)], _trusted=True)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> SparseMat:
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        columns = [{} for _ in range(cols)]
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    columns[j][i] = rat(v)
        return cls(rows, cols, columns, _trusted=True)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Mapping[tuple[int, int], Rat]) -> SparseMat:
        columns = [{} for _ in range(cols)]
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) out of range")
            if v:
                columns[j][i] = rat(v)
        return cls(rows, cols, columns, _trusted=True)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, Rat]]) -> SparseMat:
        return cls(rows, len(columns), columns)

    @classmethod
    def hstack(cls, rows: int, blocks: Iterable[SparseMat]) -> SparseMat:
        columns = []
        for b in blocks:
            if b.rows != rows:
                raise ValueError("row mismatch in hstack")
            columns.extend(b._columns)
        return cls(rows, len(columns), columns, _trusted=True)

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def col(self, j: int) -> Mapping[int, Rat]:
        return self._columns[j]

    @property
    def columns(self) -> tuple[dict[int, Rat], ...]:
        return self._columns

    @property
    def entries(self) -> dict[tuple[int, int], Rat]:
        return {(i, j): v for j, c in enumerate(self._columns) for i, v in c.items()}

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self._columns)

    def __getitem__(self, ij: tuple[int, int]) -> Rat:
        i, j = ij
        return self._columns[j].get(i, 0)

    def to_dense(self) -> list[list[Rat]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self._columns):
            for i, v in c.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self._columns)

    # algebra ----------------------------------------------------------------
    def apply(self, vec: Mapping[int, Rat]) -> dict[int, Rat]:
        out: dict[int, Rat] = {}
        for j, x in vec.items():
            for i, v in self._columns[j].items():
                out[i] = out.get(i, 0) + x * v
        return {i: rat(v) for i, v in out.items() if v}

    def __matmul__(self, other: SparseMat) -> SparseMat:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMat(self.rows, other.cols, [self.apply(c) for c in other._columns],
                         _trusted=True)

    def __add__(self, other: SparseMat) -> SparseMat:
        if self.shape != other.shape:
            raise ValueError("shape mismatch in +")
        out = []
        for a, b in zip(self._columns, other._columns):
            c = dict(a)
            for i, v in b.items():
                c[i] = c.get(i, 0) + v
            out.append(c)
        return SparseMat(self.rows, self.cols, out)

    def __neg__(self) -> SparseMat:
        return self.scale(-1)

    def __sub__(self, other: SparseMat) -> SparseMat:
        return self + (-other)

    def scale(self, s: Rat) -> SparseMat:
        if not s:
            return SparseMat(self.rows, self.cols)
        return SparseMat(self.rows, self.cols,
                         [{i: rat(v * s) for i, v in c.items()} for c in self._columns],
                         _trusted=True)

    def transpose(self) -> SparseMat:
        out = [{} for _ in range(self.rows)]
        for j, c in enumerate(self._columns):
            for i, v in c.items():
                out[i][j] = v
        return SparseMat(self.cols, self.rows, out, _trusted=True)

    T = property(transpose)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> SparseMat:
        rpos = {r: k for k, r in enumerate(rows)}
        out = []
        for j in cols:
            out.append({rpos[i]: v for i, v in self._columns[j].items() if i in rpos})
        return SparseMat(len(rows), len(cols), out, _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMat):
            return NotImplemented
        return self.shape == other.shape and self._columns == other._columns

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(c.items())) for c in self._columns)))

    def __repr__(self) -> str:
        return f"SparseMat({self.rows}x{self.cols}, nnz={self.nnz})"

    def to_strings(self) -> list[list[str]]:
        return [[fmt_rat(v) for v in row] for row in self.to_dense()]


# ---------------------------------------------------------------------------
# integer vector helpers

def _to_int(vec: Mapping[int, Rat]) -> tuple[dict[int, int], int]:
    """Return (w, L) with w = L * vec integral, L > 0."""
    L = 1
    for v in vec.values():
        if not isinstance(v, int):
            L = lcm(L, v.denominator)
    if L == 1:
        return {k: v for k, v in vec.items() if v}, 1
    return {k: int(v * L) for k, v in vec.items() if v}, L


def _content(*vecs: Mapping[int, int]) -> int:
    g = 0
    for v in vecs:
        for x in v.values():
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


def _eliminate(v: dict[int, int], piv: Mapping[int, dict[int, int]],
               combo: dict[int, int] | None = None,
               combos: Mapping[int, dict[int, int]] | None = None,
               coeffs: dict[int, int] | None = None) -> int:
    """Zero every pivot position of ``v`` in place.

    Returns the scale s with  v_out = s * v_in - sum_p coeffs[p] * piv[p].
    ``combo`` follows the same row operations as ``v``.
    """
    heap = [k for k in v if k in piv]
    if not heap:
        return 1
    heapq.heapify(heap)
    scale = 1
    while heap:
        p = heapq.heappop(heap)
        c = v.get(p)
        if c is None:
            continue
        w = piv[p]
        a = w[p]
        if a != 1:
            g = gcd(a, c)
            if g != 1:
                a //= g
                c //= g
            if a != 1:
                for k in v:
                    v[k] *= a
                scale *= a
                if combo is not None:
                    for k in combo:
                        combo[k] *= a
                if coeffs is not None:
                    for k in coeffs:
                        coeffs[k] *= a
        for k, x in w.items():
            y = v.get(k)
            if y is None:
                v[k] = -c * x
                if k in piv:
                    heapq.heappush(heap, k)
            else:
                y -= c * x
                if y:
                    v[k] = y
                else:
                    del v[k]
        if combo is not None:
            for k, x in combos[p].items():
                y = combo.get(k, 0) - c * x
                if y:
                    combo[k] = y
                else:
                    combo.pop(k, None)
        if coeffs is not None:
            coeffs[p] = coeffs.get(p, 0) + c
    return scale


class Echelon:
    """Incrementally built echelon basis of a subspace of Q^n.

    Stored vectors are primitive integer vectors; the pivot of a vector is
    its smallest index and carries a positive entry.  With ``track=True``
    every stored vector remembers its expression in the inserted vectors,
    which is what kernel and solve computations need.
    """

    def __init__(self, track: bool = False):
        self.pivots: dict[int, dict[int, int]] = {}
        self.combos: dict[int, dict[int, int]] | None = {} if track else None

    def __len__(self) -> int:
        return len(self.pivots)

    def insert(self, vec: Mapping[int, Rat], tag: int | None = None) -> tuple[int | None, dict[int, int] | None]:
        """Insert ``vec``.  Returns (pivot, None) if independent, else
        (None, relation) where the relation is an integer combination of
        inserted tags summing to zero (only when tracking)."""
        v, _ = _to_int(vec)
        combo = None
        if self.combos is not None:
            combo = {tag: 1}
        _eliminate(v, self.pivots, combo, self.combos)
        if not v:
            if combo is not None:
                g = _content(combo)
                if g > 1:
                    combo = {k: x // g for k, x in combo.items()}
            return None, combo
        g = _content(v, combo) if combo is not None else _content(v)
        p = min(v)
        if v[p] < 0:
            g = -g
        if g != 1:
            v = {k: x // g for k, x in v.items()}
            if combo is not None:
                combo = {k: x // g for k, x in combo.items()}
        self.pivots[p] = v
        if combo is not None:
            self.combos[p] = combo
        return p, None

    def contains(self, vec: Mapping[int, Rat]) -> bool:
        v, _ = _to_int(vec)
        _eliminate(v, self.pivots)
        return not v

    def residue(self, vec: Mapping[int, Rat]) -> dict[int, Rat]:
        """The unique element of vec + span with zeros at every pivot."""
        v, L = _to_int(vec)
        s = _eliminate(v, self.pivots)
        d = s * L
        if d == 1:
            return v
        return {k: rat(Fraction(x, d)) for k, x in v.items()}

    def express(self, vec: Mapping[int, Rat]) -> dict[int, Rat] | None:
        """Coefficients c (keyed by inserted tag) with vec = sum c_t * inserted_t,
        or None if vec is outside the span.  Requires tracking."""
        if self.combos is None:
            raise ValueError("express() needs a tracking echelon")
        v, L = _to_int(vec)
        coeffs: dict[int, int] = {}
        s = _eliminate(v, self.pivots, coeffs=coeffs)
        if v:
            return None
        out: dict[int, Fraction] = {}
        for p, c in coeffs.items():
            if not c:
                continue
            for t, x in self.combos[p].items():
                out[t] = out.get(t, 0) + c * x
        d = s * L
        return {t: rat(Fraction(x, d)) for t, x in out.items() if x}


# ---------------------------------------------------------------------------
# rank / kernel / solve

def _rank_dense(M: SparseMat) -> int:
    """Bareiss fraction-free elimination on the integer-scaled rows."""
    rows = []
    for r in M.transpose().columns:
        w, _ = _to_int(r)
        if w:
            row = [0] * M.cols
            for j, x in w.items():
                row[j] = x
            rows.append(row)
    n, m = len(rows), M.cols
    rank = 0
    prev = 1
    col = 0
    while rank < n and col < m:
        piv = next((i for i in range(rank, n) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        p = pr[col]
        for i in range(rank + 1, n):
            ri = rows[i]
            f = ri[col]
            for j in range(col + 1, m):
                ri[j] = (p * ri[j] - f * pr[j]) // prev
            ri[col] = 0
        prev = p
        rank += 1
        col += 1
    return rank


def rank(M: SparseMat, method: str = "auto") -> int:
    """Exact rank of M over Q.

    ``method`` is "auto", "dense" (Bareiss), "sparse" (leading-index pivots)
    or "sparse-reversed" (columns inserted in reverse order).
    """
    if method == "auto":
        method = "dense" if M.rows < DENSE_CUTOFF and M.cols < DENSE_CUTOFF else "sparse"
    if method == "dense":
        return _rank_dense(M)
    ech = Echelon()
    order = range(M.cols) if method == "sparse" else range(M.cols - 1, -1, -1)
    for j in order:
        c = M.col(j)
        if c:
            ech.insert(c)
    return len(ech)


def kernel_basis(M: SparseMat) -> SparseMat:
    """Columns form a basis of ker(M); there are cols - rank(M) of them."""
    ech = Echelon(track=True)
    scales = []
    out = []
    for j in range(M.cols):
        c = M.col(j)
        w, L = _to_int(c)
        scales.append(L)
        if not w:
            out.append({j: 1})
            continue
        _, rel = ech.insert(w, tag=j)
        if rel is not None:
            vec = {t: x * scales[t] for t, x in rel.items()}
            g = _content(vec)
            if g > 1:
                vec = {t: x // g for t, x in vec.items()}
            out.append(vec)
    return SparseMat(M.cols, len(out), out, _trusted=True)


def _unit_positions(basis: SparseMat) -> dict[int, tuple[int, Rat]] | None:
    pos: dict[int, tuple[int, Rat]] = {}
    for j, c in enumerate(basis.columns):
        if len(c) != 1:
            return None
        (i, v), = c.items()
        if i in pos:
            return None
        pos[i] = (j, v)
    return pos


def solve_columns(basis: SparseMat, targets: SparseMat) -> SparseMat:
    """X with basis @ X == targets; basis columns must be independent."""
    if basis.rows != targets.rows:
        raise ValueError("row mismatch in solve")
    pos = _unit_positions(basis)
    out = []
    if pos is not None:
        for j, t in enumerate(targets.columns):
            col = {}
            for i, v in t.items():
                if i not in pos:
                    raise InvariantError(f"target column {j} is outside the column span")
                k, s = pos[i]
                col[k] = rat(Fraction(v) / s) if s != 1 else v
            out.append(col)
        return SparseMat(basis.cols, targets.cols, out, _trusted=True)
    ech = Echelon(track=True)
    scales = []
    for j in range(basis.cols):
        w, L = _to_int(basis.col(j))
        scales.append(L)
        _, rel = ech.insert(w, tag=j)
        if rel is not None:
            raise ValueError("basis columns are dependent")
    for j, t in enumerate(targets.columns):
        x = ech.express(t)
        if x is None:
            raise InvariantError(f"target column {j} is outside the column span")
        out.append({k: rat(v * scales[k]) for k, v in x.items()})
    return SparseMat(basis.cols, targets.cols, out, _trusted=True)


def image_basis(M: SparseMat) -> SparseMat:
    ech = Echelon()
    for c in M.columns:
        if c:
            ech.insert(c)
    return SparseMat(M.rows, len(ech), [ech.pivots[p] for p in sorted(ech.pivots)], _trusted=True)


# ---------------------------------------------------------------------------
# subquotients

class Subquotient:
    """The quotient space Z/B with Z, B given by spanning columns.

    The coset basis is canonical: boundaries are put in echelon form,
    cycles are reduced to the unique representatives vanishing on the
    boundary pivots, and those residues are brought to reduced echelon
    form with pivots in ascending order.
    """

    def __init__(self, cycles: SparseMat, boundaries: SparseMat, check: bool = True):
        if cycles.rows != boundaries.rows:
            raise ValueError("cycles and boundaries live in different ambient spaces")
        self.ambient_dim = cycles.rows
        self.cycles = cycles
        self.boundaries = boundaries
        self._bech = Echelon()
        for c in boundaries.columns:
            if c:
                self._bech.insert(c)
        if check:
            zech = self._zech
            for j, c in enumerate(boundaries.columns):
                if c and not zech.contains(c):
                    raise ContainmentError("boundary not contained in cycles", j)
        cech = Echelon()
        for c in cycles.columns:
            if c:
                r, _ = _to_int(c)
                _eliminate(r, self._bech.pivots)
                if r:
                    cech.insert(r)
        self._cpiv = _rref(cech.pivots)
        self._order = sorted(self._cpiv)

    @cached_property
    def _zech(self) -> Echelon:
        e = Echelon()
        for c in self.cycles.columns:
            if c:
                e.insert(c)
        return e

    @property
    def dim(self) -> int:
        return len(self._order)

    @cached_property
    def boundary_rank(self) -> int:
        return len(self._bech)

    @cached_property
    def cycle_rank(self) -> int:
        return self.boundary_rank + self.dim

    @cached_property
    def basis(self) -> SparseMat:
        """Coset representatives as columns of an ambient_dim x dim matrix."""
        return SparseMat(self.ambient_dim, self.dim, [self._cpiv[p] for p in self._order],
                         _trusted=True)

    @property
    def pivots(self) -> list[int]:
        return list(self._order)

    def is_boundary(self, vec: Mapping[int, Rat]) -> bool:
        return self._bech.contains(vec)

    def contains_cycle(self, vec: Mapping[int, Rat]) -> bool:
        return self._zech.contains(vec)

    def coords(self, vec: Mapping[int, Rat]) -> dict[int, Rat]:
        """Coordinates of the class of a cycle in the canonical coset basis."""
        v, L = _to_int(vec)
        s1 = _eliminate(v, self._bech.pivots)
        coeffs: dict[int, int] = {}
        s2 = _eliminate(v, self._cpiv, coeffs=coeffs)
        if v:
            raise WellDefinednessError("vector is not a cycle of this subquotient",
                                       {k: fmt_rat(x) for k, x in vec.items()})
        d = s1 * s2 * L
        index = {p: i for i, p in enumerate(self._order)}
        return {index[p]: rat(Fraction(c, d)) for p, c in coeffs.items() if c}

    def coords_matrix(self, M: SparseMat) -> SparseMat:
        return SparseMat(self.dim, M.cols, [self.coords(c) for c in M.columns], _trusted=True)

    def __repr__(self) -> str:
        return f"Subquotient(ambient={self.ambient_dim}, dim={self.dim})"


def _rref(piv: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    """Back-substitute an echelon basis to reduced form (primitive rows)."""
    out: dict[int, dict[int, int]] = {}
    for p in sorted(piv, reverse=True):
        v = dict(piv[p])
        _eliminate(v, out)
        g = _content(v)
        if g > 1:
            v = {k: x // g for k, x in v.items()}
        out[p] = v
    return out


def subquotient(cycles: SparseMat, boundaries: SparseMat, check: bool = True) -> Subquotient:
    return Subquotient(cycles, boundaries, check=check)


def quotient_space(dim: int, relations: SparseMat) -> Subquotient:
    """Q^dim modulo the span of the relation columns."""
    return Subquotient(SparseMat.identity(dim), relations, check=False)


def induced_map(f: SparseMat, src: Subquotient, dst: Subquotient, check: bool = True) -> SparseMat:
    """Matrix of the map induced by f from src to dst in canonical coset bases."""
    if f.cols != src.ambient_dim or f.rows != dst.ambient_dim:
        raise ValueError(f"map of shape {f.shape} does not fit {src!r} -> {dst!r}")
    if check:
        for j, z in enumerate(src.cycles.columns):
            img = f.apply(z)
            if img and not dst.contains_cycle(img):
                raise WellDefinednessError(f"image of cycle column {j} is not a cycle",
                                           {k: fmt_rat(x) for k, x in z.items()})
        for j, b in enumerate(src.boundaries.columns):
            img = f.apply(b)
            if img and not dst.is_boundary(img):
                raise WellDefinednessError(f"image of boundary column {j} is not a boundary",
                                           {k: fmt_rat(x) for k, x in b.items()})
    cols = [dst.coords(f.apply(c)) for c in src.basis.columns]
    return SparseMat(dst.dim, src.dim, cols, _trusted=True)
