"""Exact integer and field linear algebra.

Integer matrices are lists of sparse rows ({column: nonzero int}); the
Hermite normal form here is canonical (positive pivots, entries above a
pivot reduced into [0, pivot)), so equal row lattices have identical HNFs.
Field work uses dense rows; for prime fields there is a numpy int64 fast
path kept bit-identical to the pure-Python one.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .rings import Ring

SparseRow = dict[int, int]


def sparse_from_dense(rows: Iterable[Sequence[int]]) -> list[SparseRow]:
    return [{j: int(v) for j, v in enumerate(r) if v} for r in rows]


def dense_from_sparse(rows: Sequence[SparseRow], ncols: int) -> list[list[int]]:
    out = [[0] * ncols for _ in rows]
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[i][j] = v
    return out


def _row_addmul(target: SparseRow, source: SparseRow, c: int) -> None:
    if c == 0:
        return
    for j, v in source.items():
        w = target.get(j, 0) + c * v
        if w:
            target[j] = w
        else:
            target.pop(j, None)


def _leading(row: SparseRow) -> int:
    return min(row) if row else -1


def hnf(rows: Iterable[Sequence[int] | SparseRow], ncols: int | None = None,
        transform: bool = False):
    """Canonical row Hermite normal form.

    Returns (H, U) with H = U*M when transform is requested, else H alone.
    H keeps one row per original row (zero rows included, sorted last) so
    that U stays square unimodular; use hnf_basis for the stripped basis.
    Pivot choice is deterministic: leftmost column, then smallest |value|,
    then lowest row index, so results are bit-stable.
    """
    work: list[SparseRow]
    first = None
    rows = list(rows)
    if rows and not isinstance(rows[0], dict):
        work = sparse_from_dense(rows)  # type: ignore[arg-type]
    else:
        work = [dict(r) for r in rows]  # type: ignore[union-attr]
    m = len(work)
    U = [{i: 1} for i in range(m)] if transform else None
    if ncols is None:
        ncols = 1 + max((max(r) for r in work if r), default=-1)

    pivot_rows: list[int] = []
    used = [False] * m
    for col in range(ncols):
        while True:
            cand = [i for i in range(m) if not used[i] and work[i] and _leading(work[i]) == col]
            if not cand:
                break
            if len(cand) == 1:
                piv = cand[0]
            else:
                piv = min(cand, key=lambda i: (abs(work[i][col]), i))
                done = True
                for i in cand:
                    if i == piv:
                        continue
                    q = work[i][col] // work[piv][col]
                    _row_addmul(work[i], work[piv], -q)
                    if U is not None:
                        _row_addmul(U[i], U[piv], -q)
                    if work[i].get(col, 0):
                        done = False
                if not done:
                    continue
            if work[piv][col] < 0:
                work[piv] = {j: -v for j, v in work[piv].items()}
                if U is not None:
                    U[piv] = {j: -v for j, v in U[piv].items()}
            used[piv] = True
            pivot_rows.append(piv)
            break

    # Reduce entries above each pivot into [0, pivot).
    for r in reversed(pivot_rows):
        col = _leading(work[r])
        p = work[r][col]
        for i in range(m):
            if i != r and used[i] and work[i].get(col, 0):
                if _leading(work[i]) < col:
                    q = work[i][col] // p
                    _row_addmul(work[i], work[r], -q)
                    if U is not None:
                        _row_addmul(U[i], U[r], -q)

    order = pivot_rows + [i for i in range(m) if i not in pivot_rows]
    H = [work[i] for i in order]
    if transform:
        assert U is not None
        return H, [U[i] for i in order]
    return H


def hnf_basis(rows: Iterable[Sequence[int] | SparseRow], ncols: int | None = None) -> list[SparseRow]:
    """Nonzero rows of the canonical HNF: a basis of the row lattice."""
    return [r for r in hnf(rows, ncols) if r]


def hnf_dense(mat: Sequence[Sequence[int]]):
    """Dense convenience wrapper returning (H, U) as lists of lists."""
    ncols = len(mat[0]) if mat else 0
    H, U = hnf(mat, ncols, transform=True)
    return dense_from_sparse(H, ncols), dense_from_sparse(U, len(mat))


def kernel_int(rows: Sequence[Sequence[int] | SparseRow], ncols: int | None = None) -> list[SparseRow]:
    """Basis of the left integer kernel {x : x*M = 0} (a saturated lattice).

    Zero rows of the HNF correspond to kernel vectors read off from U.
    """
    rows = list(rows)
    H, U = hnf(rows, ncols, transform=True)
    return hnf_basis([u for h, u in zip(H, U) if not h], ncols=len(rows))


def solve_int(hnf_rows: Sequence[SparseRow], target: SparseRow | Sequence[int]):
    """Solve x * H = t for an HNF basis H; returns integer coords or None."""
    if not isinstance(target, dict):
        target = {j: int(v) for j, v in enumerate(target) if v}
    t = dict(target)
    coords = []
    for row in hnf_rows:
        if not row:
            coords.append(0)
            continue
        col = _leading(row)
        v = t.get(col, 0)
        if v % row[col] != 0:
            return None
        c = v // row[col]
        coords.append(c)
        _row_addmul(t, row, -c)
    if t:
        return None
    return coords


def snf_diag(mat: Sequence[Sequence[int]]) -> list[int]:
    """Elementary divisors d1 | d2 | ... (nonzero ones) of an integer matrix."""
    A = [list(map(int, r)) for r in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    divisors: list[int] = []
    top = 0
    while True:
        found = None
        for i in range(top, m):
            for j in range(top, n):
                if A[i][j]:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i0, j0 = found
        A[top], A[i0] = A[i0], A[top]
        for r in A:
            r[top], r[j0] = r[j0], r[top]
        while True:
            # Pick the smallest nonzero entry in the working block as pivot.
            bi, bj, bv = top, top, 0
            for i in range(top, m):
                for j in range(top, n):
                    v = abs(A[i][j])
                    if v and (bv == 0 or v < bv):
                        bi, bj, bv = i, j, v
            if bv == 0:
                break
            A[top], A[bi] = A[bi], A[top]
            for r in A:
                r[top], r[bj] = r[bj], r[top]
            p = A[top][top]
            dirty = False
            for i in range(top + 1, m):
                if A[i][top]:
                    q = A[i][top] // p
                    for j in range(top, n):
                        A[i][j] -= q * A[top][j]
                    if A[i][top]:
                        dirty = True
            for j in range(top + 1, n):
                if A[top][j]:
                    q = A[top][j] // p
                    for i in range(top, m):
                        A[i][j] -= q * A[i][top]
                    if A[top][j]:
                        dirty = True
            if dirty:
                continue
            # Pivot must divide every remaining entry; if not, mix the row in.
            offender = None
            for i in range(top + 1, m):
                for j in range(top + 1, n):
                    if A[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(top, n):
                A[top][j] += A[offender][j]
        d = abs(A[top][top])
        if d:
            divisors.append(d)
        top += 1
        if top >= m or top >= n:
            break
    return divisors


def det_int(mat: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [list(map(int, r)) for r in mat]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


class ZModule:
    """A lattice of integer row vectors inside Z^ncols, held in canonical HNF."""

    def __init__(self, rows: Iterable[Sequence[int] | SparseRow], ncols: int):
        self.ncols = ncols
        self.rows = hnf_basis(rows, ncols)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZModule)
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        raise TypeError("unhashable")

    def contains(self, vec: Sequence[int] | SparseRow) -> bool:
        return solve_int(self.rows, vec) is not None

    def coords(self, vec: Sequence[int] | SparseRow):
        return solve_int(self.rows, vec)

    def sum(self, other: "ZModule") -> "ZModule":
        self._check(other)
        return ZModule(self.rows + other.rows, self.ncols)

    def intersection(self, other: "ZModule") -> "ZModule":
        self._check(other)
        # x*A = y*B  <=>  (x, y) in left kernel of [[A], [-B]] after stacking.
        stacked = self.rows + [{j: -v for j, v in r.items()} for r in other.rows]
        ker = kernel_int(stacked, self.ncols)
        mine = len(self.rows)
        out: list[SparseRow] = []
        for k in ker:
            acc: SparseRow = {}
            for i, c in k.items():
                if i < mine:
                    _row_addmul(acc, self.rows[i], c)
            out.append(acc)
        return ZModule(out, self.ncols)

    def index_in(self, other: "ZModule") -> int:
        """[other : self] for a full-rank containment self <= other."""
        self._check(other)
        if self.rank != other.rank:
            raise ValueError("index undefined: ranks differ")
        coeff = []
        for r in self.rows:
            c = other.coords(r)
            if c is None:
                raise ValueError("index undefined: not a sublattice")
            coeff.append(c)
        d = det_int(coeff)
        if d == 0:
            raise ValueError("index undefined: rank-deficient")
        return abs(d)

    def _check(self, other: "ZModule") -> None:
        if self.ncols != other.ncols:
            raise ValueError("ambient dimensions differ")


# ---------------------------------------------------------------- field side


def rref(ring: Ring, rows: Sequence[Sequence], ncols: int):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    if not ring.is_field:
        raise ValueError(f"{ring.kind} is not a field")
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(work)) if not ring.is_zero(work[i][col])), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = ring.inv(work[r][col])
        work[r] = [ring.mul(inv, v) for v in work[r]]
        for i in range(len(work)):
            if i != r and not ring.is_zero(work[i][col]):
                c = work[i][col]
                work[i] = [ring.sub(a, ring.mul(c, b)) for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return [w for w in work if any(not ring.is_zero(v) for v in w)], pivots


def field_kernel(ring: Ring, rows: Sequence[Sequence], ncols: int):
    """Basis of the right kernel {v : M v = 0} over a field, echelonized."""
    R, pivots = rref(ring, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ring.zero()] * ncols
        v[f] = ring.one()
        for row, p in zip(R, pivots):
            v[p] = ring.neg(row[f])
        basis.append(v)
    return basis


# numpy fast path for prime fields --------------------------------------------


def rref_modp(mat: np.ndarray, p: int):
    """RREF of an int matrix over F_p (exact; int64). Returns (R, pivots)."""
    A = np.array(mat, dtype=np.int64) % p
    nrows, ncols = A.shape
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(A[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, col]), -1, p)) % p
        hits = np.nonzero(A[:, col])[0]
        hits = hits[hits != r]
        if hits.size:
            A[hits] = (A[hits] - np.outer(A[hits, col], A[r])) % p
        pivots.append(col)
        r += 1
    return A[:r], pivots


def rank_modp(mat: np.ndarray, p: int) -> int:
    return len(rref_modp(mat, p)[1])


def kernel_modp(mat: np.ndarray, p: int) -> np.ndarray:
    """Right-kernel basis over F_p as rows of an int64 array (echelonized)."""
    A = np.array(mat, dtype=np.int64) % p
    ncols = A.shape[1]
    R, pivots = rref_modp(A, p)
    free = [c for c in range(ncols) if c not in pivots]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for row, piv in zip(R, pivots):
            out[k, piv] = (-row[f]) % p
    return out


def row_space_modp(mat: np.ndarray, p: int) -> np.ndarray:
    R, _ = rref_modp(mat, p)
    return R


def in_row_space_modp(vec: np.ndarray, rref_rows: np.ndarray, pivots: list[int], p: int) -> bool:
    v = np.array(vec, dtype=np.int64) % p
    for row, piv in zip(rref_rows, pivots):
        c = int(v[piv])
        if c:
            v = (v - c * row) % p
    return not v.any()
