"""Sparse pivoting elimination over Z, Q and GF(p).

Rows are dicts ``{col: value}`` and every column keeps the set of rows
where it is nonzero.  Pivots are chosen Markowitz-style: the column with
fewest entries first, then the shortest row holding an admissible pivot in
it.  Over Z only +-1 pivots are admissible until none are left; the rest of
the matrix is then diagonalized with Euclidean row and column steps, or
densified once it is small.
"""
from __future__ import annotations

import heapq
import logging
from math import gcd

import numpy as np

from . import _kernels
from .chain import SparseIntMatrix

log = logging.getLogger(__name__)

DENSE_LIMIT = 600          # densify the residual block below this many rows and columns
DENSE_MIN_FILL = 0.05      # ... and only if at least this fraction is nonzero


class _Eliminator:
    def __init__(self, m: SparseIntMatrix, p: int | None = None, mode: str = "Z"):
        self.mode = mode
        self.p = p
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}
        for (i, j), v in m.entries.items():
            if p is not None:
                v %= p
                if not v:
                    continue
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, set()).add(i)
        self.rank = 0
        self.diagonal: list[int] = []
        self._heap = [(len(s), j) for j, s in self.cols.items()]
        heapq.heapify(self._heap)
        self._stalled: set[int] = set()
        self._touched: set[int] = set()

    # -- primitive updates --------------------------------------------------

    def _axpy(self, target: int, f: int, source: dict[int, int]) -> None:
        """row[target] -= f * source (reduced mod p when working over GF(p))."""
        row = self.rows[target]
        cols = self.cols
        p = self.p
        touched = self._touched
        for c, w in source.items():
            old = row.get(c)
            if old is None:
                nv = -f * w
                if p is not None:
                    nv %= p
                if nv:
                    row[c] = nv
                    cols[c].add(target)
                    touched.add(c)
            else:
                nv = old - f * w
                if p is not None:
                    nv %= p
                if nv:
                    row[c] = nv
                else:
                    del row[c]
                    cols[c].discard(target)
                touched.add(c)
        if not row:
            del self.rows[target]

    def _remove_pivot(self, r: int, c: int) -> None:
        row = self.rows.pop(r)
        for c2 in row:
            s = self.cols.get(c2)
            if s is not None:
                s.discard(r)
                self._touched.add(c2)
        del self.cols[c]
        self._touched.discard(c)

    def _refresh(self) -> None:
        for c in self._touched:
            s = self.cols.get(c)
            if s is None:
                continue
            if not s:
                del self.cols[c]
                continue
            self._stalled.discard(c)
            heapq.heappush(self._heap, (len(s), c))
        self._touched.clear()

    def _eliminate_column(self, r: int, c: int, v: int) -> None:
        """Clear column ``c`` outside row ``r`` with pivot value ``v``."""
        prow = self.rows[r]
        others = [r2 for r2 in self.cols[c] if r2 != r]
        mode = self.mode
        for r2 in others:
            a = self.rows[r2][c]
            if mode == "p":
                f = a * pow(v, -1, self.p) % self.p
                self._axpy(r2, f, prow)
            elif v == 1 or v == -1:
                self._axpy(r2, a * v, prow)
            else:
                # fraction-free over Q: row2 <- v*row2 - a*row, then strip content
                row2 = self.rows[r2]
                for k in row2:
                    row2[k] *= v
                self._axpy(r2, a, prow)
                if r2 not in self.rows:
                    continue
                g = 0
                for w in row2.values():
                    g = gcd(g, w)
                    if g == 1:
                        break
                if g > 1:
                    for k in row2:
                        row2[k] //= g

    # -- pivot search -------------------------------------------------------

    def _admissible(self, v: int) -> bool:
        if self.mode == "Z":
            return v == 1 or v == -1
        return True

    def _next_pivot(self):
        heap = self._heap
        rows = self.rows
        while heap:
            cnt, c = heap[0]
            s = self.cols.get(c)
            if s is None or len(s) != cnt or c in self._stalled:
                heapq.heappop(heap)
                continue
            best = None
            best_len = None
            unit = False
            for r in s:
                v = rows[r][c]
                if not self._admissible(v):
                    continue
                ln = len(rows[r])
                isunit = v == 1 or v == -1
                # over Q prefer unit pivots, then short rows
                key = (not isunit, ln)
                if best is None or key < best_len:
                    best, best_len, unit = r, key, isunit
                    if isunit and ln == 1:
                        break
            if best is None:
                heapq.heappop(heap)
                self._stalled.add(c)
                continue
            heapq.heappop(heap)
            return best, c
        return None

    def run_pivots(self) -> None:
        while True:
            piv = self._next_pivot()
            if piv is None:
                return
            r, c = piv
            v = self.rows[r][c]
            self._eliminate_column(r, c, v)
            self._remove_pivot(r, c)
            self.rank += 1
            if self.mode == "Z":
                self.diagonal.append(abs(v))
            self._refresh()

    # -- Z-specific Euclidean phase ----------------------------------------

    def _min_entry(self):
        best = None
        for r, row in self.rows.items():
            for c, v in row.items():
                key = (abs(v), len(self.cols[c]) * len(row))
                if best is None or key < best[0]:
                    best = (key, r, c)
        return best

    def euclid_step(self) -> None:
        """Reduce around the smallest entry until it is isolated; records it
        as a diagonal entry."""
        while True:
            found = self._min_entry()
            if found is None:
                return
            _, r, c = found
            v = self.rows[r][c]
            for r2 in [x for x in self.cols[c] if x != r]:
                q = self.rows[r2][c] // v
                self._axpy(r2, q, self.rows[r])
            self._refresh()
            if len(self.cols.get(c, ())) > 1:
                continue
            # column is clean; column operations only touch row r now
            row = self.rows[r]
            dirty = False
            for c2 in [x for x in row if x != c]:
                w = row[c2]
                rem = w - (w // v) * v
                if rem:
                    row[c2] = rem
                    dirty = True
                else:
                    del row[c2]
                    self.cols[c2].discard(r)
                    self._touched.add(c2)
            self._refresh()
            if dirty:
                continue
            self.diagonal.append(abs(v))
            self.rank += 1
            self._remove_pivot(r, c)
            self._refresh()
            return

    def residual(self):
        rows = sorted(self.rows)
        cols = sorted(self.cols)
        return rows, cols

    def residual_dense(self, dtype=object):
        rows, cols = self.residual()
        cidx = {c: k for k, c in enumerate(cols)}
        a = np.zeros((len(rows), len(cols)), dtype=dtype)
        for i, r in enumerate(rows):
            for c, v in self.rows[r].items():
                a[i, cidx[c]] = v
        return a

    def small_and_dense(self) -> bool:
        nr, nc = len(self.rows), len(self.cols)
        if nr == 0 or nc == 0:
            return False
        if nr > DENSE_LIMIT or nc > DENSE_LIMIT:
            return False
        nnz = sum(len(r) for r in self.rows.values())
        return nnz >= DENSE_MIN_FILL * nr * nc


# ---------------------------------------------------------------------------
# dense integer diagonalization


def dense_diagonal(a) -> list[int]:
    """Nonzero diagonal of some diagonal form of an integer matrix, reached by
    unimodular row and column operations (Python ints throughout)."""
    m = [[int(x) for x in row] for row in np.asarray(a, dtype=object).tolist()]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    diag = []
    top = 0
    while top < nr and top < nc:
        # smallest nonzero entry of the remaining block
        best = None
        for i in range(top, nr):
            row = m[i]
            for j in range(top, nc):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        m[top], m[i] = m[i], m[top]
        if j != top:
            for row in m:
                row[top], row[j] = row[j], row[top]
        while True:
            v = m[top][top]
            done = True
            for i in range(top + 1, nr):
                x = m[i][top]
                if x:
                    q = x // v
                    ri, rt = m[i], m[top]
                    for k in range(top, nc):
                        if rt[k]:
                            ri[k] -= q * rt[k]
                    if ri[top]:
                        done = False
            for j in range(top + 1, nc):
                x = m[top][j]
                if x:
                    q = x // v
                    for i in range(top, nr):
                        if m[i][top]:
                            m[i][j] -= q * m[i][top]
                    if m[top][j]:
                        done = False
            if done:
                break
            # bring the smallest entry of row/column top to the pivot
            best = (abs(v), top, top)
            for i in range(top + 1, nr):
                x = m[i][top]
                if x and abs(x) < best[0]:
                    best = (abs(x), i, top)
            for j in range(top + 1, nc):
                x = m[top][j]
                if x and abs(x) < best[0]:
                    best = (abs(x), top, j)
            _, i, j = best
            if i != top:
                m[top], m[i] = m[i], m[top]
            if j != top:
                for row in m:
                    row[top], row[j] = row[j], row[top]
        diag.append(abs(m[top][top]))
        top += 1
    return diag


# ---------------------------------------------------------------------------
# public entry points


def integer_diagonal(m: SparseIntMatrix) -> list[int]:
    """Nonzero entries of a diagonal form of ``m`` over Z (not yet in
    divisibility order)."""
    el = _Eliminator(m, None, "Z")
    while el.rows:
        el.run_pivots()
        if not el.rows:
            break
        if el.small_and_dense():
            rest = dense_diagonal(el.residual_dense())
            el.diagonal.extend(rest)
            el.rank += len(rest)
            break
        el.euclid_step()
    return el.diagonal


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    el = _Eliminator(m, p, "p")
    while el.rows:
        if el.small_and_dense() and p < (1 << 31):
            a = el.residual_dense(dtype=np.int64)
            return el.rank + _kernels.rank_mod_p_dense(a, p)
        piv = el._next_pivot()
        if piv is None:
            break
        r, c = piv
        el._eliminate_column(r, c, el.rows[r][c])
        el._remove_pivot(r, c)
        el.rank += 1
        el._refresh()
    return el.rank


def rank_rational(m: SparseIntMatrix) -> int:
    el = _Eliminator(m, None, "Q")
    el.run_pivots()
    return el.rank
