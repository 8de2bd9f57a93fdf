"""The total complex of a multicomplex, with its column filtration.

Per total degree n the basis collects the bidegree blocks (a, n-a) in
descending a, so the filtration F_p (first index a <= p) is always a
coordinate suffix and membership is a mask, not a solve.
"""

from __future__ import annotations

from typing import NamedTuple

from .linalg import Mat
from .multicomplex import Multicomplex


class FilteredVector(NamedTuple):
    """An element of Tot_n in the fixed degree-n basis."""

    n: int
    coords: tuple


class TotalComplex:
    __slots__ = ("ring", "_blocks", "_offsets", "_dims", "_filt", "_diff")

    def __init__(self, ring, blocks, offsets, dims, filt, diff):
        self.ring = ring
        self._blocks = blocks      # n -> [(a, b, rank)] descending a
        self._offsets = offsets    # n -> {a: start}
        self._dims = dims          # n -> total dimension
        self._filt = filt          # n -> filtration index per coordinate
        self._diff = diff          # n -> Mat (Tot_n -> Tot_{n-1})

    def degrees(self):
        return sorted(self._dims)

    def dim(self, n: int) -> int:
        return self._dims.get(n, 0)

    def blocks(self, n: int):
        return self._blocks.get(n, [])

    def basis(self, n: int):
        """Ordered basis labels: (bidegree, local index) in storage order."""
        out = []
        for a, b, rank in self.blocks(n):
            out.extend(((a, b), k) for k in range(rank))
        return out

    def filtration_index(self, n: int):
        return self._filt.get(n, [])

    def d(self, n: int) -> Mat:
        m = self._diff.get(n)
        if m is None:
            m = Mat.zeros(self.ring, self.dim(n - 1), self.dim(n))
        return m

    def block_start(self, n: int, a: int):
        """Offset and width of the (a, n-a) block, or (None, 0) if absent."""
        start = self._offsets.get(n, {}).get(a)
        if start is None:
            return None, 0
        for aa, bb, rank in self._blocks[n]:
            if aa == a:
                return start, rank
        return None, 0

    def filtration_start(self, n: int, p: int) -> int:
        """First coordinate with filtration index <= p (they form a suffix)."""
        filt = self.filtration_index(n)
        lo, hi = 0, len(filt)
        while lo < hi:
            mid = (lo + hi) // 2
            if filt[mid] > p:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def zero_vector(self, n: int) -> FilteredVector:
        return FilteredVector(n, tuple(self.ring.zero() for _ in range(self.dim(n))))

    def project(self, x: FilteredVector, a: int) -> FilteredVector:
        filt = self.filtration_index(x.n)
        zero = self.ring.zero()
        return FilteredVector(
            x.n, tuple(c if fa == a else zero for c, fa in zip(x.coords, filt))
        )

    def block_of(self, x: FilteredVector, a: int):
        """The C_{a, n-a} coordinates of x as a local vector."""
        start, rank = self.block_start(x.n, a)
        if start is None:
            return []
        return list(x.coords[start:start + rank])

    def embed_block(self, n: int, a: int, local) -> FilteredVector:
        start, rank = self.block_start(n, a)
        if start is None:
            if any(local):
                raise ValueError(f"no block at column {a} in degree {n}")
            return self.zero_vector(n)
        if len(local) != rank:
            raise ValueError("local vector has the wrong length")
        coords = [self.ring.zero()] * self.dim(n)
        coords[start:start + rank] = [self.ring.normalize(v) for v in local]
        return FilteredVector(n, tuple(coords))

    def apply_d(self, x: FilteredVector) -> FilteredVector:
        return FilteredVector(x.n - 1, tuple(self.d(x.n).matvec(list(x.coords))))


def totalize(c: Multicomplex) -> TotalComplex:
    """Assemble Tot with (dx)_a = sum_i d_i (x)_{a+i}; d.d = 0 is asserted."""
    by_degree: dict = {}
    for (a, b), rank in c.ranks.items():
        by_degree.setdefault(a + b, []).append((a, b, rank))
    blocks, offsets, dims, filt = {}, {}, {}, {}
    for n, cells in by_degree.items():
        cells.sort(key=lambda t: -t[0])
        blocks[n] = cells
        offs, fl = {}, []
        pos = 0
        for a, b, rank in cells:
            offs[a] = pos
            fl.extend([a] * rank)
            pos += rank
        offsets[n] = offs
        dims[n] = pos
        filt[n] = fl

    diff = {}
    zero = c.ring.zero()
    degrees = sorted(dims)
    for n in degrees:
        rows_n = dims.get(n - 1, 0)
        cols_n = dims[n]
        if rows_n == 0 or cols_n == 0:
            continue
        grid = [[zero] * cols_n for _ in range(rows_n)]
        for a, b, rank in blocks[n]:
            cstart = offsets[n][a]
            for i in range(0, c.maxd + 1):
                m = c.dmap(i, a, b)
                if m is None:
                    continue
                rstart = offsets[n - 1].get(a - i)
                if rstart is None:
                    raise AssertionError("structure map into an absent block")
                for r in range(m.rows):
                    grow = grid[rstart + r]
                    mrow = m.data[r]
                    for col in range(rank):
                        if mrow[col]:
                            grow[cstart + col] = mrow[col]
        diff[n] = Mat._raw(c.ring, rows_n, cols_n, grid)

    t = TotalComplex(c.ring, blocks, offsets, dims, filt, diff)
    for n in degrees:
        if dims.get(n, 0) and dims.get(n - 1, 0) and dims.get(n - 2, 0):
            if not t.d(n - 1).mul(t.d(n)).is_zero():
                raise AssertionError(f"total differential does not square to zero at degree {n}")
    return t


def filtration_basis(t: TotalComplex, n: int, p: int) -> range:
    """Indices of the degree-n basis vectors with filtration index <= p."""
    return range(t.filtration_start(n, p), t.dim(n))


def project(t: TotalComplex, x: FilteredVector, a: int) -> FilteredVector:
    return t.project(x, a)
