"""Spectral sequence pages computed inside single columns, via witnesses.

An element x of C_{p,q} is an r-cycle when d_0 x = 0 and there are
witnesses z_j in C_{p-j, q+j} (1 <= j <= r-1) with
d_n x = sum_{i=0}^{n-1} d_i z_{p-n+i} for every n < r; it is an
r-boundary when it is hit by co-witnesses c_k in C_{p+k, q-k+1}
satisfying the dual constraint system.  The page differential sends [x]
to [d_r x - sum_{i=1}^{r-1} d_i z_{p-r+i}].

Everything is computed per bidegree: witnesses of an element of C_{p,q}
can only live in C_{p-j, q+j} (forced by the map bidegrees), which keeps
every linear system small.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .linalg import (
    Mat,
    MembershipError,
    QuotientPresentation,
    SubmodulePresentation,
    kernel,
    solve,
    subquotient,
    vec_sub,
    zero_vec,
)
from .multicomplex import Multicomplex


class WellDefinednessError(RuntimeError):
    """A page differential value escaped the target cycle module.

    This never happens for a valid multicomplex; it signals an engine bug
    or invalid input and must abort loudly.
    """


@dataclass(frozen=True)
class WitnessTuple:
    """Witnesses z_j in C_{p-j, q+j} certifying that some x is an r-cycle."""

    r: int
    p: int
    q: int
    z: dict  # j -> coordinate list, 1 <= j <= r-1


@dataclass(frozen=True)
class CoWitnessTuple:
    """Co-witnesses c_k in C_{p+k, q-k+1} certifying an r-boundary."""

    r: int
    p: int
    q: int
    c: dict  # k -> coordinate list, 0 <= k <= r-1


@dataclass(frozen=True)
class PageEntry:
    r: int
    p: int
    q: int
    zr: SubmodulePresentation
    br: SubmodulePresentation
    quot: QuotientPresentation

    @property
    def invariants(self):
        return self.quot.invariants


@dataclass(frozen=True)
class PageDifferential:
    """Matrix of the page differential in the canonical quotient generators."""

    r: int
    p: int
    q: int
    source_invariants: tuple
    target_invariants: tuple
    rows: tuple  # len(target_invariants) x len(source_invariants)

    @property
    def target(self):
        return (self.p - self.r, self.q + self.r - 1)

    def is_zero(self) -> bool:
        return all(not v for row in self.rows for v in row)

    def apply(self, coords, target_quot: QuotientPresentation):
        out = [sum(a * b for a, b in zip(row, coords)) for row in self.rows]
        return target_quot.canon(out)


class Page:
    """All entries and differentials of one page over the support window."""

    def __init__(self, r, entries, deltas):
        self.r = r
        self.entries = entries  # (p, q) -> PageEntry
        self.deltas = deltas    # (p, q) -> PageDifferential

    def invariants_table(self):
        return {
            cell: e.invariants for cell, e in sorted(self.entries.items()) if e.invariants
        }

    def same_invariants(self, other: "Page") -> bool:
        return self.invariants_table() == other.invariants_table()

    def deltas_all_zero(self) -> bool:
        return all(d.is_zero() for d in self.deltas.values())


class SpectralPages:
    """Witness-route page engine for one multicomplex, with per-cell caches."""

    def __init__(self, c: Multicomplex):
        self.c = c
        self._zr = {}
        self._br = {}
        self._entries = {}
        self._deltas = {}

    # -- cycle and boundary modules ------------------------------------

    def zr(self, r: int, p: int, q: int) -> SubmodulePresentation:
        if r < 1:
            raise ValueError("r-cycles are defined for r >= 1")
        key = (r, p, q)
        cached = self._zr.get(key)
        if cached is not None:
            return cached
        c = self.c
        nx = c.rank(p, q)
        if nx == 0:
            res = SubmodulePresentation.zero(c.ring, 0)
        else:
            prev = self._zr.get((r - 1, p, q))
            if prev is not None and prev.rank == 0:
                res = prev  # nested inside the previous cycle module
            else:
                res = self._compute_zr(r, p, q, nx)
        self._zr[key] = res
        return res

    def _compute_zr(self, r, p, q, nx):
        c = self.c
        ring = c.ring
        zranks = [c.rank(p - j, q + j) for j in range(1, r)]
        widths = [nx] + zranks
        offs = [0]
        for wdt in widths:
            offs.append(offs[-1] + wdt)
        total = offs[-1]
        grid = []
        for n in range(0, r):
            tr = c.rank(p - n, q + n - 1)
            if tr == 0:
                continue
            start = len(grid)
            zero = ring.zero()
            grid.extend([zero] * total for _ in range(tr))
            mn = c.dmap(n, p, q)
            if mn is not None:
                for i in range(tr):
                    grid[start + i][0:nx] = mn.data[i]
            if n >= 1:
                for j in range(1, n + 1):
                    mj = c.dmap(n - j, p - j, q + j)
                    if mj is not None:
                        o = offs[j]
                        for i in range(tr):
                            row = grid[start + i]
                            for col, v in enumerate(mj.data[i]):
                                if v:
                                    row[o + col] = ring.neg(v)
        mat = Mat._raw(ring, len(grid), total, grid)
        ker = kernel(mat)
        return SubmodulePresentation.span(ring, nx, [g[:nx] for g in ker.gens])

    def br(self, r: int, p: int, q: int) -> SubmodulePresentation:
        if r < 1:
            raise ValueError("r-boundaries are defined for r >= 1")
        key = (r, p, q)
        cached = self._br.get(key)
        if cached is not None:
            return cached
        res, _ = self._compute_br(r, p, q)
        self._br[key] = res
        return res

    def br_with_cowitnesses(self, r, p, q):
        """The boundary module together with co-witness tuples generating it."""
        res, cows = self._compute_br(r, p, q)
        self._br[(r, p, q)] = res
        return res, cows

    def _compute_br(self, r, p, q):
        c = self.c
        ring = c.ring
        nx = c.rank(p, q)
        if nx == 0:
            return SubmodulePresentation.zero(ring, 0), []
        cranks = [c.rank(p + k, q - k + 1) for k in range(r)]
        offs = [0]
        for wdt in cranks:
            offs.append(offs[-1] + wdt)
        total = offs[-1]
        if total == 0:
            return SubmodulePresentation.zero(ring, nx), []
        grid = []
        for l in range(1, r):
            tr = c.rank(p + l, q - l)
            if tr == 0:
                continue
            start = len(grid)
            zero = ring.zero()
            grid.extend([zero] * total for _ in range(tr))
            for k in range(l, r):
                mk = c.dmap(k - l, p + k, q - k + 1)
                if mk is not None:
                    o = offs[k]
                    for i in range(tr):
                        row = grid[start + i]
                        row[o:o + mk.cols] = mk.data[i]
        constraints = Mat._raw(ring, len(grid), total, grid)
        free = kernel(constraints)
        value_cols = []
        cows = []
        for g in free.gens:
            image_vec = zero_vec(ring, nx)
            cw = {}
            for k in range(r):
                local = list(g[offs[k]:offs[k + 1]])
                cw[k] = local
                mk = c.dmap(k, p + k, q - k + 1)
                if mk is not None and any(local):
                    image_vec = [a + b for a, b in zip(image_vec, mk.matvec(local))]
            if ring.kind == "F":
                image_vec = [v % ring.p for v in image_vec]
            value_cols.append(image_vec)
            cows.append(CoWitnessTuple(r, p, q, cw))
        return SubmodulePresentation.span(ring, nx, value_cols), cows

    # -- entries ---------------------------------------------------------

    def entry(self, r: int, p: int, q: int) -> PageEntry:
        key = (r, p, q)
        cached = self._entries.get(key)
        if cached is not None:
            return cached
        c = self.c
        nx = c.rank(p, q)
        if r == 0:
            zr = SubmodulePresentation.full(c.ring, nx)
            br = SubmodulePresentation.zero(c.ring, nx)
        else:
            zr = self.zr(r, p, q)
            br = self.br(r, p, q)
        quot = subquotient(zr, br)  # raises InclusionError on a B_r <= Z_r breach
        e = PageEntry(r, p, q, zr, br, quot)
        self._entries[key] = e
        return e

    def page0(self, p: int, q: int):
        return self.entry(0, p, q), self.delta(0, p, q)

    # -- witnesses ---------------------------------------------------------

    def witness(self, r, p, q, x, scramble=None) -> WitnessTuple:
        """A deterministic witness tuple for x in Z_r; raises if x is not a cycle.

        `scramble` permutes the unknowns before the canonical solve, giving
        a different (still valid) witness for independence tests.
        """
        c = self.c
        ring = c.ring
        nx = c.rank(p, q)
        x = [ring.normalize(v) for v in x]
        if len(x) != nx:
            raise ValueError("element length does not match the cell rank")
        m0 = c.dmap(0, p, q)
        if m0 is not None and any(m0.matvec(x)):
            raise MembershipError(f"element is not a d_0-cycle at ({p},{q})")
        zranks = [c.rank(p - j, q + j) for j in range(1, r)]
        offs = [0]
        for wdt in zranks:
            offs.append(offs[-1] + wdt)
        total = offs[-1]
        grid = []
        rhs = []
        for n in range(1, r):
            tr = c.rank(p - n, q + n - 1)
            if tr == 0:
                continue
            start = len(grid)
            zero = ring.zero()
            grid.extend([zero] * total for _ in range(tr))
            mn = c.dmap(n, p, q)
            rhs.extend(mn.matvec(x) if mn is not None else zero_vec(ring, tr))
            for j in range(1, n + 1):
                mj = c.dmap(n - j, p - j, q + j)
                if mj is not None:
                    o = offs[j - 1]
                    for i in range(tr):
                        grid[start + i][o:o + mj.cols] = mj.data[i]
        if scramble is None:
            mat = Mat._raw(ring, len(grid), total, grid)
            sol = solve(mat, rhs)
        else:
            perm = list(range(total))
            random.Random(scramble).shuffle(perm)
            mat = Mat._raw(ring, len(grid), total, [[row[j] for j in perm] for row in grid])
            permuted = solve(mat, rhs)
            sol = None
            if permuted is not None:
                sol = [ring.zero()] * total
                for pos, j in enumerate(perm):
                    sol[j] = permuted[pos]
        if sol is None:
            raise MembershipError(f"element is not an r={r} cycle at ({p},{q})")
        z = {j: sol[offs[j - 1]:offs[j]] for j in range(1, r)}
        return WitnessTuple(r, p, q, z)

    # -- differentials -------------------------------------------------------

    def delta(self, r: int, p: int, q: int) -> PageDifferential:
        key = (r, p, q)
        cached = self._deltas.get(key)
        if cached is not None:
            return cached
        c = self.c
        ring = c.ring
        src = self.entry(r, p, q)
        tp, tq = p - r, q + r - 1
        tgt = self.entry(r, tp, tq)
        cols = []
        for g in src.quot.gens:
            v = self._delta_value(r, p, q, list(g))
            try:
                cols.append(tgt.quot.reduce(v))
            except MembershipError as exc:
                raise WellDefinednessError(
                    f"Delta_{r} value at ({p},{q}) escaped Z_{r} at ({tp},{tq}): {exc}"
                ) from exc
        rows = tuple(
            tuple(cols[j][i] for j in range(len(cols)))
            for i in range(len(tgt.quot.invariants))
        )
        d = PageDifferential(r, p, q, src.quot.invariants, tgt.quot.invariants, rows)
        if ring.kind == "Z":
            self._check_torsion_compat(d)
        self._deltas[key] = d
        return d

    def _delta_value(self, r, p, q, x, wit: WitnessTuple | None = None):
        """d_r x - sum_{i=1}^{r-1} d_i z_{p-r+i} as an element of C_{p-r, q+r-1}."""
        c = self.c
        ring = c.ring
        tgt_rank = c.rank(p - r, q + r - 1)
        mr = c.dmap(r, p, q)
        v = mr.matvec(x) if mr is not None else zero_vec(ring, tgt_rank)
        if r >= 1:
            if wit is None:
                wit = self.witness(r, p, q, x)
            for i in range(1, r):
                j = r - i
                mi = c.dmap(i, p - j, q + j)
                zj = wit.z.get(j)
                if mi is not None and zj is not None and any(zj):
                    v = vec_sub(ring, v, mi.matvec(zj))
        return v

    def delta_with_witness(self, r, p, q, x, scramble=None):
        """The reduced differential of a single element, for a chosen witness."""
        wit = self.witness(r, p, q, x, scramble=scramble) if r >= 1 else None
        v = self._delta_value(r, p, q, x, wit=wit)
        return self.entry(r, p - r, q + r - 1).quot.reduce(v)

    def _check_torsion_compat(self, d: PageDifferential):
        for j, ds in enumerate(d.source_invariants):
            if not ds:
                continue
            for i, dt in enumerate(d.target_invariants):
                val = ds * d.rows[i][j]
                if (dt and val % dt) or (not dt and val):
                    raise WellDefinednessError(
                        f"Delta_{d.r} at ({d.p},{d.q}) violates torsion compatibility"
                    )

    # -- pages ----------------------------------------------------------------

    def page(self, r: int) -> Page:
        cells = self.c.support
        entries = {cell: self.entry(r, *cell) for cell in cells}
        deltas = {cell: self.delta(r, *cell) for cell in cells}
        return Page(r, entries, deltas)

    def stabilization_bound(self) -> int:
        """Pages at or beyond this index are all equal (finite support)."""
        cols = [a for a, _ in self.c.ranks]
        if not cols:
            return 2
        return max(cols) - min(cols) + 2

    def einf(self) -> Page:
        rmax = self.stabilization_bound()
        stable = self.page(rmax)
        beyond = self.page(rmax + 1)
        if not stable.same_invariants(beyond):
            raise AssertionError("page did not stabilize at the support-width bound")
        if not (stable.deltas_all_zero() and beyond.deltas_all_zero()):
            raise AssertionError("stabilized page carries a nonzero differential")
        return stable


def prop25_witness(c: Multicomplex, r, p, q, cow: CoWitnessTuple) -> WitnessTuple:
    """The explicit witnesses z_{p-j} = -sum_i d_{j+i} c_{p+i} for a boundary.

    Verifies the co-witness constraint system first, and asserts that the
    produced witnesses satisfy the cycle equations for x = sum_k d_k c_{p+k}.
    """
    ring = c.ring
    if not star2_holds(c, r, p, q, cow):
        raise ValueError("co-witness tuple does not satisfy the boundary constraints")
    z = {}
    for j in range(1, r):
        rank_j = c.rank(p - j, q + j)
        acc = zero_vec(ring, rank_j)
        for i in range(0, r):
            ci = cow.c.get(i)
            m = c.dmap(j + i, p + i, q - i + 1)
            if m is not None and ci is not None and any(ci):
                acc = vec_sub(ring, acc, m.matvec(ci))
        z[j] = acc
    x = boundary_value(c, r, p, q, cow)
    wit = WitnessTuple(r, p, q, z)
    assert star1_holds(c, r, p, q, x, wit), "explicit witnesses fail the cycle equations"
    return wit


def boundary_value(c: Multicomplex, r, p, q, cow: CoWitnessTuple):
    """x = sum_{k<r} d_k c_{p+k} in C_{p,q}."""
    ring = c.ring
    x = zero_vec(ring, c.rank(p, q))
    for k in range(r):
        ck = cow.c.get(k)
        m = c.dmap(k, p + k, q - k + 1)
        if m is not None and ck is not None and any(ck):
            x = [a + b for a, b in zip(x, m.matvec(ck))]
    if ring.kind == "F":
        x = [v % ring.p for v in x]
    return x


def star1_holds(c: Multicomplex, r, p, q, x, wit: WitnessTuple) -> bool:
    """Check d_0 x = 0 and d_n x = sum_{i<n} d_i z_{p-n+i} for 1 <= n < r."""
    ring = c.ring
    m0 = c.dmap(0, p, q)
    if m0 is not None and any(m0.matvec(x)):
        return False
    for n in range(1, r):
        tr = c.rank(p - n, q + n - 1)
        mn = c.dmap(n, p, q)
        lhs = mn.matvec(x) if mn is not None else zero_vec(ring, tr)
        rhs = zero_vec(ring, tr)
        for j in range(1, n + 1):
            mj = c.dmap(n - j, p - j, q + j)
            zj = wit.z.get(j)
            if mj is not None and zj is not None and any(zj):
                rhs = [a + b for a, b in zip(rhs, mj.matvec(zj))]
        if ring.kind == "F":
            lhs = [v % ring.p for v in lhs]
            rhs = [v % ring.p for v in rhs]
        if lhs != rhs:
            return False
    return True


def star2_holds(c: Multicomplex, r, p, q, cow: CoWitnessTuple) -> bool:
    """Check the boundary constraints 0 = sum_{k>=l} d_{k-l} c_{p+k}, 1 <= l < r."""
    ring = c.ring
    for l in range(1, r):
        tr = c.rank(p + l, q - l)
        acc = zero_vec(ring, tr)
        for k in range(l, r):
            mk = c.dmap(k - l, p + k, q - k + 1)
            ck = cow.c.get(k)
            if mk is not None and ck is not None and any(ck):
                acc = [a + b for a, b in zip(acc, mk.matvec(ck))]
        if ring.kind == "F":
            acc = [v % ring.p for v in acc]
        if any(acc):
            return False
    return True


# Spec-surface convenience wrappers (one-shot; the engine caches).


def compute_zr(c: Multicomplex, r, p, q) -> SubmodulePresentation:
    return SpectralPages(c).zr(r, p, q)


def compute_br(c: Multicomplex, r, p, q) -> SubmodulePresentation:
    return SpectralPages(c).br(r, p, q)


def witness_for(c: Multicomplex, r, p, q, x, scramble=None) -> WitnessTuple:
    return SpectralPages(c).witness(r, p, q, x, scramble=scramble)


def page_entry(c: Multicomplex, r, p, q) -> PageEntry:
    return SpectralPages(c).entry(r, p, q)


def delta_r(c: Multicomplex, r, p, q) -> PageDifferential:
    return SpectralPages(c).delta(r, p, q)


def full_page(c: Multicomplex, r) -> Page:
    return SpectralPages(c).page(r)


def stabilization_bound(c: Multicomplex) -> int:
    return SpectralPages(c).stabilization_bound()


def einf(c: Multicomplex) -> Page:
    return SpectralPages(c).einf()
