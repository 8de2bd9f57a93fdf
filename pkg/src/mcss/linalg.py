"""Exact dense linear algebra over QQ, GF(p) and ZZ.

Solve, kernel, image, subquotients and integer normal forms, all
deterministic: canonical column-echelon (fields) and column Hermite
(integers) forms make equal subspaces/lattices structurally equal, and
particular solutions are pinned (free variables zero over a field,
Hermite back-substitution over the integers).

Matrices are dense row-major lists; at the scale this engine targets
(blocks of at most a few hundred) exact arithmetic on dense data wins on
simplicity and has no pivoting subtleties.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .rings import Ring, ZZ


class InclusionError(ValueError):
    """A claimed submodule inclusion does not hold."""


class MembershipError(ValueError):
    """An element lies outside the submodule it was claimed to be in."""


def _xgcd(a: int, b: int):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g = x*a + y*b."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


# ---------------------------------------------------------------------------
# matrices


def _int_row_q(row):
    """Scale one row of rationals to integers: returns (ints, denominator).

    Accepts plain ints too (they expose numerator/denominator).
    """
    den = 1
    for v in row:
        dv = v.denominator
        if dv != 1:
            den = den * dv // gcd(den, dv)
    if den == 1:
        return [v.numerator for v in row], 1
    return [v.numerator * (den // v.denominator) for v in row], den


class Mat:
    """Immutable dense matrix over one of the three rings.

    >>> from mcss.rings import QQ
    >>> m = Mat(QQ, 2, 2, [[1, 2], [3, 4]])
    >>> m.matvec([1, 1])
    [Fraction(3, 1), Fraction(7, 1)]
    """

    __slots__ = ("ring", "rows", "cols", "data", "_qint")

    def __init__(self, ring: Ring, rows: int, cols: int, entries):
        norm = ring.normalize
        data = [[norm(v) for v in row] for row in entries]
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entry grid does not match shape {rows}x{cols}")
        self._set(ring, rows, cols, data)

    def _set(self, ring, rows, cols, data):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "_qint", None)

    def _q_rows(self):
        """Cached integer form of the rows (rationals only)."""
        cached = self._qint
        if cached is None:
            cached = [_int_row_q(row) for row in self.data]
            object.__setattr__(self, "_qint", cached)
        return cached

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def _raw(cls, ring, rows, cols, data):
        m = object.__new__(cls)
        m._set(ring, rows, cols, data)
        return m

    @classmethod
    def zeros(cls, ring, rows, cols):
        z = ring.zero()
        return cls._raw(ring, rows, cols, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero(), ring.one()
        return cls._raw(ring, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, ring, rows_of_values, cols=None):
        rows_of_values = [list(r) for r in rows_of_values]
        nc = len(rows_of_values[0]) if rows_of_values else (cols or 0)
        return cls(ring, len(rows_of_values), nc, rows_of_values)

    @classmethod
    def from_cols(cls, ring, ambient_rank, cols_of_values):
        cols_of_values = [list(c) for c in cols_of_values]
        data = [[c[i] for c in cols_of_values] for i in range(ambient_rank)]
        return cls(ring, ambient_rank, len(cols_of_values), data)

    def col(self, j):
        return [row[j] for row in self.data]

    def to_cols(self):
        return [[row[j] for row in self.data] for j in range(self.cols)]

    def matvec(self, v):
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        ring = self.ring
        if ring.kind == "F":
            p = ring.p
            return [sum(a * b for a, b in zip(row, v)) % p for row in self.data]
        if ring.kind == "Z":
            return [sum(a * b for a, b in zip(row, v)) for row in self.data]
        vint, vden = _int_row_q(v)
        return [
            Fraction(sum(a * b for a, b in zip(row, vint)), den * vden)
            for row, den in self._q_rows()
        ]

    def mul(self, other: "Mat") -> "Mat":
        if self.cols != other.rows or self.ring != other.ring:
            raise ValueError("shape or ring mismatch in product")
        ring = self.ring
        if ring.kind == "Q":
            cols = [other.col(j) for j in range(other.cols)]
            icols = [_int_row_q(col) for col in cols]
            data = [
                [
                    Fraction(sum(a * b for a, b in zip(row, cint)), den * cden)
                    for cint, cden in icols
                ]
                for row, den in self._q_rows()
            ]
            return Mat._raw(ring, self.rows, other.cols, data)
        ocols = other.to_cols()
        if ring.kind == "F":
            p = ring.p
            data = [[sum(a * b for a, b in zip(row, c)) % p for c in ocols] for row in self.data]
        else:
            data = [[sum(a * b for a, b in zip(row, c)) for c in ocols] for row in self.data]
        return Mat._raw(ring, self.rows, other.cols, data)

    def __mul__(self, other):
        return self.mul(other)

    def add(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols) or self.ring != other.ring:
            raise ValueError("shape or ring mismatch in sum")
        ring = self.ring
        if ring.kind == "F":
            p = ring.p
            data = [[(a + b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        else:
            data = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        return Mat._raw(ring, self.rows, self.cols, data)

    def sub(self, other: "Mat") -> "Mat":
        return self.add(other.neg())

    def neg(self) -> "Mat":
        ring = self.ring
        if ring.kind == "F":
            p = ring.p
            data = [[(-a) % p for a in row] for row in self.data]
        else:
            data = [[-a for a in row] for row in self.data]
        return Mat._raw(ring, self.rows, self.cols, data)

    def transpose(self) -> "Mat":
        return Mat._raw(self.ring, self.cols, self.rows, self.to_cols())

    def is_zero(self) -> bool:
        return all(not v for row in self.data for v in row)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.ring == other.ring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        body = "; ".join(" ".join(self.ring.format_scalar(v) for v in row) for row in self.data)
        return f"Mat({self.ring!r}, {self.rows}x{self.cols}, [{body}])"


def vec_add(ring, u, v):
    if ring.kind == "F":
        p = ring.p
        return [(a + b) % p for a, b in zip(u, v)]
    return [a + b for a, b in zip(u, v)]


def vec_sub(ring, u, v):
    if ring.kind == "F":
        p = ring.p
        return [(a - b) % p for a, b in zip(u, v)]
    return [a - b for a, b in zip(u, v)]


def vec_scale(ring, t, u):
    if ring.kind == "F":
        p = ring.p
        return [t * a % p for a in u]
    return [t * a for a in u]


def zero_vec(ring, n):
    return [ring.zero()] * n


# ---------------------------------------------------------------------------
# elimination cores


def _rref_field(ring, data, limit=None):
    """Reduced row echelon form; pivots chosen left to right, first nonzero.

    Only columns < limit are eligible as pivots (used for augmented solves).
    Returns (rows, pivot_columns).
    """
    rows = [r[:] for r in data]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    if limit is None:
        limit = ncols
    pivots = []
    pr = 0
    if ring.kind == "F":
        p = ring.p
        for c in range(limit):
            piv = -1
            for i in range(pr, nrows):
                if rows[i][c]:
                    piv = i
                    break
            if piv < 0:
                continue
            rows[pr], rows[piv] = rows[piv], rows[pr]
            inv = pow(rows[pr][c], -1, p)
            if inv != 1:
                rows[pr] = [x * inv % p for x in rows[pr]]
            rp = rows[pr]
            for i in range(nrows):
                f = rows[i][c]
                if f and i != pr:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rp)]
            pivots.append(c)
            pr += 1
            if pr == nrows:
                break
    else:
        return _rref_rationals(rows, limit)
    return rows, pivots


def _rref_rationals(data, limit):
    """RREF over Q via fraction-free integer elimination.

    Rows are scaled to integers, eliminations are cross-multiplications
    with per-row gcd reduction to control growth, and pivots are
    normalized to 1 only at the end.  The RREF is unique, so the result
    is identical to naive Fraction elimination.
    """
    rows = [_int_row_q(r)[0] for r in data]
    nrows = len(rows)
    pivots = []
    pr = 0
    for c in range(limit):
        piv = -1
        for i in range(pr, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        rp = rows[pr]
        pv = rp[c]
        for i in range(nrows):
            f = rows[i][c]
            if f and i != pr:
                new = [x * pv - f * y for x, y in zip(rows[i], rp)]
                g = 0
                for x in new:
                    if x:
                        g = gcd(g, x)
                        if g == 1:
                            break
                if g > 1:
                    new = [x // g for x in new]
                rows[i] = new
        pivots.append(c)
        pr += 1
        if pr == nrows:
            break
    out = []
    for i, row in enumerate(rows):
        if i < len(pivots):
            pv = row[pivots[i]]
            out.append([Fraction(x, pv) for x in row])
        else:
            out.append([Fraction(x) for x in row])
    return out, pivots


def _hnf_columns(cols, nrows, transform=False):
    """Canonical column Hermite form of an integer column family.

    Column convention: pivot rows strictly increase with column index,
    pivots are positive, and in each pivot row the entries to the left of
    the pivot are reduced into [0, pivot).  Returns (h, v, pivot_rows,
    npiv) where columns npiv.. of h are zero, and (if requested) v holds
    unimodular-transform columns with  original_matrix . v[j] == h[j].
    """
    h = [list(c) for c in cols]
    ncols = len(h)
    v = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)] if transform else None
    pivot_rows = []
    npiv = 0
    for r in range(nrows):
        jfound = -1
        for j in range(npiv, ncols):
            if h[j][r]:
                jfound = j
                break
        if jfound < 0:
            continue
        if jfound != npiv:
            h[npiv], h[jfound] = h[jfound], h[npiv]
            if v:
                v[npiv], v[jfound] = v[jfound], v[npiv]
        for j in range(npiv + 1, ncols):
            if not h[j][r]:
                continue
            a, b = h[npiv][r], h[j][r]
            if b % a == 0:
                q = b // a
                hj, hk = h[j], h[npiv]
                h[j] = [x - q * y for x, y in zip(hj, hk)]
                if v:
                    vj, vk = v[j], v[npiv]
                    v[j] = [x - q * y for x, y in zip(vj, vk)]
            else:
                g, x, y = _xgcd(a, b)
                mb, ag = -(b // g), a // g
                hk, hj = h[npiv], h[j]
                h[npiv] = [x * u + y * w for u, w in zip(hk, hj)]
                h[j] = [mb * u + ag * w for u, w in zip(hk, hj)]
                if v:
                    vk, vj = v[npiv], v[j]
                    v[npiv] = [x * u + y * w for u, w in zip(vk, vj)]
                    v[j] = [mb * u + ag * w for u, w in zip(vk, vj)]
        if h[npiv][r] < 0:
            h[npiv] = [-u for u in h[npiv]]
            if v:
                v[npiv] = [-u for u in v[npiv]]
        piv = h[npiv][r]
        for j in range(npiv):
            q = h[j][r] // piv
            if q:
                hj, hk = h[j], h[npiv]
                h[j] = [x - q * y for x, y in zip(hj, hk)]
                if v:
                    vj, vk = v[j], v[npiv]
                    v[j] = [x - q * y for x, y in zip(vj, vk)]
        pivot_rows.append(r)
        npiv += 1
        if npiv == ncols:
            break
    return h, v, pivot_rows, npiv


def _coords_in_hnf(cols, pivot_rows, vec):
    """Integer coordinates of vec in an HNF column basis, or None."""
    residual = list(vec)
    y = [0] * len(cols)
    for i, r in enumerate(pivot_rows):
        t = residual[r]
        if not t:
            continue
        piv = cols[i][r]
        if t % piv:
            return None
        q = t // piv
        y[i] = q
        col = cols[i]
        residual = [u - q * w for u, w in zip(residual, col)]
    if any(residual):
        return None
    return y


def _echelon_columns_field(ring, cols):
    """Canonical column-echelon basis of the span of the given columns."""
    if not cols:
        return [], []
    reduced, pivots = _rref_field(ring, [list(c) for c in cols])
    gens = [list(reduced[i]) for i in range(len(pivots))]
    return gens, pivots


def _coords_in_echelon_field(ring, cols, pivot_rows, vec):
    """Coordinates of vec in a canonical echelon column basis, or None."""
    y = [vec[r] for r in pivot_rows]
    residual = list(vec)
    for coef, col in zip(y, cols):
        if coef:
            residual = vec_sub(ring, residual, vec_scale(ring, coef, col))
    if any(residual):
        return None
    return y


# ---------------------------------------------------------------------------
# submodules


class SubmodulePresentation:
    """A subspace (field) or lattice (ZZ) inside a free ambient module.

    Generators are stored as the canonical column basis (column echelon
    over a field, column Hermite form over ZZ), so two presentations of
    the same submodule compare equal.
    """

    __slots__ = ("ring", "ambient_rank", "gens", "pivots")

    def __init__(self, ring, ambient_rank, gens, pivots, _canonical=False):
        if not _canonical:
            raise ValueError("use SubmodulePresentation.span to construct")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "gens", tuple(tuple(g) for g in gens))
        object.__setattr__(self, "pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("SubmodulePresentation is immutable")

    @classmethod
    def span(cls, ring, ambient_rank, columns):
        cols = [list(c) for c in columns if any(c)]
        for c in cols:
            if len(c) != ambient_rank:
                raise ValueError("generator length does not match ambient rank")
        if ring.is_field:
            gens, pivots = _echelon_columns_field(ring, cols)
        else:
            h, _, pivots, npiv = _hnf_columns(cols, ambient_rank)
            gens = h[:npiv]
        return cls(ring, ambient_rank, gens, pivots, _canonical=True)

    @classmethod
    def zero(cls, ring, ambient_rank):
        return cls(ring, ambient_rank, [], [], _canonical=True)

    @classmethod
    def full(cls, ring, ambient_rank):
        ident = Mat.identity(ring, ambient_rank)
        return cls(ring, ambient_rank, ident.to_cols(), range(ambient_rank), _canonical=True)

    @property
    def rank(self) -> int:
        return len(self.gens)

    def coords(self, vec):
        """Coordinates of vec in the generator basis, or None if outside."""
        if len(vec) != self.ambient_rank:
            raise ValueError("vector length mismatch")
        if self.ring.is_field:
            return _coords_in_echelon_field(self.ring, self.gens, self.pivots, vec)
        return _coords_in_hnf(self.gens, self.pivots, vec)

    def contains(self, vec) -> bool:
        return self.coords(vec) is not None

    def includes(self, other: "SubmodulePresentation") -> bool:
        """Whether other is a submodule of self."""
        return all(self.contains(g) for g in other.gens)

    def as_mat(self) -> Mat:
        return Mat.from_cols(self.ring, self.ambient_rank, self.gens)

    def __eq__(self, other):
        return (
            isinstance(other, SubmodulePresentation)
            and self.ring == other.ring
            and self.ambient_rank == other.ambient_rank
            and self.gens == other.gens
        )

    def __hash__(self):
        return hash((self.ring, self.ambient_rank, self.gens))

    def __repr__(self):
        return f"<submodule rank {self.rank} of {self.ring!r}^{self.ambient_rank}>"


class _EchelonAccumulator:
    """Incremental independence tester over a field."""

    def __init__(self, ring):
        self.ring = ring
        self.rows = []  # (pivot index, vector reduced against earlier rows)

    def insert(self, vec) -> bool:
        """Reduce vec against the accumulated span; add and report if new."""
        ring = self.ring
        v = list(vec)
        for piv, w in self.rows:
            f = v[piv]
            if f:
                v = vec_sub(ring, v, vec_scale(ring, f, w))
        lead = next((i for i, x in enumerate(v) if x), -1)
        if lead < 0:
            return False
        inv = ring.invert(v[lead])
        if inv != ring.one():
            v = vec_scale(ring, inv, v)
        self.rows.append((lead, v))
        return True


# ---------------------------------------------------------------------------
# kernel / solve / image


def kernel(m: Mat) -> SubmodulePresentation:
    """The solution submodule {x : m.x = 0}; over ZZ the full integer kernel."""
    ring = m.ring
    if ring.is_field:
        reduced, pivots = _rref_field(ring, m.data)
        pivot_set = set(pivots)
        free = [c for c in range(m.cols) if c not in pivot_set]
        gens = []
        for f in free:
            v = zero_vec(ring, m.cols)
            v[f] = ring.one()
            for i, c in enumerate(pivots):
                v[c] = ring.neg(reduced[i][f])
            gens.append(v)
        return SubmodulePresentation.span(ring, m.cols, gens)
    _, v, _, npiv = _hnf_columns(m.to_cols(), m.rows, transform=True)
    return SubmodulePresentation.span(ring, m.cols, v[npiv:])


def solve(m: Mat, b) -> list | None:
    """A deterministic particular solution of m.x = b, or None.

    Over a field: the reduced-echelon solution with free variables zero.
    Over ZZ: Hermite back-substitution (an integer solution iff one exists).
    """
    if len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    ring = m.ring
    b = [ring.normalize(v) for v in b]
    if ring.is_field:
        aug = [row + [bv] for row, bv in zip(m.data, b)]
        if not aug:
            return zero_vec(ring, m.cols)
        reduced, pivots = _rref_field(ring, aug, limit=m.cols)
        for i in range(len(pivots), m.rows):
            if reduced[i][m.cols]:
                return None
        x = zero_vec(ring, m.cols)
        for i, c in enumerate(pivots):
            x[c] = reduced[i][m.cols]
        return x
    h, v, pivot_rows, npiv = _hnf_columns(m.to_cols(), m.rows, transform=True)
    residual = list(b)
    coeffs = []
    pi = 0
    for r in range(m.rows):
        if pi < npiv and pivot_rows[pi] == r:
            piv = h[pi][r]
            t = residual[r]
            if t % piv:
                return None
            q = t // piv
            coeffs.append(q)
            if q:
                col = h[pi]
                residual = [u - q * w for u, w in zip(residual, col)]
            pi += 1
        elif residual[r]:
            return None
    x = [0] * m.cols
    for q, vc in zip(coeffs, v):
        if q:
            x = [u + q * w for u, w in zip(x, vc)]
    return x


def image(m: Mat) -> SubmodulePresentation:
    """Canonical presentation of the column span / column lattice of m."""
    return SubmodulePresentation.span(m.ring, m.rows, m.to_cols())


# ---------------------------------------------------------------------------
# subquotients


class QuotientPresentation:
    """A subquotient z/b with canonical generator lifts.

    ``invariants`` classifies the quotient uniformly across rings: each
    entry d describes a cyclic summand (d = 0 free, d > 1 torsion); over a
    field every entry is 0 and their number is the dimension.  ``gens``
    holds one ambient lift per invariant.  ``reduce`` maps an ambient
    element of z to its canonical coordinate tuple (torsion coordinates in
    [0, d), free coordinates exact).
    """

    __slots__ = ("ring", "ambient_rank", "invariants", "gens", "_data")

    def __init__(self, ring, ambient_rank, invariants, gens, data):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "invariants", tuple(invariants))
        object.__setattr__(self, "gens", tuple(tuple(g) for g in gens))
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("QuotientPresentation is immutable")

    @property
    def is_trivial(self) -> bool:
        return not self.invariants

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariants if d == 0)

    @property
    def torsion(self) -> tuple:
        return tuple(d for d in self.invariants if d)

    def canon(self, coords):
        """Canonicalize a raw coordinate tuple (reduce torsion entries)."""
        if self.ring.is_field:
            norm = self.ring.normalize
            return tuple(norm(c) for c in coords)
        return tuple(c % d if d else c for c, d in zip(coords, self.invariants))

    def zero_coords(self):
        return self.canon([0] * len(self.invariants))

    def reduce(self, vec):
        """Canonical coordinates of an ambient element of z in the quotient."""
        if len(vec) != self.ambient_rank:
            raise ValueError("vector length mismatch")
        kind = self._data[0]
        if kind == "field":
            _, tmat, nb, ngens = self._data
            u = tmat.matvec(vec)
            if any(u[nb + ngens:]):
                raise MembershipError("element lies outside the submodule z")
            return tuple(u[nb:nb + ngens])
        _, zgens, zpivots, u_rows, kept = self._data
        y = _coords_in_hnf(zgens, zpivots, vec)
        if y is None:
            raise MembershipError("element lies outside the lattice z")
        w = [sum(a * b for a, b in zip(row, y)) for row in u_rows]
        return self.canon([w[i] for i in kept])

    def contains_ambient(self, vec) -> bool:
        try:
            self.reduce(vec)
        except MembershipError:
            return False
        return True

    def spans(self, coord_vectors) -> bool:
        """Whether the given coordinate tuples generate the whole quotient."""
        k = len(self.invariants)
        if k == 0:
            return True
        if self.ring.is_field:
            acc = _EchelonAccumulator(self.ring)
            count = 0
            for v in coord_vectors:
                if acc.insert(v):
                    count += 1
            return count == k
        cols = [list(v) for v in coord_vectors]
        for i, d in enumerate(self.invariants):
            if d:
                rel = [0] * k
                rel[i] = d
                cols.append(rel)
        h, _, pivot_rows, npiv = _hnf_columns(cols, k)
        return npiv == k and all(h[i][r] == 1 for i, r in enumerate(pivot_rows))

    def __repr__(self):
        return f"<quotient {list(self.invariants)} in {self.ring!r}^{self.ambient_rank}>"


def subquotient(z: SubmodulePresentation, b: SubmodulePresentation) -> QuotientPresentation:
    """The quotient z/b with canonical lifts; raises InclusionError if b is not inside z."""
    if z.ring != b.ring or z.ambient_rank != b.ambient_rank:
        raise ValueError("z and b live in different ambient modules")
    ring = z.ring
    n = z.ambient_rank
    if ring.is_field:
        for g in b.gens:
            if not z.contains(g):
                raise InclusionError("a generator of b lies outside z")
        acc = _EchelonAccumulator(ring)
        for g in b.gens:
            acc.insert(g)
        reps = [g for g in z.gens if acc.insert(g)]
        basis = [list(g) for g in b.gens] + [list(r) for r in reps]
        # Row-reduce [basis | I] once; reduce() is then a single matvec.
        aug = [[basis[j][i] for j in range(len(basis))]
               + [ring.one() if k == i else ring.zero() for k in range(n)]
               for i in range(n)]
        reduced, pivots = _rref_field(ring, aug, limit=len(basis)) if aug else ([], [])
        assert len(pivots) == len(basis), "basis unexpectedly dependent"
        t_rows = [row[len(basis):] for row in reduced]
        data = ("field", Mat._raw(ring, n, n, t_rows), b.rank, len(reps))
        invariants = (0,) * len(reps)
        return QuotientPresentation(ring, n, invariants, reps, data)

    coord_cols = []
    for g in b.gens:
        y = z.coords(g)
        if y is None:
            raise InclusionError("a generator of b lies outside the lattice z")
        coord_cols.append(y)
    k = z.rank
    rel = Mat.from_cols(ring, k, coord_cols)
    u, d, _ = snf(rel)
    factors = []
    for i in range(k):
        factors.append(d.data[i][i] if i < min(d.rows, d.cols) else 0)
    # u is unimodular, so its column Hermite form is the identity and the
    # transform is its inverse.
    _, uinv_cols, _, _ = _hnf_columns(u.to_cols(), k, transform=True)
    zg = [list(g) for g in z.gens]
    kept = [i for i, f in enumerate(factors) if f != 1]
    gens = []
    for i in kept:
        col = uinv_cols[i]
        amb = [0] * n
        for coef, g in zip(col, zg):
            if coef:
                amb = [a + coef * gv for a, gv in zip(amb, g)]
        gens.append(amb)
    invariants = [factors[i] for i in kept]
    data = ("int", [list(g) for g in z.gens], list(z.pivots), u.data, kept)
    return QuotientPresentation(ring, n, invariants, gens, data)


# ---------------------------------------------------------------------------
# integer normal forms


def snf(m: Mat):
    """Smith normal form: U.m.V = D diagonal, U and V unimodular, d_i | d_{i+1} >= 0."""
    if m.ring != ZZ:
        raise ValueError("Smith normal form is computed over ZZ")
    nr, nc = m.rows, m.cols
    a = [row[:] for row in m.data]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    vcols = [[1 if i == j else 0 for i in range(nc)] for j in range(nc)]

    def row_gcd_op(k, i):
        aa, bb = a[k][k], a[i][k]
        if bb % aa == 0:
            q = bb // aa
            a[i] = [x - q * y for x, y in zip(a[i], a[k])]
            u[i] = [x - q * y for x, y in zip(u[i], u[k])]
        else:
            g, x, y = _xgcd(aa, bb)
            mb, ag = -(bb // g), aa // g
            rk, ri = a[k], a[i]
            a[k] = [x * s + y * t for s, t in zip(rk, ri)]
            a[i] = [mb * s + ag * t for s, t in zip(rk, ri)]
            rk, ri = u[k], u[i]
            u[k] = [x * s + y * t for s, t in zip(rk, ri)]
            u[i] = [mb * s + ag * t for s, t in zip(rk, ri)]

    def col_gcd_op(k, j):
        aa, bb = a[k][k], a[k][j]
        if bb % aa == 0:
            q = bb // aa
            for row in a:
                row[j] -= q * row[k]
            vcols[j] = [x - q * y for x, y in zip(vcols[j], vcols[k])]
        else:
            g, x, y = _xgcd(aa, bb)
            mb, ag = -(bb // g), aa // g
            for row in a:
                s, t = row[k], row[j]
                row[k] = x * s + y * t
                row[j] = mb * s + ag * t
            ck, cj = vcols[k], vcols[j]
            vcols[k] = [x * s + y * t for s, t in zip(ck, cj)]
            vcols[j] = [mb * s + ag * t for s, t in zip(ck, cj)]

    for k in range(min(nr, nc)):
        found = False
        for i in range(k, nr):
            for j in range(k, nc):
                if a[i][j]:
                    found = True
                    break
            if found:
                break
        if not found:
            break
        if i != k:
            a[k], a[i] = a[i], a[k]
            u[k], u[i] = u[i], u[k]
        if j != k:
            for row in a:
                row[k], row[j] = row[j], row[k]
            vcols[k], vcols[j] = vcols[j], vcols[k]
        while True:
            for i in range(k + 1, nr):
                if a[i][k]:
                    row_gcd_op(k, i)
            row_dirty = False
            for j in range(k + 1, nc):
                if a[k][j]:
                    col_gcd_op(k, j)
                    row_dirty = True
            if row_dirty:
                continue
            piv = a[k][k]
            bad = -1
            for i in range(k + 1, nr):
                if any(x % piv for x in a[i][k + 1:]):
                    bad = i
                    break
            if bad < 0:
                break
            a[k] = [x + y for x, y in zip(a[k], a[bad])]
            u[k] = [x + y for x, y in zip(u[k], u[bad])]
    for k in range(min(nr, nc)):
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]
    umat = Mat._raw(ZZ, nr, nr, u)
    dmat = Mat._raw(ZZ, nr, nc, a)
    vmat = Mat._raw(ZZ, nc, nc, [[vcols[j][i] for j in range(nc)] for i in range(nc)])
    return umat, dmat, vmat


def determinant(m: Mat):
    """Exact determinant (fraction-free Bareiss over ZZ, Gauss over fields)."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return m.ring.one()
    ring = m.ring
    a = [row[:] for row in m.data]
    if ring.is_field:
        det = ring.one()
        for k in range(n):
            piv = -1
            for i in range(k, n):
                if a[i][k]:
                    piv = i
                    break
            if piv < 0:
                return ring.zero()
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                det = ring.neg(det)
            det = ring.mul(det, a[k][k])
            inv = ring.invert(a[k][k])
            for i in range(k + 1, n):
                f = ring.mul(a[i][k], inv)
                if f:
                    a[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(a[i], a[k])]
        return det
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not a[k][k]:
            piv = -1
            for i in range(k + 1, n):
                if a[i][k]:
                    piv = i
                    break
            if piv < 0:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
