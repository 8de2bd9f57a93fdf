"""Bigraded modules carrying structure maps d_i of bidegree (-i, i-1).

A multicomplex stores a finite family of per-bidegree ranks together with
the matrices of each d_i restricted to a source bidegree; absent entries
are zero.  Validation checks every relation sum_{i+j=n} d_i d_j = 0 as an
exact matrix identity, per source bidegree.  Only the unsigned relation
convention is supported; the alternating-sign variant is rejected by
validation, not converted.
"""

from __future__ import annotations

from typing import NamedTuple

from .linalg import Mat
from .rings import Ring


class RelationViolation(NamedTuple):
    n: int
    a: int
    b: int
    composite: Mat

    def __str__(self):
        return f"n={self.n} at ({self.a},{self.b}): nonzero composite {self.composite!r}"


class MorphismViolation(NamedTuple):
    n: int
    a: int
    b: int
    difference: Mat

    def __str__(self):
        return f"n={self.n} at ({self.a},{self.b}): sides differ by {self.difference!r}"


class Multicomplex:
    """Finitely supported bigraded module with structure maps d_i.

    ranks: {(a, b): positive rank}; maps: {(i, a, b): Mat of d_i on C_{a,b}},
    where the matrix has ranks[(a-i, b+i-1)] rows and ranks[(a, b)] columns.
    All-zero matrices are dropped at construction so the stored form is
    canonical.
    """

    __slots__ = ("ring", "ranks", "maps", "maxd")

    def __init__(self, ring: Ring, ranks: dict, maps: dict):
        clean_ranks = {}
        for (a, b), r in ranks.items():
            if not isinstance(r, int) or r < 1:
                raise ValueError(f"rank at ({a},{b}) must be a positive integer")
            clean_ranks[(int(a), int(b))] = r
        clean_maps = {}
        maxd = 0
        for (i, a, b), m in maps.items():
            if i < 0:
                raise ValueError("structure map index must be >= 0")
            src = clean_ranks.get((a, b))
            if src is None:
                raise ValueError(f"map d_{i} declared on absent module ({a},{b})")
            tgt = clean_ranks.get((a - i, b + i - 1), 0)
            if m.ring != ring:
                raise ValueError("map ring differs from multicomplex ring")
            if (m.rows, m.cols) != (tgt, src):
                raise ValueError(
                    f"d_{i} on ({a},{b}) must be {tgt}x{src}, got {m.rows}x{m.cols}"
                )
            if m.is_zero():
                continue
            clean_maps[(i, a, b)] = m
            if i > maxd:
                maxd = i
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "ranks", clean_ranks)
        object.__setattr__(self, "maps", clean_maps)
        object.__setattr__(self, "maxd", maxd)

    def __setattr__(self, name, value):
        raise AttributeError("Multicomplex is immutable")

    def rank(self, a: int, b: int) -> int:
        return self.ranks.get((a, b), 0)

    def dmap(self, i: int, a: int, b: int) -> Mat | None:
        """Matrix of d_i on C_{a,b}, or None when it is zero/absent."""
        return self.maps.get((i, a, b))

    @property
    def support(self):
        return sorted(self.ranks)

    def total_degrees(self):
        return sorted({a + b for a, b in self.ranks})

    def is_bicomplex(self) -> bool:
        return self.maxd <= 1

    def validate(self) -> list[RelationViolation]:
        """All violated relations sum_{i+j=n} d_i d_j = 0, per (n, source)."""
        violations = []
        for (a, b) in self.support:
            src = self.rank(a, b)
            for n in range(0, 2 * self.maxd + 1):
                tgt = self.rank(a - n, b + n - 2)
                if tgt == 0:
                    continue
                total = None
                for j in range(0, n + 1):
                    i = n - j
                    first = self.dmap(j, a, b)
                    if first is None:
                        continue
                    second = self.dmap(i, a - j, b + j - 1)
                    if second is None:
                        continue
                    term = second.mul(first)
                    total = term if total is None else total.add(term)
                if total is not None and not total.is_zero():
                    violations.append(RelationViolation(n, a, b, total))
        return violations

    def __eq__(self, other):
        return (
            isinstance(other, Multicomplex)
            and self.ring == other.ring
            and self.ranks == other.ranks
            and self.maps == other.maps
        )

    def __repr__(self):
        return (
            f"<Multicomplex over {self.ring!r}: {len(self.ranks)} modules, "
            f"{len(self.maps)} maps, maxd={self.maxd}>"
        )


def validate(c: Multicomplex) -> list[RelationViolation]:
    return c.validate()


class MulticomplexMorphism:
    """Maps f_i: C_{a,b} -> C'_{a-i,b+i} compatible with both structures."""

    __slots__ = ("source", "target", "comps", "maxf")

    def __init__(self, source: Multicomplex, target: Multicomplex, comps: dict):
        if source.ring != target.ring:
            raise ValueError("morphism between multicomplexes over different rings")
        clean = {}
        maxf = 0
        for (i, a, b), m in comps.items():
            if i < 0:
                raise ValueError("morphism component index must be >= 0")
            src = source.rank(a, b)
            tgt = target.rank(a - i, b + i)
            if (m.rows, m.cols) != (tgt, src):
                raise ValueError(
                    f"f_{i} on ({a},{b}) must be {tgt}x{src}, got {m.rows}x{m.cols}"
                )
            if m.is_zero():
                continue
            clean[(i, a, b)] = m
            if i > maxf:
                maxf = i
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "comps", clean)
        object.__setattr__(self, "maxf", maxf)

    def __setattr__(self, name, value):
        raise AttributeError("MulticomplexMorphism is immutable")

    def fmap(self, i: int, a: int, b: int) -> Mat | None:
        return self.comps.get((i, a, b))

    @classmethod
    def identity(cls, c: Multicomplex) -> "MulticomplexMorphism":
        comps = {(0, a, b): Mat.identity(c.ring, r) for (a, b), r in c.ranks.items()}
        return cls(c, c, comps)

    @classmethod
    def zero(cls, source: Multicomplex, target: Multicomplex) -> "MulticomplexMorphism":
        return cls(source, target, {})


def validate_morphism(f: MulticomplexMorphism) -> list[MorphismViolation]:
    """Violations of sum f_i d_j = sum d'_i f_j, per (n, source bidegree).

    The check range n <= maxf + max(maxd, maxd') is complete: beyond it
    every summand contains a zero factor.
    """
    c, cp = f.source, f.target
    nmax = f.maxf + max(c.maxd, cp.maxd)
    violations = []
    for (a, b) in c.support:
        for n in range(0, nmax + 1):
            tgt = cp.rank(a - n, b + n - 1)
            if tgt == 0:
                continue
            total = None
            for j in range(0, n + 1):
                i = n - j
                # f_i d_j : through C_{a-j, b+j-1}
                dj = c.dmap(j, a, b)
                if dj is not None:
                    fi = f.fmap(i, a - j, b + j - 1)
                    if fi is not None:
                        term = fi.mul(dj)
                        total = term if total is None else total.add(term)
                # - d'_i f_j : through C'_{a-j, b+j}
                fj = f.fmap(j, a, b)
                if fj is not None:
                    dpi = cp.dmap(i, a - j, b + j)
                    if dpi is not None:
                        term = dpi.mul(fj).neg()
                        total = term if total is None else total.add(term)
            if total is not None and not total.is_zero():
                violations.append(MorphismViolation(n, a, b, total))
    return violations


def rebase(c: Multicomplex, ring: Ring) -> Multicomplex:
    """Reinterpret an integer-entried multicomplex over another ring.

    Residues over a prime field are read as their integer representatives.
    Refused (ValueError) if an entry cannot be carried exactly: a rational
    with denominator divisible by p, or a non-integer when targeting ZZ.
    """
    if ring == c.ring:
        return c
    maps = {}
    for key, m in c.maps.items():
        maps[key] = Mat(ring, m.rows, m.cols, m.data)
    return Multicomplex(ring, dict(c.ranks), maps)
