"""Lattices, rational polyhedral cones, fans and maps of fans.

Cones are stored by primitive ray generators.  The inequality description
(generators of the dual cone) is computed on demand with an exact
double-description pass and cached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .linalg import det, dot, nullspace, primitive, rank

Vector = tuple[int, ...]


class FanError(ValueError):
    """Raised for invalid cone or fan data."""


@dataclass(frozen=True)
class Lattice:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise FanError("lattice rank must be non-negative")

    def standard_basis(self) -> list[Vector]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]


def _halfspace_generators(ineqs: Sequence[Sequence], d: int) -> tuple[list, list]:
    """Generators of {x in Q^d : a . x >= 0 for a in ineqs}.

    Returns (lineality basis, extreme rays modulo lineality).  Plain double
    description with the combinatorial adjacency test.
    """
    lin = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    rays: list[list[Fraction]] = []
    seen: list[list[Fraction]] = []
    for a in ineqs:
        a = [Fraction(x) for x in a]
        if not any(a):
            continue
        k = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if k is not None:
            pivot = lin[k]
            s = dot(a, pivot)
            if s < 0:
                pivot = [-x for x in pivot]
                s = -s
            lin = [[x - dot(a, l) / s * p for x, p in zip(l, pivot)]
                   for i, l in enumerate(lin) if i != k]
            rays = [[x - dot(a, r) / s * p for x, p in zip(r, pivot)] for r in rays]
            rays.append(pivot)
            seen.append(a)
            continue
        vals = [dot(a, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        zer = [r for r, v in zip(rays, vals) if v == 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        new = pos + zer
        for p in pos:
            zp = {i for i, b in enumerate(seen) if dot(b, p) == 0}
            for n in neg:
                zn = {i for i, b in enumerate(seen) if dot(b, n) == 0}
                common = zp & zn
                adjacent = True
                for r in rays:
                    if r is p or r is n:
                        continue
                    if all(dot(seen[i], r) == 0 for i in common):
                        adjacent = False
                        break
                if not adjacent:
                    continue
                ap, an = dot(a, p), dot(a, n)
                c = [ap * y - an * x for x, y in zip(p, n)]
                new.append(c)
        rays = new
        seen.append(a)
    return lin, rays


def _project_off(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Orthogonal projection of v onto the complement of span(basis)."""
    if not basis:
        return list(v)
    # Gram-Schmidt over Q
    ortho: list[list[Fraction]] = []
    for b in basis:
        w = list(b)
        for o in ortho:
            w = [x - dot(b, o) / dot(o, o) * y for x, y in zip(w, o)]
        if any(w):
            ortho.append(w)
    w = list(v)
    for o in ortho:
        c = dot(v, o) / dot(o, o)
        w = [x - c * y for x, y in zip(w, o)]
    return w


def _canonical_lineality(lin: Sequence[Sequence[Fraction]], d: int) -> list[Vector]:
    if not lin:
        return []
    from .linalg import row_reduce
    red, _ = row_reduce(lin, d)
    return [primitive(r) for r in red]


def dual_generators(rays: Sequence[Sequence], d: int) -> list[Vector]:
    """Primitive irredundant generators of {m : <m, r> >= 0 for all r in rays}."""
    lin, ext = _halfspace_generators(rays, d)
    lin_basis = _canonical_lineality(lin, d)
    gens: list[Vector] = []
    for l in lin_basis:
        gens.append(l)
        gens.append(tuple(-x for x in l))
    for r in ext:
        p = _project_off(r, [[Fraction(x) for x in l] for l in lin_basis])
        if any(p):
            v = primitive(p)
            if v not in gens:
                gens.append(v)
    return gens


def _in_cone(v: Sequence, facets: Sequence[Vector]) -> bool:
    return all(dot(u, v) >= 0 for u in facets)


def _irredundant(rays: list[Vector], d: int) -> list[Vector]:
    out = list(dict.fromkeys(rays))
    changed = True
    while changed:
        changed = False
        for i, r in enumerate(out):
            rest = out[:i] + out[i + 1:]
            if not rest:
                continue
            if _in_cone(r, dual_generators(rest, d)):
                out = rest
                changed = True
                break
    return out


class Cone:
    """Rational polyhedral cone generated by primitive integer rays."""

    def __init__(self, rays: Iterable[Sequence], rank: int | None = None):
        rays = [tuple(int(x) for x in r) for r in rays]
        if rank is None:
            if not rays:
                raise FanError("rank required for the zero cone")
            rank = len(rays[0])
        self.ambient = Lattice(rank)
        for r in rays:
            if len(r) != rank:
                raise FanError("ray %r has wrong length for rank %d" % (r, rank))
            if not any(r):
                raise FanError("zero vector is not a ray")
        prim = [primitive(r) for r in rays]
        self.rays: tuple[Vector, ...] = tuple(_irredundant(prim, rank))

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def __repr__(self):
        return "Cone(%r, rank=%d)" % (list(self.rays), self.rank)

    @cached_property
    def facet_normals(self) -> tuple[Vector, ...]:
        """Generators of the dual cone; v lies in the cone iff <u, v> >= 0 for all of them."""
        return tuple(dual_generators(self.rays, self.rank))

    @cached_property
    def dim(self) -> int:
        return rank(self.rays, self.rank) if self.rays else 0

    @cached_property
    def is_pointed(self) -> bool:
        # pointed iff the dual cone is full-dimensional
        return rank(self.facet_normals, self.rank) == self.rank if self.rank else True

    @property
    def is_full(self) -> bool:
        return self.dim == self.rank

    def contains(self, v: Sequence) -> bool:
        return _in_cone(v, self.facet_normals)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays)

    def relative_interior_contains(self, v: Sequence) -> bool:
        if not self.contains(v):
            return False
        for f in self.faces():
            if f.dim < self.dim and f.contains(v):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Cone) or other.rank != self.rank:
            return NotImplemented
        return self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        return hash((self.rank, frozenset(self.rays))) if self.is_pointed else hash((self.rank, self.dim))

    def key(self) -> frozenset:
        return frozenset(self.rays)

    def interior_point(self) -> tuple[int, ...]:
        return tuple(sum(r[i] for r in self.rays) for i in range(self.rank))

    def faces(self) -> list["Cone"]:
        return face_lattice(self)


def dual_cone(c: Cone) -> Cone:
    return Cone(c.facet_normals, rank=c.rank)


def face_lattice(c: Cone) -> list[Cone]:
    """All faces of c, from {0}-or-lineality up to c, sorted by dimension."""
    rays = c.rays
    sets = {frozenset(range(len(rays)))}
    facet_sets = [frozenset(i for i, r in enumerate(rays) if dot(u, r) == 0) for u in c.facet_normals]
    frontier = set(sets)
    for fs in facet_sets:
        new = {s & fs for s in sets}
        sets |= new
    # close under intersection
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(sets), 2):
            if a & b not in sets:
                sets.add(a & b)
                changed = True
    del frontier
    faces = []
    for s in sets:
        faces.append(Cone([rays[i] for i in sorted(s)], rank=c.rank))
    uniq: list[Cone] = []
    for f in faces:
        if not any(f.key() == g.key() for g in uniq):
            uniq.append(f)
    uniq.sort(key=lambda f: (f.dim, sorted(f.rays)))
    return uniq


def intersect(a: Cone, b: Cone) -> Cone:
    """a ∩ b, computed as the dual of the sum of the duals."""
    return Cone(dual_generators(list(a.facet_normals) + list(b.facet_normals), a.rank), rank=a.rank)


def multiplicity(c: Cone) -> int:
    """Lattice index of the sublattice spanned by the rays inside its saturation."""
    rays = list(c.rays)
    k = len(rays)
    if k == 0:
        return 1
    g = 0
    for cols in itertools.combinations(range(c.rank), k):
        m = det([[r[j] for j in cols] for r in rays])
        g = gcd(g, abs(int(m)))
    return g


def is_smooth_cone(c: Cone) -> bool:
    return c.is_pointed and len(c.rays) == c.dim and multiplicity(c) == 1


class Fan:
    """A fan: finitely many pointed cones closed under faces, meeting in faces."""

    def __init__(self, rank: int, cones: Iterable[Cone], validate: bool = True):
        self.ambient = Lattice(rank)
        allc: list[Cone] = []
        for c in cones:
            if c.rank != rank:
                raise FanError("cone rank mismatch")
            for f in c.faces():
                if not any(f.key() == g.key() for g in allc):
                    allc.append(f)
        if not allc:
            allc.append(Cone([], rank=rank))
        allc.sort(key=lambda f: (f.dim, sorted(f.rays)))
        self.cones: tuple[Cone, ...] = tuple(allc)
        if validate:
            self.validate()

    @classmethod
    def from_data(cls, rank: int, rays: Sequence[Sequence], cones: Sequence[Sequence[int]]) -> "Fan":
        rays = [tuple(int(x) for x in r) for r in rays]
        cs = []
        for idx in cones:
            try:
                cs.append(Cone([rays[i] for i in idx], rank=rank))
            except IndexError:
                raise FanError("cone %r refers to a missing ray" % (list(idx),))
        return cls(rank, cs)

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def __repr__(self):
        return "Fan(rank=%d, maximal=%r)" % (self.rank, [list(c.rays) for c in self.maximal_cones])

    def validate(self) -> None:
        for c in self.cones:
            if not c.is_pointed:
                raise FanError("cone %r is not strongly convex" % (list(c.rays),))
        maxes = self.maximal_cones
        for i, j in itertools.combinations(range(len(maxes)), 2):
            a, b = maxes[i], maxes[j]
            inter = intersect(a, b)
            for c in (a, b):
                if not any(inter == f for f in c.faces()):
                    raise FanError("cones %r and %r do not meet in a common face"
                                   % (list(a.rays), list(b.rays)))

    @cached_property
    def maximal_cones(self) -> tuple[Cone, ...]:
        out = []
        for c in self.cones:
            if not any(d is not c and d.dim > c.dim and d.contains_cone(c) for d in self.cones):
                out.append(c)
        return tuple(out)

    @cached_property
    def rays(self) -> tuple[Vector, ...]:
        rs: list[Vector] = []
        for c in self.cones:
            for r in c.rays:
                if r not in rs:
                    rs.append(r)
        return tuple(sorted(rs))

    def cones_of_dim(self, k: int) -> list[Cone]:
        return [c for c in self.cones if c.dim == k]

    def contains(self, v: Sequence) -> bool:
        return any(c.contains(v) for c in self.maximal_cones)

    def to_data(self) -> dict:
        rays = list(self.rays)
        return {"rank": self.rank, "rays": [list(r) for r in rays],
                "cones": [sorted(rays.index(r) for r in c.rays) for c in self.maximal_cones]}

    def same_as(self, other: "Fan") -> bool:
        return (self.rank == other.rank and len(self.cones) == len(other.cones)
                and all(any(c.key() == d.key() for d in other.cones) for c in self.cones))


@dataclass(frozen=True)
class FanProperties:
    complete: bool
    smooth: bool
    simplicial: bool
    maximal_cones: tuple[tuple[Vector, ...], ...]
    multiplicities: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {"complete": self.complete, "smooth": self.smooth, "simplicial": self.simplicial,
                "maximal_cones": [[list(r) for r in c] for c in self.maximal_cones],
                "multiplicities": list(self.multiplicities)}


def _covers(pieces: Sequence[Cone], tau: Cone) -> bool:
    """Whether cones in `pieces` (all inside tau, forming a fan) cover tau."""
    k = tau.dim
    top = [p for p in pieces if p.dim == k]
    if k == 0:
        return True
    if not top:
        return False
    boundary = [f for f in tau.faces() if f.dim == k - 1]
    walls: dict[frozenset, int] = {}
    reps: dict[frozenset, Cone] = {}
    for p in top:
        for f in p.faces():
            if f.dim == k - 1:
                walls[f.key()] = walls.get(f.key(), 0) + 1
                reps[f.key()] = f
    for key, count in walls.items():
        w = reps[key]
        on_boundary = any(b.contains_cone(w) for b in boundary)
        if not on_boundary and count != 2:
            return False
    return True


def support_contains(big: Fan, small: Fan) -> bool:
    """|small| ⊆ |big|."""
    for tau in small.maximal_cones:
        pieces: list[Cone] = []
        for sigma in big.maximal_cones:
            piece = intersect(sigma, tau)
            if not any(piece == p for p in pieces):
                pieces.append(piece)
        if not _covers(pieces, tau):
            return False
    return True


def fan_properties(f: Fan) -> FanProperties:
    maxes = f.maximal_cones
    complete = support_contains(f, Fan(f.rank, [Cone(
        [tuple(s * int(i == j) for j in range(f.rank)) for i in range(f.rank) for s in (1, -1)],
        rank=f.rank)], validate=False)) if f.rank else True
    simplicial = all(len(c.rays) == c.dim for c in f.cones)
    smooth = all(is_smooth_cone(c) for c in maxes)
    return FanProperties(complete=complete, smooth=smooth, simplicial=simplicial,
                         maximal_cones=tuple(c.rays for c in maxes),
                         multiplicities=tuple(multiplicity(c) for c in maxes))


@dataclass(frozen=True)
class FanMorphism:
    source: Fan
    target: Fan
    lattice_map: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, source: Fan, target: Fan) -> "FanMorphism":
        if source.rank != target.rank:
            raise FanError("incompatible lattice ranks %d and %d" % (source.rank, target.rank))
        n = source.rank
        return cls(source, target, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def image(self, v: Sequence) -> tuple[int, ...]:
        return tuple(dot(row, v) for row in self.lattice_map)

    def cone_assignment(self) -> list[int | None]:
        """Index of a target maximal cone containing the image of each source cone."""
        out = []
        for c in self.source.cones:
            img = [self.image(r) for r in c.rays]
            hit = next((i for i, t in enumerate(self.target.maximal_cones)
                        if all(t.contains(v) for v in img)), None)
            out.append(hit)
        return out

    def is_compatible(self) -> bool:
        return all(i is not None for i in self.cone_assignment())


@dataclass(frozen=True)
class ModificationVerdict:
    is_refinement: bool
    supports_equal: bool

    @property
    def is_proper_refinement(self) -> bool:
        return self.is_refinement and self.supports_equal

    def to_json(self) -> dict:
        return {"is_refinement": self.is_refinement, "supports_equal": self.supports_equal,
                "is_proper_refinement": self.is_proper_refinement}


def check_modification(m: FanMorphism) -> ModificationVerdict:
    if len(m.lattice_map) != m.target.rank or any(len(r) != m.source.rank for r in m.lattice_map):
        raise FanError("lattice map does not match ranks %d -> %d" % (m.source.rank, m.target.rank))
    if m.source.rank != m.target.rank:
        raise FanError("incompatible lattice ranks %d and %d" % (m.source.rank, m.target.rank))
    n = m.source.rank
    ident = all(m.lattice_map[i][j] == int(i == j) for i in range(n) for j in range(n))
    refinement = ident and m.is_compatible()
    equal = support_contains(m.source, m.target) and support_contains(m.target, m.source)
    return ModificationVerdict(is_refinement=refinement, supports_equal=equal)


def star_subdivision(f: Fan, ray: Sequence[int]) -> Fan:
    """Star subdivision of f at a primitive vector in its support."""
    v = tuple(int(x) for x in ray)
    if len(v) != f.rank or not any(v):
        raise FanError("subdivision ray must be a nonzero vector of length %d" % f.rank)
    if primitive(v) != v:
        raise FanError("subdivision ray %r is not primitive" % (v,))
    if v in f.rays:
        raise FanError("ray %r is already a ray of the fan" % (v,))
    if not f.contains(v):
        raise FanError("ray %r lies outside the support" % (v,))
    new: list[Cone] = []
    for sigma in f.maximal_cones:
        if not sigma.contains(v):
            new.append(sigma)
            continue
        for tau in sigma.faces():
            if tau.contains(v):
                continue
            new.append(Cone(list(tau.rays) + [v], rank=f.rank))
    return Fan(f.rank, new)


def product_fan(a: Fan, b: Fan) -> Fan:
    n, m = a.rank, b.rank
    cones = []
    for s in a.maximal_cones:
        for t in b.maximal_cones:
            rays = [tuple(r) + (0,) * m for r in s.rays] + [(0,) * n + tuple(r) for r in t.rays]
            cones.append(Cone(rays, rank=n + m))
    return Fan(n + m, cones)


# standard examples -----------------------------------------------------------

def affine_fan(rays: Sequence[Sequence[int]], rank: int | None = None) -> Fan:
    c = Cone(rays, rank=rank)
    return Fan(c.rank, [c])


def projective_line() -> Fan:
    return Fan.from_data(1, [[1], [-1]], [[0], [1]])


def affine_line() -> Fan:
    return Fan.from_data(1, [[1]], [[0]])


def torus_fan(rank: int = 1) -> Fan:
    return Fan(rank, [Cone([], rank=rank)])


def projective_plane() -> Fan:
    return Fan.from_data(2, [[1, 0], [0, 1], [-1, -1]], [[0, 1], [1, 2], [2, 0]])


def affine_plane() -> Fan:
    return Fan.from_data(2, [[1, 0], [0, 1]], [[0, 1]])


def hirzebruch(a: int) -> Fan:
    return Fan.from_data(2, [[1, 0], [0, 1], [-1, a], [0, -1]], [[0, 1], [1, 2], [2, 3], [3, 0]])
