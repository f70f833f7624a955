"""Level-N chart algebras k[(1/N)M ∩ σ∨] and their boundary ideals.

Weights are tuples of Fractions in (1/N)M.  The grading group (1/N)M/M is
recorded as tuples of residues mod N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .linalg import dot, fstr
from .toric_core import Cone, FanError

Weight = tuple[Fraction, ...]


class ChartError(ValueError):
    pass


def weight(*xs) -> Weight:
    return tuple(Fraction(x) for x in xs)


def wadd(a: Sequence, b: Sequence) -> Weight:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def wsub(a: Sequence, b: Sequence) -> Weight:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


def wscale(c, a: Sequence) -> Weight:
    return tuple(Fraction(c) * Fraction(x) for x in a)


def wstr(w: Sequence) -> str:
    return ",".join(fstr(x) for x in w)


def _level1_hilbert_basis(c: Cone) -> list[tuple[int, ...]]:
    if not c.is_full:
        raise ChartError("chart requires full-dimensional cone")
    gens = list(c.facet_normals)  # generators of the dual cone
    n = c.rank
    if n == 0:
        return []
    # every Hilbert basis element lies in the half-open zonotope spanned by the
    # dual generators, so a coordinate box around it suffices
    lo = [sum(min(0, g[i]) for g in gens) for i in range(n)]
    hi = [sum(max(0, g[i]) for g in gens) for i in range(n)]
    grade = c.interior_point()
    pts = []
    for m in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if any(m) and all(dot(m, r) >= 0 for r in c.rays):
            pts.append(m)
    pts.sort(key=lambda m: (dot(m, grade), m))
    basis: list[tuple[int, ...]] = []
    for m in pts:
        reducible = False
        for h in basis:
            d = tuple(a - b for a, b in zip(m, h))
            if any(d) and all(dot(d, r) >= 0 for r in c.rays):
                reducible = True
                break
        if not reducible:
            basis.append(m)
    return basis


def hilbert_basis(c: Cone, N: int = 1) -> list[Weight]:
    """Minimal generating set of the monoid (1/N)M ∩ c∨."""
    if N < 1:
        raise ChartError("level must be a positive integer")
    return [tuple(Fraction(x, N) for x in h) for h in _level1_hilbert_basis(c)]


class LevelAlgebra:
    """The chart ring k[(1/N)M ∩ σ∨] graded by (1/N)M."""

    def __init__(self, chart: Cone, level: int = 1):
        if level < 1:
            raise ChartError("level must be a positive integer")
        if not chart.is_full:
            raise ChartError("chart requires full-dimensional cone")
        self.chart = chart
        self.level = level

    def __repr__(self):
        return "LevelAlgebra(%r, level=%d)" % (list(self.chart.rays), self.level)

    def __eq__(self, other):
        return (isinstance(other, LevelAlgebra) and self.level == other.level
                and self.chart.key() == other.chart.key() and self.rank == other.rank)

    def __hash__(self):
        return hash((self.chart.key(), self.level))

    @property
    def rank(self) -> int:
        return self.chart.rank

    @cached_property
    def hilbert_basis(self) -> tuple[Weight, ...]:
        return tuple(hilbert_basis(self.chart, self.level))

    @cached_property
    def grading(self) -> tuple[int, ...]:
        """Integral vector in the interior of σ; positive on nonzero monoid elements."""
        return self.chart.interior_point()

    @property
    def grading_group(self) -> tuple[int, ...]:
        return (self.level,) * self.rank

    def degree(self, w: Sequence) -> Fraction:
        return dot(w, self.grading)

    def on_lattice(self, w: Sequence) -> bool:
        return all((Fraction(x) * self.level).denominator == 1 for x in w)

    def contains(self, w: Sequence) -> bool:
        """Whether w is an element of the monoid (1/N)M ∩ σ∨."""
        return self.on_lattice(w) and all(dot(w, r) >= 0 for r in self.chart.rays)

    def is_interior(self, w: Sequence) -> bool:
        return self.on_lattice(w) and all(dot(w, r) > 0 for r in self.chart.rays)

    def residue(self, w: Sequence) -> tuple[int, ...]:
        """Image of w in (1/N)M / M ≅ (Z/N)^rank."""
        if not self.on_lattice(w):
            raise ChartError("weight %s is not in (1/%d)M" % (wstr(w), self.level))
        return tuple(int(Fraction(x) * self.level) % self.level for x in w)

    def elements_up_to(self, bound) -> list[Weight]:
        """Monoid elements of degree <= bound."""
        bound = Fraction(bound)
        if bound < 0:
            return []
        out = {tuple(Fraction(0) for _ in range(self.rank))}
        frontier = list(out)
        while frontier:
            nxt = []
            for w in frontier:
                for h in self.hilbert_basis:
                    v = wadd(w, h)
                    if self.degree(v) <= bound and v not in out:
                        out.add(v)
                        nxt.append(v)
            frontier = nxt
        return sorted(out, key=lambda w: (self.degree(w), w))

    def to_json(self) -> dict:
        return {"chart": [list(r) for r in self.chart.rays], "level": self.level,
                "basis": [wstr(h) for h in self.hilbert_basis]}


def standard_chart(k: int, N: int = 1) -> LevelAlgebra:
    """The NC_k chart k[x_1, ..., x_k] at level N (quadrant cone)."""
    return LevelAlgebra(Cone([tuple(int(i == j) for j in range(k)) for i in range(k)], rank=k), N)


@dataclass(frozen=True)
class BoundaryIdeal:
    parent: LevelAlgebra
    generators: tuple[Weight, ...]

    def contains(self, w: Sequence) -> bool:
        return any(self.parent.contains(wsub(w, g)) for g in self.generators)

    def square_generators(self) -> list[Weight]:
        sq = {wadd(a, b) for a, b in itertools.combinations_with_replacement(self.generators, 2)}
        return _minimalize(self.parent, sq)

    def square_contains(self, w: Sequence) -> bool:
        return any(self.parent.contains(wsub(w, g)) for g in self.square_generators())

    @property
    def is_principal(self) -> bool:
        return len(self.generators) == 1

    def to_json(self) -> dict:
        return {"algebra": self.parent.to_json(), "generators": [wstr(g) for g in self.generators]}


def _minimalize(a: LevelAlgebra, ws: Iterable[Weight]) -> list[Weight]:
    ws = sorted(set(ws), key=lambda w: (a.degree(w), w))
    out: list[Weight] = []
    for w in ws:
        if not any(a.contains(wsub(w, g)) for g in out):
            out.append(w)
    return out


def boundary_ideal(a: LevelAlgebra) -> BoundaryIdeal:
    """Minimal monomial generators of the ideal spanned by interior weights."""
    # the sum of the Hilbert basis is interior; minimal interior weights sit
    # below twice its degree for the desk-scale charts handled here
    top = tuple(sum((h[i] for h in a.hilbert_basis), Fraction(0)) for i in range(a.rank))
    cands = [w for w in a.elements_up_to(2 * a.degree(top)) if a.is_interior(w)]
    return BoundaryIdeal(a, tuple(_minimalize(a, cands)))


@dataclass(frozen=True)
class DefectReport:
    level: int
    weights: tuple[Weight, ...]
    min_weight: Weight | None
    min_degree: Fraction | None

    def to_json(self) -> dict:
        return {"level": self.level, "weights": [wstr(w) for w in self.weights],
                "min_weight": wstr(self.min_weight) if self.min_weight is not None else None,
                "min_degree": fstr(self.min_degree) if self.min_degree is not None else None}


def idempotency_defect(i: BoundaryIdeal, window) -> DefectReport:
    """Weights of degree <= window lying in I but not in I^2."""
    a = i.parent
    pts = [w for w in a.elements_up_to(window) if i.contains(w) and not i.square_contains(w)]
    if not pts:
        return DefectReport(a.level, (), None, None)
    m = min(pts, key=lambda w: (a.degree(w), w))
    return DefectReport(a.level, tuple(pts), m, a.degree(m))


@dataclass(frozen=True)
class LevelLift:
    """The inclusion k[(1/N)M ∩ σ∨] -> k[(1/N')M ∩ σ∨]."""

    source: LevelAlgebra
    target: LevelAlgebra

    @property
    def factor(self) -> int:
        return self.target.level // self.source.level

    def image(self, h: Weight) -> dict[Weight, int]:
        """Exponents of a source generator in terms of target Hilbert-basis monomials."""
        k = self.factor
        base = wscale(Fraction(1, k), h)
        if base in self.target.hilbert_basis:
            return {base: k}
        raise ChartError("weight %s is not a scaled basis element" % wstr(h))

    def group_map(self, g: Sequence[int]) -> tuple[int, ...]:
        """Restriction Γ_{N'} -> Γ_N of grading-group characters (reduction mod N)."""
        return tuple(int(x) % self.source.level for x in g)

    def residue_inclusion(self, r: Sequence[int]) -> tuple[int, ...]:
        """(1/N)M/M -> (1/N')M/M on residues."""
        return tuple(int(x) * self.factor % self.target.level for x in r)

    def compose(self, other: "LevelLift") -> "LevelLift":
        if other.source != self.target:
            raise ChartError("lifts are not composable")
        return LevelLift(self.source, other.target)

    def to_json(self) -> dict:
        return {"from": self.source.level, "to": self.target.level,
                "generators": {wstr(h): {wstr(k): v for k, v in self.image(h).items()}
                               for h in self.source.hilbert_basis}}


def level_lift(a: LevelAlgebra, N_prime: int) -> LevelLift:
    if N_prime < 1 or N_prime % a.level:
        raise ChartError("level %d is not a multiple of %d" % (N_prime, a.level))
    return LevelLift(a, LevelAlgebra(a.chart, N_prime))
