"""Constructible sheaves on a stratified circle, as an independent check on HH.

A circle with k >= 1 marked points has k point strata and k open arcs.
Constructible sheaves are representations of the exit-path quiver: one
vertex per stratum and an arrow from each point to each of its two adjacent
arcs (for k = 1 this is the Kronecker quiver).  The quiver is acyclic without
relations, so Ext vanishes above degree 1 and
dim Ext^1 = dim Hom - <dim V, dim W> (Euler form).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .linalg import nullspace
from .toric_core import Cone, dual_cone


def circle_homology(n: int) -> list[int]:
    """Betti numbers of the torus T^n, by Künneth from H_*(S^1) = (1, 1)."""
    if n < 0:
        raise ValueError("dimension must be non-negative")
    betti = [1]
    for _ in range(n):
        betti = [a + b for a, b in zip(betti + [0], [0] + betti)]
    return betti


class CircleStratification:
    """Marked points on R/Z; strata are the points and the open arcs between them."""

    def __init__(self, points: Sequence = (0,)):
        pts = sorted({Fraction(p) % 1 for p in points})
        if not pts:
            raise ValueError("at least one marked point is needed for a finite quiver model")
        self.points = tuple(pts)

    def __eq__(self, other):
        return isinstance(other, CircleStratification) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return "CircleStratification(%s)" % [str(p) for p in self.points]

    @property
    def k(self) -> int:
        return len(self.points)

    def vertices(self) -> list[tuple[str, int]]:
        return [("p", i) for i in range(self.k)] + [("a", i) for i in range(self.k)]

    def arrows(self) -> list[tuple[tuple[str, int], tuple[str, int]]]:
        """Point i exits into arc i (towards point i+1) and arc i-1 (from point i-1)."""
        out = []
        for i in range(self.k):
            out.append((("p", i), ("a", i)))
            out.append((("p", i), ("a", (i - 1) % self.k)))
        return out

    def arc_of(self, x: Fraction) -> int:
        """Index of the arc containing a non-marked point x."""
        x = Fraction(x) % 1
        for i, p in enumerate(self.points):
            q = self.points[(i + 1) % self.k]
            if (p < x < q) or (q <= p and (x > p or x < q)):
                return i
        raise ValueError("%s is a marked point" % x)

    def refine(self, extra: Sequence) -> "CircleStratification":
        return CircleStratification(list(self.points) + list(extra))


def common_refinement(a: CircleStratification, b: CircleStratification) -> CircleStratification:
    return a.refine(b.points)


@dataclass
class Representation:
    """Vector spaces per stratum and matrices per arrow (rows = target dim)."""

    strat: CircleStratification
    dims: dict
    maps: dict

    def dim_vector(self) -> dict:
        return dict(self.dims)

    def refine(self, target: CircleStratification) -> "Representation":
        """Pull back along the refinement: new points inside an arc copy the arc."""
        old = self.strat
        if not set(old.points) <= set(target.points):
            raise ValueError("target is not a refinement")
        dims, maps = {}, {}
        where = {}
        for i, p in enumerate(target.points):
            if p in old.points:
                where[("p", i)] = ("p", old.points.index(p))
            else:
                where[("p", i)] = ("a", old.arc_of(p))
        for i, p in enumerate(target.points):
            q = target.points[(i + 1) % target.k]
            mid = (p + q) / 2 if q > p else ((p + q + 1) / 2) % 1
            where[("a", i)] = ("a", old.arc_of(mid))
        for v in target.vertices():
            dims[v] = self.dims[where[v]]
        for s, t in target.arrows():
            os_, ot = where[s], where[t]
            if os_[0] == "a":
                n = dims[t]
                maps[(s, t)] = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            else:
                maps[(s, t)] = self.maps[(os_, ot)]
        return Representation(target, dims, maps)


def hom_dim(V: Representation, W: Representation) -> int:
    """Dimension of the space of quiver morphisms V -> W."""
    verts = V.strat.vertices()
    offsets, n = {}, 0
    for v in verts:
        offsets[v] = n
        n += V.dims[v] * W.dims[v]
    if n == 0:
        return 0

    def var(v, i, j):  # entry (i, j) of f_v: V_v -> W_v
        return offsets[v] + i * V.dims[v] + j

    rows = []
    for s, t in V.strat.arrows():
        A, B = V.maps[(s, t)], W.maps[(s, t)]
        # B f_s - f_t A = 0, an equation per entry of a W_t x V_s matrix
        for i in range(W.dims[t]):
            for j in range(V.dims[s]):
                row = [Fraction(0)] * n
                for k in range(W.dims[s]):
                    if B[i][k]:
                        row[var(s, k, j)] += B[i][k]
                for k in range(V.dims[t]):
                    if A[k][j]:
                        row[var(t, i, k)] -= A[k][j]
                rows.append(row)
    return len(nullspace(rows, n)) if rows else n


def euler_form(V: Representation, W: Representation) -> int:
    s = sum(V.dims[v] * W.dims[v] for v in V.strat.vertices())
    return s - sum(V.dims[a] * W.dims[b] for a, b in V.strat.arrows())


ENDPOINT_RAYS = {("left", True): "+", ("left", False): "-", ("right", True): "-", ("right", False): "+"}


@dataclass
class IntervalModule:
    """Constant sheaf on a cyclic interval from marked point ``start`` to ``end``.

    ``start == end`` with both ends closed and ``whole=True`` is the constant
    sheaf on the circle; ``start == end`` and no arcs is a skyscraper.
    """

    strat: CircleStratification
    start: int
    end: int
    closed_start: bool = True
    closed_end: bool = True
    whole: bool = False
    declared_support: frozenset = field(default_factory=lambda: frozenset({"0", "+", "-"}))

    def arcs(self) -> list[int]:
        if self.whole:
            return list(range(self.strat.k))
        out, i = [], self.start
        while i != self.end:
            out.append(i)
            i = (i + 1) % self.strat.k
        return out

    def points_in(self) -> list[int]:
        if self.whole:
            return list(range(self.strat.k))
        arcs = self.arcs()
        pts = [(a + 1) % self.strat.k for a in arcs[:-1]]
        if self.closed_start:
            pts.append(self.start)
        if self.closed_end and (self.end != self.start or not arcs):
            pts.append(self.end)
        return sorted(set(pts))

    def endpoint_rays(self) -> set[str]:
        if self.whole:
            return {"0"}
        rays = set()
        if self.arcs():
            rays.add(ENDPOINT_RAYS[("left", self.closed_start)])
            rays.add(ENDPOINT_RAYS[("right", self.closed_end)])
        else:
            rays |= {"+", "-"}
        return rays

    def support_ok(self) -> bool:
        """Whether the microlocal rays at the endpoints satisfy the declared support."""
        return self.endpoint_rays() <= set(self.declared_support) | {"0"}

    def representation(self) -> Representation:
        arcs, pts = set(self.arcs()), set(self.points_in())
        dims = {("p", i): int(i in pts) for i in range(self.strat.k)}
        dims.update({("a", i): int(i in arcs) for i in range(self.strat.k)})
        maps = {}
        for s, t in self.strat.arrows():
            maps[(s, t)] = [[Fraction(1)]] if dims[s] and dims[t] else \
                [[Fraction(0)] * dims[s] for _ in range(dims[t])]
        return Representation(self.strat, dims, maps)


def constant_sheaf(strat: CircleStratification) -> IntervalModule:
    return IntervalModule(strat, 0, 0, whole=True)


def skyscraper_sheaf(strat: CircleStratification, i: int = 0) -> IntervalModule:
    return IntervalModule(strat, i, i)


def _as_rep(x, strat: CircleStratification) -> Representation:
    rep = x.representation() if isinstance(x, IntervalModule) else x
    return rep if rep.strat == strat else rep.refine(strat)


def interval_ext(a, b) -> tuple[int, int]:
    """(dim Ext^0, dim Ext^1) after passing to the common refinement."""
    sa = a.strat
    sb = b.strat
    strat = common_refinement(sa, sb)
    V, W = _as_rep(a, strat), _as_rep(b, strat)
    h = hom_dim(V, W)
    return h, h - euler_form(V, W)


def sum_ext(terms_a: Sequence[tuple], terms_b: Sequence[tuple]) -> dict[int, int]:
    """Ext between formal sums Σ A[s], given as (module, shift) pairs; keys are degrees."""
    out: dict[int, int] = {}
    for A, s in terms_a:
        for B, t in terms_b:
            e0, e1 = interval_ext(A, B)
            for k, d in ((0, e0), (1, e1)):
                if d:
                    deg = k + s - t
                    out[deg] = out.get(deg, 0) + d
    return out


SUPPORT_CASES = {"zero": [], "plus": [(1,)], "minus": [(-1,)], "full": [(1,), (-1,)]}


def winding_set(case: str, window: int) -> list[int]:
    """Winding numbers w with |w| <= window lying in the dual of the case's support cone."""
    if case not in SUPPORT_CASES:
        raise ValueError("support case must be one of %s" % sorted(SUPPORT_CASES))
    cone = Cone(SUPPORT_CASES[case], rank=1)
    dual = dual_cone(cone)
    return [w for w in range(-window, window + 1) if dual.contains((w,))]


def kernel_hh(case: str, window: int = 5) -> dict[int, tuple[int, ...]]:
    """Self-Tor of the kernel sheaf, split by winding: H_*(S^1) on each allowed sheet."""
    sheet = interval_ext(constant_sheaf(CircleStratification((0,))),
                         constant_sheaf(CircleStratification((0,))))
    return {w: tuple(sheet) for w in winding_set(case, window)}


def kernel_hh_product(cases: Sequence[str], window: int = 2) -> dict[tuple[int, ...], list[int]]:
    """Künneth product of rank-1 cases, keyed by winding vectors."""
    out: dict = {(): [1]}
    for c in cases:
        new = {}
        for w, d in out.items():
            for v, e in kernel_hh(c, window).items():
                prod = [0] * (len(d) + len(e) - 1)
                for i, x in enumerate(d):
                    for j, y in enumerate(e):
                        prod[i + j] += x * y
                new[w + (v,)] = prod
        out = new
    return out
