"""Finitely presented graded modules over a LevelAlgebra.

Two layers live here.

* ``WindowedModule``: an honest finitely presented module at one level N,
  with exact per-weight pieces, tensor products and graded Hom.
* Tower evaluation: almost-mathematical operations (tensoring with the
  boundary ideal, ``Hom(I, -)``, the almost correction ``Hom(I, I ⊗ -)``)
  only make sense along the ramified tower.  They are evaluated with the
  stable-weight rule: the weight-w piece is sampled at levels L = N, 2N,
  4N, ... and accepted once two consecutive levels agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .linalg import fstr, row_reduce
from .monoid_algebra import (BoundaryIdeal, LevelAlgebra, Weight, boundary_ideal, wadd,
                             wscale, wstr, wsub)


class InsufficientWindow(ValueError):
    """A weight outside the certified window was requested."""


class UnstableWeight(ValueError):
    """The stable-weight rule did not converge within the level budget."""


class ModuleError(ValueError):
    pass


# a free-module element: {(generator index, monomial weight): coefficient}
Element = dict


@dataclass
class GradedPiece:
    """The weight-w piece of a presented module: free part modulo relations."""

    weight: Weight
    basis: list[tuple[int, Weight]]
    relations: list[list[Fraction]]

    def __post_init__(self):
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.rref, self.pivots = row_reduce(self.relations, len(self.basis))
        pivset = set(self.pivots)
        self.free_cols = [i for i in range(len(self.basis)) if i not in pivset]

    @property
    def dim(self) -> int:
        return len(self.basis) - len(self.pivots)

    def vector(self, elt: Element) -> list[Fraction]:
        v = [Fraction(0)] * len(self.basis)
        for key, c in elt.items():
            if c:
                if key not in self.index:
                    raise ModuleError("term %r is not in the weight-%s piece" % (key, wstr(self.weight)))
                v[self.index[key]] += c
        return v

    def reduce(self, v: Sequence[Fraction]) -> list[Fraction]:
        """Coordinates of v in the quotient, on the non-pivot basis vectors."""
        v = list(v)
        for row, p in zip(self.rref, self.pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return [v[i] for i in self.free_cols]


class WindowedModule:
    """Graded module over ``algebra`` given by generators and homogeneous relations.

    ``window`` bounds the degree (pairing with an interior vector of σ) of
    weights at which the module is certified; operations never read past it.
    ``family`` optionally gives the level-L member of a tower of modules; by
    default the tower is the base change of this presentation.
    """

    def __init__(self, algebra: LevelAlgebra, generators: Sequence[Sequence], relations=(),
                 window=10, family: Callable[[int], "WindowedModule"] | None = None,
                 name: str = ""):
        self.algebra = algebra
        self.generators: tuple[Weight, ...] = tuple(tuple(Fraction(x) for x in g) for g in generators)
        rels = []
        for r in relations:
            r = {(int(j), tuple(Fraction(x) for x in m)): Fraction(c) for (j, m), c in dict(r).items()
                 if Fraction(c) != 0}
            if not r:
                continue
            ws = {wadd(self.generators[j], m) for j, m in r}
            if len(ws) != 1:
                raise ModuleError("relation is not homogeneous")
            for j, m in r:
                if not algebra.contains(m):
                    raise ModuleError("relation coefficient x^%s not in the chart ring" % wstr(m))
            rels.append((ws.pop(), r))
        self.relations: tuple[tuple[Weight, dict], ...] = tuple(rels)
        for g in self.generators:
            if not algebra.on_lattice(g):
                raise ModuleError("generator weight %s not in (1/%d)M" % (wstr(g), algebra.level))
        self.window = Fraction(window)
        self._family = family
        self.name = name
        self._pieces: dict[Weight, GradedPiece] = {}

    def __repr__(self):
        return "WindowedModule(%s gens=%d rels=%d level=%d)" % (
            self.name, len(self.generators), len(self.relations), self.algebra.level)

    @property
    def level(self) -> int:
        return self.algebra.level

    def degree(self, w) -> Fraction:
        return self.algebra.degree(w)

    def _check(self, w: Weight) -> None:
        if self.degree(w) > self.window:
            raise InsufficientWindow("weight %s has degree %s beyond window %s"
                                     % (wstr(w), fstr(self.degree(w)), fstr(self.window)))

    def piece(self, w: Sequence, check: bool = True) -> GradedPiece:
        w = tuple(Fraction(x) for x in w)
        if check:
            self._check(w)
        if w in self._pieces:
            return self._pieces[w]
        a = self.algebra
        basis = []
        for j, g in enumerate(self.generators):
            m = wsub(w, g)
            if a.contains(m):
                basis.append((j, m))
        rows = []
        index = {b: i for i, b in enumerate(basis)}
        for u, r in self.relations:
            shift = wsub(w, u)
            if not a.contains(shift):
                continue
            row = [Fraction(0)] * len(basis)
            for (j, m), c in r.items():
                row[index[(j, wadd(m, shift))]] += c
            rows.append(row)
        p = GradedPiece(w, basis, rows)
        self._pieces[w] = p
        return p

    def dim(self, w: Sequence, check: bool = True) -> int:
        return self.piece(w, check).dim

    def support_weights(self, window=None) -> list[Weight]:
        """Weights of degree <= window where the free part is nonzero."""
        window = self.window if window is None else Fraction(window)
        a = self.algebra
        out = set()
        for g in self.generators:
            for m in a.elements_up_to(window - a.degree(g)):
                out.add(wadd(g, m))
        return sorted(out, key=lambda w: (a.degree(w), w))

    def dims(self, window=None) -> dict[Weight, int]:
        return {w: self.dim(w) for w in self.support_weights(window)}

    def tower(self, L: int) -> "WindowedModule":
        """Member of the tower at level L (a multiple of this module's level)."""
        if L == self.level:
            return self
        if L % self.level:
            raise ModuleError("level %d is not a multiple of %d" % (L, self.level))
        return _tower_member(self, L)

    def lift(self, L: int) -> "WindowedModule":
        """Base change of this presentation to level L."""
        alg = LevelAlgebra(self.algebra.chart, L)
        return WindowedModule(alg, self.generators, [r for _, r in self.relations], self.window,
                              name=self.name)

    def shift(self, v: Sequence) -> "WindowedModule":
        v = tuple(Fraction(x) for x in v)
        fam = None
        if self._family is not None:
            fam = lambda L: self.tower(L).shift(v)  # noqa: E731
        return WindowedModule(self.algebra, [wadd(g, v) for g in self.generators],
                              [r for _, r in self.relations], self.window + self.degree(v),
                              family=fam, name=self.name + "(%s)" % wstr(v))

    def with_window(self, window) -> "WindowedModule":
        m = WindowedModule(self.algebra, self.generators, [r for _, r in self.relations], window,
                           family=self._family, name=self.name)
        return m

    def to_json(self, window=None) -> dict:
        d = self.dims(window)
        return dims_json(d)


def _tower_member(m: WindowedModule, L: int) -> WindowedModule:
    cache = m.__dict__.setdefault("_members", {})
    if L not in cache:
        cache[L] = m._family(L) if m._family is not None else m.lift(L)
    return cache[L]


def dims_json(d: dict) -> dict:
    ws = sorted(d, key=lambda w: tuple(w))
    return {"weights": [wstr(w) for w in ws], "dims": [d[w] for w in ws]}


def zero_weight(a: LevelAlgebra) -> Weight:
    return tuple(Fraction(0) for _ in range(a.rank))


# standard modules ------------------------------------------------------------

def structure_module(a: LevelAlgebra, window=10) -> WindowedModule:
    return WindowedModule(a, [zero_weight(a)], (), window, name="O")


def _syzygies(a: LevelAlgebra, gens: Sequence[Weight]) -> list[dict]:
    """Generators of the syzygies among monomials x^g (g in gens)."""
    rels = []
    for i, j in itertools.combinations(range(len(gens)), 2):
        gi, gj = gens[i], gens[j]
        bound = a.degree(gi) + a.degree(gj) + max((a.degree(h) for h in a.hilbert_basis), default=0)
        common = [w for w in (wadd(gi, m) for m in a.elements_up_to(bound - a.degree(gi)))
                  if a.contains(wsub(w, gj))]
        minimal: list[Weight] = []
        for w in sorted(common, key=lambda w: (a.degree(w), w)):
            if not any(a.contains(wsub(w, v)) for v in minimal):
                minimal.append(w)
        for w in minimal:
            rels.append({(i, wsub(w, gi)): 1, (j, wsub(w, gj)): -1})
    return rels


def ideal_module(ideal: BoundaryIdeal, algebra: LevelAlgebra | None = None, window=10) -> WindowedModule:
    """The monomial ideal as a module, optionally extended to a finer-level algebra."""
    a = algebra or ideal.parent
    gens = list(ideal.generators)
    return WindowedModule(a, gens, _syzygies(a, gens), window, name="I")


def boundary_module(a: LevelAlgebra, window=10) -> WindowedModule:
    mod = ideal_module(boundary_ideal(a), a, window)
    mod._family = lambda L: boundary_module(LevelAlgebra(a.chart, L), window)
    return mod


def quotient_by_ideal_power(a: LevelAlgebra, power: int = 1, window=10) -> WindowedModule:
    """The tower O/I^power, whose level-L member is O_L / I_L^power."""
    gens = boundary_ideal(a).generators
    prods = {zero_weight(a)}
    for _ in range(power):
        prods = {wadd(p, g) for p in prods for g in gens}
    rels = [{(0, p): 1} for p in prods]
    mod = WindowedModule(a, [zero_weight(a)], rels, window, name="O/I^%d" % power)
    mod._family = lambda L: quotient_by_ideal_power(LevelAlgebra(a.chart, L), power, window)
    return mod


def skyscraper(a: LevelAlgebra, window=10) -> WindowedModule:
    return quotient_by_ideal_power(a, 1, window)


def kahler_module(a: LevelAlgebra, window=10) -> WindowedModule:
    """Kähler differentials of a smooth chart at level N: free on d x^h, h in the Hilbert basis."""
    if not is_polynomial_chart(a):
        raise ModuleError("Kähler module implemented for smooth (polynomial) charts only")
    mod = WindowedModule(a, list(a.hilbert_basis), (), window, name="T∨")
    mod._family = lambda L: kahler_module(LevelAlgebra(a.chart, L), window)
    return mod


def is_polynomial_chart(a: LevelAlgebra) -> bool:
    return len(a.hilbert_basis) == a.rank


# tensor and Hom --------------------------------------------------------------

def tensor(F: WindowedModule, G: WindowedModule) -> WindowedModule:
    if F.algebra != G.algebra:
        raise ModuleError("tensor product needs modules over the same algebra")
    a = F.algebra
    pairs = list(itertools.product(range(len(F.generators)), range(len(G.generators))))
    idx = {p: k for k, p in enumerate(pairs)}
    gens = [wadd(F.generators[i], G.generators[j]) for i, j in pairs]
    rels = []
    for _, r in F.relations:
        for j in range(len(G.generators)):
            rels.append({(idx[(i, j)], m): c for (i, m), c in r.items()})
    for _, r in G.relations:
        for i in range(len(F.generators)):
            rels.append({(idx[(i, j)], m): c for (j, m), c in r.items()})
    lo_f = min((a.degree(g) for g in F.generators), default=0)
    lo_g = min((a.degree(g) for g in G.generators), default=0)
    window = min(F.window + lo_g, G.window + lo_f)
    fam = None
    if F._family is not None or G._family is not None:
        fam = lambda L: tensor(F.tower(L), G.tower(L))  # noqa: E731
    return WindowedModule(a, gens, rels, window, family=fam, name="(%s⊗%s)" % (F.name, G.name))


class HomModule:
    """Graded Hom(F, G) at a fixed level, computed weight by weight."""

    def __init__(self, F: WindowedModule, G: WindowedModule):
        if F.algebra != G.algebra:
            raise ModuleError("Hom needs modules over the same algebra")
        self.F, self.G = F, G
        self.algebra = F.algebra
        reach = max([F.degree(g) for g in F.generators] + [F.degree(u) for u, _ in F.relations],
                    default=Fraction(0))
        self.window = G.window - reach
        self.name = "Hom(%s,%s)" % (F.name, G.name)

    @property
    def level(self) -> int:
        return self.algebra.level

    def dim(self, w: Sequence) -> int:
        w = tuple(Fraction(x) for x in w)
        if self.algebra.degree(w) > self.window:
            raise InsufficientWindow("insufficient window for Hom at weight %s" % wstr(w))
        F, G = self.F, self.G
        targets = [G.piece(wadd(w, g)) for g in F.generators]
        offsets = list(itertools.accumulate([0] + [t.dim for t in targets]))
        nvars = offsets[-1]
        if nvars == 0:
            return 0
        rows: list[list[Fraction]] = []
        for u, r in F.relations:
            P = G.piece(wadd(w, u))
            if P.dim == 0:
                continue
            # each variable is a quotient coordinate of the image of a generator
            block = [[Fraction(0)] * nvars for _ in range(P.dim)]
            for (j, m), c in r.items():
                T = targets[j]
                for k, col in enumerate(T.free_cols):
                    jj, mm = T.basis[col]
                    image = P.reduce(P.vector({(jj, wadd(mm, m)): c}))
                    for row_i, val in enumerate(image):
                        if val:
                            block[row_i][offsets[j] + k] += val
            rows.extend(block)
        from .linalg import rank
        return nvars - (rank(rows, nvars) if rows else 0)

    def support_weights(self, window=None) -> list[Weight]:
        window = self.window if window is None else Fraction(window)
        a = self.algebra
        out = set()
        for u in self.G.support_weights(self.G.window):
            for g in self.F.generators:
                w = wsub(u, g)
                if a.degree(w) <= window:
                    out.add(w)
        return sorted(out, key=lambda w: (a.degree(w), w))

    def dims(self, window=None) -> dict[Weight, int]:
        return {w: self.dim(w) for w in self.support_weights(window)}


def hom_module(F: WindowedModule, G: WindowedModule) -> HomModule:
    return HomModule(F, G)


@dataclass
class ModuleMap:
    """Degree-0 map given by images of the source generators in the target free module."""

    source: WindowedModule
    target: WindowedModule
    images: list[Element]

    def rank_at(self, w: Sequence) -> int:
        S = self.source.piece(w)
        T = self.target.piece(w)
        if S.dim == 0 or T.dim == 0:
            return 0
        vecs = []
        for col in S.free_cols:
            j, m = S.basis[col]
            elt: dict = {}
            for (jj, mm), c in self.images[j].items():
                key = (jj, wadd(mm, m))
                elt[key] = elt.get(key, 0) + c
            vecs.append(T.reduce(T.vector(elt)))
        from .linalg import rank
        return rank(vecs, T.dim)

    def kernel_cokernel(self, w: Sequence) -> tuple[int, int]:
        r = self.rank_at(w)
        return self.source.dim(w) - r, self.target.dim(w) - r


def multiplication_map(F: WindowedModule) -> ModuleMap:
    """I ⊗ F -> F at the module's own level."""
    a = F.algebra
    I = boundary_module(a, F.window)
    T = tensor(I, F)
    images = []
    for i, g in enumerate(I.generators):
        for j in range(len(F.generators)):
            images.append({(j, g): Fraction(1)})
    return ModuleMap(T, F, images)


def cokernel_of_multiplication(F: WindowedModule) -> WindowedModule:
    """F / I·F as a presented module (and tower)."""
    a = F.algebra
    gens = boundary_ideal(a).generators
    rels = [r for _, r in F.relations]
    for j in range(len(F.generators)):
        for g in gens:
            rels.append({(j, g): 1})
    fam = lambda L: cokernel_of_multiplication(F.tower(L))  # noqa: E731
    return WindowedModule(a, F.generators, rels, F.window, family=fam, name="%s/I" % F.name)


# tower evaluation with the stable-weight rule -------------------------------

MAX_DOUBLINGS = 4


class TowerExpr:
    """A module along the tower, evaluated weight by weight at a level L."""

    algebra: LevelAlgebra
    window: Fraction

    def at(self, w: Weight, L: int) -> int:
        raise NotImplementedError

    @property
    def level(self) -> int:
        return self.algebra.level

    def degree(self, w) -> Fraction:
        return self.algebra.degree(w)

    def stable(self, w: Sequence, max_doublings: int = MAX_DOUBLINGS) -> int:
        return self.stable_with_level(w, max_doublings)[0]

    def stable_with_level(self, w: Sequence, max_doublings: int = MAX_DOUBLINGS) -> tuple[int, int]:
        w = tuple(Fraction(x) for x in w)
        if not self.algebra.on_lattice(w):
            raise ModuleError("weight %s is not in (1/%d)M" % (wstr(w), self.level))
        if self.degree(w) > self.window:
            raise InsufficientWindow("weight %s beyond window %s" % (wstr(w), fstr(self.window)))
        L = self.level
        prev = self.at(w, L)
        for _ in range(max_doublings):
            cur = self.at(w, 2 * L)
            if cur == prev:
                return prev, L
            L, prev = 2 * L, cur
        raise UnstableWeight("weight %s did not stabilise by level %d" % (wstr(w), L))

    def dim(self, w: Sequence) -> int:
        return self.stable(w)

    def shift(self, L: int) -> Weight:
        """Generator weight of the (principal) boundary ideal at level L."""
        return _gen_shift(self.algebra, L)

    @property
    def principal(self) -> bool:
        return boundary_ideal(self.algebra).is_principal

    def support_weights(self, window=None) -> list[Weight]:
        raise NotImplementedError

    def dims(self, window=None) -> dict[Weight, int]:
        return {w: self.stable(w) for w in self.support_weights(window)}


def _gen_shift(a: LevelAlgebra, L: int) -> Weight:
    """The generator of the principal boundary ideal at level L."""
    I = boundary_ideal(LevelAlgebra(a.chart, L))
    return I.generators[0]


class Leaf(TowerExpr):
    def __init__(self, F: WindowedModule):
        self.F = F
        self.algebra = F.algebra
        self.window = F.window

    def at(self, w, L):
        return self.F.tower(L).dim(w, check=False)

    def support_weights(self, window=None):
        return [w for w in self.F.support_weights(window)]


class TensorI(TowerExpr):
    """I_∞ ⊗ G: at level L, the inner object is read one level deeper."""

    def __init__(self, inner: TowerExpr):
        self.inner = inner
        self.algebra = inner.algebra
        self.window = inner.window + self.degree(inner.shift(self.level))

    def shift(self, L):
        return self.inner.shift(L)

    @property
    def principal(self):
        return self.inner.principal

    def at(self, w, L):
        if self.principal:
            return self.inner.at(wsub(w, self.shift(L)), 2 * L)
        if not isinstance(self.inner, Leaf):
            raise NotImplementedError("nested almost operations need a principal boundary ideal")
        fine = LevelAlgebra(self.algebra.chart, 2 * L)
        I = ideal_module(boundary_ideal(LevelAlgebra(self.algebra.chart, L)), fine)
        return tensor(I, self.inner.F.tower(2 * L)).dim(w, check=False)

    def support_weights(self, window=None):
        window = self.window if window is None else Fraction(window)
        g = self.shift(self.level)
        cands = set()
        for u in self.inner.support_weights(self.inner.window):
            cands.add(u)
            cands.add(wadd(u, g))
        return _filter(self.algebra, cands, window)


class HomI(TowerExpr):
    """Hom(I_∞, G) sampled at weight w + (generator at level L) one level deeper."""

    def __init__(self, inner: TowerExpr):
        self.inner = inner
        self.algebra = inner.algebra
        self.window = inner.window - self.degree(inner.shift(self.level))

    def shift(self, L):
        return self.inner.shift(L)

    @property
    def principal(self):
        return self.inner.principal

    def at(self, w, L):
        if self.principal:
            return self.inner.at(wadd(w, self.shift(L)), 2 * L)
        if not isinstance(self.inner, Leaf):
            raise NotImplementedError("nested almost operations need a principal boundary ideal")
        fine = LevelAlgebra(self.algebra.chart, 2 * L)
        I = ideal_module(boundary_ideal(LevelAlgebra(self.algebra.chart, L)), fine)
        G = self.inner.F.tower(2 * L).with_window(self.inner.window + 1)
        return HomModule(I, G).dim(w)

    def support_weights(self, window=None):
        window = self.window if window is None else Fraction(window)
        g = self.shift(self.level)
        cands = set()
        for u in self.inner.support_weights(self.inner.window):
            cands.add(wsub(u, g))
            cands.add(u)
        return _filter(self.algebra, cands, window)


def _filter(a: LevelAlgebra, cands, window) -> list[Weight]:
    return sorted((w for w in cands if a.on_lattice(w) and a.degree(w) <= window),
                  key=lambda w: (a.degree(w), w))


def as_tower(F) -> TowerExpr:
    return F if isinstance(F, TowerExpr) else Leaf(F)


def almost_tensor(F) -> TowerExpr:
    """I ⊗ F along the tower."""
    return TensorI(as_tower(F))


def almost_hom(F) -> TowerExpr:
    """Hom(I, F) along the tower."""
    return HomI(as_tower(F))


def almost_correction(F) -> TowerExpr:
    """Hom(I, I ⊗ F) along the tower, evaluated with the stable-weight rule."""
    return HomI(TensorI(as_tower(F)))


def is_almost_zero(F, window=None) -> bool:
    T = almost_tensor(F)
    return all(T.stable(w) == 0 for w in T.support_weights(window))


@dataclass
class LocalityVerdict:
    level: int
    failures: dict[Weight, tuple[int, int]]
    min_failure_degrees: dict[int, Fraction | None]
    almost_local_at_level: bool
    almost_local_in_tower: bool
    almost_zero: bool
    cokernel_almost_zero: bool

    @property
    def verdict(self) -> str:
        if self.almost_zero:
            return "almost-zero"
        if self.almost_local_at_level:
            return "almost-local at level %d" % self.level
        if self.almost_local_in_tower:
            return "almost-local in tower"
        return "not almost-local"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "level": self.level,
                "failures": [{"weight": wstr(w), "kernel": k, "cokernel": c}
                             for w, (k, c) in sorted(self.failures.items())],
                "min_failure_degree": {str(L): (fstr(d) if d is not None else None)
                                       for L, d in sorted(self.min_failure_degrees.items())},
                "almost_zero": self.almost_zero,
                "cokernel_almost_zero": self.cokernel_almost_zero}


def _failures(F: WindowedModule) -> dict[Weight, tuple[int, int]]:
    mu = multiplication_map(F)
    out = {}
    for w in F.support_weights():
        k, c = mu.kernel_cokernel(w)
        if k or c:
            out[w] = (k, c)
    return out


def almost_locality(F: WindowedModule, levels: int = 3) -> LocalityVerdict:
    """Kernel and cokernel of I ⊗ F -> F, at the module's level and up the tower."""
    fails = _failures(F)
    mins: dict[int, Fraction | None] = {}
    L = F.level
    for _ in range(levels):
        G = F.tower(L)
        fl = fails if L == F.level else _failures(G)
        mins[L] = min((G.degree(w) for w in fl), default=None)
        L *= 2
    vals = [mins[L] for L in sorted(mins)]
    in_tower = (all(v is not None and v > 0 for v in vals)
                and all(b * 2 == a for a, b in zip(vals, vals[1:])))
    az = is_almost_zero(F)
    coker = cokernel_of_multiplication(F)
    return LocalityVerdict(level=F.level, failures=fails, min_failure_degrees=mins,
                           almost_local_at_level=not fails, almost_local_in_tower=in_tower or not fails,
                           almost_zero=az, cokernel_almost_zero=is_almost_zero(coker))
