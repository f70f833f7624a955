"""Weight-graded Hochschild homology of level-N chart algebras.

A chart is a product of one-dimensional factors:

* ``nc``: a boundary coordinate x, ramified at level N (t = x^{1/N}, μ_N acts);
* ``affine``: a coordinate with no boundary and no ramification;
* ``torus``: a Laurent coordinate t = x^{1/N}, μ_N acts, no boundary.

Parabolic HH at level N is HH of the smash product with the grading group,
split into twisted sectors HH(A, A_g).  Each sector is computed either by the
normalized bar complex (finite in every weight for pointed monoids) or by
the Koszul model.  Log HH is obtained from the parabolic tables along the
tower by the almost-correction weight rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Sequence

from .graded_modules import HomI, TensorI, TowerExpr, UnstableWeight
from .linalg import cyclotomic, fstr, rank, solve, sparse_rank
from .log_derham import LogFormsChart, weight_box
from .monoid_algebra import LevelAlgebra, Weight, wstr
from .toric_core import Cone, Fan, FanError, is_smooth_cone

KINDS = ("nc", "affine", "torus")
BAR_LIMIT = 4  # auto mode uses the bar complex when the exponent total is at most this


class HHError(ValueError):
    pass


@dataclass(frozen=True)
class ChartSpec:
    factors: tuple[str, ...]

    def __post_init__(self):
        bad = [f for f in self.factors if f not in KINDS]
        if bad:
            raise HHError("unknown chart factor %r" % bad[0])

    @property
    def rank(self) -> int:
        return len(self.factors)

    def step(self, j: int, N: int) -> Fraction:
        return Fraction(1) if self.factors[j] == "affine" else Fraction(1, N)

    def ramified(self, j: int) -> bool:
        return self.factors[j] != "affine"

    def has_torus(self) -> bool:
        return "torus" in self.factors

    def sectors(self, N: int) -> list[tuple[int, ...]]:
        ranges = [range(N) if self.ramified(j) else range(1) for j in range(self.rank)]
        return [tuple(g) for g in itertools.product(*ranges)]

    def exponents(self, w: Sequence, N: int) -> tuple[int, ...] | None:
        out = []
        for j, x in enumerate(w):
            a = Fraction(x) / self.step(j, N)
            if a.denominator != 1:
                return None
            out.append(int(a))
        return tuple(out)

    def in_monoid(self, a: Sequence[int]) -> bool:
        return all(x >= 0 or f == "torus" for x, f in zip(a, self.factors))

    def weights(self, N: int, window) -> list[Weight]:
        window = Fraction(window)
        axes = []
        for j, f in enumerate(self.factors):
            s = self.step(j, N)
            top = int(window / s)
            lo = -top if f == "torus" else 0
            axes.append([s * a for a in range(lo, top + 1)])
        return [tuple(w) for w in itertools.product(*axes)]

    def boundary_shift(self, L: int) -> Weight:
        return tuple(Fraction(1, L) if f == "nc" else Fraction(0) for f in self.factors)

    def log_cone(self) -> Cone:
        """Cone whose dual is the non-torus orthant; its log forms use the dlog basis."""
        n = self.rank
        rays = [tuple(int(i == j) for i in range(n)) for j, f in enumerate(self.factors) if f != "torus"]
        return Cone(rays, rank=n)

    def __str__(self):
        return "×".join({"nc": "NC_1", "affine": "A¹", "torus": "G_m"}[f] for f in self.factors)


def nc_chart(k: int) -> ChartSpec:
    return ChartSpec(("nc",) * k)


def torus_chart(k: int = 1) -> ChartSpec:
    return ChartSpec(("torus",) * k)


# Koszul model ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _koszul_factor(kind: str, moved: bool, a: int) -> tuple[int, int]:
    """(HH_0, HH_1) of one factor at exponent a: the complex A_g·e -> A_g, e ↦ (1-ζ)t."""
    present = lambda x: x >= 0 or kind == "torus"  # noqa: E731
    c0 = 1 if present(a) else 0          # A at exponent a
    c1 = 1 if present(a - 1) else 0      # A·e at total exponent a
    r = 1 if (moved and c0 and c1) else 0
    return c0 - r, c1 - r


def koszul_dims(spec: ChartSpec, N: int, g: Sequence[int], w: Sequence) -> list[int]:
    """HH_i(A, A_g) at weight w, i = 0..rank, by Künneth over one-variable Koszul complexes."""
    a = spec.exponents(w, N)
    n = spec.rank
    if a is None:
        return [0] * (n + 1)
    dims = [1]
    for j in range(n):
        moved = bool(spec.ramified(j) and g[j] % N)
        h0, h1 = _koszul_factor(spec.factors[j], moved, a[j])
        new = [0] * (len(dims) + 1)
        for i, d in enumerate(dims):
            new[i] += d * h0
            new[i + 1] += d * h1
        dims = new
    return dims


def koszul_dims_direct(spec: ChartSpec, N: int, g: Sequence[int], w: Sequence) -> list[int]:
    """The same numbers from the full multivariable Koszul complex A_g ⊗ Λ(k^n)."""
    a = spec.exponents(w, N)
    n = spec.rank
    if a is None:
        return [0] * (n + 1)
    coeff = [1 if (spec.ramified(j) and g[j] % N) else 0 for j in range(n)]
    bases = []
    for i in range(n + 1):
        bases.append([J for J in itertools.combinations(range(n), i)
                      if spec.in_monoid([x - (j in J) for j, x in enumerate(a)])])
    ranks = [0]
    for i in range(1, n + 1):
        idx = {J: k for k, J in enumerate(bases[i - 1])}
        rows = [[Fraction(0)] * len(bases[i]) for _ in bases[i - 1]]
        for col, J in enumerate(bases[i]):
            for pos, j in enumerate(J):
                if coeff[j]:
                    rows[idx[J[:pos] + J[pos + 1:]]][col] += (-1) ** pos
        ranks.append(rank(rows, len(bases[i])) if rows and bases[i] else 0)
    ranks.append(0)
    return [len(bases[i]) - ranks[i] - ranks[i + 1] for i in range(n + 1)]


# bar complex -----------------------------------------------------------------

class WeightedBarComplex:
    """Hochschild chains of a graded monoid algebra with coefficients in A_g, at one weight.

    Elements are exponent vectors; ``below(u)`` lists the nonzero monoid
    elements m with u - m in the monoid, and ``char(m)`` the exponent of ζ_N
    by which g acts on x^m.
    """

    def __init__(self, weight: tuple, below: Callable, char: Callable | None = None,
                 order: int = 1, normalized: bool = True):
        self.weight = tuple(weight)
        self._below = lru_cache(maxsize=None)(below)
        self.char = char or (lambda m: 0)
        self.order = order
        self.normalized = normalized
        self.domain, self.zeta = cyclotomic(order)
        self._powers = [self.domain.one]
        for _ in range(max(order - 1, 0)):
            self._powers.append(self._powers[-1] * self.zeta)
        self._chains: dict[int, list[tuple]] = {}

    @classmethod
    def for_chart(cls, spec: ChartSpec, N: int, w: Sequence, g: Sequence[int] | None = None,
                  normalized: bool = True) -> "WeightedBarComplex":
        if spec.has_torus():
            raise HHError("Laurent directions have infinite bar weight spaces; use the Koszul model")
        a = spec.exponents(w, N)
        if a is None or not spec.in_monoid(a):
            a = None
        g = tuple(g) if g is not None else (0,) * spec.rank

        def below(u):
            out = []
            for m in itertools.product(*[range(x + 1) for x in u]):
                if any(m) or not normalized:
                    out.append(tuple(m))
            return out

        def char(m):
            return sum(gi * mi for gi, mi in zip(g, m) if gi)

        bc = cls(a if a is not None else (), below, char, N if any(x % N for x in g) else 1,
                 normalized)
        bc.empty = a is None
        return bc

    @classmethod
    def for_algebra(cls, alg: LevelAlgebra, w: Sequence, g: Sequence[int] | None = None,
                    normalized: bool = True) -> "WeightedBarComplex":
        """Bar complex over an arbitrary level-N chart monoid, in exponent units N·w."""
        N = alg.level
        w = tuple(Fraction(x) for x in w)
        g = tuple(g) if g is not None else (0,) * alg.rank
        inside = alg.contains(w)
        elems = alg.elements_up_to(alg.degree(w)) if inside else []
        units = [tuple(int(x * N) for x in m) for m in elems]
        present = set(units)

        def below(u):
            return [m for m in units
                    if (any(m) or not normalized) and tuple(x - y for x, y in zip(u, m)) in present]

        def char(m):
            return sum(gi * mi for gi, mi in zip(g, m))

        bc = cls(tuple(int(x * N) for x in w) if inside else (), below, char,
                 N if any(x % N for x in g) else 1, normalized)
        bc.empty = not inside
        return bc

    empty = False

    def chains(self, r: int) -> list[tuple]:
        if self.empty:
            return []
        if r in self._chains:
            return self._chains[r]
        out = []

        def rec(rem, prefix):
            if len(prefix) == r:
                out.append((rem,) + tuple(prefix))
                return
            for m in self._below(rem):
                rec(tuple(x - y for x, y in zip(rem, m)), prefix + [m])

        rec(self.weight, [])
        self._chains[r] = out
        return out

    def _faces(self, chain: tuple) -> Iterable[tuple[tuple, object]]:
        r = len(chain) - 1
        add = lambda u, v: tuple(x + y for x, y in zip(u, v))  # noqa: E731
        one = self.domain.one
        for i in range(r):
            merged = chain[:i] + (add(chain[i], chain[i + 1]),) + chain[i + 2:]
            yield merged, one if i % 2 == 0 else -one
        twist = self._powers[self.char(chain[r]) % self.order] if self.order > 1 else one
        last = (add(chain[r], chain[0]),) + chain[1:r]
        yield last, twist if r % 2 == 0 else -twist

    def differential(self, r: int) -> tuple[dict, tuple[int, int]]:
        """b: C_r -> C_{r-1} as a sparse matrix over the coefficient field."""
        src = self.chains(r)
        tgt = self.chains(r - 1) if r >= 1 else []
        idx = {c: i for i, c in enumerate(tgt)}
        entries: dict = {}
        zero = self.domain.zero
        for j, c in enumerate(src):
            for face, coeff in self._faces(c):
                if face in idx:
                    key = (idx[face], j)
                    entries[key] = entries.get(key, zero) + coeff
        return {k: v for k, v in entries.items() if v != zero}, (len(tgt), len(src))

    def rank_b(self, r: int) -> int:
        if r <= 0:
            return 0
        ent, shape = self.differential(r)
        return sparse_rank(ent, shape, self.domain)

    def homology(self, r: int) -> int:
        return len(self.chains(r)) - self.rank_b(r) - self.rank_b(r + 1)

    def d_squared_is_zero(self, r: int) -> bool:
        if r < 2:
            return True
        b1, _ = self.differential(r)
        b0, _ = self.differential(r - 1)
        cols: dict = {}
        for (i, j), v in b1.items():
            cols.setdefault(j, []).append((i, v))
        rows0: dict = {}
        for (i, j), v in b0.items():
            rows0.setdefault(j, []).append((i, v))
        zero = self.domain.zero
        for j, col in cols.items():
            acc: dict = {}
            for k, v in col:
                for i, u in rows0.get(k, ()):
                    acc[i] = acc.get(i, zero) + u * v
            if any(x != zero for x in acc.values()):
                return False
        return True

    def max_degree(self) -> int:
        return sum(abs(x) for x in self.weight) if self.normalized else 0


def bar_dims(spec: ChartSpec, N: int, g: Sequence[int], w: Sequence) -> list[int]:
    bc = WeightedBarComplex.for_chart(spec, N, w, g)
    return [bc.homology(i) for i in range(spec.rank + 1)]


# tables ---------------------------------------------------------------------

@dataclass
class HHTable:
    level: int
    kind: str                      # "parabolic" or "log"
    entries: dict                  # (i, weight, sector) -> dim
    spec: ChartSpec | None = None
    rank: int = 0
    notes: list[str] = field(default_factory=list)
    methods: dict = field(default_factory=dict)

    def dim(self, i: int, w: Sequence, sector: Sequence[int] | None = None) -> int:
        w = tuple(Fraction(x) for x in w)
        if sector is None:
            sector = (0,) * self.rank
        return self.entries.get((i, w, tuple(sector)), 0)

    @property
    def weights(self) -> list[Weight]:
        return sorted({w for _, w, _ in self.entries})

    def internal(self) -> dict:
        return {k: v for k, v in self.entries.items() if v}

    def invariant(self, shift_dx: bool = False) -> dict[tuple[int, Weight], int]:
        """Trivial sector, integer weights.  ``shift_dx`` relabels HH_1 of a rank-1
        chart by the dx convention (weight + 1)."""
        if shift_dx and self.rank != 1:
            raise HHError("the dx relabelling is defined for rank-1 charts only")
        out: dict = {}
        zero = (0,) * self.rank
        for (i, w, g), d in self.entries.items():
            if d and g == zero and all(Fraction(x).denominator == 1 for x in w):
                if shift_dx and i == 1:
                    w = (w[0] + 1,)
                out[(i, w)] = out.get((i, w), 0) + d
        return out

    def invariant_totals(self) -> list[int]:
        tot = [0] * (self.rank + 1)
        for (i, _), d in self.invariant().items():
            while i >= len(tot):
                tot.append(0)
            tot[i] += d
        return tot

    def twisted_count(self, i: int = 0) -> int:
        zero = (0,) * self.rank
        return sum(d for (j, _, g), d in self.entries.items() if j == i and g != zero)

    def to_json(self) -> dict:
        rows = [{"i": i, "weight": wstr(w), "sector": list(g), "dim": d}
                for (i, w, g), d in sorted(self.entries.items()) if d]
        return {"level": self.level, "kind": self.kind, "rank": self.rank,
                "chart": str(self.spec) if self.spec else None, "entries": rows,
                "notes": list(self.notes)}


def hh_parabolic_level(chart, N: int, weights: Iterable[Sequence] | None = None, window=None,
                       method: str = "auto") -> HHTable:
    """Sector-split HH at level N, per weight.

    ``chart`` is a ChartSpec (Koszul or bar) or a LevelAlgebra (bar only).
    """
    if method not in ("auto", "bar", "koszul"):
        raise HHError("method must be auto, bar or koszul")
    if isinstance(chart, LevelAlgebra):
        return _hh_algebra(chart, weights, window)
    spec: ChartSpec = chart
    if weights is None:
        weights = spec.weights(N, 2 if window is None else window)
    weights = [tuple(Fraction(x) for x in w) for w in weights]
    if method == "bar" and spec.has_torus():
        raise HHError("Laurent directions have infinite bar weight spaces; use the Koszul model")
    entries, methods = {}, {}
    for w in weights:
        a = spec.exponents(w, N)
        if a is None:
            raise HHError("weight %s is not in the level-%d lattice" % (wstr(w), N))
        use_bar = (method == "bar" or (method == "auto" and not spec.has_torus()
                                      and sum(abs(x) for x in a) <= BAR_LIMIT))
        for g in spec.sectors(N):
            dims = bar_dims(spec, N, g, w) if use_bar else koszul_dims(spec, N, g, w)
            methods[(w, g)] = "bar" if use_bar else "koszul"
            for i, d in enumerate(dims):
                entries[(i, w, g)] = d
    return HHTable(N, "parabolic", entries, spec, spec.rank, methods=methods)


def _hh_algebra(alg: LevelAlgebra, weights, window) -> HHTable:
    N = alg.level
    if weights is None:
        weights = alg.elements_up_to(2 if window is None else window)
    entries = {}
    sectors = [tuple(g) for g in itertools.product(range(N), repeat=alg.rank)]
    for w in weights:
        w = tuple(Fraction(x) for x in w)
        for g in sectors:
            bc = WeightedBarComplex.for_algebra(alg, w, g)
            top = bc.max_degree()
            for i in range(top + 1):
                d = bc.homology(i)
                if d:
                    entries[(i, w, g)] = d
    return HHTable(N, "parabolic", entries, None, alg.rank,
                   notes=["bar complex over the chart monoid"])


# log HH via the almost-correction weight rule ---------------------------------

class _ChartGrading:
    """Just enough of a LevelAlgebra for the tower evaluator."""

    def __init__(self, spec: ChartSpec, level: int):
        self.spec = spec
        self.level = level

    def on_lattice(self, w) -> bool:
        return self.spec.exponents(w, self.level) is not None

    def degree(self, w) -> Fraction:
        # chart windows are coordinate boxes
        return max((abs(Fraction(x)) for x in w), default=Fraction(0))


class SectorTower(TowerExpr):
    """Parabolic HH_i of one sector, read along the tower (sector g ↦ g·L/N)."""

    def __init__(self, spec: ChartSpec, N: int, i: int, g: Sequence[int], window):
        self.spec, self.i, self.g = spec, i, tuple(g)
        self.algebra = _ChartGrading(spec, N)
        self.window = Fraction(window)

    def at(self, w, L):
        f = L // self.level
        return _koszul_cached(self.spec, L, tuple(x * f for x in self.g), tuple(w))[self.i]

    def shift(self, L):
        return self.spec.boundary_shift(L)

    @property
    def principal(self):
        return True

    def support_weights(self, window=None):
        return self.spec.weights(self.level, self.window if window is None else window)


@lru_cache(maxsize=None)
def _koszul_cached(spec, L, g, w):
    return tuple(koszul_dims(spec, L, g, w))


def hh_log(spec: ChartSpec, N: int, window=2) -> HHTable:
    """Log HH at level N: Hom(I, I ⊗ -) applied sector by sector to the parabolic tower."""
    entries = {}
    unstable = []
    levels = {}
    for g in spec.sectors(N):
        for i in range(spec.rank + 1):
            ac = HomI(TensorI(SectorTower(spec, N, i, g, window)))
            for w in spec.weights(N, window):
                try:
                    d, L = ac.stable_with_level(w)
                except UnstableWeight:
                    unstable.append((i, w, g))
                    continue
                entries[(i, w, g)] = d
                levels[(i, w, g)] = L
    notes = []
    if unstable:
        notes.append("unstable weights: " + "; ".join("HH_%d@%s/%s" % (i, wstr(w), g)
                                                       for i, w, g in unstable))
    t = HHTable(N, "log", entries, spec, spec.rank, notes)
    t.unstable = unstable
    t.stable_levels = levels
    return t


def log_forms_dim(spec: ChartSpec, N: int, i: int, w: Sequence) -> int:
    """dim of Λ^i T∨_log at weight w: dlog on nc/torus coordinates, dx on affine ones."""
    a = spec.exponents(w, N)
    if a is None:
        return 0
    count = 0
    for J in itertools.combinations(range(spec.rank), i):
        shift = [x - (1 if (j in J and spec.step(j, N) == 1 and spec.factors[j] == "affine") else 0)
                 for j, x in enumerate(a)]
        if spec.in_monoid(shift):
            count += 1
    return count


@dataclass
class HKRReport:
    passed: bool
    dims_ok: bool
    differential_ok: bool
    checked_dims: int
    checked_monomials: int
    first_mismatch: dict | None

    def to_json(self) -> dict:
        return {"passed": self.passed, "dims_ok": self.dims_ok,
                "differential_ok": self.differential_ok, "checked_dims": self.checked_dims,
                "checked_monomials": self.checked_monomials, "first_mismatch": self.first_mismatch}


def _bar_B_coefficients(spec: ChartSpec, N: int, w: Weight) -> list[Fraction] | None:
    """Express the class of 1 ⊗ x^w in HH_1 in the basis t^{a-e_j} ⊗ t_j (untwisted)."""
    bc = WeightedBarComplex.for_chart(spec, N, w)
    a = spec.exponents(w, N)
    if not any(a):
        return None
    c1 = bc.chains(1)
    idx = {c: k for k, c in enumerate(c1)}
    b2, (nr, nc) = bc.differential(2)
    cols = [[Fraction(0)] * nr for _ in range(nc)]
    for (i, j), v in b2.items():
        cols[j][i] = Fraction(int(v.numerator), int(v.denominator))
    zero = (0,) * spec.rank
    basis_js = [j for j in range(spec.rank) if a[j] >= 1]
    for j in basis_js:
        e = tuple(int(k == j) for k in range(spec.rank))
        col = [Fraction(0)] * nr
        col[idx[(tuple(x - y for x, y in zip(a, e)), e)]] = Fraction(1)
        cols.append(col)
    target = [Fraction(0)] * nr
    target[idx[(zero, a)]] = Fraction(1)
    rows = [[cols[c][r] for c in range(len(cols))] for r in range(nr)]
    x = solve(rows, target)
    if x is None:
        raise HHError("1 ⊗ x^%s is not a combination of HKR classes" % wstr(w))
    coeff = [Fraction(0)] * spec.rank
    for k, j in enumerate(basis_js):
        coeff[j] = x[nc + k]
    return coeff


def hkr_compare(spec: ChartSpec, N: int = 1, window=3, log_table: HHTable | None = None) -> HKRReport:
    """HH_log dims against Λ^i T∨_log, and the B-differential against d on monomials."""
    t = log_table or hh_log(spec, N, window)
    first = None
    checked = 0
    for w in spec.weights(N, window):
        for i in range(spec.rank + 1):
            lhs = t.dim(i, w)
            rhs = log_forms_dim(spec, N, i, w)
            checked += 1
            if lhs != rhs and first is None:
                first = {"kind": "dims", "i": i, "weight": wstr(w), "hh": lhs, "forms": rhs}
    dims_ok = first is None
    forms = LogFormsChart(spec.log_cone(), N)
    diff_ok = True
    mon = 0
    if not spec.has_torus():
        for w in spec.weights(N, window):
            coeff = _bar_B_coefficients(spec, N, w)
            if coeff is None:
                continue
            mon += 1
            # t^{a-e_j} dt_j = (1/N) x^w dlog x_j on a ramified coordinate, x^{w-e_j} dx_j otherwise
            bar_side = [c if spec.factors[j] == "affine" else c / N for j, c in enumerate(coeff)]
            dform = forms.d(forms.monomial(w))
            form_side = [dform.get((w, (j,)), Fraction(0)) for j in range(spec.rank)]
            if bar_side != form_side:
                diff_ok = False
                if first is None:
                    first = {"kind": "differential", "weight": wstr(w),
                             "bar": [fstr(x) for x in bar_side], "forms": [fstr(x) for x in form_side]}
    return HKRReport(dims_ok and diff_ok, dims_ok, diff_ok, checked, mon, first)


@dataclass
class StabilizationReport:
    source_level: int
    target_level: int
    twisted_counts: tuple[int, int]
    predicted_counts: tuple[int, int]
    sector_map_injective: bool
    classes_injective: bool
    log_preserved: bool

    @property
    def passed(self) -> bool:
        return (self.twisted_counts == self.predicted_counts and self.sector_map_injective
                and self.classes_injective and self.log_preserved)

    def to_json(self) -> dict:
        return {"from": self.source_level, "to": self.target_level,
                "twisted_counts": list(self.twisted_counts),
                "predicted_counts": list(self.predicted_counts),
                "sector_map_injective": self.sector_map_injective,
                "classes_injective": self.classes_injective,
                "log_preserved": self.log_preserved, "passed": self.passed}


def predicted_twisted_count(spec: ChartSpec, N: int) -> int:
    """Twisted HH_0 classes at weight 0: sectors moving only nc coordinates, none on a torus."""
    count = 0
    for g in spec.sectors(N):
        if any(x % N for x in g) and not any(
                g[j] % N for j in range(spec.rank) if spec.factors[j] == "torus"):
            count += 1
    return count


def tower_stabilization(spec: ChartSpec, N: int, N_prime: int, window=1,
                        method: str = "auto") -> StabilizationReport:
    if N_prime % N:
        raise HHError("level %d does not divide %d" % (N, N_prime))
    f = N_prime // N
    src = hh_parabolic_level(spec, N, spec.weights(N, window), method=method)
    tgt = hh_parabolic_level(spec, N_prime, spec.weights(N, window), method=method)
    counts = (src.twisted_count(0), tgt.twisted_count(0))
    predicted = (predicted_twisted_count(spec, N), predicted_twisted_count(spec, N_prime))
    image = {g: tuple(x * f % N_prime for x in g) for g in spec.sectors(N)}
    injective = len(set(image.values())) == len(image)
    classes_ok = all(tgt.dim(i, w, image[g]) >= d for (i, w, g), d in src.entries.items() if d)
    log_src = hh_log(spec, N, window)
    log_tgt = hh_log(spec, N_prime, window)
    preserved = all(log_tgt.dim(i, w) == log_src.dim(i, w)
                    for w in spec.weights(N, window) for i in range(spec.rank + 1))
    return StabilizationReport(N, N_prime, counts, predicted, injective, classes_ok, preserved)


def kunneth_tables(a: HHTable, b: HHTable) -> dict:
    """Graded tensor of two HH tables (untwisted sectors), keyed (i, weight)."""
    out: dict = {}
    for (i, w, g), d in a.entries.items():
        if not d or any(g):
            continue
        for (j, v, h), e in b.entries.items():
            if e and not any(h):
                key = (i + j, tuple(w) + tuple(v))
                out[key] = out.get(key, 0) + d * e
    return out


# fans -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_chart_dim(k: int, n: int, N: int, i: int, coords: tuple) -> int:
    spec = ChartSpec(("nc",) * k + ("torus",) * (n - k))
    window = max((abs(x) for x in coords), default=Fraction(0))
    ac = HomI(TensorI(SectorTower(spec, N, i, (0,) * n, window)))
    return ac.stable(coords)


def hh_log_fan(f: Fan, N: int = 1, window=1) -> HHTable:
    """Log HH of a smooth fan: Čech gluing of chart log HH tables over the maximal cones.

    Each chart is NC_k × G_m^{n-k} in coordinates dual to the cone's rays; the
    dlog basis identifies restriction maps with the identity on Λ^i.
    """
    n = f.rank
    if not all(is_smooth_cone(c) for c in f.maximal_cones):
        raise FanError("log HH of a non-smooth fan is model-dependent; smooth fans only")
    cones = list(f.maximal_cones)
    k = len(cones)
    raysets = [set(c.rays) for c in cones]
    simplices = [list(itertools.combinations(range(k), q + 1)) for q in range(k)]
    face = {s: sorted(set.intersection(*(raysets[i] for i in s))) for lvl in simplices for s in lvl}
    entries = {}
    zero_g = (0,) * n
    for m in weight_box(n, N, window):
        for i in range(n + 1):
            lam = comb(n, i)
            present = {}
            for lvl in simplices:
                for s in lvl:
                    coords = tuple(sum((Fraction(a) * b for a, b in zip(m, r)), Fraction(0))
                                   for r in face[s]) + (Fraction(0),) * (n - len(face[s]))
                    d = _log_chart_dim(len(face[s]), n, N, i, coords)
                    if d not in (0, lam):
                        raise HHError("chart table is not free over the dlog basis")
                    present[s] = bool(d)
            h = _cech_presence(simplices, present)
            for q, hq in enumerate(h):
                if hq:
                    key = (i - q, m, zero_g)
                    entries[key] = entries.get(key, 0) + hq * lam
    t = HHTable(N, "log", entries, None, n, ["Čech gluing of chart log HH over maximal cones"])
    return t


def _cech_presence(simplices, present) -> list[int]:
    basis = [[s for s in lvl if present[s]] for lvl in simplices]
    ranks = []
    for q in range(len(simplices) - 1):
        src, tgt = basis[q], basis[q + 1]
        idx = {s: j for j, s in enumerate(src)}
        rows = []
        for t in tgt:
            row = [Fraction(0)] * len(src)
            for j in range(len(t)):
                fc = t[:j] + t[j + 1:]
                if fc in idx:
                    row[idx[fc]] += (-1) ** j
            rows.append(row)
        ranks.append(rank(rows, len(src)) if rows and src else 0)
    out = []
    for q in range(len(simplices)):
        r_out = ranks[q] if q < len(ranks) else 0
        r_in = ranks[q - 1] if q > 0 else 0
        out.append(len(basis[q]) - r_out - r_in)
    return out


def hp_fold_hh(t: HHTable) -> tuple[int, int]:
    """2-periodic fold of the weight-0 invariant HH, whose B-differential vanishes (d x^0 = 0)."""
    zero = (Fraction(0),) * t.rank
    even = sum(d for (i, w), d in t.invariant().items() if w == zero and i % 2 == 0)
    odd = sum(d for (i, w), d in t.invariant().items() if w == zero and i % 2 == 1)
    return even, odd


def chart_spec_for_cone(c: Cone) -> tuple[ChartSpec, list[tuple[int, ...]]]:
    """NC_k × G_m^{n-k} model of a smooth cone, with the lattice basis giving chart coordinates.

    The coordinates of a weight m are its pairings with the returned vectors:
    first the rays, then a unimodular completion.
    """
    from .linalg import det
    if not is_smooth_cone(c):
        raise HHError("cone %r is not smooth" % (list(c.rays),))
    n, rays = c.rank, [tuple(r) for r in c.rays]
    cands = [v for v in itertools.product((-1, 0, 1), repeat=n) if any(v)]
    for extra in itertools.combinations(cands, n - len(rays)):
        basis = rays + list(extra)
        if abs(det(basis)) == 1:
            return ChartSpec(("nc",) * len(rays) + ("torus",) * (n - len(rays))), basis
    raise HHError("no unimodular completion found for %r" % (rays,))


@dataclass
class FanHKRReport:
    passed: bool
    checked: int
    first_mismatch: dict | None

    def to_json(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "first_mismatch": self.first_mismatch}


def hkr_compare_fan(t: HHTable, hodge) -> FanHKRReport:
    """Fan-level HKR: HH_j at weight m against ⊕_{p-q=j} H^q(Ω^p_log) at m."""
    first, checked = None, 0
    for m in hodge.weights:
        reg = {}
        for (p, q), d in hodge.hodge_at(m).items():
            reg[p - q] = reg.get(p - q, 0) + d
        for j in range(-t.rank, t.rank + 1):
            lhs, rhs = t.dim(j, m), reg.get(j, 0)
            checked += 1
            if lhs != rhs and first is None:
                first = {"j": j, "weight": wstr(m), "hh": lhs, "hodge": rhs}
    return FanHKRReport(first is None, checked, first)
