"""Log differential forms on toric charts and Čech hypercohomology over a fan.

On a toric chart the log forms are free on the dlog x_i, and
d(x^m ω) = x^m (Σ m_i dlog x_i) ∧ ω.  Over a fan everything is graded by
weights m in (1/N)M, and the weight-m Čech complex of Ω^p_log is the Čech
complex of O tensored with Λ^p M_Q; the de Rham differential acts by m ∧ -.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .linalg import fstr, rank
from .monoid_algebra import LevelAlgebra, Weight, wadd, wstr
from .toric_core import Cone, Fan, fan_properties, is_smooth_cone

Word = tuple[int, ...]


def _wedge_word(a: Word, b: Word) -> tuple[int, Word] | None:
    """Sign and sorted word of a ∧ b, or None if they share an index."""
    if set(a) & set(b):
        return None
    seq = list(a) + list(b)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


class LogFormsChart:
    """Ω^*_log on one chart at level N, with the dlog basis."""

    def __init__(self, chart: Cone, level: int = 1):
        self.chart = chart
        self.level = level
        self.rank = chart.rank
        self.algebra = LevelAlgebra(chart, level) if chart.is_full else None

    def words(self, p: int) -> list[Word]:
        return list(itertools.combinations(range(self.rank), p))

    def contains(self, m: Sequence) -> bool:
        m = tuple(Fraction(x) for x in m)
        return (all((x * self.level).denominator == 1 for x in m)
                and all(sum(a * b for a, b in zip(m, r)) >= 0 for r in self.chart.rays))

    def monomial(self, m: Sequence, word: Word = (), coeff=1) -> dict:
        m = tuple(Fraction(x) for x in m)
        if not self.contains(m):
            raise ValueError("x^%s is not a function on this chart" % wstr(m))
        return {(m, tuple(word)): Fraction(coeff)}

    def d(self, form: dict) -> dict:
        out: dict = {}
        for (m, word), c in form.items():
            for i, mi in enumerate(m):
                if not mi:
                    continue
                r = _wedge_word((i,), word)
                if r is None:
                    continue
                sign, w = r
                key = (m, w)
                out[key] = out.get(key, 0) + sign * mi * c
        return {k: v for k, v in out.items() if v}

    def wedge(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for (m1, w1), c1 in a.items():
            for (m2, w2), c2 in b.items():
                r = _wedge_word(w1, w2)
                if r is None:
                    continue
                sign, w = r
                key = (wadd(m1, m2), w)
                out[key] = out.get(key, 0) + sign * c1 * c2
        return {k: v for k, v in out.items() if v}

    def piece_dim(self, p: int, m: Sequence) -> int:
        """Per-weight dimension of Ω^p_log: C(n, p) when x^m lives on the chart."""
        return comb(self.rank, p) if self.contains(m) else 0


def log_forms_chart(c: Cone, N: int = 1) -> LogFormsChart:
    return LogFormsChart(c, N)


# Čech layer -----------------------------------------------------------------

def _wedge_matrix(m: Sequence[Fraction], n: int, p: int) -> list[list[Fraction]]:
    """Matrix of m ∧ - : Λ^p → Λ^{p+1} (rows index Λ^{p+1})."""
    src = list(itertools.combinations(range(n), p))
    tgt = {w: i for i, w in enumerate(itertools.combinations(range(n), p + 1))}
    mat = [[Fraction(0)] * len(src) for _ in range(len(tgt))]
    for j, w in enumerate(src):
        for i, mi in enumerate(m):
            if mi:
                r = _wedge_word((i,), w)
                if r is not None:
                    sign, ww = r
                    mat[tgt[ww]][j] += sign * mi
    return mat


def _kron_identity_left(a: list[list], k: int) -> list[list]:
    """Rows/cols of A ⊗ I_k, with basis ordered (A index, k index)."""
    rows = []
    for row in a:
        for t in range(k):
            rows.append([x if s == t else Fraction(0) for x in row for s in range(k)])
    return rows


def _kron_identity_right(k: int, b: list[list], bcols: int) -> list[list]:
    """Rows/cols of I_k ⊗ B."""
    rows = []
    for s in range(k):
        for row in b:
            r = [Fraction(0)] * (k * bcols)
            for j, x in enumerate(row):
                r[s * bcols + j] = x
            rows.append(r)
    return rows


def _matmul(a, b):
    if not a or not b:
        return [[Fraction(0)] * (len(b[0]) if b else 0) for _ in a]
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt] for r in a]


class CechComplex:
    """Weight-graded Čech complex of O on the maximal-cone cover of a fan."""

    def __init__(self, fan: Fan, level: int = 1):
        self.fan = fan
        self.level = level
        self.cones = list(fan.maximal_cones)
        self.rays = [set(c.rays) for c in self.cones]
        k = len(self.cones)
        self.simplices: list[list[tuple[int, ...]]] = []
        self.face_rays: dict[tuple[int, ...], list] = {}
        for q in range(k):
            level_q = []
            for s in itertools.combinations(range(k), q + 1):
                common = set.intersection(*(self.rays[i] for i in s))
                self.face_rays[s] = sorted(common)
                level_q.append(s)
            self.simplices.append(level_q)

    def _present(self, s: tuple[int, ...], m: Weight) -> bool:
        return all(sum(a * b for a, b in zip(m, r)) >= 0 for r in self.face_rays[s])

    def basis(self, q: int, m: Weight) -> list[tuple[int, ...]]:
        if q >= len(self.simplices):
            return []
        return [s for s in self.simplices[q] if self._present(s, m)]

    def delta(self, q: int, m: Weight) -> tuple[list[list[Fraction]], int, int]:
        """δ: C^q → C^{q+1} at weight m, as (rows, nrows, ncols)."""
        src = self.basis(q, m)
        tgt = self.basis(q + 1, m)
        idx = {s: i for i, s in enumerate(src)}
        mat = [[Fraction(0)] * len(src) for _ in tgt]
        for i, t in enumerate(tgt):
            for j in range(len(t)):
                face = t[:j] + t[j + 1:]
                if face in idx:
                    mat[i][idx[face]] += (-1) ** j
        return mat, len(tgt), len(src)


@dataclass
class HodgeTable:
    rank: int
    level: int
    weights: list[Weight]
    hodge: dict[tuple[int, int, Weight], int]
    derham: dict[tuple[int, Weight], int]
    e1_ranks: dict[tuple[int, int, Weight], int]
    smooth: bool
    complete: bool
    notes: list[str] = field(default_factory=list)

    @property
    def model_dependent(self) -> bool:
        return not self.smooth

    def hodge_at(self, m: Sequence) -> dict[tuple[int, int], int]:
        m = tuple(Fraction(x) for x in m)
        return {(p, q): d for (p, q, w), d in self.hodge.items() if w == m}

    def derham_at(self, m: Sequence) -> list[int]:
        m = tuple(Fraction(x) for x in m)
        return [self.derham.get((i, m), 0) for i in range(2 * self.rank + 1)]

    def e1_total(self, m: Sequence) -> int:
        return sum(self.hodge_at(m).values())

    def derham_total(self, m: Sequence) -> int:
        return sum(self.derham_at(m))

    def regraded_hh(self, m: Sequence = None) -> dict[int, int]:
        """⊕_{p-q=i} H^q(Ω^p) at weight m (default 0)."""
        if m is None:
            m = (0,) * self.rank
        out: dict[int, int] = {}
        for (p, q), d in self.hodge_at(m).items():
            if d:
                out[p - q] = out.get(p - q, 0) + d
        return out

    def derham_betti(self, m: Sequence = None) -> list[int]:
        if m is None:
            m = (0,) * self.rank
        b = self.derham_at(m)
        while len(b) > 1 and b[-1] == 0:
            b.pop()
        return b

    def same_dims(self, other: "HodgeTable") -> bool:
        nz = lambda d: {k: v for k, v in d.items() if v}  # noqa: E731
        return (set(self.weights) == set(other.weights) and nz(self.hodge) == nz(other.hodge)
                and nz(self.derham) == nz(other.derham))

    def to_json(self) -> dict:
        return {
            "rank": self.rank, "level": self.level,
            "weights": [wstr(w) for w in self.weights],
            "hodge": [{"p": p, "q": q, "weight": wstr(w), "dim": d}
                      for (p, q, w), d in sorted(self.hodge.items()) if d],
            "derham": [{"i": i, "weight": wstr(w), "dim": d}
                       for (i, w), d in sorted(self.derham.items()) if d],
            "e1_ranks": [{"p": p, "q": q, "weight": wstr(w), "rank": r}
                         for (p, q, w), r in sorted(self.e1_ranks.items()) if r],
            "smooth": self.smooth, "complete": self.complete,
            "model_dependent": self.model_dependent, "notes": list(self.notes),
        }


def weight_box(rank: int, level: int, window) -> list[Weight]:
    """Weights in (1/N)M with every coordinate in [-window, window]."""
    window = Fraction(window)
    top = int(window * level)
    coords = [Fraction(a, level) for a in range(-top, top + 1)]
    return [tuple(w) for w in itertools.product(coords, repeat=rank)]


def _cohomology_dims(ds: list[tuple[list, int, int]], dims: list[int]) -> list[int]:
    """Cohomology of a complex with terms of the given dims and maps ds[i]: C^i → C^{i+1}."""
    ranks = [rank(mat, nc) if nr and nc else 0 for mat, nr, nc in ds]
    out = []
    for i, d in enumerate(dims):
        r_out = ranks[i] if i < len(ranks) else 0
        r_in = ranks[i - 1] if i > 0 else 0
        out.append(d - r_out - r_in)
    return out


def _weight_tables(cc: CechComplex, n: int, m: Weight):
    """Hodge dims, E1 ranks and de Rham dims at one weight."""
    k = len(cc.simplices)
    cdims = [len(cc.basis(q, m)) for q in range(k)]
    deltas = [cc.delta(q, m) for q in range(k)]
    lam = [comb(n, p) for p in range(n + 1)]
    hO = _cohomology_dims(deltas[:max(k - 1, 0)], cdims)
    hodge = {}
    for p in range(n + 1):
        for q in range(k):
            hodge[(p, q)] = hO[q] * lam[p]
    # E1 differential H^q(Ω^p) -> H^q(Ω^{p+1}) induced by id ⊗ (m ∧ -)
    e1 = {}
    for q in range(k):
        if hO[q] == 0:
            continue
        dq, nr, nc = deltas[q]
        cycles = _nullspace_cols(dq, nc) if nr else [[Fraction(int(i == j)) for i in range(nc)]
                                                        for j in range(nc)]
        prev = deltas[q - 1] if q > 0 else ([], cdims[0], 0)
        bnd_cols = list(zip(*prev[0])) if prev[0] and prev[2] else []
        for p in range(n):
            W = _wedge_matrix(m, n, p)
            if not any(any(r) for r in W):
                continue
            # images of cycle ⊗ basis(Λ^p) under id ⊗ W, in C^q ⊗ Λ^{p+1}
            imgs = []
            for z in cycles:
                for j in range(lam[p]):
                    col = [W[t][j] for t in range(lam[p + 1])]
                    imgs.append([zi * ct for zi in z for ct in col])
            bnds = []
            for b in bnd_cols:
                for t in range(lam[p + 1]):
                    bnds.append([bi * Fraction(int(s == t)) for bi in b for s in range(lam[p + 1])])
            width = cdims[q] * lam[p + 1]
            rb = rank(bnds, width) if bnds else 0
            r = (rank(bnds + imgs, width) if imgs else rb) - rb
            if r:
                e1[(p, q)] = r
    # total complex: Tot^i = ⊕_{p+q=i} C^q ⊗ Λ^p, D = δ ⊗ 1 + (-1)^q 1 ⊗ (m ∧)
    blocks = [(p, q) for q in range(k) for p in range(n + 1)]
    off = {}
    tot_dims = []
    for i in range(n + k):
        off[i] = {}
        size = 0
        for (p, q) in blocks:
            if p + q == i:
                off[i][(p, q)] = size
                size += cdims[q] * lam[p]
        tot_dims.append(size)
    tot_maps = []
    for i in range(n + k - 1):
        nr, nc = tot_dims[i + 1], tot_dims[i]
        mat = [[Fraction(0)] * nc for _ in range(nr)]
        for (p, q), c0 in off[i].items():
            # δ ⊗ 1 into (p, q+1)
            if (p, q + 1) in off[i + 1] and q + 1 < k:
                dq, dr, dc = deltas[q]
                r0 = off[i + 1][(p, q + 1)]
                for a in range(dr):
                    for b in range(dc):
                        v = dq[a][b]
                        if v:
                            for t in range(lam[p]):
                                mat[r0 + a * lam[p] + t][c0 + b * lam[p] + t] += v
            # (-1)^q 1 ⊗ (m ∧) into (p+1, q)
            if p < n and (p + 1, q) in off[i + 1]:
                W = _wedge_matrix(m, n, p)
                r0 = off[i + 1][(p + 1, q)]
                sgn = -1 if q % 2 else 1
                for s in range(cdims[q]):
                    for a in range(lam[p + 1]):
                        for b in range(lam[p]):
                            v = W[a][b]
                            if v:
                                mat[r0 + s * lam[p + 1] + a][c0 + s * lam[p] + b] += sgn * v
        tot_maps.append((mat, nr, nc))
    dr = _cohomology_dims(tot_maps, tot_dims)
    return hodge, e1, dr


def _nullspace_cols(mat: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    from .linalg import nullspace
    return nullspace(mat, ncols)


def cech_hypercohomology(f: Fan, N: int = 1, window=1) -> HodgeTable:
    """Per-weight Hodge, E1-rank and log de Rham tables on the weight box of radius window."""
    n = f.rank
    props = fan_properties(f)
    cc = CechComplex(f, N)
    weights = weight_box(n, N, window)
    hodge, e1r, derham = {}, {}, {}
    for m in weights:
        h, e1, dr = _weight_tables(cc, n, m)
        for (p, q), d in h.items():
            hodge[(p, q, m)] = d
        for (p, q), r in e1.items():
            e1r[(p, q, m)] = r
        for i, d in enumerate(dr):
            derham[(i, m)] = d
    notes = []
    smooth = all(is_smooth_cone(c) for c in f.maximal_cones)
    if not smooth:
        notes.append("model-dependent: dlog-free model of log forms on a non-smooth fan")
    if not props.complete:
        notes.append("non-complete fan: weights outside the window are not computed")
    return HodgeTable(n, N, weights, hodge, derham, e1r, smooth, props.complete, notes)


@dataclass
class DegenerationReport:
    passed: bool
    weight_zero_passed: bool
    failures: list[dict]

    def to_json(self) -> dict:
        return {"passed": self.passed, "weight_zero_passed": self.weight_zero_passed,
                "failures": self.failures}


def degeneration_check(t: HodgeTable) -> DegenerationReport:
    failures = []
    for m in t.weights:
        e1, dr = t.e1_total(m), t.derham_total(m)
        if e1 != dr:
            failures.append({"kind": "totals", "weight": wstr(m), "e1": e1, "derham": dr})
    for (p, q, m), r in sorted(t.e1_ranks.items()):
        if r:
            failures.append({"kind": "differential", "p": p, "q": q, "weight": wstr(m), "rank": r})
    zero = wstr((0,) * t.rank)
    return DegenerationReport(not failures, not any(f["weight"] == zero for f in failures), failures)


def hp_fold(t: HodgeTable) -> tuple[int, int]:
    """Fold the weight-0 de Rham Betti numbers by parity."""
    b = t.derham_at((0,) * t.rank)
    return sum(b[0::2]), sum(b[1::2])


def kunneth(a: HodgeTable, b: HodgeTable) -> dict[tuple[int, int, Weight], int]:
    """Graded tensor of two Hodge tables, keyed like HodgeTable.hodge."""
    out: dict = {}
    for (p1, q1, w1), d1 in a.hodge.items():
        if not d1:
            continue
        for (p2, q2, w2), d2 in b.hodge.items():
            if d2:
                key = (p1 + p2, q1 + q2, tuple(w1) + tuple(w2))
                out[key] = out.get(key, 0) + d1 * d2
    return out
