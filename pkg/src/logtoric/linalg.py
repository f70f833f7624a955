"""Exact linear algebra helpers.

Everything here works over Q (``fractions.Fraction``) or over a cyclotomic
field Q(zeta_n); ranks are delegated to sympy's DomainMatrix.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from sympy import I, exp, pi
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fstr(x) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = [as_fraction(x) for x in v]
    if not any(v):
        raise ValueError("zero vector has no primitive representative")
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    return tuple(a // g for a in ints)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    """Rank over Q of a list of rational rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    if ncols == 0:
        return 0
    dm = DomainMatrix([[QQ(as_fraction(x).numerator, as_fraction(x).denominator) for x in r] for r in rows],
                      (len(rows), ncols), QQ)
    return dm.rank()


def sparse_rank(entries: dict[tuple[int, int], object], shape: tuple[int, int], domain=None) -> int:
    """Rank of a sparse matrix given as {(row, col): value}."""
    nrows, ncols = shape
    if nrows == 0 or ncols == 0 or not entries:
        return 0
    if domain is None:
        domain = QQ
        data: dict[int, dict[int, object]] = {}
        for (i, j), v in entries.items():
            v = as_fraction(v)
            if v:
                data.setdefault(i, {})[j] = QQ(v.numerator, v.denominator)
    else:
        data = {}
        for (i, j), v in entries.items():
            if v != domain.zero:
                data.setdefault(i, {})[j] = v
    if not data:
        return 0
    return DomainMatrix(data, shape, domain).rank()


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0} over Q, as Fraction vectors."""
    if ncols == 0:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    dm = DomainMatrix([[QQ(as_fraction(x).numerator, as_fraction(x).denominator) for x in r] for r in rows],
                      (len(rows), ncols), QQ)
    basis = dm.nullspace().to_Matrix().tolist()
    return [[Fraction(int(x.p), int(x.q)) for x in vec] for vec in basis]


def row_reduce(rows: Iterable[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of rows, returning (nonzero rows, pivot columns)."""
    mat = [[as_fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def det(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    mat = [[as_fraction(x) for x in r] for r in rows]
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            mat[c], mat[p] = mat[p], mat[c]
            result = -result
        result *= mat[c][c]
        for i in range(c + 1, n):
            f = mat[i][c] / mat[c][c]
            if f:
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return result


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution x of rows . x = rhs over Q, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [[as_fraction(x) for x in r] + [as_fraction(b)] for r, b in zip(rows, rhs)]
    red, piv = row_reduce(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for r, c in zip(red, piv):
        x[c] = r[ncols]
    return x


@lru_cache(maxsize=None)
def cyclotomic(n: int):
    """(domain, zeta) for the cyclotomic field Q(zeta_n); Q itself for n <= 2."""
    if n <= 2:
        return QQ, QQ(-1) if n == 2 else QQ(1)
    dom = QQ.algebraic_field(exp(2 * pi * I / n))
    return dom, dom.from_sympy(exp(2 * pi * I / n))
