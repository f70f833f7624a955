from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from logtoric.monoid_algebra import (ChartError, LevelAlgebra, boundary_ideal, hilbert_basis,
                                     idempotency_defect, level_lift, standard_chart, weight)
from logtoric.toric_core import Cone


def test_hilbert_basis_of_singular_cone():
    hb = hilbert_basis(Cone([(1, 0), (1, 2)]), 1)
    assert set(hb) == {weight(0, 1), weight(1, 0), weight(2, -1)}


def test_hilbert_basis_scales_with_level():
    assert set(hilbert_basis(Cone([(1, 0), (0, 1)]), 2)) == {weight(0, "1/2"), weight("1/2", 0)}


def test_lower_dimensional_chart_rejected():
    with pytest.raises(ChartError, match="full-dimensional"):
        LevelAlgebra(Cone([(1, 0)], rank=2), 1)


@pytest.mark.parametrize("N", [1, 2, 3, 6])
def test_nc1_boundary_ideal(N):
    assert boundary_ideal(standard_chart(1, N)).generators == (weight(Q(1, N)),)


def test_quadrant_boundary_ideal():
    assert boundary_ideal(standard_chart(2, 2)).generators == (weight("1/2", "1/2"),)


def test_singular_chart_boundary_ideal():
    i = boundary_ideal(LevelAlgebra(Cone([(1, 0), (1, 2)]), 1))
    assert i.generators == (weight(1, 0),)


@pytest.mark.parametrize("N", [1, 2, 4, 6])
def test_defect_minimum_shrinks(N):
    d = idempotency_defect(boundary_ideal(standard_chart(1, N)), 3)
    assert d.min_weight == weight(Q(1, N))
    assert d.weights == (weight(Q(1, N)),)


def test_lift_maps_generators():
    lift = level_lift(LevelAlgebra(Cone([(1, 0), (0, 1)]), 1), 3)
    assert lift.image(weight(0, 1)) == {weight(0, "1/3"): 3}
    assert lift.residue_inclusion((1, 0)) == (0, 0)
    assert lift.group_map((5, 2)) == (0, 0)


def test_lift_requires_divisibility():
    with pytest.raises(ChartError, match="not a multiple"):
        level_lift(standard_chart(1, 2), 3)


def test_lifts_compose():
    a = standard_chart(1, 1)
    l1 = level_lift(a, 2)
    l2 = level_lift(l1.target, 6)
    assert l1.compose(l2).factor == 6


cones2 = st.sampled_from([
    [(1, 0), (0, 1)], [(1, 0), (1, 2)], [(1, 0), (1, 3)], [(1, 1), (-1, 1)],
    [(2, -1), (-1, 2)], [(1, 0), (-1, 3)],
])


@given(cones2, st.sampled_from([1, 2, 3]))
@settings(max_examples=25, deadline=None)
def test_hilbert_basis_generates_the_monoid(rays, N):
    a = LevelAlgebra(Cone(rays), N)
    pts = set(a.elements_up_to(3))
    box = [Q(x, N) for x in range(-4 * N, 4 * N + 1)]
    for x in box:
        for y in box:
            w = (x, y)
            if a.contains(w) and a.degree(w) <= 3:
                assert w in pts
    # minimality: no basis element is a sum of two nonzero monoid elements
    for h in a.hilbert_basis:
        for g in a.hilbert_basis:
            if g != h:
                assert not a.contains(tuple(p - q for p, q in zip(h, g)))


@given(cones2, st.sampled_from([1, 2, 4]))
@settings(max_examples=25, deadline=None)
def test_boundary_ideal_is_the_interior(rays, N):
    a = LevelAlgebra(Cone(rays), N)
    i = boundary_ideal(a)
    for w in a.elements_up_to(4):
        assert i.contains(w) == a.is_interior(w)


@given(cones2, st.sampled_from([1, 2]), st.sampled_from([2, 3]))
@settings(max_examples=20, deadline=None)
def test_lift_embeds_monoid(rays, N, k):
    a = LevelAlgebra(Cone(rays), N)
    b = level_lift(a, N * k).target
    for w in a.elements_up_to(2):
        assert b.contains(w)
        assert b.residue(w) == level_lift(a, N * k).residue_inclusion(a.residue(w))
