from fractions import Fraction as Q
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from logtoric.log_derham import (cech_hypercohomology, degeneration_check, hp_fold, kunneth,
                                 log_forms_chart)
from logtoric.toric_core import (Cone, Fan, FanMorphism, affine_line, affine_plane,
                                 check_modification, hirzebruch, product_fan, projective_line,
                                 projective_plane, star_subdivision, torus_fan)

quadrant = Cone([(1, 0), (0, 1)])


def test_dlog_basis_nc1():
    c = log_forms_chart(Cone([(1,)]), 1)
    assert c.words(1) == [(0,)]
    assert c.d(c.monomial((1,))) == {((Q(1),), (0,)): 1}


def test_half_weight_differential():
    c = log_forms_chart(Cone([(1,)]), 2)
    assert c.d(c.monomial((Q(1, 2),))) == {((Q(1, 2),), (0,)): Q(1, 2)}


def test_leibniz_on_xy():
    c = log_forms_chart(quadrant, 1)
    assert c.d(c.monomial((1, 1))) == {((1, 1), (0,)): 1, ((1, 1), (1,)): 1}


def test_monomial_outside_chart():
    with pytest.raises(ValueError):
        log_forms_chart(quadrant, 1).monomial((-1, 0))


mono = st.tuples(st.integers(0, 6), st.integers(0, 6))
words2 = st.sampled_from([(), (0,), (1,), (0, 1)])


@given(mono, words2, st.sampled_from([1, 2, 3]))
@settings(max_examples=80, deadline=None)
def test_d_squared_zero(a, word, N):
    c = log_forms_chart(quadrant, N)
    m = tuple(Q(x, N) for x in a)
    assert c.d(c.d(c.monomial(m, word))) == {}


@given(mono, words2, mono, words2)
@settings(max_examples=80, deadline=None)
def test_leibniz(a, wa, b, wb):
    c = log_forms_chart(quadrant, 1)
    x, y = c.monomial(a, wa), c.monomial(b, wb)
    lhs = c.d(c.wedge(x, y))
    r1 = c.wedge(c.d(x), y)
    r2 = c.wedge(x, c.d(y))
    sign = -1 if len(wa) % 2 else 1
    rhs = dict(r1)
    for k, v in r2.items():
        rhs[k] = rhs.get(k, 0) + sign * v
    assert lhs == {k: v for k, v in rhs.items() if v}


@given(mono, st.integers(0, 2))
def test_freeness(a, p):
    c = log_forms_chart(quadrant, 1)
    assert c.piece_dim(p, a) == comb(2, p)
    assert c.piece_dim(p, (-1, a[1])) == 0


def test_p1_table():
    t = cech_hypercohomology(projective_line(), 1, 2)
    assert t.hodge_at((0,)) == {(0, 0): 1, (1, 0): 1, (0, 1): 0, (1, 1): 0}
    assert t.regraded_hh() == {0: 1, 1: 1}
    r = degeneration_check(t)
    assert r.passed and t.e1_total((0,)) == 2 == t.derham_total((0,))
    assert hp_fold(t) == (1, 1)


def test_p2_table():
    t = cech_hypercohomology(projective_plane(), 1, 1)
    zero = (0, 0)
    assert [t.hodge_at(zero)[(p, 0)] for p in range(3)] == [1, 2, 1]
    assert all(d == 0 for (p, q), d in t.hodge_at(zero).items() if q > 0)
    assert degeneration_check(t).passed and t.e1_total(zero) == 4
    assert hp_fold(t) == (2, 2)


def test_torus_weights():
    t = cech_hypercohomology(torus_fan(1), 1, 3)
    assert t.derham_at((0,))[:2] == [1, 1]
    for m in (-3, -1, 2):
        assert t.derham_total((m,)) == 0
    r = degeneration_check(t)
    assert not r.passed and r.weight_zero_passed


def test_point_fold():
    assert hp_fold(cech_hypercohomology(torus_fan(0), 1, 1)) == (1, 0)


def test_non_complete_plane_is_weight_zero_clean():
    t = cech_hypercohomology(affine_plane(), 1, 1)
    r = degeneration_check(t)
    assert r.weight_zero_passed
    assert t.hodge_at((1, 1)) == {(0, 0): 1, (1, 0): 2, (2, 0): 1}


def test_singular_fan_flagged():
    f = Fan.from_data(2, [(1, 0), (1, 2)], [[0, 1]])
    t = cech_hypercohomology(f, 1, 1)
    assert t.model_dependent and "model-dependent" in t.to_json()["notes"][0]


def test_level_two_weights():
    t = cech_hypercohomology(projective_line(), 2, 1)
    assert (0, Q(1, 2)) in [(i, w[0]) for (i, w) in t.derham]
    assert t.derham_total((Q(1, 2),)) == 0 and t.derham_total((0,)) == 2


def test_json_keys():
    j = cech_hypercohomology(projective_line(), 1, 1).to_json()
    assert {"hodge", "derham", "e1_ranks"} <= set(j)
    assert {"p", "q", "weight", "dim"} == set(j["hodge"][0])


def test_kunneth_for_products():
    a = cech_hypercohomology(projective_line(), 1, 1)
    b = cech_hypercohomology(affine_line(), 1, 1)
    t = cech_hypercohomology(product_fan(projective_line(), affine_line()), 1, 1)
    want = kunneth(a, b)
    got = {k: v for k, v in t.hodge.items() if v}
    assert got == want


refinement_rays = st.sampled_from([(1, 1), (1, 2), (2, 1), (-1, -2), (1, -1), (-1, 2)])


@given(refinement_rays)
@settings(max_examples=10, deadline=None)
def test_refinement_invariance(r):
    base = projective_plane()
    f = star_subdivision(base, r)
    assert check_modification(FanMorphism.identity(f, base)).is_proper_refinement
    assert cech_hypercohomology(f, 1, 1).same_dims(cech_hypercohomology(base, 1, 1))


def test_affine_blowup_invariance():
    a = affine_plane()
    b = star_subdivision(a, (1, 1))
    assert cech_hypercohomology(a, 1, 1).same_dims(cech_hypercohomology(b, 1, 1))


@pytest.mark.parametrize("fan", [hirzebruch(0), hirzebruch(1), hirzebruch(3)])
def test_hirzebruch_degenerates(fan):
    t = cech_hypercohomology(fan, 1, 1)
    assert degeneration_check(t).passed and t.e1_total((0, 0)) == 4
