from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from logtoric.graded_modules import is_almost_zero, kahler_module, skyscraper, structure_module
from logtoric.hochschild import (ChartSpec, HHError, WeightedBarComplex, bar_dims,
                                 chart_spec_for_cone, hh_log, hh_log_fan, hh_parabolic_level,
                                 hkr_compare, hkr_compare_fan, hp_fold_hh, koszul_dims,
                                 koszul_dims_direct, kunneth_tables, nc_chart, torus_chart,
                                 tower_stabilization)
from logtoric.log_derham import cech_hypercohomology, hp_fold
from logtoric.monoid_algebra import LevelAlgebra, standard_chart
from logtoric.toric_core import Cone, affine_line, projective_line, projective_plane, torus_fan

NC1, NC2 = nc_chart(1), nc_chart(2)
MIXED = ChartSpec(("affine", "nc"))


def test_nc1_level1():
    t = hh_parabolic_level(NC1, 1, window=4)
    for a in range(5):
        assert t.dim(0, (a,)) == 1
        assert t.dim(1, (a,)) == (1 if a >= 1 else 0)
    assert all(i < 2 for (i, _, _), d in t.entries.items() if d)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_nc1_twisted_sector_count(N):
    t = hh_parabolic_level(NC1, N, window=1)
    assert t.twisted_count(0) == N - 1
    assert t.twisted_count(1) == 0
    for g in range(1, N):
        assert t.dim(0, (0,), (g,)) == 1


def test_auto_mode_uses_bar_on_small_weights():
    t = hh_parabolic_level(NC1, 3, window=2)
    assert t.methods[((Q(1, 3),), (1,))] == "bar"
    assert t.methods[((Q(2),), (0,))] == "koszul"


@given(st.sampled_from([1, 2, 3, 4]), st.integers(0, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_bar_matches_koszul_nc1(N, a, data):
    g = (data.draw(st.integers(0, N - 1)),)
    w = (Q(a, N),)
    assert bar_dims(NC1, N, g, w) == koszul_dims(NC1, N, g, w)


@given(st.sampled_from([1, 2]), st.integers(0, 2), st.integers(0, 2), st.data())
@settings(max_examples=25, deadline=None)
def test_bar_matches_koszul_nc2(N, a, b, data):
    g = tuple(data.draw(st.integers(0, N - 1)) for _ in range(2))
    w = (Q(a, N), Q(b, N))
    assert bar_dims(NC2, N, g, w) == koszul_dims(NC2, N, g, w)


@given(st.sampled_from(["nc", "affine", "torus"]), st.sampled_from(["nc", "affine", "torus"]),
       st.integers(-2, 3), st.integers(-2, 3), st.sampled_from([1, 2, 3]), st.data())
@settings(max_examples=60, deadline=None)
def test_koszul_kunneth_matches_direct(f1, f2, a, b, N, data):
    spec = ChartSpec((f1, f2))
    g = data.draw(st.sampled_from(spec.sectors(N)))
    w = tuple(spec.step(j, N) * x for j, x in enumerate((a, b)))
    assert koszul_dims(spec, N, g, w) == koszul_dims_direct(spec, N, g, w)


@given(st.integers(1, 4), st.integers(1, 3), st.sampled_from([1, 2, 3]))
@settings(max_examples=30, deadline=None)
def test_bar_d_squared(a, r, N):
    for g in range(N):
        bc = WeightedBarComplex.for_chart(NC1, N, (Q(a, N),), (g,))
        assert bc.d_squared_is_zero(r + 1)


def test_bar_d_squared_nc2_twisted():
    bc = WeightedBarComplex.for_chart(NC2, 3, (Q(2, 3), Q(1, 3)), (1, 2))
    assert all(bc.d_squared_is_zero(r) for r in range(2, 4))


@pytest.mark.parametrize("N,a", [(1, 2), (2, 2), (3, 1)])
def test_reduced_and_unreduced_agree(N, a):
    for g in range(N):
        red = WeightedBarComplex.for_chart(NC1, N, (Q(a, N),), (g,))
        full = WeightedBarComplex.for_chart(NC1, N, (Q(a, N),), (g,), normalized=False)
        assert [red.homology(i) for i in range(2)] == [full.homology(i) for i in range(2)]


def test_singular_chart_bar():
    alg = LevelAlgebra(Cone([(1, 0), (1, 2)]), 1)
    t = hh_parabolic_level(alg, 1, window=2)
    assert t.dim(0, (0, 0)) == 1
    assert t.dim(0, (1, 0)) == 1


def test_torus_refuses_bar():
    with pytest.raises(HHError, match="Koszul"):
        hh_parabolic_level(torus_chart(1), 1, window=1, method="bar")


def test_log_nc1_level4_internal():
    t = hh_log(NC1, 4, 1)
    support = sorted(w[0] for (i, w, g), d in t.entries.items() if i == 1 and d and not any(g))
    assert support == [Q(j, 4) for j in range(5)]
    assert t.twisted_count(0) == 0 and not t.unstable


def test_a1_invariant_view():
    t = hh_log(NC1, 2, 3)
    inv = t.invariant()
    assert inv == {(i, (Q(w),)): 1 for i in (0, 1) for w in range(4)}
    dx = t.invariant(shift_dx=True)
    assert sorted(w[0] for (i, w) in dx if i == 1) == [1, 2, 3, 4]


def test_shift_dx_needs_rank_one():
    with pytest.raises(HHError):
        hh_log(NC2, 1, 1).invariant(shift_dx=True)


def test_log_kills_exactly_the_almost_zero_sector_modules():
    N = 3
    t = hh_log(NC1, N, 2)
    a = standard_chart(1, N)
    # untwisted HH_0 ~ O, HH_1 ~ Kähler differentials, twisted HH_0 ~ O/I
    assert not is_almost_zero(structure_module(a, 3))
    assert not is_almost_zero(kahler_module(a, 3))
    assert is_almost_zero(skyscraper(a, 3))
    assert t.dim(0, (0,)) == 1 and t.dim(1, (0,)) == 1
    assert all(t.dim(0, (Q(j, N),), (g,)) == 0 for g in (1, 2) for j in range(4))


def test_kunneth_nc2():
    a = hh_log(NC1, 2, 1)
    b = hh_log(NC2, 2, 1)
    prod = kunneth_tables(a, a)
    got = {(i, w): d for (i, w, g), d in b.entries.items() if d and not any(g)}
    assert got == prod


@pytest.mark.parametrize("spec,N,window", [(NC1, 1, 3), (NC1, 2, 2), (NC2, 1, 3), (MIXED, 1, 3),
                                           (torus_chart(1), 2, 2)])
def test_hkr(spec, N, window):
    r = hkr_compare(spec, N, window)
    assert r.passed, r.first_mismatch


def test_hkr_fan():
    for f in (projective_line(), projective_plane(), affine_line(), torus_fan(1)):
        assert hkr_compare_fan(hh_log_fan(f, 1, 1), cech_hypercohomology(f, 1, 1)).passed


def test_p1_fan():
    t = hh_log_fan(projective_line(), 1, 3)
    assert t.invariant_totals() == [1, 1]
    assert hp_fold_hh(t) == (1, 1) == hp_fold(cech_hypercohomology(projective_line(), 1, 3))


def test_hp_folds_agree_on_plane():
    assert hp_fold_hh(hh_log_fan(projective_plane(), 1, 1)) == (2, 2)


@pytest.mark.parametrize("N,Np,counts", [(1, 2, (0, 1)), (2, 6, (1, 5)), (3, 6, (2, 5))])
def test_stabilization(N, Np, counts):
    r = tower_stabilization(NC1, N, Np)
    assert r.passed and r.twisted_counts == counts


def test_stabilization_needs_divisibility():
    with pytest.raises(HHError):
        tower_stabilization(NC1, 2, 3)


def test_chart_spec_for_cone():
    spec, basis = chart_spec_for_cone(Cone([(1, 1)], rank=2))
    assert spec.factors == ("nc", "torus") and basis[0] == (1, 1)
    with pytest.raises(HHError):
        chart_spec_for_cone(Cone([(1, 0), (1, 2)]))


def test_table_json():
    j = hh_parabolic_level(NC1, 2, window=Q(1, 2)).to_json()
    assert {"i", "weight", "sector", "dim"} == set(j["entries"][0])
