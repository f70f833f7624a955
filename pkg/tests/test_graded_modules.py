from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from _corpus import random_presented, sample_weights
from logtoric.graded_modules import (InsufficientWindow, ModuleError, WindowedModule,
                                     almost_correction, almost_hom, almost_locality,
                                     almost_tensor, boundary_module, dims_json, hom_module,
                                     is_almost_zero, kahler_module, skyscraper,
                                     structure_module, tensor)
from logtoric.monoid_algebra import standard_chart, weight


def dims1(M, upto):
    return {str(w[0]): d for w, d in M.dims(upto).items() if d}


def test_unit_law():
    a = standard_chart(1, 2)
    F = WindowedModule(a, [weight("1/2"), weight(1)], [{(0, weight("1/2")): 1, (1, weight(0)): -1}], 3)
    T = tensor(structure_module(a, 3), F)
    for w in F.support_weights(2):
        assert T.dim(w) == F.dim(w)


def test_ideal_square_nc1_level2():
    a = standard_chart(1, 2)
    I = boundary_module(a, 4)
    assert dims1(tensor(I, I), 2) == {"1": 1, "3/2": 1, "2": 1}


def test_twist_shifts_dims():
    a = standard_chart(2, 2)
    F = structure_module(a, 3)
    v = weight("1/2", 0)
    G = tensor(F, WindowedModule(a, [v], (), 3))
    for w in F.support_weights(2):
        assert G.dim(tuple(x + y for x, y in zip(w, v))) == F.dim(w)


def test_hom_from_unit():
    a = standard_chart(1, 3)
    G = kahler_module(a, 3)
    H = hom_module(structure_module(a, 3), G)
    for w in G.support_weights(2):
        assert H.dim(w) == G.dim(w)


@pytest.mark.parametrize("N", [1, 2])
def test_hom_ideal_ideal_is_structure(N):
    a = standard_chart(1, N)
    H = hom_module(boundary_module(a, 3), boundary_module(a, 3))
    assert {w: d for w, d in H.dims(2).items() if d} == {w: 1 for w in a.elements_up_to(2)}


@pytest.mark.parametrize("N", [1, 2, 3])
def test_hom_ideal_structure_starts_below_zero(N):
    a = standard_chart(1, N)
    H = hom_module(boundary_module(a, 3), structure_module(a, 3))
    nz = sorted(w[0] for w, d in H.dims(2).items() if d)
    assert nz[0] == Q(-1, N)
    assert nz == [Q(-1, N) + Q(j, N) for j in range(len(nz))]


def test_hom_refuses_past_window():
    a = standard_chart(1, 1)
    H = hom_module(boundary_module(a, 2), structure_module(a, 2))
    with pytest.raises(InsufficientWindow, match="insufficient window"):
        H.dim(weight(2))


def test_mismatched_algebras():
    with pytest.raises(ModuleError):
        tensor(structure_module(standard_chart(1, 1)), structure_module(standard_chart(1, 2)))


def test_relation_must_be_homogeneous():
    a = standard_chart(1, 1)
    with pytest.raises(ModuleError, match="homogeneous"):
        WindowedModule(a, [weight(0), weight(0)], [{(0, weight(1)): 1, (1, weight(0)): 1}])


def test_redundant_presentation_same_dims():
    a = standard_chart(2, 2)
    F = WindowedModule(a, [weight(0, 0)], [{(0, weight("1/2", 0)): 1}], 3)
    # add a redundant generator equal to x^{(0,1/2)} e_0
    G = WindowedModule(a, [weight(0, 0), weight(0, "1/2")],
                       [{(0, weight("1/2", 0)): 1}, {(1, weight(0, 0)): 1, (0, weight(0, "1/2")): -1}], 3)
    for w in F.support_weights(2):
        assert F.dim(w) == G.dim(w)
    Om = kahler_module(a, 3)
    for w in Om.support_weights(2):
        assert tensor(F, Om).dim(w) == tensor(G, Om).dim(w)


def test_locality_of_ideal():
    a = standard_chart(1, 1)
    v = almost_locality(boundary_module(a, 3))
    assert v.verdict == "almost-local in tower"
    assert [v.min_failure_degrees[L] for L in (1, 2, 4)] == [1, Q(1, 2), Q(1, 4)]


def test_locality_of_structure_sheaf():
    v = almost_locality(structure_module(standard_chart(1, 2), 3))
    assert v.verdict == "not almost-local"
    assert v.failures == {weight(0): (0, 1)}
    assert v.cokernel_almost_zero


@pytest.mark.parametrize("k,N", [(1, 1), (1, 3), (2, 2)])
def test_skyscraper_is_almost_zero(k, N):
    assert almost_locality(skyscraper(standard_chart(k, N), 3)).verdict == "almost-zero"


def test_correction_examples():
    a = standard_chart(1, 2)
    O = structure_module(a, 3)
    ac = almost_correction(O)
    assert all(ac.stable(w) == O.dim(w) for w in O.support_weights(2))
    assert all(d == 0 for d in almost_correction(skyscraper(a, 3)).dims(2).values())
    om = almost_correction(kahler_module(a, 3))
    assert om.stable(weight(0)) == 1      # the dlog class
    assert kahler_module(a, 3).dim(weight(0)) == 0


def test_dims_json_shape():
    a = standard_chart(1, 2)
    j = structure_module(a, 1).to_json()
    assert j == {"weights": ["0", "1/2", "1"], "dims": [1, 1, 1]}
    assert dims_json({}) == {"weights": [], "dims": []}


@given(st.integers(0, 10_000), st.sampled_from([(1, 1), (1, 2), (1, 4), (2, 1), (2, 2)]))
@settings(max_examples=25, deadline=None)
def test_tower_identity_random(seed, kn):
    import random
    F = random_presented(random.Random(seed), *kn)
    lhs, rhs = almost_tensor(almost_hom(F)), almost_tensor(F)
    for w in sample_weights(F):
        assert lhs.stable(w) == rhs.stable(w)


@given(st.integers(0, 10_000), st.sampled_from([(1, 2), (2, 1)]))
@settings(max_examples=20, deadline=None)
def test_correction_idempotent_random(seed, kn):
    import random
    F = random_presented(random.Random(seed), *kn)
    once = almost_correction(F)
    twice = almost_correction(once)
    for w in sample_weights(F, Q(1)):
        assert once.stable(w) == twice.stable(w)


@given(st.integers(0, 10_000), st.sampled_from([(1, 1), (1, 2), (2, 2)]))
@settings(max_examples=20, deadline=None)
def test_presented_dims_independent_of_generator_order(seed, kn):
    import random
    F = random_presented(random.Random(seed), *kn)
    perm = list(reversed(range(len(F.generators))))
    inv = {j: perm.index(j) for j in range(len(perm))}
    G = WindowedModule(F.algebra, [F.generators[j] for j in perm],
                       [{(inv[j], m): c for (j, m), c in r.items()} for _, r in F.relations], F.window)
    for w in F.support_weights(2):
        assert F.dim(w) == G.dim(w)


def test_almost_zero_flag_matches_correction():
    a = standard_chart(2, 1)
    for F in (skyscraper(a, 3), structure_module(a, 3), boundary_module(a, 3)):
        ac = almost_correction(F)
        zero = all(ac.stable(w) == 0 for w in sample_weights(F))
        assert zero == is_almost_zero(F)
