import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from carnot.algebras import abelian, engel, heisenberg, random_algebra
from carnot.gbar import (
    ConstructionError,
    HypothesisError,
    build_gbar,
    build_semidirect,
    check_nondegeneracy,
    coadjoint_semidirect,
    flatten_orbit,
    gbar_as_semidirect,
)
from carnot.lie import validate
from strategies import NAMED, nonzero_rationals, rationals

EXPECTED_DIMS = {"h3": (3, 3, 1), "h5": (5, 5, 1), "engel": (3, 2, 3, 1), "free23": (4, 2, 4, 1)}


@pytest.mark.parametrize("name", sorted(NAMED))
def test_gbar_is_a_carnot_algebra(name):
    gb = build_gbar(NAMED[name])
    assert gb.algebra.dims == EXPECTED_DIMS[name]
    assert validate(gb.algebra).ok
    assert check_nondegeneracy(gb.algebra).ok


@given(st.integers(0, 10_000))
def test_gbar_of_random_algebras(seed):
    g = random_algebra(random.Random(seed))
    gb = build_gbar(g)
    assert validate(gb.algebra).ok
    assert gb.algebra.dims[-1] == 1
    # ideal g* + RZ abelian, quotient by it is g
    n = gb.semidirect().ideal
    assert n.is_abelian()
    assert gbar_as_semidirect(g).algebra.same_structure(gb.algebra)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_gbar_of_abelian_is_heisenberg(d):
    a = build_gbar(abelian(d)).algebra
    h = heisenberg(d)
    assert a.dims == h.dims
    assert a.structure_constants() == h.structure_constants()


def test_pairing_rule_and_labels():
    e = engel()
    gb = build_gbar(e)
    alg = gb.algebra
    z = alg.basis_vector(gb.z_index)
    for a in range(e.dim):
        f, x = alg.basis_vector(gb.dual_index[a]), alg.basis_vector(gb.g_index[a])
        assert alg.bracket(f, x) == tuple(Fraction(e.degrees[a]) * c for c in z)
    assert alg.basis[gb.z_index] == "Z"
    assert build_gbar(heisenberg(1)).algebra.basis[-1] == "Zbar"
    assert "X1*" in alg.basis


def test_quotient_by_center_is_coadjoint_semidirect():
    from carnot.algebras import quotient_top

    for name in sorted(NAMED):
        g = NAMED[name]
        q = quotient_top(build_gbar(g).algebra, [])
        ref = coadjoint_semidirect(g).algebra
        assert q.dims == ref.dims
        assert q.structure_constants() == ref.structure_constants()


def test_semidirect_rejects_bad_actions():
    n = abelian(2)
    h = abelian(1)
    with pytest.raises(ConstructionError) as exc:
        build_semidirect(n, h, [[[1, 0], [0, 1]]])
    assert "grading" in str(exc.value)
    # D(X2) = X3 alone: D[X1, X2] = 0 but [X1, D X2] = X4
    bad = [[0] * 4 for _ in range(4)]
    bad[2][1] = 1
    with pytest.raises(ConstructionError) as exc:
        build_semidirect(engel(), abelian(1), [bad])
    assert "derivation" in str(exc.value)


def test_semidirect_homomorphism_check():
    from carnot.lie import GradedLieAlgebra

    n = GradedLieAlgebra([1, 0, 1], {}, ["A", "C"])
    zero = [[0, 0], [0, 0]]
    with pytest.raises(ConstructionError) as exc:
        build_semidirect(n, heisenberg(1), [zero, zero, [[0, 0], [1, 0]]])
    assert "homomorphism" in str(exc.value)
    ok = build_semidirect(n, heisenberg(1), [zero, zero, zero])
    assert validate(ok.algebra).ok


@pytest.mark.parametrize("name", ["h3", "gbar-h3", "gbar-engel", "gbar-free23", "gbar-h5"])
def test_flatten_named(name):
    rng = random.Random(7)
    alg = NAMED["h3"] if name == "h3" else build_gbar(NAMED[name[5:]]).algebra
    for _ in range(10):
        ell = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(alg.dim - 1)]
        t = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 4))
        g = flatten_orbit(alg, ell, t)
        assert alg.coAd(g.coords)(tuple(ell) + (t,)) == (0,) * (alg.dim - 1) + (t,)


@given(st.lists(rationals, min_size=6, max_size=6), nonzero_rationals)
def test_flatten_gbar_h3(ell, t):
    gb = build_gbar(heisenberg(1))
    g = flatten_orbit(gb, ell, t)
    assert gb.algebra.coAd(g.coords)(tuple(ell) + (t,)) == (0,) * 6 + (t,)


def test_flatten_hypotheses():
    with pytest.raises(HypothesisError):
        flatten_orbit(heisenberg(1), [1, 2], 0)
    with pytest.raises(HypothesisError):
        flatten_orbit(engel(), [1, 2, 3], 1)
    rep = check_nondegeneracy(engel())
    assert not rep.ok and rep.witness is not None
