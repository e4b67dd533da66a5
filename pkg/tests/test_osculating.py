from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot.algebras import engel, heisenberg
from carnot.osculating import (
    FiltrationError,
    FiltrationSpec,
    PolyVectorField,
    check_filtration,
    engel_frames,
    filtration_order,
    heisenberg_frames,
    monomial,
    osculating_algebra,
    poly_add,
    poly_mul,
    vf_bracket,
)
from strategies import rationals

coords3 = st.tuples(rationals, rationals, rationals)
coords4 = st.tuples(rationals, rationals, rationals, rationals)


def polys(d, max_deg=2):
    mono = st.tuples(*[st.integers(0, max_deg)] * d)
    return st.dictionaries(mono, rationals.filter(bool), max_size=3)


def fields(d):
    return st.lists(polys(d), min_size=d, max_size=d).map(lambda c: PolyVectorField(d, c))


@settings(max_examples=10)
@given(coords3)
def test_heisenberg_frames_give_h3(x):
    osc = osculating_algebra(heisenberg_frames(), x)
    assert osc.algebra.same_structure(heisenberg(1))
    assert osc.algebra.dims == (2, 1)


@settings(max_examples=10)
@given(coords4)
def test_engel_frames_give_engel(x):
    assert osculating_algebra(engel_frames(), x).algebra.same_structure(engel())


def _perturbed(spec, data):
    """Add polynomial multiples of strictly lower-weight frames to each frame."""
    frames = []
    for i, (f, w) in enumerate(zip(spec.frames, spec.weights)):
        g = f
        for j, wj in enumerate(spec.weights):
            if wj < w:
                p = data.draw(polys(spec.dim))
                g = g + spec.frames[j].scale(p)
        frames.append(g)
    return FiltrationSpec(spec.dim, frames, spec.weights, spec.ranks)


@settings(max_examples=20)
@given(st.data(), st.sampled_from(["heisenberg", "engel"]))
def test_structure_is_independent_of_lower_weight_perturbations(data, name):
    spec = heisenberg_frames() if name == "heisenberg" else engel_frames()
    x = data.draw(coords3 if name == "heisenberg" else coords4)
    base = osculating_algebra(spec, x).algebra
    assert osculating_algebra(_perturbed(spec, data), x).algebra.same_structure(base)


def test_different_section_choice():
    # Y' = Y + X spans the same H^1; [X, Y'] = [X, Y]
    spec = heisenberg_frames()
    X, Y, T = spec.frames
    alt = FiltrationSpec(3, [X, Y + X, T], [1, 1, 2], [2, 3])
    assert osculating_algebra(alt, (0, 0, 0)).algebra.same_structure(heisenberg(1))


@settings(max_examples=25)
@given(fields(2), fields(2), fields(2))
def test_vector_field_bracket_is_a_lie_bracket(X, Y, Z):
    assert vf_bracket(X, Y) == PolyVectorField(2, [{}, {}]) - vf_bracket(Y, X)
    jac = vf_bracket(X, vf_bracket(Y, Z)) + vf_bracket(Y, vf_bracket(Z, X)) + vf_bracket(Z, vf_bracket(X, Y))
    assert jac.is_zero()


@settings(max_examples=25)
@given(fields(2), fields(2), polys(2))
def test_bracket_acts_as_commutator_on_functions(X, Y, f):
    lhs = vf_bracket(X, Y).apply(f)
    rhs = poly_add(X.apply(Y.apply(f)), Y.apply(X.apply(f)), -1)
    assert lhs == rhs


def test_heisenberg_bracket_is_dz():
    X, Y, _ = heisenberg_frames().frames
    assert vf_bracket(X, Y) == PolyVectorField.coordinate(3, 2)


def test_filtration_violation_names_the_witness():
    X, Y, T = heisenberg_frames().frames
    spec = FiltrationSpec(3, [X, Y, T], [1, 1, 3])
    rep = check_filtration(spec, [(0, 0, 0), (1, 2, 3)])
    assert not rep.ok
    v = rep.violations[0]
    assert v.frames == (0, 1) and v.weight == 2 and v.bracket_value == (0, 0, 1)
    with pytest.raises(FiltrationError):
        osculating_algebra(spec, (0, 0, 0))


def test_rank_defects_are_reported():
    X, Y, _ = heisenberg_frames().frames
    with pytest.raises(FiltrationError, match="rank"):
        osculating_algebra(FiltrationSpec(3, [X, Y], [1, 1]), (0, 0, 0))
    xY = PolyVectorField.coordinate(3, 1, monomial(3, (1, 0, 0)))
    Z = PolyVectorField.coordinate(3, 2)
    Yc = PolyVectorField.coordinate(3, 1)
    spec = FiltrationSpec(3, [X, xY, Yc, Z], [1, 1, 2, 2], [2, 3])
    check_filtration(spec, [(1, 0, 0)])
    with pytest.raises(FiltrationError) as err:
        check_filtration(spec, [(0, 5, 0)])
    assert err.value.point == (0, 5, 0)


def test_filtration_order_and_symbol():
    spec = heisenberg_frames()
    order, sym = filtration_order(spec, [[0, 0], [1, 1]])
    assert order == 2 and len(sym.terms) == 2
    # XY - YX: the top-order part cancels and leaves T, still of order 2
    order, sym = filtration_order(spec, [(1, [0, 1]), (-1, [1, 0])])
    assert order == 2
    assert sym.terms == {(0, 0, 1): sym.terms[(0, 0, 1)]} and len(sym.terms) == 1
    order, _ = filtration_order(spec, [[0, 0, 2]])
    assert order == 4


def test_poly_helpers():
    p = monomial(2, (1, 0), 2)
    q = monomial(2, (0, 1), Fraction(1, 2))
    assert poly_mul(p, q) == {(1, 1): 1}
    assert poly_add(p, p, -1) == {}


def test_spec_validation():
    X = PolyVectorField.coordinate(2, 0)
    with pytest.raises(ValueError):
        FiltrationSpec(2, [X], [1, 2])
    with pytest.raises(ValueError):
        FiltrationSpec(3, [X], [1])
    with pytest.raises(ValueError):
        FiltrationSpec(2, [X], [0])
