import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carnot.algebras import abelian, engel, heisenberg
from carnot.enveloping import (
    CliffordAction,
    CliffordError,
    DegreeError,
    EnvelopingOperator,
    SpaceMismatchError,
    abelianized_symbol,
    adjoint,
    build_dirac,
    build_example1,
    build_gamma_model,
    dilation_action,
    is_symmetric,
    multiply,
    normal_form,
    pauli,
    psi_flip,
    sharp_product,
    sub_laplacian,
)
from carnot.exact import GaussQ, I
from carnot.gbar import build_gbar, build_semidirect
from carnot.osculating import left_invariant_fields, vf_bracket
from oracles import divergence, gauss_integral, operator_on_gauss, word_on_gauss
from strategies import NAMED, named_algebras


def words(alg, max_len=4):
    return st.lists(st.integers(0, alg.dim - 1), min_size=0, max_size=max_len)


@st.composite
def alg_word(draw, max_len=4):
    alg = draw(named_algebras)
    return alg, draw(words(alg, max_len))


@st.composite
def alg_ops(draw, k=2, max_len=3):
    alg = draw(named_algebras)
    ops = []
    for _ in range(k):
        items = draw(st.lists(st.tuples(words(alg, max_len), st.integers(-3, 3)), min_size=1, max_size=3))
        ops.append(EnvelopingOperator.from_words(alg, items))
    return (alg, *ops)


def test_heisenberg_reordering():
    h = heisenberg(1)
    X, Y = 0, 1
    assert normal_form(h, [Y, X]) == {(1, 1, 0): 1, (0, 0, 1): -1}
    assert normal_form(h, [Y, X, Y]) == {(1, 2, 0): 1, (0, 1, 1): -1}
    XY = EnvelopingOperator.from_words(h, [(("X", "Y"), 1)])
    assert adjoint(XY) == EnvelopingOperator.from_words(h, [(("X", "Y"), 1), (("Z",), -1)])


@given(alg_word(5), st.integers(0, 1000))
def test_rewriting_is_confluent(data, seed):
    alg, w = data
    assert normal_form(alg, w, random.Random(seed)) == normal_form(alg, w)


@pytest.mark.parametrize("name", sorted(NAMED))
def test_left_invariant_fields_are_divergence_free_and_bracket_compatible(name):
    alg = NAMED[name]
    F = left_invariant_fields(alg)
    for f in F:
        assert divergence(f) == {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            lhs = vf_bracket(F[i], F[j])
            v = alg.bracket(alg.basis_vector(i), alg.basis_vector(j))
            rhs = None
            for k, c in enumerate(v):
                if c:
                    term = F[k].scale({(0,) * alg.dim: c})
                    rhs = term if rhs is None else rhs + term
            assert (lhs.is_zero() and rhs is None) or lhs == rhs


def _random_poly(rng, n, terms=3, deg=3):
    p = {}
    for _ in range(terms):
        m = [0] * n
        for _ in range(rng.randint(0, deg)):
            m[rng.randrange(n)] += 1
        p[tuple(m)] = p.get(tuple(m), 0) + Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return {m: c for m, c in p.items() if c}


@given(alg_word(4), st.integers(0, 1000))
def test_normal_form_acts_like_the_word(data, seed):
    alg, w = data
    F = left_invariant_fields(alg)
    p = _random_poly(random.Random(seed), alg.dim)
    op = EnvelopingOperator.from_words(alg, [(w, 1)])
    assert operator_on_gauss(F, op, p) == word_on_gauss(F, w, p)


@given(alg_ops(2), st.integers(0, 1000))
def test_multiply_is_composition(data, seed):
    alg, A, B = data
    F = left_invariant_fields(alg)
    p = _random_poly(random.Random(seed), alg.dim)
    lhs = operator_on_gauss(F, multiply(A, B), p)
    rhs = operator_on_gauss(F, A, operator_on_gauss(F, B, p))
    assert lhs == rhs


@given(alg_ops(1), st.integers(0, 1000))
def test_adjoint_is_the_formal_adjoint(data, seed):
    """int (D f) g = int f (D^t g) against Lebesgue measure in exponential coordinates."""
    alg, D = data
    rng = random.Random(seed)
    F = left_invariant_fields(alg)
    f, g = _random_poly(rng, alg.dim), _random_poly(rng, alg.dim)

    def pair(a, b):
        from oracles import _pmul

        # both factors carry exp(-|x|^2)
        return gauss_integral(_pmul(a, b), 2) if a and b else 0

    lhs = pair(operator_on_gauss(F, D, f), g)
    rhs = pair(f, operator_on_gauss(F, adjoint(D), g))
    assert lhs == rhs


@given(alg_ops(3))
def test_multiply_associative_and_adjoint_antimultiplicative(data):
    alg, A, B, C = data
    assert multiply(multiply(A, B), C) == multiply(A, multiply(B, C))
    assert adjoint(multiply(A, B)) == multiply(adjoint(B), adjoint(A))
    assert adjoint(adjoint(A)) == A


@given(alg_ops(2), st.fractions(-4, 4, max_denominator=3))
def test_dilations_act_by_homogeneity(data, lam):
    alg, A, B = data
    lhs = dilation_action(lam, multiply(A, B))
    assert lhs == multiply(dilation_action(lam, A), dilation_action(lam, B))
    if A.homogeneous_degree is not None:
        assert dilation_action(lam, A) == A.scale(GaussQ(lam ** A.homogeneous_degree))


def test_example_operators_have_the_stated_shape():
    e = engel()
    D = build_example1(e, 6)
    exps = {m: c[0, 0] for m, c in D.terms.items()}
    assert exps == {(12, 0, 0, 0): 1, (0, 12, 0, 0): 1, (0, 0, 6, 0): -1, (0, 0, 0, 4): 1}
    assert D.homogeneous_degree == 12
    assert is_symmetric(D)
    with pytest.raises(DegreeError):
        build_example1(e, 3)


def test_gamma_model_and_dirac():
    h = heisenberg(1)
    G = build_gamma_model(h, [[1, 0], [0, Fraction(1, 2)]])
    assert G.V0 == 2 and G.homogeneous_degree == 2 and is_symmetric(G)
    assert sub_laplacian(h) == build_gamma_model(h, 0)
    Dd = build_dirac(h, CliffordAction([pauli(1), pauli(2)]))
    assert is_symmetric(Dd) and Dd.homogeneous_degree == 1
    with pytest.raises(CliffordError):
        CliffordAction([pauli(1), pauli(1)])
    with pytest.raises(CliffordError):
        build_dirac(h, CliffordAction([pauli(1)]))


def test_abelianized_symbol_of_dirac_is_clifford_multiplication():
    h = heisenberg(1)
    Dd = build_dirac(h, CliffordAction([pauli(1), pauli(2), pauli(3)][:2]))
    s = abelianized_symbol(Dd, (0.6, 0.8))
    assert np.allclose(s @ s, -np.eye(2) * 1.0) or np.allclose(s @ s, np.eye(2))


def test_space_mismatch():
    h = heisenberg(1)
    A = EnvelopingOperator.generator(h, "X", pauli(1), 2)
    B = EnvelopingOperator.generator(h, "X")
    with pytest.raises(SpaceMismatchError):
        multiply(A, B)


def test_psi_flip_negates_odd_central_powers():
    N2 = abelian(2)
    D = EnvelopingOperator.from_words(N2, [(("X1",), 1), (("X2",), 1), (("X2", "X2"), 1)])
    P = psi_flip(D)
    assert P == EnvelopingOperator.from_words(N2, [(("X1",), 1), (("X2",), -1), (("X2", "X2"), 1)])
    assert psi_flip(P) == D


def test_sharp_product_squares_to_sum_on_a_direct_product():
    n = abelian(1)
    h = abelian(1)
    amb = build_semidirect(n, h, [[[0]]])
    D1 = EnvelopingOperator.generator(n, "X1", I)
    D2 = EnvelopingOperator.generator(h, "X1", I)
    S = sharp_product(D1, D2, 1, amb)
    G = amb.algebra
    lap = multiply(adjoint(D1), D1).embed(G, amb.ideal_index) + multiply(adjoint(D2), D2).embed(G, amb.sub_index)
    want = EnvelopingOperator(G, 2, 2, {m: np.diag([c[0, 0], c[0, 0]]).astype(object) for m, c in lap.terms.items()})
    assert multiply(adjoint(S), S) == want


def test_sharp_product_on_gbar_is_homogeneous():
    g = abelian(1)
    gb = build_gbar(g)
    amb = gb.semidirect()
    D1 = EnvelopingOperator.generator(amb.ideal, amb.ideal.basis[0], I)
    D2 = EnvelopingOperator.generator(g, "X1", GaussQ(0, -1))
    S = sharp_product(D1, D2, 2, amb)
    assert S.V0 == S.V1 == 2
    assert S.algebra is amb.algebra
    Ss = sharp_product(D1, D2, 2, amb, symmetric=True)
    assert is_symmetric(Ss)
