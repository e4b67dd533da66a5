import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from carnot.algebras import (
    abelian,
    direct_sum,
    free_nilpotent,
    graded_change_of_basis,
    heisenberg_type,
    lyndon_words,
    quotient_top,
    random_algebra,
    step2,
)
from carnot.lie import validate
from oracles import witt_dimension


@pytest.mark.parametrize("r,s", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3)])
def test_free_nilpotent_dims_follow_witt(r, s):
    alg = free_nilpotent(r, s)
    assert list(alg.dims) == [witt_dimension(r, k) for k in range(1, s + 1)]
    assert validate(alg).ok


def test_lyndon_words_are_lyndon():
    for w in lyndon_words(2, 6):
        assert all(w < w[i:] + w[:i] for i in range(1, len(w)))


def test_heisenberg_type_brackets():
    alg = heisenberg_type([1, 2])
    assert alg.bracket(alg.basis_vector("X2"), alg.basis_vector("Y2"))[-1] == 2
    assert validate(alg).ok


@given(st.integers(0, 10_000))
def test_random_algebras_validate(seed):
    alg = random_algebra(random.Random(seed))
    assert validate(alg).ok
    assert alg.step <= 3


def test_constructions_preserve_validity():
    a = direct_sum(heisenberg_type([1]), abelian(2))
    assert a.dims == (4, 1) and validate(a).ok
    b = graded_change_of_basis(free_nilpotent(2, 3), [[[1, 1], [0, 1]], [[2]], [[1, 0], [3, 1]]])
    assert validate(b).ok
    c = quotient_top(free_nilpotent(2, 3), [3])
    assert c.dims == (2, 1, 1) and validate(c).ok
    assert step2(2, [[[0, 1], [-1, 0]]]).same_structure(heisenberg_type([1]))
