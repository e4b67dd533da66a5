from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carnot import exact
from carnot.exact import GaussQ

from strategies import rationals

square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)
)
rect = st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda s: st.lists(st.lists(rationals, min_size=s[1], max_size=s[1]), min_size=s[0], max_size=s[0])
)


def test_to_q_reads_floats_as_decimals():
    assert exact.to_q(0.1) == Fraction(1, 10)
    assert exact.to_q("3/4") == Fraction(3, 4)
    assert exact.fmt_q(Fraction(-6, 4)) == "-3/2"


@given(rect)
def test_rank_matches_numpy(m):
    assert exact.rank(m) == np.linalg.matrix_rank(np.array(m, dtype=float))


@given(rect)
def test_nullspace_vectors_are_annihilated(m):
    ns = exact.nullspace(m)
    assert len(ns) == len(m[0]) - exact.rank(m)
    for v in ns:
        assert all(x == 0 for x in exact.matvec(m, v))


@given(square)
def test_inverse_is_two_sided(m):
    if exact.rank(m) < len(m):
        with pytest.raises(ZeroDivisionError):
            exact.inverse(m)
        return
    inv = exact.inverse(m)
    assert exact.matmul(m, inv) == exact.identity(len(m))
    assert exact.matmul(inv, m) == exact.identity(len(m))


@given(rationals, rationals, rationals, rationals)
def test_gaussian_rationals_form_a_field(a, b, c, d):
    z, w = GaussQ(a, b), GaussQ(c, d)
    ref = complex(float(a), float(b)) * complex(float(c), float(d))
    prod = z * w
    assert abs(complex(float(prod.re), float(prod.im)) - ref) < 1e-9
    if w != 0:
        assert (z / w) * w == z
    assert z.conjugate().conjugate() == z


def test_positive_definite():
    assert exact.is_positive_definite([[2, 1], [1, 2]])
    assert not exact.is_positive_definite([[1, 2], [2, 1]])
