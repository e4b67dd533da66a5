import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot.algebras import heisenberg
from carnot.enveloping import EnvelopingOperator, multiply
from carnot.exact import GaussQ
from carnot.index import (
    InconclusiveError,
    TruncationLadder,
    fredholm_index,
    matrix_index,
    numerical_rank,
    signature,
    spectral_flow,
    winding_number,
)
from carnot.rep import KirillovDatum, representation

I = GaussQ(0, 1)
H = heisenberg(1)
A = EnvelopingOperator.from_words(H, [(("Y",), 1), (("X",), I)])
ADAG = EnvelopingOperator.from_words(H, [(("Y",), 1), (("X",), -I)])
LADDER = (8, 16, 32)


def _index(D, t=1.0):
    rep = lambda N: representation(KirillovDatum(H, np.array([0.0, 0.0, t])), N)
    return fredholm_index(TruncationLadder.from_operator(D, rep, LADDER))


@pytest.mark.parametrize(
    "D, expected",
    [(A, 1), (multiply(A, A), 2), (ADAG, -1), (multiply(multiply(A, A), A), 3), (multiply(A, ADAG), 0)],
)
def test_fredholm_index_on_the_ladder(D, expected):
    rep = _index(D)
    assert rep.stabilized and rep.value == expected
    assert rep.values == [expected] * 3


def test_index_flips_with_the_central_sign():
    assert _index(A, -1.0).value == -1
    assert _index(A, 2.5).value == 1


@settings(max_examples=25)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_matrix_index_is_n_minus_m_for_generic_matrices(m, n, seed):
    M = np.random.default_rng(seed).standard_normal((m, n))
    assert matrix_index(M) == n - m
    assert numerical_rank(M) == min(m, n)


def test_ladder_from_matrices():
    pairs = []
    for N in (4, 5, 6):
        S = np.diag(np.ones(N - 1), -1)[:, : N - 1]  # shift: injective, cokernel 1
        pairs.append((N, S, S.T))
    rep = fredholm_index(TruncationLadder.from_matrices(pairs))
    assert rep.values == [-1, -1, -1] and rep.value == -1


def test_index_unstable_has_no_value():
    pairs = [(N, np.zeros((N, N - k)), np.zeros((N - k, N))) for N, k in ((4, 0), (5, 1), (6, 2))]
    rep = fredholm_index(TruncationLadder.from_matrices(pairs))
    assert not rep.stabilized and rep.value is None


def _random_invertible_symmetric(rng, n):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    w = rng.uniform(0.2, 2.0, n) * rng.choice([-1, 1], n)
    return (Q * w) @ Q.conj().T


@settings(max_examples=100)
@given(st.integers(0, 2**31 - 1))
def test_spectral_flow_is_half_signature_difference(seed):
    rng = np.random.default_rng(seed)
    F0 = _random_invertible_symmetric(rng, 8)
    F1 = _random_invertible_symmetric(rng, 8)
    rep = spectral_flow(F0, F1)
    assert rep.value == (signature(F1) - signature(F0)) // 2
    assert rep.extra["up"] - rep.extra["down"] == rep.value


def test_spectral_flow_counts_both_directions():
    F0 = np.diag([1.0, -1.0])
    F1 = np.diag([-1.0, 1.0])
    rep = spectral_flow(F0, F1)
    assert rep.value == 0 and rep.extra["up"] == 1 and rep.extra["down"] == 1


def test_spectral_flow_localization():
    F0 = -np.eye(2)
    F1 = np.diag([1.0, -1.0])
    rep = spectral_flow(F0, F1, localize=np.array([True, False]))
    assert rep.value == 1 and rep.extra["localized"] == 1
    assert spectral_flow(F0, F1, localize=np.array([False, True])).extra["localized"] == 0


def test_spectral_flow_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        spectral_flow(np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(ValueError):
        spectral_flow(np.array([[0.0, 1.0], [0.0, 1.0]]), np.eye(2))


@pytest.mark.parametrize("k", range(-3, 4))
def test_winding_of_powers(k):
    z = lambda th: np.exp(1j * th)
    assert winding_number(lambda th: np.array([[z(th) ** k]])).value == k
    samples = [np.array([[z(th) ** k]]) for th in 2 * np.pi * np.arange(64) / 64]
    assert winding_number(samples).value == k


def test_winding_of_matrix_loop_adds():
    loop = lambda th: np.diag([np.exp(2j * th), np.exp(-1j * th)])
    assert winding_number(loop).value == 1


def test_winding_refines_fast_loops():
    rep = winding_number(lambda th: np.array([[np.exp(40j * th)]]), samples=16)
    assert rep.value == 40 and rep.Ns[0] > 16


def test_winding_errors():
    # each step turns by exactly pi: the direction is ambiguous
    coarse = [np.array([[np.exp(2j * th)]]) for th in 2 * np.pi * np.arange(4) / 4]
    with pytest.raises(InconclusiveError):
        winding_number(coarse)
    with pytest.raises(ValueError):
        winding_number(lambda th: np.array([[np.cos(th)]]), samples=4)


def test_van_erp_report_structure():
    from carnot.cli import _vanerp_defaults
    from carnot.index import van_erp_pair

    D1, D2 = _vanerp_defaults()
    out = van_erp_pair(D1, D2, ladder=(8, 12, 16), decay_modes=(4, 8, 12), decay_N=32)
    assert set(out) >= {"fredholm", "decay", "spectral_flow", "symbol_winding"}
    assert out["fredholm"].stabilized
    dev = out["decay"]["deviation"]
    assert len(dev) == 3 and all(d >= 0 for d in dev)
    # the symbol is Clifford multiplication by a unit vector: winding of i(x - iy)
    assert abs(out["symbol_winding"].value) == 1
