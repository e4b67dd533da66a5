import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot import _kernels

pytestmark = pytest.mark.skipif(_kernels.NUMBA is None, reason="numba not installed")


@settings(max_examples=20)
@given(st.integers(1, 5), st.integers(0, 3))
def test_index_tables_agree(N, m):
    a = _kernels.NUMPY["tensor_index_table"](N, m)
    b = _kernels.NUMBA["tensor_index_table"](N, m)
    assert a.shape == (N**m, m)
    np.testing.assert_array_equal(a, b)


@settings(max_examples=20)
@given(st.integers(1, 4), st.integers(1, 3), st.data())
def test_mode_operators_agree(N, m, data):
    mode = data.draw(st.integers(0, m - 1))
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    op1 = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    np.testing.assert_allclose(
        _kernels.NUMPY["mode_operator"](N, m, mode, op1), _kernels.NUMBA["mode_operator"](N, m, mode, op1)
    )


@settings(max_examples=20)
@given(st.integers(1, 5), st.integers(0, 3), st.integers(0, 6))
def test_safe_masks_agree(N, m, limit):
    t = _kernels.NUMPY["tensor_index_table"](N, m)
    np.testing.assert_array_equal(_kernels.NUMPY["safe_mask"](t, limit), _kernels.NUMBA["safe_mask"](t, limit))


@settings(max_examples=20)
@given(st.integers(0, 2**31 - 1))
def test_counts_and_phases_agree(seed):
    rng = np.random.default_rng(seed)
    eigs = rng.standard_normal((4, 7))
    np.testing.assert_array_equal(
        _kernels.NUMPY["negative_counts"](eigs, 0.1), _kernels.NUMBA["negative_counts"](eigs, 0.1)
    )
    dets = np.exp(1j * np.cumsum(rng.uniform(-1, 1, 30))) * rng.uniform(0.5, 2, 30)
    a = _kernels.NUMPY["winding_phase"](dets)
    b = _kernels.NUMBA["winding_phase"](dets)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_backend_flag(monkeypatch):
    monkeypatch.delenv("CARNOT_DISABLE_NUMBA", raising=False)
    assert _kernels.backend_name() == "numba"
    monkeypatch.setenv("CARNOT_DISABLE_NUMBA", "1")
    assert _kernels.backend_name() == "numpy"


def test_fallback_gives_the_same_index():
    code = (
        "from carnot.cli import main; import sys;"
        "sys.exit(main(['index','fredholm','--builtin','a2','--ladder','8,12,16']))"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, CARNOT_DISABLE_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        outs.append(r.stdout)
    assert outs[0] == outs[1]
