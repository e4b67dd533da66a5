"""Float hot loops: numba versions plus a pure-numpy fallback.

Set ``CARNOT_DISABLE_NUMBA=1`` to force the numpy fallback.  Both
implementations are always importable through :data:`NUMPY` and
:data:`NUMBA` so they can be compared.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def _flag() -> bool:
    return os.environ.get("CARNOT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")


# -- numpy fallback ------------------------------------------------------

def _tensor_index_table_np(N: int, m: int) -> np.ndarray:
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((N,) * m).reshape(m, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def _mode_operator_np(N: int, m: int, mode: int, op1: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for k in range(m):
        out = np.kron(out, op1 if k == mode else np.eye(N))
    return out.astype(np.complex128)


def _safe_mask_np(table: np.ndarray, limit: int) -> np.ndarray:
    if table.shape[1] == 0:
        return np.ones(table.shape[0], dtype=np.bool_)
    return np.all(table < limit, axis=1)


def _negative_counts_np(eigs: np.ndarray, tol: float) -> np.ndarray:
    return np.sum(eigs < -tol, axis=1).astype(np.int64)


def _winding_phase_np(dets: np.ndarray) -> tuple[float, float]:
    nxt = np.roll(dets, -1)
    inc = np.angle(nxt / dets)
    return float(np.sum(inc)), float(np.max(np.abs(inc)))


# -- numba ---------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _tensor_index_table_nb(N, m):
        total = 1
        for _ in range(m):
            total *= N
        out = np.zeros((total, m), dtype=np.int64)
        for r in range(total):
            rem = r
            for k in range(m - 1, -1, -1):
                out[r, k] = rem % N
                rem //= N
        return out

    @numba.njit(cache=True)
    def _mode_operator_nb(N, m, mode, op1):
        total = 1
        for _ in range(m):
            total *= N
        stride = 1
        for _ in range(m - 1 - mode):
            stride *= N
        out = np.zeros((total, total), dtype=np.complex128)
        for col in range(total):
            c = (col // stride) % N
            base = col - c * stride
            for r in range(N):
                v = op1[r, c]
                if v != 0:
                    out[base + r * stride, col] = v
        return out

    @numba.njit(cache=True)
    def _safe_mask_nb(table, limit):
        n = table.shape[0]
        out = np.ones(n, dtype=np.bool_)
        for i in range(n):
            for k in range(table.shape[1]):
                if table[i, k] >= limit:
                    out[i] = False
                    break
        return out

    @numba.njit(cache=True)
    def _negative_counts_nb(eigs, tol):
        out = np.zeros(eigs.shape[0], dtype=np.int64)
        for i in range(eigs.shape[0]):
            c = 0
            for j in range(eigs.shape[1]):
                if eigs[i, j] < -tol:
                    c += 1
            out[i] = c
        return out

    @numba.njit(cache=True)
    def _winding_phase_nb(dets):
        n = dets.shape[0]
        total = 0.0
        worst = 0.0
        for k in range(n):
            z = dets[(k + 1) % n] / dets[k]
            a = np.arctan2(z.imag, z.real)
            total += a
            if abs(a) > worst:
                worst = abs(a)
        return total, worst


NUMPY = {
    "tensor_index_table": _tensor_index_table_np,
    "mode_operator": _mode_operator_np,
    "safe_mask": _safe_mask_np,
    "negative_counts": _negative_counts_np,
    "winding_phase": _winding_phase_np,
}

if numba is not None:
    NUMBA = {
        "tensor_index_table": lambda N, m: _tensor_index_table_nb(int(N), int(m)),
        "mode_operator": lambda N, m, mode, op1: _mode_operator_nb(
            int(N), int(m), int(mode), np.ascontiguousarray(op1, dtype=np.complex128)
        ),
        "safe_mask": lambda table, limit: _safe_mask_nb(np.ascontiguousarray(table, dtype=np.int64), int(limit)),
        "negative_counts": lambda eigs, tol: _negative_counts_nb(np.ascontiguousarray(eigs, dtype=np.float64), float(tol)),
        "winding_phase": lambda dets: tuple(
            float(v) for v in _winding_phase_nb(np.ascontiguousarray(dets, dtype=np.complex128))
        ),
    }
else:  # pragma: no cover
    NUMBA = None


def backend_name() -> str:
    return "numpy" if (_flag() or NUMBA is None) else "numba"


def _impl(name):
    table = NUMPY if backend_name() == "numpy" else NUMBA
    return table[name]


def tensor_index_table(N: int, m: int) -> np.ndarray:
    """Row-major multi-indices of the m-mode tensor basis with cutoff N."""
    return _impl("tensor_index_table")(N, m)


def mode_operator(N: int, m: int, mode: int, op1: np.ndarray) -> np.ndarray:
    """Single-mode matrix ``op1`` acting on factor ``mode`` of the tensor basis."""
    return _impl("mode_operator")(N, m, mode, op1)


def safe_mask(table: np.ndarray, limit: int) -> np.ndarray:
    return _impl("safe_mask")(table, limit)


def negative_counts(eigs: np.ndarray, tol: float) -> np.ndarray:
    """Number of eigenvalues below ``-tol`` for each row of ``eigs``."""
    return _impl("negative_counts")(np.atleast_2d(eigs), tol)


def winding_phase(dets: np.ndarray) -> tuple[float, float]:
    """Total closed-loop phase change of ``dets`` and the largest single step."""
    return _impl("winding_phase")(np.asarray(dets, dtype=np.complex128))
