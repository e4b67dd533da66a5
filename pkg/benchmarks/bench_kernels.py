"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Also times one full Schrodinger-representation Rockland evaluation under
each backend by toggling CARNOT_DISABLE_NUMBA in a subprocess.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from carnot import _kernels
from carnot.rep import hermite_matrices

END_TO_END = """
import time
import numpy as np
from carnot.algebras import heisenberg_type
from carnot.enveloping import build_gamma_model
from carnot.rep import KirillovDatum, min_singular_value, representation
alg = heisenberg_type([1, 2])
D = build_gamma_model(alg, 2.5)
ell = np.zeros(alg.dim); ell[-1] = 1.0
t = time.perf_counter()
for _ in range(3):
    min_singular_value(D, representation(KirillovDatum(alg, ell), 24))
print((time.perf_counter() - t) / 3)
"""


def cases():
    s1, _ = hermite_matrices(24)
    table = _kernels.NUMPY["tensor_index_table"](24, 3)
    rng = np.random.default_rng(0)
    eigs = rng.standard_normal((400, 200))
    dets = np.exp(1j * np.cumsum(rng.uniform(-0.1, 0.1, 20000)))
    return {
        "tensor_index_table(24, 3)": ("tensor_index_table", (24, 3)),
        "mode_operator(24, 2, 1)": ("mode_operator", (24, 2, 1, s1)),
        "safe_mask(24^3 rows)": ("safe_mask", (table, 20)),
        "negative_counts(400 x 200)": ("negative_counts", (eigs, 0.0)),
        "winding_phase(20000)": ("winding_phase", (dets,)),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args()
    if _kernels.NUMBA is None:
        sys.exit("numba is not installed")
    rows = []
    for label, (name, call_args) in cases().items():
        _kernels.NUMBA[name](*call_args)  # compile outside the timing
        t = {}
        for backend, table in (("numpy", _kernels.NUMPY), ("numba", _kernels.NUMBA)):
            fn = table[name]
            t[backend] = min(timeit.repeat(lambda: fn(*call_args), number=3, repeat=args.repeat)) / 3
        rows.append({"kernel": label, **t, "speedup": t["numpy"] / t["numba"]})
    e2e = {}
    for backend, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, CARNOT_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True, env=env, check=True)
        e2e[backend] = float(out.stdout.strip())
    if args.json:
        print(json.dumps({"kernels": rows, "end_to_end": e2e}, indent=2))
        return
    print(f"{'kernel':32s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for r in rows:
        print(f"{r['kernel']:32s} {1e3 * r['numpy']:11.3f} {1e3 * r['numba']:11.3f} {r['speedup']:8.1f}")
    print(f"{'rockland eval, htype(1,2), N=24':32s} {1e3 * e2e['numpy']:11.1f} {1e3 * e2e['numba']:11.1f} "
          f"{e2e['numpy'] / e2e['numba']:8.1f}")


if __name__ == "__main__":
    main()
