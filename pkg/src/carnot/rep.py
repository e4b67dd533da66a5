"""Truncated unitary representations and Rockland checks.

Schrodinger representations of step-2 groups act on a tensor Hermite
basis with cutoff N per oscillator mode.  Mode matrices use
``a[n-1, n] = sqrt(n)``, position ``s = (a + a^t)/sqrt 2`` and derivative
``d = (a - a^t)/sqrt 2``.  A symplectic pair (p, q) with B(p, q) = lam > 0
is represented by ``p -> -i sqrt(lam) s`` and ``q -> sqrt(lam) d``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize as sopt
import scipy.sparse as sp

from . import _kernels
from .enveloping import EnvelopingOperator, _word_of, adjoint, to_complex_array
from .lie import AlgebraMismatchError, GradedLieAlgebra

VERDICT_TOL = 1e-6
MATRIX_TOL = 1e-8


class RepresentationError(ValueError):
    pass


def hermite_matrices(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated position ``s`` and derivative ``d`` on N Hermite modes."""
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
    s = (a + a.T) / math.sqrt(2)
    d = (a - a.T) / math.sqrt(2)
    return s, d


def thread_count() -> int:
    env = os.environ.get("CARNOT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def parallel_map(fn, items: Sequence) -> list:
    """Map preserving input order; threads capped by CARNOT_THREADS."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- Kirillov data -------------------------------------------------------------

def _float_matrix(m) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float).reshape(len(m), len(m[0]) if m else 0)


@dataclass
class KirillovDatum:
    """Functional ell on a step-2 algebra (or a character when ell|g2 = 0).

    Derived data: ``lambdas`` (symplectic eigenvalues of B(x,y) = ell([x,y])
    on g1), ``pairs`` of orthonormal (p, q) vectors in original g1
    coordinates, ``kernel`` directions and the kernel characters ``mu``.
    """

    algebra: GradedLieAlgebra
    ell: np.ndarray
    lambdas: np.ndarray = field(init=False)
    pairs: list = field(init=False)
    kernel: list = field(init=False)
    mu: np.ndarray = field(init=False)
    B: np.ndarray = field(init=False)

    def __post_init__(self):
        alg = self.algebra
        if alg.step > 2:
            raise RepresentationError("Kirillov data are implemented for step <= 2 only")
        self.ell = np.asarray(self.ell, dtype=float)
        if self.ell.shape != (alg.dim,):
            raise AlgebraMismatchError("functional has the wrong length")
        g1 = list(alg.degree_slice(1))
        d1 = len(g1)
        B = np.zeros((d1, d1))
        for a in range(d1):
            for b in range(d1):
                B[a, b] = sum(float(c) * self.ell[k] for k, c in alg.bracket_basis(g1[a], g1[b]))
        self.B = B
        G = _float_matrix([[alg.inner_product[i][j] for j in g1] for i in g1]) if d1 else np.zeros((0, 0))
        self.pairs, self.kernel, lams = _symplectic_split(B, G)
        self.lambdas = np.array(lams)
        l1 = self.ell[g1] if d1 else np.zeros(0)
        self.mu = np.array([float(l1 @ v) for v in self.kernel])

    @property
    def central(self) -> np.ndarray:
        """ell restricted to g2."""
        alg = self.algebra
        return self.ell[list(alg.degree_slice(2))] if alg.step == 2 else np.zeros(0)

    @property
    def t(self) -> float:
        c = self.central
        if c.size == 1:
            return float(c[0])
        return float(np.linalg.norm(c))

    @property
    def rank(self) -> int:
        return 2 * len(self.pairs)

    @property
    def modes(self) -> int:
        return len(self.pairs)

    def is_character(self) -> bool:
        return not self.pairs


def _symplectic_split(B: np.ndarray, G: np.ndarray, tol: float = 1e-9):
    """Canonical symplectic basis of the form B with respect to metric G.

    Works in G-orthonormal coordinates; eigenvalue clusters of B^t B give
    the lam^2, and within a cluster Gram-Schmidt over the basis order picks
    p, then q = -B p / lam.  Returns vectors in original coordinates.
    """
    d = B.shape[0]
    if d == 0:
        return [], [], []
    L = np.linalg.cholesky(G)
    U = np.linalg.inv(L).T  # columns: G-orthonormal basis
    Bp = U.T @ B @ U
    Bp = (Bp - Bp.T) / 2
    w, V = np.linalg.eigh(Bp.T @ Bp)
    scale = max(1.0, float(np.max(np.abs(w))))
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    clusters = []
    i = 0
    while i < d:
        j = i + 1
        while j < d and abs(w[j] - w[i]) <= tol * scale * 10:
            j += 1
        clusters.append((max(w[i:j].mean(), 0.0), V[:, i:j]))
        i = j
    pairs, kernel, lams = [], [], []
    to_orig = U  # orthonormal coords -> original coords
    for lam2, Q in clusters:
        lam = math.sqrt(lam2)
        W = Q.copy()
        if lam <= math.sqrt(tol * scale):
            for e in np.eye(d):
                v = W @ (W.T @ e)
                nrm = np.linalg.norm(v)
                if nrm > 1e-7:
                    v = v / nrm
                    kernel.append(to_orig @ v)
                    W = _deflate(W, [v])
                if W.shape[1] == 0:
                    break
            continue
        for e in np.eye(d):
            if W.shape[1] == 0:
                break
            v = W @ (W.T @ e)
            nrm = np.linalg.norm(v)
            if nrm <= 1e-7:
                continue
            p = v / nrm
            q = -Bp @ p / lam
            pairs.append((to_orig @ p, to_orig @ q, lam))
            lams.append(lam)
            W = _deflate(W, [p, q])
    return pairs, kernel, lams


def _deflate(W: np.ndarray, vs) -> np.ndarray:
    """Orthonormal basis of span(W) minus span(vs)."""
    P = W @ W.T
    for v in vs:
        P = P - np.outer(v, v)
    w, V = np.linalg.eigh((P + P.T) / 2)
    return V[:, w > 0.5]


# -- representation assemblies ---------------------------------------------------

@dataclass
class RepresentationAssembly:
    algebra: GradedLieAlgebra
    N: int
    modes: int
    generators: list  # sparse matrices, one per basis element
    kind: str
    meta: dict
    datum: KirillovDatum | None = None

    @property
    def size(self) -> int:
        return self.N ** self.modes if self.modes else 1

    def index_table(self) -> np.ndarray:
        return _kernels.tensor_index_table(self.N, self.modes)

    def safe_mask(self, degree: int) -> np.ndarray:
        """Hermite indices with every mode index < N - degree."""
        if not self.modes:
            return np.ones(1, dtype=bool)
        return _kernels.safe_mask(self.index_table(), self.N - degree)

    def generator(self, key) -> np.ndarray:
        return self.generators[self.algebra.index(key)].toarray()

    def label(self) -> str:
        return self.meta.get("label", self.kind)


def character(alg: GradedLieAlgebra, xi) -> RepresentationAssembly:
    """One-dimensional representation X -> i <xi, X> on g1, zero on [g, g]."""
    g1 = list(alg.degree_slice(1))
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (len(g1),):
        raise AlgebraMismatchError("character has the wrong length")
    gens = []
    for i in range(alg.dim):
        v = 1j * xi[g1.index(i)] if i in g1 else 0.0
        gens.append(sp.csr_matrix(np.array([[v]], dtype=complex)))
    return RepresentationAssembly(alg, 1, 0, gens, "character", {"label": f"char{_fmt(xi)}", "xi": xi.tolist()})


def abelian_character(alg: GradedLieAlgebra, xi) -> RepresentationAssembly:
    if not alg.is_abelian():
        raise RepresentationError("abelian_character needs an abelian algebra")
    if alg.dims[0] != alg.dim:
        raise RepresentationError("abelian_character expects every generator in degree 1")
    return character(alg, xi)


def _fmt(v) -> str:
    return "(" + ",".join(f"{float(x):.6g}" for x in np.atleast_1d(v)) + ")"


def schrodinger_rep(datum: KirillovDatum, N: int) -> RepresentationAssembly:
    alg = datum.algebra
    if alg.step != 2 or not np.any(datum.central != 0):
        raise RepresentationError("central parameter is zero: use character() on the abelianization")
    if not datum.pairs:
        raise RepresentationError("the form ell([.,.]) vanishes: use character()")
    N = int(N)
    m = datum.modes
    s1, d1 = hermite_matrices(N)
    S = [sp.csr_matrix(_kernels.mode_operator(N, m, k, s1)) for k in range(m)]
    D = [sp.csr_matrix(_kernels.mode_operator(N, m, k, d1)) for k in range(m)]
    size = N ** m
    eye = sp.identity(size, dtype=complex, format="csr")
    g1 = list(alg.degree_slice(1))
    G1 = _float_matrix([[alg.inner_product[i][j] for j in g1] for i in g1])
    gens = []
    for i in range(alg.dim):
        if alg.degrees[i] == 2:
            gens.append(eye * (1j * datum.ell[i]))
            continue
        e = np.zeros(len(g1))
        e[g1.index(i)] = 1.0
        mat = sp.csr_matrix((size, size), dtype=complex)
        for k, (p, q, lam) in enumerate(datum.pairs):
            cp = float(p @ G1 @ e)
            cq = float(q @ G1 @ e)
            r = math.sqrt(lam)
            if abs(cp) > 1e-14:
                mat = mat + S[k] * (-1j * r * cp)
            if abs(cq) > 1e-14:
                mat = mat + D[k] * (r * cq)
        for v, mu in zip(datum.kernel, datum.mu):
            cv = float(v @ G1 @ e)
            if abs(cv) > 1e-14:
                mat = mat + eye * (1j * mu * cv)
        mat.eliminate_zeros()
        gens.append(mat.tocsr())
    meta = {
        "label": f"schrodinger(t={datum.t:.6g},mu={_fmt(datum.mu)})",
        "t": datum.t,
        "lambdas": [float(x) for x in datum.lambdas],
        "mu": [float(x) for x in datum.mu],
    }
    return RepresentationAssembly(alg, N, m, gens, "schrodinger", meta, datum)


def representation(datum: KirillovDatum, N: int) -> RepresentationAssembly:
    """Schrodinger representation, or the character when the form vanishes."""
    if datum.algebra.step == 2 and np.any(datum.central != 0) and datum.pairs:
        return schrodinger_rep(datum, N)
    if np.any(datum.central != 0):
        raise RepresentationError("non-zero central character with a vanishing form is not irreducible here")
    g1 = list(datum.algebra.degree_slice(1))
    return character(datum.algebra, datum.ell[g1])


def pi_plus_rep(g: GradedLieAlgebra, sign: int = 1, N: int = 16):
    """pi^+/- of gbar for abelian g; returns (gbar, representation).

    At sign +1 the dual generators act as -i s (positions) and the g
    generators as derivatives.
    """
    from .gbar import build_gbar

    if not g.is_abelian() or g.dims[0] != g.dim:
        raise RepresentationError("pi^+/- is implemented for abelian g only")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    gb = build_gbar(g)
    ell = np.zeros(gb.algebra.dim)
    ell[gb.z_index] = sign
    rep = schrodinger_rep(KirillovDatum(gb.algebra, ell), N)
    rep.kind = "pi+" if sign > 0 else "pi-"
    rep.meta["label"] = rep.kind
    return gb, rep


# -- assembly and functional calculus ----------------------------------------------

@dataclass
class Assembled:
    matrix: np.ndarray
    degree: int
    safe_cols: np.ndarray
    safe_rows: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def compressed(self) -> np.ndarray:
        """Safe columns, all rows (rows are exact on those columns)."""
        return self.matrix[:, self.safe_cols]

    def safe_block(self) -> np.ndarray:
        return self.matrix[np.ix_(self.safe_rows, self.safe_cols)]


_MONO_CACHE_KEY = "_mono_cache"


def _monomial_matrix(rep: RepresentationAssembly, mono) -> sp.csr_matrix:
    cache = rep.meta.setdefault(_MONO_CACHE_KEY, {})
    hit = cache.get(mono)
    if hit is not None:
        return hit
    out = sp.identity(rep.size, dtype=complex, format="csr")
    for i in _word_of(mono):
        out = out @ rep.generators[i]
    cache[mono] = out
    return out


def assemble(D: EnvelopingOperator, rep: RepresentationAssembly) -> Assembled:
    """pi(D) as a (V1*M) x (V0*M) matrix, coefficient space outermost."""
    if D.algebra is not rep.algebra and not D.algebra.same_structure(rep.algebra):
        raise AlgebraMismatchError("operator and representation live on different algebras")
    k = D.order
    if rep.modes and k >= rep.N:
        raise RepresentationError(f"operator degree {k} exceeds the cutoff N={rep.N}")
    M = rep.size
    out = np.zeros((D.V1 * M, D.V0 * M), dtype=complex)
    for mono, c in D.terms.items():
        P = _monomial_matrix(rep, mono)
        C = to_complex_array(c)
        out += sp.kron(sp.csr_matrix(C), P).toarray()
    mask = rep.safe_mask(k)
    return Assembled(out, k, np.tile(mask, D.V0), np.tile(mask, D.V1))


def functional_calculus(M: np.ndarray, exponent: float, tol: float = MATRIX_TOL) -> np.ndarray:
    """|M|^exponent for self-adjoint M, with |0|^0 := 0."""
    M = np.asarray(M, dtype=complex)
    if np.linalg.norm(M - M.conj().T) > tol * max(1.0, np.linalg.norm(M)):
        raise ValueError("matrix is not self-adjoint")
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    cut = tol * max(1.0, float(np.max(np.abs(w), initial=0)))
    f = np.where(np.abs(w) > cut, np.abs(w) ** exponent if exponent != 0 else 1.0, 0.0)
    return (V * f) @ V.conj().T


def bounded_transform(M: np.ndarray) -> np.ndarray:
    """M (1 + M* M)^(-1/2) via the SVD."""
    M = np.asarray(M, dtype=complex)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return (U * (s / np.sqrt(1 + s ** 2))) @ Vh


def example2_matrix(alg: GradedLieAlgebra, s: float, cliffords: dict, rep: RepresentationAssembly) -> np.ndarray:
    """pi(sum_i |D_i|^{s/i - 1} D_i) with D_i = i sum_j c(X_j) X_j over g_i.

    ``cliffords`` maps a basis label or index to its Clifford matrix; all
    matrices must pairwise anticommute.
    """
    from .enveloping import CliffordAction, build_dirac

    total = None
    for k in range(1, alg.step + 1):
        gens = list(alg.degree_slice(k))
        if not gens:
            continue
        mats = [cliffords.get(alg.basis[g], cliffords.get(g)) for g in gens]
        Dk = build_dirac(alg, CliffordAction(mats), degree=k)
        Pk = assemble(Dk, rep).matrix
        Pk = (Pk + Pk.conj().T) / 2
        term = functional_calculus(Pk, s / k - 1) @ Pk
        total = term if total is None else total + term
    return total


# -- Rockland scan ---------------------------------------------------------------

@dataclass
class SweepPoint:
    """A nontrivial irreducible representation in a sweep."""

    label: str
    ell: tuple
    kind: str  # schrodinger | character

    def build(self, alg: GradedLieAlgebra, N: int) -> RepresentationAssembly:
        if self.kind == "character":
            g1 = list(alg.degree_slice(1))
            return character(alg, np.asarray(self.ell)[g1])
        return representation(KirillovDatum(alg, np.asarray(self.ell, dtype=float)), N)


def sphere_directions(m: int, per_dim: int = 32) -> np.ndarray:
    """Deterministic unit vectors in R^m: +-1, a regular polygon, or a Fibonacci sphere."""
    if m == 0:
        return np.zeros((1, 0))
    if m == 1:
        return np.array([[-1.0], [1.0]])
    if m == 2:
        ang = 2 * np.pi * np.arange(per_dim) / per_dim
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    count = per_dim * (m - 1)
    rng = np.random.default_rng(12345)
    pts = rng.standard_normal((count, m))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def default_sweep(alg: GradedLieAlgebra, radii=None, per_dim: int = 32, ts=(1.0, -1.0)) -> list[SweepPoint]:
    """t = +-1 with kernel characters mu = r * direction, plus unit characters at t = 0."""
    if radii is None:
        radii = np.linspace(0.0, 4.0, 33)
    points = []
    g1 = list(alg.degree_slice(1))
    if alg.step == 2 and alg.dims[1] >= 1:
        g2 = list(alg.degree_slice(2))
        central_dirs = sphere_directions(len(g2), per_dim) if len(g2) > 1 else np.array([[t] for t in ts])
        for cdir in central_dirs:
            ell = np.zeros(alg.dim)
            ell[g2] = cdir
            datum = KirillovDatum(alg, ell)
            kdirs = sphere_directions(len(datum.kernel), per_dim)
            seen_zero = False
            # without kernel characters every radius gives the same functional
            for r in (radii if datum.kernel else [0.0]):
                for u in kdirs:
                    if r == 0 and seen_zero:
                        continue
                    e = ell.copy()
                    for v, c in zip(datum.kernel, u):
                        e[g1] += r * c * _dual_of(alg, g1, v)
                    seen_zero = seen_zero or r == 0
                    points.append(SweepPoint(f"t={_fmt(cdir)},r={r:.6g},u={_fmt(u)}", tuple(e), "schrodinger"))
    for u in sphere_directions(len(g1), per_dim):
        ell = np.zeros(alg.dim)
        ell[g1] = u
        points.append(SweepPoint(f"char{_fmt(u)}", tuple(ell), "character"))
    return points


def _dual_of(alg, g1, v) -> np.ndarray:
    """Coordinates of the functional <v, .> (metric dual) on g1."""
    G1 = _float_matrix([[alg.inner_product[i][j] for j in g1] for i in g1])
    return G1 @ v


def _min_sv(A: np.ndarray) -> float:
    if A.size == 0:
        return float("inf")
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def min_singular_value(D: EnvelopingOperator, rep: RepresentationAssembly, Dt: EnvelopingOperator | None = None) -> float:
    """min over D and D^t of the smallest singular value on the safe band."""
    Dt = adjoint(D) if Dt is None else Dt
    a = _min_sv(assemble(D, rep).compressed())
    if Dt is D:
        return a
    b = _min_sv(assemble(Dt, rep).compressed())
    return min(a, b)


@dataclass
class RocklandVerdict:
    verdict: str
    Ns: list
    tol: float
    rows: list  # per representation: {"label", "kind", "values": [...]}
    witness: dict | None = None

    def per_rep_min(self) -> list[float]:
        return [min(r["values"]) for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "Ns": list(self.Ns),
            "tol": self.tol,
            "table": self.rows,
            "witness": self.witness,
        }


def _classify(values: Sequence[float], tol: float) -> str:
    small = sum(1 for v in values if v < tol)
    decreasing = len(values) >= 3 and all(b < a for a, b in zip(values, values[1:])) and values[0] >= 2 * values[-1]
    if small >= 3 or (small >= 1 and small == len(values) and len(values) < 3):
        return "violated"
    if decreasing:
        return "violated"
    if small:
        return "inconclusive"
    return "satisfied"


def rockland_scan(D: EnvelopingOperator, sweep: Sequence[SweepPoint] | None = None, Ns=(8, 16, 32),
                  tol: float = VERDICT_TOL, refine: bool = True) -> RocklandVerdict:
    """Numerical Rockland evidence over a finite sweep of representations.

    For characters there is no truncation, so one evaluation covers every
    cutoff.  With ``refine`` the radial kernel-character parameter is
    locally minimized around grid minima before the verdict.
    """
    alg = D.algebra
    if D.homogeneous_degree is None:
        raise ValueError("the Rockland scan needs a homogeneous operator")
    sweep = default_sweep(alg) if sweep is None else list(sweep)
    if not sweep:
        raise ValueError("empty sweep")
    Ns = [int(n) for n in Ns]
    Dt = adjoint(D)
    if Dt == D:
        Dt = D

    def evaluate(pt: SweepPoint) -> list[float]:
        if pt.kind == "character":
            v = min_singular_value(D, pt.build(alg, 1), Dt)
            return [v] * len(Ns)
        return [min_singular_value(D, pt.build(alg, N), Dt) for N in Ns]

    table = parallel_map(evaluate, sweep)
    rows = [
        {"label": pt.label, "kind": pt.kind, "values": vals} for pt, vals in zip(sweep, table)
    ]
    if refine:
        rows.extend(_refine_kernel_minima(D, Dt, alg, sweep, table, Ns))
    verdicts = [_classify(r["values"], tol) for r in rows]
    if "violated" in verdicts:
        verdict = "violated"
    elif "inconclusive" in verdicts:
        verdict = "inconclusive"
    else:
        verdict = "satisfied"
    witness = None
    if verdict != "satisfied":
        i = next(i for i, v in enumerate(verdicts) if v == verdict)
        witness = {"label": rows[i]["label"], "values": rows[i]["values"]}
    return RocklandVerdict(verdict, Ns, tol, rows, witness)


def _refine_kernel_minima(D, Dt, alg, sweep, table, Ns) -> list[dict]:
    """Bounded scalar minimization along radial lines with interior grid minima."""
    groups: dict[tuple, list[tuple[float, int]]] = {}
    for idx, pt in enumerate(sweep):
        if pt.kind != "schrodinger" or ",r=" not in pt.label:
            continue
        head, rest = pt.label.split(",r=")
        r, u = rest.split(",u=")
        groups.setdefault((head, u), []).append((float(r), idx))
    out = []
    Nref = Ns[-1]
    for (head, u), items in sorted(groups.items()):
        items.sort()
        if len(items) < 3:
            continue
        vals = [table[i][-1] for _, i in items]
        for k in range(1, len(items) - 1):
            if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1]:
                r0, i0 = items[k]
                base = np.asarray(sweep[i0].ell, dtype=float)
                datum = KirillovDatum(alg, base)
                if not datum.kernel or r0 == 0:
                    continue
                dir_ell = (base - _strip_kernel(alg, base, datum)) / r0

                def f(r, N=Nref):
                    e = _strip_kernel(alg, base, datum) + r * dir_ell
                    return min_singular_value(D, representation(KirillovDatum(alg, e), N), Dt)

                res = sopt.minimize_scalar(
                    f, bounds=(items[k - 1][0], items[k + 1][0]), method="bounded", options={"xatol": 1e-10}
                )
                r_star = float(res.x)
                vals_star = [f(r_star, N) for N in Ns]
                out.append({"label": f"{head},r*={r_star:.12g},u={u}", "kind": "schrodinger-refined",
                            "values": vals_star})
    return out


def _strip_kernel(alg, ell, datum) -> np.ndarray:
    g1 = list(alg.degree_slice(1))
    e = np.array(ell, dtype=float)
    for v, mu in zip(datum.kernel, datum.mu):
        e[g1] -= mu * _dual_of(alg, g1, v)
    return e


# -- exact gamma criterion -------------------------------------------------------

@dataclass
class GammaCriterion:
    satisfied: bool
    branch: str  # interval | discrete
    lambdas: list
    description: str
    singular_points: list
    eigenvalues: list
    witness: complex | None = None

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "branch": self.branch,
            "lambdas": [float(f"{x:.12g}") for x in self.lambdas],
            "singular_set": self.description,
            "singular_points": [float(f"{x:.12g}") for x in self.singular_points],
            "gamma_eigenvalues": [[float(f"{z.real:.12g}"), float(f"{z.imag:.12g}")] for z in self.eigenvalues],
            "witness": None if self.witness is None else [float(f"{self.witness.real:.12g}"),
                                                           float(f"{self.witness.imag:.12g}")],
        }


def symplectic_eigenvalues(alg: GradedLieAlgebra) -> tuple[list[float], int]:
    """lambda_k of the skew form at t = 1 and dim ker."""
    ell = np.zeros(alg.dim)
    ell[alg.degree_slice(2)[0]] = 1.0
    d = KirillovDatum(alg, ell)
    return [float(x) for x in d.lambdas], len(d.kernel)


def exact_gamma_criterion(alg: GradedLieAlgebra, gamma, bound: float | None = None, tol: float = 1e-9) -> GammaCriterion:
    """Decide Rockland for -sum X_i^2 + i gamma T from the spectrum of gamma.

    With a kernel (2n < dim g1) the singular set is (-inf, -L] u [L, inf),
    L = sum lambda_k; otherwise it is {+-(L + 2 sum alpha_j lambda_j)}.
    """
    from .gbar import HypothesisError

    if alg.step != 2 or alg.dims[1] != 1:
        raise HypothesisError("need a step-2 algebra with one-dimensional second degree")
    g = np.atleast_2d(np.asarray(_complex_gamma(gamma), dtype=complex))
    eig = np.linalg.eigvals(g)
    lams, kdim = symplectic_eigenvalues(alg)
    L = float(sum(lams))
    real_eigs = [z for z in eig if abs(z.imag) <= tol]
    if kdim > 0:
        desc = f"(-inf, -{L:.12g}] u [{L:.12g}, inf)"
        bad = [z for z in real_eigs if abs(z.real) >= L - tol]
        return GammaCriterion(not bad, "interval", lams, desc, [-L, L], list(eig), bad[0] if bad else None)
    top = bound if bound is not None else max([abs(z.real) for z in eig] + [L]) + 1
    pts = _discrete_points(lams, top)
    desc = f"{{+-({L:.12g} + 2 sum_j alpha_j lambda_j)}}"
    bad = [z for z in real_eigs if any(abs(abs(z.real) - p) <= tol for p in pts)]
    signed = sorted(set([-p for p in pts] + pts))
    return GammaCriterion(not bad, "discrete", lams, desc, signed, list(eig), bad[0] if bad else None)


def _discrete_points(lams: Sequence[float], top: float) -> list[float]:
    L = sum(lams)
    pts = {round(L, 12)}
    frontier = [(0.0)]
    seen = {0.0}
    while frontier:
        base = frontier.pop()
        for lam in lams:
            v = round(base + 2 * lam, 12)
            if L + v <= top + 1e-12 and v not in seen:
                seen.add(v)
                frontier.append(v)
                pts.add(round(L + v, 12))
    return sorted(pts)


def _complex_gamma(gamma):
    if np.isscalar(gamma):
        return [[complex(gamma)]]
    from .enveloping import coeff_array

    if isinstance(gamma, np.ndarray) and gamma.dtype != object:
        return gamma.astype(complex)
    return to_complex_array(coeff_array(gamma))
