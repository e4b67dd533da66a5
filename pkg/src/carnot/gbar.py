"""The central extension gbar = (g* + RZ) x| g, semidirect products, and
coadjoint orbit flattening."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import exact
from .exact import to_q
from .lie import GradedLieAlgebra, GroupElement, LinearMap, require_valid, validate


class HypothesisError(ValueError):
    """The algebra does not satisfy the hypothesis an operation needs."""


class ConstructionError(ValueError):
    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


@dataclass(frozen=True)
class SemidirectAlgebra:
    """``ideal x| sub``; ``ideal_index``/``sub_index`` map factor bases into ``algebra``."""

    algebra: GradedLieAlgebra
    ideal: GradedLieAlgebra
    sub: GradedLieAlgebra
    ideal_index: tuple[int, ...]
    sub_index: tuple[int, ...]


@dataclass(frozen=True)
class GbarAlgebra:
    algebra: GradedLieAlgebra
    base: GradedLieAlgebra
    g_index: tuple[int, ...]
    dual_index: tuple[int, ...]
    z_index: int

    def semidirect(self, ideal: GradedLieAlgebra | None = None) -> SemidirectAlgebra:
        """View as N x| g with N = g* + RZ the abelian ideal."""
        alg = self.algebra
        n_idx = tuple(sorted(self.dual_index + (self.z_index,)))
        if ideal is None:
            ideal = _subalgebra(alg, n_idx)
        return SemidirectAlgebra(alg, ideal, self.base, n_idx, self.g_index)


def _subalgebra(alg: GradedLieAlgebra, idx: Sequence[int]) -> GradedLieAlgebra:
    pos = {old: k for k, old in enumerate(idx)}
    dims = [0] * alg.step
    for i in idx:
        dims[alg.degrees[i] - 1] += 1
    table = {}
    for a in idx:
        for b in idx:
            if pos[a] < pos[b]:
                vec = {}
                for k, c in alg.bracket_basis(a, b):
                    if k not in pos:
                        raise ConstructionError("not a subalgebra", (alg.basis[a], alg.basis[b]))
                    vec[pos[k]] = c
                if vec:
                    table[(pos[a], pos[b])] = vec
    while len(dims) > 1 and dims[-1] == 0:
        dims.pop()
    return GradedLieAlgebra(dims, table, [alg.basis[i] for i in idx])


def build_gbar(g: GradedLieAlgebra) -> GbarAlgebra:
    """Degree k <= n holds g*_{n-k+1} (listed first) then g_k; Z sits in degree n+1."""
    require_valid(g)
    n = g.step
    order: list[tuple[str, int]] = []
    dims = []
    for k in range(1, n + 1):
        duals = [("f", a) for a in g.degree_slice(n - k + 1)]
        prims = [("e", a) for a in g.degree_slice(k)]
        order.extend(duals + prims)
        dims.append(len(duals) + len(prims))
    order.append(("z", -1))
    dims.append(1)
    pos = {key: i for i, key in enumerate(order)}
    zlabel = "Z" if "Z" not in g.basis else "Zbar"
    labels = []
    for kind, a in order:
        labels.append(g.basis[a] if kind == "e" else (g.basis[a] + "*" if kind == "f" else zlabel))

    table: dict[tuple[int, int], dict[int, Fraction]] = {}

    def put(i, j, vec):
        if not vec:
            return
        if i > j:
            i, j = j, i
            vec = {k: -c for k, c in vec.items()}
        table[(i, j)] = vec

    for (a, b), vec in g.structure_constants().items():
        put(pos[("e", a)], pos[("e", b)], {pos[("e", k)]: c for k, c in vec.items()})
    zi = pos[("z", -1)]
    # [f_a, e_b] for x in g*_i, y in g_j
    for a in range(g.dim):
        wa = g.degrees[a]
        for b in range(g.dim):
            wb = g.degrees[b]
            if wa == wb:
                if a == b:
                    put(pos[("f", a)], pos[("e", b)], {zi: Fraction(wa)})
            elif wa > wb:
                vec = {}
                for c in g.degree_slice(wa - wb):
                    coeff = dict(g.bracket_basis(b, c)).get(a, 0)
                    if coeff:
                        vec[pos[("f", c)]] = Fraction(coeff)
                put(pos[("f", a)], pos[("e", b)], vec)

    ip_g = [list(r) for r in g.inner_product]
    ip_dual = exact.inverse(ip_g)
    size = len(order)
    ip = exact.zeros(size, size)
    for (k1, a), i in pos.items():
        for (k2, b), j in pos.items():
            if k1 == k2 == "e":
                ip[i][j] = ip_g[a][b]
            elif k1 == k2 == "f":
                ip[i][j] = ip_dual[a][b]
    ip[zi][zi] = Fraction(1)
    alg = GradedLieAlgebra(dims, table, labels, ip)
    return GbarAlgebra(
        alg,
        g,
        tuple(pos[("e", a)] for a in range(g.dim)),
        tuple(pos[("f", a)] for a in range(g.dim)),
        zi,
    )


def _action_matrices(n: GradedLieAlgebra, h: GradedLieAlgebra, action) -> list[list[list[Fraction]]]:
    mats = []
    for b in range(h.dim):
        if isinstance(action, Mapping):
            m = action.get(h.basis[b], action.get(b))
        else:
            m = action[b] if action is not None else None
        if m is None:
            m = exact.zeros(n.dim, n.dim)
        if isinstance(m, LinearMap):
            m = m.matrix
        m = [[to_q(x) for x in row] for row in m]
        if len(m) != n.dim or any(len(r) != n.dim for r in m):
            raise ConstructionError("action matrix has wrong shape", (h.basis[b],))
        mats.append(m)
    return mats


def build_semidirect(n: GradedLieAlgebra, h: GradedLieAlgebra, action=None) -> SemidirectAlgebra:
    """``n x| h`` where ``action[b]`` is the matrix of ad(h_b) on ``n``.

    Within each degree the ideal's basis precedes the subalgebra's.
    """
    require_valid(n)
    require_valid(h)
    mats = _action_matrices(n, h, action)
    cols = lambda m, a: tuple(m[r][a] for r in range(n.dim))  # noqa: E731
    for b, m in enumerate(mats):
        for a in range(n.dim):
            for r in range(n.dim):
                if m[r][a] and n.degrees[r] != n.degrees[a] + h.degrees[b]:
                    raise ConstructionError("action does not respect the grading", (h.basis[b], n.basis[a]))
        for a1 in range(n.dim):
            for a2 in range(a1 + 1, n.dim):
                x, y = n.basis_vector(a1), n.basis_vector(a2)
                lhs = exact.matvec(m, n.bracket(x, y))
                rhs = exact.vec_add(n.bracket(cols(m, a1), y), n.bracket(x, cols(m, a2)))
                if lhs != rhs:
                    raise ConstructionError("action is not a derivation", (h.basis[b], n.basis[a1], n.basis[a2]))
    for b1 in range(h.dim):
        for b2 in range(b1 + 1, h.dim):
            comm = exact.matmul(mats[b1], mats[b2])
            rev = exact.matmul(mats[b2], mats[b1])
            lhs = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(comm, rev)]
            rhs = exact.zeros(n.dim, n.dim)
            for k, c in h.bracket_basis(b1, b2):
                rhs = [[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip(rhs, mats[k])]
            if lhs != rhs:
                raise ConstructionError("action is not a homomorphism", (h.basis[b1], h.basis[b2]))

    step = max(n.step, h.step)
    order = []
    dims = []
    for k in range(1, step + 1):
        block = [("n", a) for a in range(n.dim) if n.degrees[a] == k]
        block += [("h", b) for b in range(h.dim) if h.degrees[b] == k]
        order.extend(block)
        dims.append(len(block))
    pos = {key: i for i, key in enumerate(order)}
    table = {}

    def put(i, j, vec):
        if not vec:
            return
        if i > j:
            i, j = j, i
            vec = {k: -c for k, c in vec.items()}
        table[(i, j)] = vec

    for (a, b), vec in n.structure_constants().items():
        put(pos[("n", a)], pos[("n", b)], {pos[("n", k)]: c for k, c in vec.items()})
    for (a, b), vec in h.structure_constants().items():
        put(pos[("h", a)], pos[("h", b)], {pos[("h", k)]: c for k, c in vec.items()})
    for b, m in enumerate(mats):
        for a in range(n.dim):
            vec = {pos[("n", r)]: m[r][a] for r in range(n.dim) if m[r][a]}
            put(pos[("h", b)], pos[("n", a)], vec)
    labels = [(n.basis[i] if kind == "n" else h.basis[i]) for kind, i in order]
    if len(set(labels)) != len(labels):
        labels = [(n.basis[i] + "_n" if kind == "n" else h.basis[i] + "_h") for kind, i in order]
    size = len(order)
    ip = exact.zeros(size, size)
    for (k1, a), i in pos.items():
        for (k2, b), j in pos.items():
            if k1 == k2:
                ip[i][j] = (n if k1 == "n" else h).inner_product[a][b]
    alg = GradedLieAlgebra(dims, table, labels, ip)
    rep = validate(alg)
    if not rep.ok:
        raise ConstructionError("semidirect product fails validation", rep.violations[0].witness)
    return SemidirectAlgebra(
        alg, n, h, tuple(pos[("n", a)] for a in range(n.dim)), tuple(pos[("h", b)] for b in range(h.dim))
    )


def coadjoint_semidirect(g: GradedLieAlgebra) -> SemidirectAlgebra:
    """g* x| g with g*_i in degree n-i+1 and the coadjoint action."""
    n = g.step
    dual_order = []
    dims = []
    for k in range(1, n + 1):
        block = list(g.degree_slice(n - k + 1))
        dual_order.extend(block)
        dims.append(len(block))
    dual = GradedLieAlgebra(dims, {}, [g.basis[a] + "*" for a in dual_order])
    where = {a: i for i, a in enumerate(dual_order)}
    action = []
    for b in range(g.dim):
        # (ad*_b f)(e_c) = -f([e_b, e_c])
        m = exact.zeros(g.dim, g.dim)
        for c in range(g.dim):
            for a, coeff in g.bracket_basis(b, c):
                m[where[c]][where[a]] -= coeff
        action.append(m)
    return build_semidirect(dual, g, action)


def gbar_as_semidirect(g: GradedLieAlgebra) -> SemidirectAlgebra:
    """Assemble gbar as (g* + RZ) x| g from the action D_b(f) = [e_b, f]."""
    n = g.step
    order = []
    dims = []
    for k in range(1, n + 1):
        block = list(g.degree_slice(n - k + 1))
        order.extend(block)
        dims.append(len(block))
    dims.append(1)
    zlabel = "Z" if "Z" not in g.basis else "Zbar"
    ideal = GradedLieAlgebra(dims, {}, [g.basis[a] + "*" for a in order] + [zlabel])
    where = {a: i for i, a in enumerate(order)}
    zi = len(order)
    size = zi + 1
    action = []
    for b in range(g.dim):
        m = exact.zeros(size, size)
        wb = g.degrees[b]
        for a in range(g.dim):
            wa = g.degrees[a]
            # column for f_a holds [e_b, f_a] = -[f_a, e_b]
            if a == b:
                m[zi][where[a]] = -Fraction(wa)
            elif wa > wb:
                for c in g.degree_slice(wa - wb):
                    coeff = dict(g.bracket_basis(b, c)).get(a, 0)
                    if coeff:
                        m[where[c]][where[a]] -= coeff
        action.append(m)
    return build_semidirect(ideal, g, action)


# -- orbit flattening ----------------------------------------------------

@dataclass(frozen=True)
class NondegeneracyReport:
    ok: bool
    degree: int | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "degree": self.degree,
            "witness": None if self.witness is None else [exact.fmt_q(c) for c in self.witness],
        }


def _pairing_matrix(alg: GradedLieAlgebra, i: int) -> list[list[Fraction]]:
    top = alg.degree_slice(alg.step)[0]
    rows = alg.degree_slice(i)
    cols = alg.degree_slice(alg.step - i)
    return [[dict(alg.bracket_basis(a, b)).get(top, Fraction(0)) for b in cols] for a in rows]


def check_nondegeneracy(alg: GradedLieAlgebra) -> NondegeneracyReport:
    """Exact rank test of every pairing g_i x g_{n-i} -> g_n.

    A failing report carries the degree ``i`` and a vector of ``g_i``
    (full coordinates) that pairs to zero with all of ``g_{n-i}``.
    """
    n = alg.step
    if alg.dims[-1] != 1:
        raise HypothesisError(f"top degree has dimension {alg.dims[-1]}, expected 1")
    for i in range(1, n):
        m = _pairing_matrix(alg, i)
        rows, cols = len(m), alg.dims[n - i - 1]
        if rows == 0 and cols == 0:
            continue
        r = exact.rank(m) if rows and cols else 0
        if r < rows:
            kern = exact.nullspace(exact.transpose(m), rows) if cols else [
                tuple(Fraction(int(k == 0)) for k in range(rows))
            ]
            full = [Fraction(0)] * alg.dim
            for off, a in enumerate(alg.degree_slice(i)):
                full[a] = kern[0][off]
            return NondegeneracyReport(False, i, tuple(full))
        if r < cols:
            # degenerate from the other side; report it at that degree
            kern = exact.nullspace(m, cols)
            full = [Fraction(0)] * alg.dim
            for off, b in enumerate(alg.degree_slice(n - i)):
                full[b] = kern[0][off]
            return NondegeneracyReport(False, n - i, tuple(full))
    return NondegeneracyReport(True)


def flatten_orbit(alg: GradedLieAlgebra, ell, t=None) -> GroupElement:
    """Group element moving the functional (ell, t) to (0, ..., 0, t).

    ``ell`` holds the coordinates on all degrees below the top one, in
    dual-basis order; a full-length vector is also accepted, in which case
    its last entry is t.
    """
    if isinstance(alg, GbarAlgebra):
        alg = alg.algebra
    rep = check_nondegeneracy(alg)
    if not rep.ok:
        raise HypothesisError(f"pairing in degree {rep.degree} is degenerate")
    ell = [to_q(c) for c in ell]
    if len(ell) == alg.dim:
        if t is not None and to_q(t) != ell[-1]:
            raise ValueError("t disagrees with the last coordinate of ell")
        t = ell[-1]
        ell = ell[:-1]
    if len(ell) != alg.dim - 1:
        raise ValueError(f"functional of length {len(ell)} for dimension {alg.dim}")
    if t is None:
        raise ValueError("t is required")
    t = to_q(t)
    if t == 0:
        raise HypothesisError("t must be non-zero")
    n = alg.step
    current = tuple(ell) + (t,)
    g = alg.zero()
    for k in range(1, n):
        m = n - k
        target = [current[b] for b in alg.degree_slice(m)]
        if not any(target):
            continue
        # t * B(y, x_b) = l(x_b) with B the pairing g_k x g_m
        pm = _pairing_matrix(alg, k)
        system = [[t * pm[a][b] for a in range(len(pm))] for b in range(len(target))]
        sol = exact.solve(system, target)
        if sol is None:  # pragma: no cover - excluded by the nondegeneracy check
            raise HypothesisError(f"no solution in degree {k}")
        y = [Fraction(0)] * alg.dim
        for off, a in enumerate(alg.degree_slice(k)):
            y[a] = sol[off]
        y = tuple(y)
        current = alg.coAd(y)(current)
        g = alg.bch(y, g)
    element = GroupElement(alg, g)
    final = alg.coAd(g)(tuple(ell) + (t,))
    expected = (Fraction(0),) * (alg.dim - 1) + (t,)
    if final != expected:  # pragma: no cover - self check
        raise AssertionError("flattening failed its exact verification")
    return element
