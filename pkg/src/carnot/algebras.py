"""Standard Carnot algebras and random generators for property checks."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .exact import to_q
from .lie import GradedLieAlgebra


def abelian(d: int, step: int = 1) -> GradedLieAlgebra:
    """R^d in degree 1 (``step`` > 1 appends empty degrees)."""
    dims = [d] + [0] * (step - 1)
    return GradedLieAlgebra(dims, {}, [f"X{i + 1}" for i in range(d)])


def heisenberg(d: int = 1) -> GradedLieAlgebra:
    """h_{2d+1}: basis X1..Xd, Y1..Yd, Z with [X_i, Y_i] = Z."""
    return heisenberg_type([1] * d)


def heisenberg_type(lams: Sequence) -> GradedLieAlgebra:
    """Step-2 algebra with [X_k, Y_k] = lam_k Z and one central direction."""
    n = len(lams)
    basis = [f"X{k + 1}" for k in range(n)] + [f"Y{k + 1}" for k in range(n)] + ["Z"]
    if n == 1:
        basis = ["X", "Y", "Z"]
    table = {(k, n + k): {2 * n: to_q(lam)} for k, lam in enumerate(lams)}
    return GradedLieAlgebra([2 * n, 1], table, basis)


def engel() -> GradedLieAlgebra:
    """dims [2,1,1], [X1,X2] = X3, [X1,X3] = X4."""
    return GradedLieAlgebra([2, 1, 1], {(0, 1): {2: 1}, (0, 2): {3: 1}}, ["X1", "X2", "X3", "X4"])


def step2(dim1: int, forms: Sequence[Sequence[Sequence]], basis=None) -> GradedLieAlgebra:
    """Step-2 algebra from skew forms: [e_i, e_j] = sum_c forms[c][i][j] z_c.

    Any family of skew forms gives a valid algebra, since all triple
    brackets vanish.
    """
    m = len(forms)
    table = {}
    for i in range(dim1):
        for j in range(i + 1, dim1):
            vec = {dim1 + c: to_q(forms[c][i][j]) for c in range(m) if to_q(forms[c][i][j])}
            if vec:
                table[(i, j)] = vec
    return GradedLieAlgebra([dim1, m], table, basis)


# -- free nilpotent algebras -------------------------------------------

def lyndon_words(r: int, max_len: int) -> list[tuple[int, ...]]:
    """Lyndon words over {0..r-1} with length <= max_len (Duval's algorithm)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == r - 1:
            w.pop()
    return out


def _standard_split(w: tuple[int, ...], lyndon: set) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # w = uv with v the longest proper Lyndon suffix
    for i in range(1, len(w)):
        if w[i:] in lyndon:
            return w[:i], w[i:]
    raise ValueError(w)


def _poly_bracket(p: dict, q: dict, max_len: int) -> dict:
    out: dict = {}
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) > max_len:
                continue
            out[u + v] = out.get(u + v, 0) + a * b
            out[v + u] = out.get(v + u, 0) - a * b
    return {k: c for k, c in out.items() if c}


def free_nilpotent(r: int, step: int) -> GradedLieAlgebra:
    """Free step-``step`` nilpotent algebra on ``r`` generators (Lyndon basis)."""
    words = sorted(lyndon_words(r, step), key=lambda w: (len(w), w))
    lyn = set(words)
    index = {w: i for i, w in enumerate(words)}
    poly: dict[tuple, dict] = {}
    for w in words:
        if len(w) == 1:
            poly[w] = {w: Fraction(1)}
        else:
            u, v = _standard_split(w, lyn)
            poly[w] = _poly_bracket(poly[u], poly[v], step)

    def to_basis(p: dict) -> dict[int, Fraction]:
        p = dict(p)
        out: dict[int, Fraction] = {}
        while p:
            w = min(p)
            c = p[w]
            if w not in lyn:
                raise AssertionError("minimal word of a Lie polynomial must be Lyndon")
            out[index[w]] = c
            for k, a in poly[w].items():
                nv = p.get(k, 0) - c * a
                if nv:
                    p[k] = nv
                else:
                    p.pop(k, None)
        return out

    table = {}
    for i, u in enumerate(words):
        for j in range(i + 1, len(words)):
            v = words[j]
            if len(u) + len(v) > step:
                continue
            vec = to_basis(_poly_bracket(poly[u], poly[v], step))
            if vec:
                table[(i, j)] = vec
    dims = [sum(1 for w in words if len(w) == k) for k in range(1, step + 1)]
    basis = ["x" + "".join(str(a + 1) for a in w) for w in words]
    return GradedLieAlgebra(dims, table, basis)


# -- constructions used to produce random valid algebras ---------------

def direct_sum(a: GradedLieAlgebra, b: GradedLieAlgebra) -> GradedLieAlgebra:
    n = max(a.step, b.step)
    da = list(a.dims) + [0] * (n - a.step)
    db = list(b.dims) + [0] * (n - b.step)
    # new index for (which, old index), degree-major
    pos = {}
    k = 0
    for deg in range(1, n + 1):
        for src, alg in ((0, a), (1, b)):
            if deg <= alg.step:
                for i in alg.degree_slice(deg):
                    pos[(src, i)] = k
                    k += 1
    table = {}
    for src, alg in ((0, a), (1, b)):
        for (i, j), vec in alg.structure_constants().items():
            pi, pj = pos[(src, i)], pos[(src, j)]
            new = {pos[(src, t)]: c for t, c in vec.items()}
            table[(pi, pj)] = new
    return GradedLieAlgebra([x + y for x, y in zip(da, db)], table)


def graded_change_of_basis(alg: GradedLieAlgebra, mats: Sequence) -> GradedLieAlgebra:
    """Transport the bracket along a block-diagonal invertible map.

    ``mats[k]`` is the matrix on degree k+1, columns giving new basis
    vectors in old coordinates.
    """
    from . import exact

    n = alg.dim
    P = exact.zeros(n, n)
    for k, m in enumerate(mats):
        sl = list(alg.degree_slice(k + 1))
        for a, ia in enumerate(sl):
            for b, ib in enumerate(sl):
                P[ia][ib] = to_q(m[a][b])
    Pinv = exact.inverse(P)
    cols = [tuple(P[r][c] for r in range(n)) for c in range(n)]
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            val = exact.matvec(Pinv, alg.bracket(cols[i], cols[j]))
            vec = {k: c for k, c in enumerate(val) if c}
            if vec:
                table[(i, j)] = vec
    return GradedLieAlgebra(alg.dims, table)


def quotient_top(alg: GradedLieAlgebra, keep: Sequence[int]) -> GradedLieAlgebra:
    """Quotient by the top-degree basis vectors not listed in ``keep``.

    Top degree is central, so any subspace of it is an ideal.
    """
    top = list(alg.degree_slice(alg.step))
    drop = [i for i in top if i not in set(keep)]
    remaining = [i for i in range(alg.dim) if i not in drop]
    new = {old: k for k, old in enumerate(remaining)}
    table = {}
    for (i, j), vec in alg.structure_constants().items():
        if i in new and j in new:
            v = {new[t]: c for t, c in vec.items() if t in new}
            if v:
                table[(new[i], new[j])] = v
    dims = list(alg.dims)
    dims[-1] -= len(drop)
    while len(dims) > 1 and dims[-1] == 0:
        dims.pop()
    return GradedLieAlgebra(dims, table)


def random_algebra(rng: random.Random, max_step: int = 3, max_dim1: int = 3) -> GradedLieAlgebra:
    """A random valid Carnot algebra of step <= max_step.

    Draws from skew-form step-2 algebras, random quotients of free
    nilpotent algebras with a random graded basis change, and direct sums.
    """
    def rand_q():
        return Fraction(rng.randint(-3, 3), rng.randint(1, 3))

    def rand_invertible(d):
        from . import exact

        while True:
            m = [[rand_q() for _ in range(d)] for _ in range(d)]
            if exact.rank(m) == d:
                return m

    kind = rng.choice(["step2", "free", "free", "sum"])
    if kind == "step2":
        d1 = rng.randint(1, max_dim1 + 1)
        m = rng.randint(0, 2)
        forms = []
        for _ in range(m):
            f = [[Fraction(0)] * d1 for _ in range(d1)]
            for i in range(d1):
                for j in range(i + 1, d1):
                    f[i][j] = rand_q()
                    f[j][i] = -f[i][j]
            forms.append(f)
        return step2(d1, forms) if m else abelian(d1)
    if kind == "free":
        r = rng.randint(2, min(3, max_dim1))
        s = rng.randint(2, max_step)
        if r == 3 and s == 3:
            r = 2
        base = free_nilpotent(r, s)
        top = list(base.degree_slice(base.step))
        keep = rng.sample(top, rng.randint(1, len(top)))
        alg = quotient_top(base, keep)
        return graded_change_of_basis(alg, [rand_invertible(d) for d in alg.dims])
    a = random_algebra(rng, max_step=max_step - 1 if max_step > 2 else 2, max_dim1=2)
    b = random_algebra(rng, max_step=2, max_dim1=2)
    return direct_sum(a, b)


NAMED = {
    "h3": lambda: heisenberg(1),
    "h5": lambda: heisenberg(2),
    "engel": engel,
    "free23": lambda: free_nilpotent(2, 3),
}
