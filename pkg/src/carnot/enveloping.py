"""Enveloping-algebra operators U(g, V0, V1) in PBW normal form.

A monomial is an exponent tuple over the algebra basis; the PBW order is
the declared (degree-major) basis order.  Coefficients are dense object
arrays holding :class:`~carnot.exact.GaussQ` entries, or Python complex
numbers once a float has entered.
"""
from __future__ import annotations

import random as _random
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exact import GaussQ, I, to_q, to_scalar
from .lie import AlgebraMismatchError, GradedLieAlgebra

Monomial = tuple  # exponent tuple of length algebra.dim


class SpaceMismatchError(ValueError):
    pass


class DegreeError(ValueError):
    pass


def coeff_array(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Object array of exact scalars from nested sequences, numbers or arrays."""
    if isinstance(m, np.ndarray) and m.dtype == object:
        arr = np.empty(m.shape, dtype=object)
        for idx, v in np.ndenumerate(m):
            arr[idx] = _scalar(v)
        return arr
    if np.isscalar(m) or isinstance(m, (GaussQ, Fraction, int)):
        r = rows or 1
        arr = np.empty((r, r), dtype=object)
        for i in range(r):
            for j in range(r):
                arr[i, j] = _scalar(m) if i == j else GaussQ(0)
        return arr
    rows_list = [list(r) for r in m]
    arr = np.empty((len(rows_list), len(rows_list[0]) if rows_list else 0), dtype=object)
    for i, row in enumerate(rows_list):
        for j, v in enumerate(row):
            arr[i, j] = _scalar(v)
    return arr


def _scalar(v):
    if isinstance(v, (GaussQ, complex)):
        return v
    if isinstance(v, (float, np.floating)):
        return complex(v)
    if isinstance(v, np.complexfloating):
        return complex(v)
    try:
        return to_scalar(v)
    except TypeError:
        return complex(v)


def _is_zero_array(a: np.ndarray) -> bool:
    return all(v == 0 for v in a.flat)


def _conj_t(a: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[1], a.shape[0]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            out[j, i] = v.conjugate()
    return out


def identity_coeff(n: int) -> np.ndarray:
    return coeff_array(GaussQ(1), n)


def to_complex_array(a: np.ndarray) -> np.ndarray:
    return np.array([[complex(v) for v in row] for row in a], dtype=np.complex128).reshape(a.shape)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for l in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out


# -- PBW rewriting ---------------------------------------------------------

def _word_of(monomial: Monomial) -> tuple[int, ...]:
    out = []
    for i, e in enumerate(monomial):
        out.extend([i] * e)
    return tuple(out)


def _monomial_of(word: Sequence[int], dim: int) -> Monomial:
    e = [0] * dim
    for i in word:
        e[i] += 1
    return tuple(e)


def normal_form(alg: GradedLieAlgebra, word: Sequence[int], rng: _random.Random | None = None) -> dict:
    """PBW normal form of a basis word as ``{monomial: Fraction}``.

    Repeatedly rewrites ``...ab...`` with ``a > b`` as ``...ba... + ...[a,b]...``.
    Without ``rng`` the leftmost descent is taken and results are memoized;
    with ``rng`` a random descent is chosen at each step (confluence checks).
    """
    word = tuple(alg.index(w) for w in word)
    if rng is None:
        cache = alg._cache.setdefault("pbw", {})
        return dict(_nf_cached(alg, word, cache))
    return _nf_random(alg, word, rng)


def _nf_cached(alg, word, cache):
    hit = cache.get(word)
    if hit is not None:
        return hit
    pos = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
    if pos is None:
        res = {_monomial_of(word, alg.dim): Fraction(1)}
    else:
        a, b = word[pos], word[pos + 1]
        res = dict(_nf_cached(alg, word[:pos] + (b, a) + word[pos + 2 :], cache))
        for k, c in alg.bracket_basis(a, b):
            for mono, v in _nf_cached(alg, word[:pos] + (k,) + word[pos + 2 :], cache).items():
                nv = res.get(mono, 0) + c * v
                if nv:
                    res[mono] = nv
                else:
                    res.pop(mono, None)
    cache[word] = res
    return res


def _nf_random(alg, word, rng):
    res: dict = {}
    stack = [(word, Fraction(1))]
    while stack:
        w, c = stack.pop()
        descents = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not descents:
            mono = _monomial_of(w, alg.dim)
            nv = res.get(mono, 0) + c
            if nv:
                res[mono] = nv
            else:
                res.pop(mono, None)
            continue
        pos = rng.choice(descents)
        a, b = w[pos], w[pos + 1]
        stack.append((w[:pos] + (b, a) + w[pos + 2 :], c))
        for k, v in alg.bracket_basis(a, b):
            stack.append((w[:pos] + (k,) + w[pos + 2 :], c * v))
    return res


# -- operators ---------------------------------------------------------------

class EnvelopingOperator:
    """Element of U(g) tensor Hom(V0, V1) with terms ``{monomial: matrix}``.

    ``grading0``/``grading1`` optionally record the even part dimension of
    a Z/2-graded coefficient space (even block first).
    """

    __slots__ = ("algebra", "V0", "V1", "terms", "grading0", "grading1")

    def __init__(self, algebra: GradedLieAlgebra, V0: int, V1: int, terms: Mapping | None = None,
                 grading0: int | None = None, grading1: int | None = None):
        self.algebra = algebra
        self.V0 = int(V0)
        self.V1 = int(V1)
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != algebra.dim:
                raise AlgebraMismatchError("monomial length does not match the algebra")
            c = coeff_array(c, self.V1)
            if c.shape != (self.V1, self.V0):
                raise SpaceMismatchError(f"coefficient of shape {c.shape}, expected {(self.V1, self.V0)}")
            if not _is_zero_array(c):
                clean[mono] = c
        self.terms = dict(sorted(clean.items()))
        self.grading0 = grading0
        self.grading1 = grading1

    # construction helpers
    @classmethod
    def zero(cls, algebra, V0=1, V1=None):
        return cls(algebra, V0, V0 if V1 is None else V1, {})

    @classmethod
    def scalar(cls, algebra, value=1, V=1):
        return cls(algebra, V, V, {(0,) * algebra.dim: coeff_array(value, V)})

    @classmethod
    def from_words(cls, algebra, items: Iterable, V0=1, V1=None, rng=None):
        """Sum of ``coeff * word``; words are label/index sequences."""
        V1 = V0 if V1 is None else V1
        out: dict = {}
        for word, coeff in items:
            c = coeff_array(coeff, V1)
            for mono, v in normal_form(algebra, list(word), rng).items():
                add = c * GaussQ(v)
                out[mono] = out[mono] + add if mono in out else add
        return cls(algebra, V0, V1, out)

    @classmethod
    def generator(cls, algebra, key, coeff=1, V=1):
        return cls.from_words(algebra, [((key,), coeff)], V)

    # structure
    def degrees(self) -> set[int]:
        w = self.algebra.degrees
        return {sum(e * w[i] for i, e in enumerate(m)) for m in self.terms}

    @property
    def homogeneous_degree(self) -> int | None:
        d = self.degrees()
        return next(iter(d)) if len(d) == 1 else None

    @property
    def order(self) -> int:
        """Top weighted degree (0 for the zero operator)."""
        return max(self.degrees(), default=0)

    def is_exact(self) -> bool:
        return all(isinstance(v, GaussQ) for c in self.terms.values() for v in c.flat)

    def monomial_label(self, mono) -> str:
        parts = []
        for i, e in enumerate(mono):
            if e:
                parts.append(self.algebra.basis[i] + (f"^{e}" if e > 1 else ""))
        return "*".join(parts) or "1"

    def __repr__(self):
        return f"EnvelopingOperator({len(self.terms)} terms, V0={self.V0}, V1={self.V1})"

    def __eq__(self, other):
        if not isinstance(other, EnvelopingOperator):
            return NotImplemented
        if (self.V0, self.V1) != (other.V0, other.V1) or set(self.terms) != set(other.terms):
            return False
        return all(
            all(a == b for a, b in zip(self.terms[m].flat, other.terms[m].flat)) for m in self.terms
        )

    __hash__ = None

    def allclose(self, other, tol=1e-10) -> bool:
        keys = set(self.terms) | set(other.terms)
        for m in keys:
            a = self.terms.get(m)
            b = other.terms.get(m)
            a = to_complex_array(a) if a is not None else 0
            b = to_complex_array(b) if b is not None else 0
            if np.max(np.abs(np.asarray(a - b)), initial=0) > tol:
                return False
        return True

    # arithmetic
    def _same(self, other):
        if other.algebra is not self.algebra and not other.algebra.same_structure(self.algebra):
            raise AlgebraMismatchError("operators live on different algebras")

    def __add__(self, other):
        self._same(other)
        if (self.V0, self.V1) != (other.V0, other.V1):
            raise SpaceMismatchError("cannot add operators between different spaces")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return EnvelopingOperator(self.algebra, self.V0, self.V1, out, self.grading0, self.grading1)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = _scalar(s)
        return EnvelopingOperator(
            self.algebra, self.V0, self.V1, {m: c * s for m, c in self.terms.items()}, self.grading0, self.grading1
        )

    def __rmul__(self, s):
        return self.scale(s)

    def __matmul__(self, other):
        return multiply(self, other)

    def tensor(self, left: int = 1, right: int = 1) -> "EnvelopingOperator":
        """Id_left (x) self (x) Id_right on the coefficient spaces."""
        L, R = identity_coeff(left), identity_coeff(right)
        terms = {m: kron(kron(L, c), R) for m, c in self.terms.items()}
        return EnvelopingOperator(self.algebra, self.V0 * left * right, self.V1 * left * right, terms)

    def embed(self, ambient: GradedLieAlgebra, index: Sequence[int]) -> "EnvelopingOperator":
        """Push forward along an injective Lie map sending basis i to ``index[i]``."""
        out: dict = {}
        for m, c in self.terms.items():
            word = [index[i] for i in _word_of(m)]
            for mono, v in normal_form(ambient, word).items():
                add = c * GaussQ(v)
                out[mono] = out[mono] + add if mono in out else add
        return EnvelopingOperator(ambient, self.V0, self.V1, out, self.grading0, self.grading1)

    def to_json(self) -> dict:
        return {
            "V0": self.V0,
            "V1": self.V1,
            "terms": [
                {
                    "monomial": {self.algebra.basis[i]: e for i, e in enumerate(m) if e},
                    "coeff": [[_scalar_json(v) for v in row] for row in c],
                }
                for m, c in sorted(self.terms.items())
            ],
        }


def _scalar_json(v):
    if isinstance(v, GaussQ):
        return v.to_json()
    v = complex(v)
    return [float(f"{v.real:.12g}"), float(f"{v.imag:.12g}")]


def pbw_normalize(algebra: GradedLieAlgebra, word: Sequence, coeff=1, V0: int = 1, V1: int | None = None,
                  rng=None) -> EnvelopingOperator:
    return EnvelopingOperator.from_words(algebra, [(word, coeff)], V0, V1, rng)


def multiply(A: EnvelopingOperator, B: EnvelopingOperator) -> EnvelopingOperator:
    """Composition A o B (B acts first)."""
    A._same(B)
    if B.V1 != A.V0:
        raise SpaceMismatchError(f"target of B has dim {B.V1}, source of A has dim {A.V0}")
    alg = A.algebra
    out: dict = {}
    for m1, c1 in A.terms.items():
        w1 = _word_of(m1)
        for m2, c2 in B.terms.items():
            prod = c1.dot(c2)
            for mono, v in normal_form(alg, w1 + _word_of(m2)).items():
                add = prod * GaussQ(v)
                out[mono] = out[mono] + add if mono in out else add
    return EnvelopingOperator(alg, B.V0, A.V1, out, B.grading0, A.grading1)


def adjoint(A: EnvelopingOperator) -> EnvelopingOperator:
    """Formal adjoint: X^t = -X, words reversed, coefficients conjugate-transposed."""
    alg = A.algebra
    out: dict = {}
    for m, c in A.terms.items():
        w = _word_of(m)
        sign = -1 if len(w) % 2 else 1
        ct = _conj_t(c)
        for mono, v in normal_form(alg, w[::-1]).items():
            add = ct * GaussQ(sign * v)
            out[mono] = out[mono] + add if mono in out else add
    return EnvelopingOperator(alg, A.V1, A.V0, out, A.grading1, A.grading0)


def dilation_action(lam, A: EnvelopingOperator) -> EnvelopingOperator:
    w = A.algebra.degrees
    try:
        lam = to_q(lam)
    except TypeError:
        pass
    out = {}
    for m, c in A.terms.items():
        deg = sum(e * w[i] for i, e in enumerate(m))
        out[m] = c * _scalar(lam ** deg)
    return EnvelopingOperator(A.algebra, A.V0, A.V1, out, A.grading0, A.grading1)


def is_symmetric(A: EnvelopingOperator, tol: float | None = None) -> bool:
    if A.V0 != A.V1:
        return False
    At = adjoint(A)
    return At == A if tol is None else At.allclose(A, tol)


# -- crossed-product operators ----------------------------------------------

def sharp_product(D1: EnvelopingOperator, D2: EnvelopingOperator, c=1, ambient=None,
                  symmetric: bool = False) -> EnvelopingOperator:
    """The block operator D1 # cD2 on ``ambient = n x| h``.

    D1 acts on (a copy of) the ideal, D2 on the subalgebra.  Coefficient
    spaces are ordered (E x F)_0 = E0F0 + E1F1 and (E x F)_1 = E1F0 + E0F1,
    with E the outer tensor factor.  ``symmetric=True`` gives the variant
    [[D1, D2^t], [D2, -D1]] for symmetric D1 with E0 = E1.
    """
    from .gbar import GbarAlgebra, SemidirectAlgebra

    if isinstance(ambient, GbarAlgebra):
        ambient = ambient.semidirect()
    if not isinstance(ambient, SemidirectAlgebra):
        raise TypeError("the ambient algebra must be a semidirect product")
    _check_factor(D1.algebra, ambient.ideal, "D1")
    _check_factor(D2.algebra, ambient.sub, "D2")
    k1, k2 = D1.homogeneous_degree, D2.homogeneous_degree
    if k1 is not None and k2 is not None and k1 != k2 and D1.terms and D2.terms:
        raise DegreeError(f"D1 has degree {k1}, D2 has degree {k2}")
    G = ambient.algebra
    cD2 = D2.scale(c)
    A1 = D1.embed(G, ambient.ideal_index)
    A2 = cD2.embed(G, ambient.sub_index)
    A2t = adjoint(cD2).embed(G, ambient.sub_index)
    E0, E1, F0, F1 = D1.V0, D1.V1, D2.V0, D2.V1
    if symmetric:
        if E0 != E1:
            raise SpaceMismatchError("symmetric variant needs E0 = E1")
        blocks = [
            [A1.tensor(right=F0), A2t.tensor(left=E0)],
            [A2.tensor(left=E0), (-A1).tensor(right=F1)],
        ]
        src = (E0 * F0, E0 * F1)
        tgt = (E0 * F0, E0 * F1)
    else:
        A1t = adjoint(D1).embed(G, ambient.ideal_index)
        blocks = [
            [A1.tensor(right=F0), (-A2t).tensor(left=E1)],
            [A2.tensor(left=E0), A1t.tensor(right=F1)],
        ]
        src = (E0 * F0, E1 * F1)
        tgt = (E1 * F0, E0 * F1)
    return block_operator(G, blocks, src, tgt)


def _check_factor(alg: GradedLieAlgebra, factor: GradedLieAlgebra, name: str) -> None:
    # degrees may differ (a flat-graded stand-in for the ideal is allowed)
    if alg.dim != factor.dim or alg.structure_constants() != factor.structure_constants():
        raise AlgebraMismatchError(f"{name} does not live on the expected factor")


def block_operator(G: GradedLieAlgebra, blocks, src: Sequence[int], tgt: Sequence[int]) -> EnvelopingOperator:
    """Assemble ``blocks[r][c]`` (maps src[c] -> tgt[r]) into one operator."""
    rows, cols = sum(tgt), sum(src)
    out: dict = {}
    r0 = 0
    for r, row in enumerate(blocks):
        c0 = 0
        for cidx, B in enumerate(row):
            if B is not None:
                if (B.V1, B.V0) != (tgt[r], src[cidx]):
                    raise SpaceMismatchError("block shape mismatch")
                for m, c in B.terms.items():
                    if m not in out:
                        z = np.empty((rows, cols), dtype=object)
                        z.fill(GaussQ(0))
                        out[m] = z
                    out[m][r0 : r0 + tgt[r], c0 : c0 + src[cidx]] = c
            c0 += src[cidx]
        r0 += tgt[r]
    return EnvelopingOperator(G, cols, rows, out, src[0], tgt[0])


def psi_flip(A: EnvelopingOperator, central=None) -> EnvelopingOperator:
    """Pushforward along (l, t) -> (l, -t) on the abelian algebra g* + R.

    ``central`` names the R generator; by default the last basis vector.
    """
    alg = A.algebra
    if not alg.is_abelian():
        raise AlgebraMismatchError("psi acts on the abelian factor only")
    z = alg.dim - 1 if central is None else alg.index(central)
    out = {}
    for m, c in A.terms.items():
        out[m] = c * GaussQ(-1) if m[z] % 2 else c
    return EnvelopingOperator(alg, A.V0, A.V1, out, A.grading0, A.grading1)


# -- model operators ---------------------------------------------------------

def build_example1(alg: GradedLieAlgebra, s: int) -> EnvelopingOperator:
    """sum_i (-1)^{s/w(i)} X_i^{2s/w(i)}, homogeneous of degree 2s."""
    s = int(s)
    for k, d in enumerate(alg.dims, start=1):
        if d and s % k:
            raise DegreeError(f"degree {k} does not divide s={s}")
    items = []
    for i, w in enumerate(alg.degrees):
        e = s // w
        items.append(((i,) * (2 * e), (-1) ** e))
    return EnvelopingOperator.from_words(alg, items)


def _require_step2_center1(alg: GradedLieAlgebra):
    from .gbar import HypothesisError

    if alg.step != 2 or alg.dims[1] != 1:
        raise HypothesisError("need a step-2 algebra with one-dimensional second degree")


def build_gamma_model(alg: GradedLieAlgebra, gamma) -> EnvelopingOperator:
    """-sum X_i^2 Id + i gamma T on a step-2 algebra with dim g_2 = 1."""
    _require_step2_center1(alg)
    g = coeff_array(gamma)
    n = g.shape[0]
    if g.shape != (n, n):
        raise SpaceMismatchError("gamma must be square")
    idn = identity_coeff(n)
    items = [((i, i), idn * GaussQ(-1)) for i in alg.degree_slice(1)]
    T = alg.degree_slice(2)[0]
    items.append(((T,), g * I))
    return EnvelopingOperator.from_words(alg, items, n)


def sub_laplacian(alg: GradedLieAlgebra, V: int = 1) -> EnvelopingOperator:
    idn = identity_coeff(V)
    return EnvelopingOperator.from_words(alg, [((i, i), idn * GaussQ(-1)) for i in alg.degree_slice(1)], V)


class CliffordError(ValueError):
    pass


class CliffordAction:
    """Matrices c(X_b) for an orthonormal set of generators.

    Checks c(X)^2 = Id, c(X)* = c(X) and anticommutation, exactly or to
    ``tol`` when floats are present.
    """

    def __init__(self, matrices: Sequence, tol: float = 1e-12):
        self.matrices = [coeff_array(m) for m in matrices]
        if not self.matrices:
            raise CliffordError("empty Clifford action")
        n = self.matrices[0].shape[0]
        self.dim = n
        idn = identity_coeff(n)
        for a, ma in enumerate(self.matrices):
            if ma.shape != (n, n):
                raise CliffordError("Clifford matrices must be square and equal size")
            if not _close(_conj_t(ma), ma, tol):
                raise CliffordError(f"c(X{a + 1}) is not self-adjoint")
            for b in range(a, len(self.matrices)):
                mb = self.matrices[b]
                anti = ma.dot(mb) + mb.dot(ma)
                want = idn * GaussQ(2) if a == b else idn * GaussQ(0)
                if not _close(anti, want, tol):
                    raise CliffordError(f"Clifford relation fails for ({a + 1}, {b + 1})")


def _close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    exact_ok = all(isinstance(v, GaussQ) for v in a.flat) and all(isinstance(v, GaussQ) for v in b.flat)
    if exact_ok:
        return all(x == y for x, y in zip(a.flat, b.flat))
    return float(np.max(np.abs(to_complex_array(a) - to_complex_array(b)), initial=0)) <= tol


PAULI = (
    [[0, 1], [1, 0]],
    [[0, [0, -1]], [[0, 1], 0]],
    [[1, 0], [0, -1]],
)


def pauli(k: int) -> np.ndarray:
    """Pauli matrix sigma_k, k in {1, 2, 3}."""
    return coeff_array(PAULI[k - 1])


def build_dirac(alg: GradedLieAlgebra, c: CliffordAction, degree: int = 1, generators=None,
                imaginary: bool = True) -> EnvelopingOperator:
    """sqrt(-1) sum_j c(X_j) X_j over the chosen generators (default: all of ``degree``).

    The factor i makes the operator symmetric; ``imaginary=False`` drops it.
    """
    gens = list(alg.degree_slice(degree)) if generators is None else [alg.index(g) for g in generators]
    if len(gens) != len(c.matrices):
        raise CliffordError(f"{len(c.matrices)} Clifford matrices for {len(gens)} generators")
    factor = I if imaginary else GaussQ(1)
    items = [((g,), m * factor) for g, m in zip(gens, c.matrices)]
    return EnvelopingOperator.from_words(alg, items, c.dim)


def abelianized_symbol(D: EnvelopingOperator, xi) -> np.ndarray:
    """Principal symbol of D at a character xi of the abelianization g_1.

    Only the monomials purely in degree-1 generators survive; each X_j
    becomes i xi_j.  A non-invertible value is the obstruction that rules
    out the Rockland condition.
    """
    alg = D.algebra
    g1 = set(alg.degree_slice(1))
    k = D.order
    out = np.zeros((D.V1, D.V0), dtype=np.complex128)
    for m, c in D.terms.items():
        if sum(e * alg.degrees[i] for i, e in enumerate(m)) != k:
            continue
        if any(e and i not in g1 for i, e in enumerate(m)):
            continue
        val = 1.0 + 0j
        for i, e in enumerate(m):
            if e:
                val *= (1j * float(xi[i - min(g1)])) ** e
        out += val * to_complex_array(c)
    return out
