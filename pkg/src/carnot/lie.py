"""Graded nilpotent (Carnot) Lie algebras with exact structure constants.

Group elements live in exponential coordinates of the first kind, so the
group law is the Baker-Campbell-Hausdorff series, which terminates at the
step of the algebra.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import exact
from .exact import fmt_q, to_q


class MalformedAlgebraError(ValueError):
    """Structural problem in algebra input (sizes, unknown labels)."""


class AlgebraMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # antisymmetry | grading | jacobi | metric
    witness: tuple
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness), "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "summary": "all invariants hold" if self.ok else "invariants violated",
            "violations": [v.to_dict() for v in self.violations],
        }


class GradedLieAlgebra:
    """Step-n graded nilpotent Lie algebra over Q.

    Parameters
    ----------
    dims : per-degree dimensions ``[d_1, ..., d_n]``; basis vectors are
        ordered degree-major, so the first ``d_1`` have degree 1 and so on.
    brackets : mapping ``(i, j) -> {k: coeff}`` (or a dense coefficient
        sequence).  Keys may be indices or basis labels.  Entries for both
        ``(i, j)`` and ``(j, i)`` are accepted; inconsistent pairs are kept
        aside and reported by :func:`validate`.
    basis : optional labels, defaults to ``e1, e2, ...``.
    inner_product : optional symmetric matrix, identity by default.
    """

    def __init__(self, dims, brackets=None, basis=None, inner_product=None):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 0 for d in dims):
            raise MalformedAlgebraError(f"bad dims {dims}")
        self.dims = dims
        self.step = len(dims)
        self.dim = sum(dims)
        n = self.dim
        if basis is None:
            basis = [f"e{i + 1}" for i in range(n)]
        basis = tuple(str(b) for b in basis)
        if len(basis) != n:
            raise MalformedAlgebraError(f"{len(basis)} basis labels for dimension {n}")
        if len(set(basis)) != n:
            raise MalformedAlgebraError("duplicate basis labels")
        self.basis = basis
        self._index = {b: i for i, b in enumerate(basis)}
        degrees = []
        for k, d in enumerate(dims, start=1):
            degrees.extend([k] * d)
        self.degrees = tuple(degrees)

        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        conflicts: list[tuple[int, int]] = []
        seen: dict[tuple[int, int], dict[int, Fraction]] = {}
        for key, value in (dict(brackets) if brackets else {}).items():
            i, j = (self.index(key[0]), self.index(key[1]))
            vec = self._sparse(value)
            if (i, j) in seen:
                raise MalformedAlgebraError(f"bracket ({basis[i]}, {basis[j]}) given twice")
            seen[(i, j)] = vec
        for (i, j), vec in seen.items():
            if i == j:
                if vec:
                    conflicts.append((i, j))
                continue
            a, b = (i, j) if i < j else (j, i)
            canon = vec if i < j else {k: -c for k, c in vec.items()}
            if (j, i) in seen and i < j:
                other = {k: -c for k, c in seen[(j, i)].items()}
                if other != canon:
                    conflicts.append((i, j))
            if canon:
                table.setdefault((a, b), canon)
        self._table = {k: v for k, v in table.items() if v}
        self._conflicts = tuple(conflicts)
        self._full: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        for (i, j), vec in self._table.items():
            items = tuple(sorted(vec.items()))
            self._full[(i, j)] = items
            self._full[(j, i)] = tuple((k, -c) for k, c in items)

        if inner_product is None:
            self.inner_product = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        else:
            ip = [[to_q(x) for x in row] for row in inner_product]
            if len(ip) != n or any(len(r) != n for r in ip):
                raise MalformedAlgebraError("inner product has wrong shape")
            self.inner_product = tuple(tuple(r) for r in ip)
        self._cache: dict = {}

    # -- basic access -------------------------------------------------
    def index(self, key) -> int:
        if isinstance(key, int) and not isinstance(key, bool):
            if not 0 <= key < self.dim:
                raise MalformedAlgebraError(f"basis index {key} out of range")
            return key
        try:
            return self._index[str(key)]
        except KeyError:
            raise MalformedAlgebraError(f"unknown basis label {key!r}") from None

    def _sparse(self, value) -> dict[int, Fraction]:
        if isinstance(value, Mapping):
            out = {}
            for k, c in value.items():
                c = to_q(c)
                if c:
                    out[self.index(k)] = out.get(self.index(k), Fraction(0)) + c
            return {k: c for k, c in out.items() if c}
        value = list(value)
        if len(value) != self.dim:
            raise MalformedAlgebraError(f"bracket vector of length {len(value)}, expected {self.dim}")
        return {k: to_q(c) for k, c in enumerate(value) if to_q(c)}

    def degree_slice(self, k: int) -> range:
        start = sum(self.dims[: k - 1])
        return range(start, start + self.dims[k - 1])

    def structure_constants(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        """Canonical sparse table, keys ``(i, j)`` with ``i < j``."""
        return {k: dict(v) for k, v in self._table.items()}

    def bracket_basis(self, i: int, j: int) -> tuple[tuple[int, Fraction], ...]:
        return self._full.get((i, j), ())

    def is_abelian(self) -> bool:
        return not self._table

    def same_structure(self, other: "GradedLieAlgebra") -> bool:
        return (
            self.dims == other.dims
            and self._table == other._table
            and self.inner_product == other.inner_product
        )

    def __eq__(self, other):
        if not isinstance(other, GradedLieAlgebra):
            return NotImplemented
        return self.same_structure(other) and self.basis == other.basis

    def __hash__(self):
        return hash((self.dims, self.basis, tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self._table.items()))))

    def __repr__(self):
        return f"GradedLieAlgebra(dims={list(self.dims)}, basis={list(self.basis)})"

    # -- vectors ------------------------------------------------------
    def vector(self, coords=None, **named) -> tuple[Fraction, ...]:
        """Build a vector from a sequence, a ``{label: coeff}`` map, or kwargs."""
        v = [Fraction(0)] * self.dim
        if coords is not None:
            if isinstance(coords, Mapping):
                for k, c in coords.items():
                    v[self.index(k)] += to_q(c)
            else:
                coords = list(coords)
                if len(coords) != self.dim:
                    raise AlgebraMismatchError(f"vector of length {len(coords)} for dimension {self.dim}")
                v = [to_q(c) for c in coords]
        for k, c in named.items():
            v[self.index(k)] += to_q(c)
        return tuple(v)

    def basis_vector(self, key) -> tuple[Fraction, ...]:
        v = [Fraction(0)] * self.dim
        v[self.index(key)] = Fraction(1)
        return tuple(v)

    def zero(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.dim

    def _check(self, x) -> tuple[Fraction, ...]:
        if isinstance(x, GroupElement):
            if x.algebra is not self and not x.algebra.same_structure(self):
                raise AlgebraMismatchError("group element belongs to another algebra")
            return x.coords
        x = tuple(x)
        if len(x) != self.dim:
            raise AlgebraMismatchError(f"vector of length {len(x)} for dimension {self.dim}")
        return x

    # -- operations ---------------------------------------------------
    def bracket(self, x, y) -> tuple[Fraction, ...]:
        x, y = self._check(x), self._check(y)
        out = [Fraction(0)] * self.dim
        nz_y = [(j, b) for j, b in enumerate(y) if b]
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in nz_y:
                for k, c in self._full.get((i, j), ()):
                    out[k] += a * b * c
        return tuple(out)

    def bch(self, x, y) -> tuple[Fraction, ...]:
        """log(exp x exp y), truncated at the step via the Dynkin series."""
        x, y = self._check(x), self._check(y)
        n = self.step
        letters = (x, y)
        # nested[w] = [w0, [w1, [..., w_last]]], built suffix-first
        nested: dict[tuple[int, ...], tuple[Fraction, ...]] = {(0,): x, (1,): y}
        result = list(exact.vec_add(x, y))
        coeffs = dynkin_word_coefficients(n)
        for length in range(2, n + 1):
            for word in itertools.product((0, 1), repeat=length):
                tail = nested.get(word[1:])
                if tail is None:
                    continue
                val = self.bracket(letters[word[0]], tail)
                if exact.is_zero(val):
                    continue
                nested[word] = val
                c = coeffs.get(word)
                if c:
                    for k, v in enumerate(val):
                        if v:
                            result[k] += c * v
        return tuple(result)

    def dilate(self, lam, x):
        lam = to_q(lam)
        if isinstance(x, GroupElement):
            return GroupElement(self, self.dilate(lam, x.coords))
        x = self._check(x)
        return tuple(c * lam ** w if c else c for c, w in zip(x, self.degrees))

    def ad_matrix(self, x) -> "LinearMap":
        x = self._check(x)
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(self.dim)]
        return LinearMap(exact.transpose([list(c) for c in cols]), self.degrees, self.degrees)

    def Ad(self, g) -> "LinearMap":
        """Ad(exp x) = exp(ad_x), a finite sum since ad_x is nilpotent."""
        x = self._check(g)
        ad = self.ad_matrix(x).matrix
        total = exact.identity(self.dim)
        term = exact.identity(self.dim)
        for k in range(1, self.step + 1):
            term = exact.matmul(ad, term)
            if all(exact.is_zero(r) for r in term):
                break
            scale = Fraction(1, math.factorial(k))
            total = [[a + scale * b for a, b in zip(ra, rb)] for ra, rb in zip(total, term)]
        return LinearMap(total, self.degrees, self.degrees)

    def coAd(self, g) -> "LinearMap":
        """Coadjoint action on dual coordinates: transpose of Ad(g^-1)."""
        x = self._check(g)
        return self.Ad(tuple(-c for c in x)).transpose()

    def dnc_rescale(self, t) -> "GradedLieAlgebra":
        """Bracket alpha_t o [.,.]: constants into degree k pick up t**k."""
        t = to_q(t)
        if t < 0:
            raise ValueError("dnc parameter must be non-negative")
        table = {}
        for (i, j), vec in self._table.items():
            new = {k: c * t ** self.degrees[k] for k, c in vec.items()}
            new = {k: c for k, c in new.items() if c}
            if new:
                table[(i, j)] = new
        return GradedLieAlgebra(self.dims, table, self.basis, self.inner_product)

    def group(self, coords) -> "GroupElement":
        return GroupElement(self, self.vector(coords))

    def identity_element(self) -> "GroupElement":
        return GroupElement(self, self.zero())


@dataclass(frozen=True)
class LinearMap:
    matrix: list
    source_degrees: tuple
    target_degrees: tuple

    def __post_init__(self):
        if len(self.matrix) != len(self.target_degrees):
            raise ValueError("rows do not match target dimension")
        if any(len(r) != len(self.source_degrees) for r in self.matrix):
            raise ValueError("columns do not match source dimension")

    def __call__(self, v) -> tuple[Fraction, ...]:
        if isinstance(v, GroupElement):
            v = v.coords
        return exact.matvec(self.matrix, v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(exact.matmul(self.matrix, other.matrix), other.source_degrees, self.target_degrees)

    def transpose(self) -> "LinearMap":
        return LinearMap(exact.transpose(self.matrix), self.target_degrees, self.source_degrees)

    def is_identity(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return [list(r) for r in self.matrix] == [list(r) for r in other.matrix]

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GroupElement:
    algebra: GradedLieAlgebra
    coords: tuple = field()

    def __post_init__(self):
        coords = tuple(to_q(c) for c in self.coords)
        if len(coords) != self.algebra.dim:
            raise AlgebraMismatchError("coordinate length does not match the algebra")
        object.__setattr__(self, "coords", coords)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.algebra is not self.algebra and not other.algebra.same_structure(self.algebra):
            raise AlgebraMismatchError("group elements of different algebras")
        return GroupElement(self.algebra, self.algebra.bch(self.coords, other.coords))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.algebra, tuple(-c for c in self.coords))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coords == other.coords and self.algebra.same_structure(other.algebra)

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "GroupElement(" + ", ".join(fmt_q(c) for c in self.coords) + ")"


@lru_cache(maxsize=None)
def _word_blocks(word: tuple[int, ...]) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All splittings of a 0/1 word into consecutive blocks 0^r 1^s (r+s>0)."""
    if not word:
        return ((),)
    out = []
    n = len(word)
    for end in range(1, n + 1):
        block = word[:end]
        r = 0
        while r < len(block) and block[r] == 0:
            r += 1
        if any(b == 0 for b in block[r:]):
            continue
        s = len(block) - r
        for rest in _word_blocks(word[end:]):
            out.append(((r, s),) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def dynkin_word_coefficients(max_length: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficient of each right-nested bracket word in Dynkin's BCH series.

    Letter 0 is x and 1 is y; word ``w`` stands for ``[w0, [w1, ... w_m]]``.
    """
    coeffs: dict[tuple[int, ...], Fraction] = {}
    for m in range(1, max_length + 1):
        for word in itertools.product((0, 1), repeat=m):
            total = Fraction(0)
            for blocks in _word_blocks(word):
                k = len(blocks)
                denom = k * m
                for r, s in blocks:
                    denom *= math.factorial(r) * math.factorial(s)
                total += Fraction((-1) ** (k - 1), denom)
            if total:
                coeffs[word] = total
    return coeffs


# -- module-level operations -------------------------------------------

def _jacobi_sum(alg: GradedLieAlgebra, i: int, j: int, k: int) -> tuple[Fraction, ...]:
    ei, ej, ek = (alg.basis_vector(t) for t in (i, j, k))
    s1 = alg.bracket(alg.bracket(ei, ej), ek)
    s2 = alg.bracket(alg.bracket(ej, ek), ei)
    s3 = alg.bracket(alg.bracket(ek, ei), ej)
    return tuple(a + b + c for a, b, c in zip(s1, s2, s3))


def validate(alg: GradedLieAlgebra) -> ValidationReport:
    """Check antisymmetry, grading, Jacobi and metric compatibility exactly."""
    out: list[Violation] = []
    for i, j in alg._conflicts:
        out.append(Violation("antisymmetry", (alg.basis[i], alg.basis[j]), "c(i,j) != -c(j,i)"))
    for (i, j), vec in sorted(alg._table.items()):
        target = alg.degrees[i] + alg.degrees[j]
        for k, c in sorted(vec.items()):
            if alg.degrees[k] != target:
                out.append(
                    Violation(
                        "grading",
                        (alg.basis[i], alg.basis[j], alg.basis[k]),
                        f"degree {alg.degrees[k]} component, expected {target}",
                    )
                )
    for i, j, k in itertools.combinations(range(alg.dim), 3):
        s = _jacobi_sum(alg, i, j, k)
        if not exact.is_zero(s):
            out.append(Violation("jacobi", (alg.basis[i], alg.basis[j], alg.basis[k]), "cyclic sum non-zero"))
    ip = alg.inner_product
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            if ip[i][j] != ip[j][i]:
                out.append(Violation("metric", (alg.basis[i], alg.basis[j]), "not symmetric"))
            elif ip[i][j] and alg.degrees[i] != alg.degrees[j]:
                out.append(Violation("metric", (alg.basis[i], alg.basis[j]), "couples different degrees"))
    if not exact.is_positive_definite([list(r) for r in ip]):
        out.append(Violation("metric", (), "not positive definite"))
    return ValidationReport(tuple(out))


def require_valid(alg: GradedLieAlgebra) -> GradedLieAlgebra:
    rep = validate(alg)
    if not rep.ok:
        first = rep.violations[0]
        raise ValueError(f"invalid algebra: {first.kind} at {first.witness}")
    return alg


def _same(x, y):
    ax = x.algebra if isinstance(x, GroupElement) else None
    ay = y.algebra if isinstance(y, GroupElement) else None
    if ax is not None and ay is not None and ax is not ay and not ax.same_structure(ay):
        raise AlgebraMismatchError("operands belong to different algebras")
    return ax or ay


def bracket(alg: GradedLieAlgebra, x, y):
    return alg.bracket(x, y)


def bch_product(x: GroupElement, y: GroupElement) -> GroupElement:
    _same(x, y)
    return x * y


def dilate(lam, x, alg: GradedLieAlgebra | None = None):
    if isinstance(x, GroupElement):
        return x.algebra.dilate(lam, x)
    if alg is None:
        raise ValueError("an algebra is needed to dilate a plain vector")
    return alg.dilate(lam, x)


def ad_matrix(alg: GradedLieAlgebra, x) -> LinearMap:
    return alg.ad_matrix(x)


def Ad(g: GroupElement) -> LinearMap:
    return g.algebra.Ad(g)


def coAd(g: GroupElement) -> LinearMap:
    return g.algebra.coAd(g)


def dnc_rescale(alg: GradedLieAlgebra, t) -> GradedLieAlgebra:
    return alg.dnc_rescale(t)


def random_vector(alg: GradedLieAlgebra, rng, bound: int = 5) -> tuple[Fraction, ...]:
    """Small random rational vector, for tests and sweeps."""
    return tuple(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(alg.dim))


def format_vector(alg: GradedLieAlgebra, v: Iterable[Fraction]) -> dict[str, str]:
    return {alg.basis[i]: fmt_q(c) for i, c in enumerate(v) if c}
