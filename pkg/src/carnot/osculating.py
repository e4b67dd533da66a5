"""Polynomial vector fields, bracket-compatible filtrations and the
osculating graded algebra at a point."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import exact
from .exact import to_q
from .lie import GradedLieAlgebra, validate

Poly = dict  # {exponent tuple: Fraction}


class FiltrationError(ValueError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


# -- polynomials -------------------------------------------------------------

def poly_add(p: Poly, q: Poly, scale=1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly_diff(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        if m[i]:
            n = list(m)
            n[i] -= 1
            out[tuple(n)] = c * m[i]
    return out


def poly_eval(p: Poly, x: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = c
        for xi, e in zip(x, m):
            if e:
                term *= xi ** e
        total += term
    return total


def monomial(d: int, exps=None, coeff=1) -> Poly:
    exps = tuple(exps) if exps is not None else (0,) * d
    c = to_q(coeff)
    return {exps: c} if c else {}


class PolyVectorField:
    """sum_k P_k(x) d/dx_k with rational polynomial coefficients."""

    __slots__ = ("dim", "components")

    def __init__(self, dim: int, components: Sequence[Mapping]):
        self.dim = int(dim)
        if len(components) != self.dim:
            raise ValueError(f"{len(components)} components for dimension {self.dim}")
        comps = []
        for p in components:
            q = {}
            for m, c in dict(p).items():
                m = tuple(int(e) for e in m)
                if len(m) != self.dim:
                    raise ValueError("monomial has the wrong length")
                c = to_q(c)
                if c:
                    q[m] = q.get(m, 0) + c
            comps.append({m: c for m, c in q.items() if c})
        self.components = tuple(comps)

    @classmethod
    def coordinate(cls, dim: int, i: int, coeff: Poly | None = None):
        comps = [{} for _ in range(dim)]
        comps[i] = coeff if coeff is not None else monomial(dim)
        return cls(dim, comps)

    def __add__(self, other):
        _same_dim(self, other)
        return PolyVectorField(self.dim, [poly_add(p, q) for p, q in zip(self.components, other.components)])

    def __sub__(self, other):
        _same_dim(self, other)
        return PolyVectorField(self.dim, [poly_add(p, q, -1) for p, q in zip(self.components, other.components)])

    def scale(self, f: Poly):
        """Multiply by a polynomial function."""
        return PolyVectorField(self.dim, [poly_mul(f, p) for p in self.components])

    def apply(self, f: Poly) -> Poly:
        out: Poly = {}
        for i, p in enumerate(self.components):
            if p:
                out = poly_add(out, poly_mul(p, poly_diff(f, i)))
        return out

    def at(self, x: Sequence) -> tuple[Fraction, ...]:
        x = [to_q(v) for v in x]
        return tuple(poly_eval(p, x) for p in self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and self.dim == other.dim and self.components == other.components

    __hash__ = None

    def __repr__(self):
        return f"PolyVectorField(dim={self.dim}, components={list(self.components)})"


def _same_dim(X, Y):
    if X.dim != Y.dim:
        raise ValueError(f"vector fields on R^{X.dim} and R^{Y.dim}")


def vf_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    _same_dim(X, Y)
    comps = [poly_add(X.apply(Y.components[k]), Y.apply(X.components[k]), -1) for k in range(X.dim)]
    return PolyVectorField(X.dim, comps)


# -- filtrations ---------------------------------------------------------------

@dataclass
class FiltrationSpec:
    """Frames with weights; ``ranks[i-1]`` is the declared rank of H^i."""

    dim: int
    frames: list
    weights: list
    ranks: list | None = None

    def __post_init__(self):
        if len(self.frames) != len(self.weights):
            raise ValueError("one weight per frame")
        if any(f.dim != self.dim for f in self.frames):
            raise ValueError("frame dimension differs from the chart dimension")
        if any(w < 1 for w in self.weights):
            raise ValueError("weights are positive integers")
        self.weights = [int(w) for w in self.weights]
        if self.ranks is not None:
            self.ranks = [int(r) for r in self.ranks]
            if len(self.ranks) < self.depth:
                raise ValueError("a rank is needed for every weight")

    @property
    def depth(self) -> int:
        return max(self.weights, default=0)

    def frames_upto(self, w: int) -> list[int]:
        return [i for i, wi in enumerate(self.weights) if wi <= w]

    def declared_ranks(self, x) -> list[int]:
        if self.ranks is not None:
            return list(self.ranks)
        return [self._rank_at(x, w) for w in range(1, self.depth + 1)]

    def _rank_at(self, x, w):
        vals = [self.frames[i].at(x) for i in self.frames_upto(w)]
        return exact.rank([list(v) for v in vals]) if vals else 0


@dataclass
class FiltrationViolation:
    point: tuple
    frames: tuple  # indices (a, b)
    weight: int
    bracket_value: tuple

    def to_dict(self):
        return {
            "point": [exact.fmt_q(c) for c in self.point],
            "frames": list(self.frames),
            "weight": self.weight,
            "bracket_value": [exact.fmt_q(c) for c in self.bracket_value],
        }


@dataclass
class FiltrationReport:
    points: list
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "ok": self.ok,
            "points": [[exact.fmt_q(c) for c in p] for p in self.points],
            "violations": [v.to_dict() for v in self.violations],
        }


def _in_span(vecs: list, v) -> bool:
    if exact.is_zero(v):
        return True
    if not vecs:
        return False
    return exact.solve(exact.transpose([list(u) for u in vecs]), list(v)) is not None


def _check_ranks(spec: FiltrationSpec, x) -> None:
    if spec.ranks is None:
        top = spec._rank_at(x, spec.depth)
        if top != spec.dim:
            raise FiltrationError(f"frames span rank {top} < {spec.dim} at the point", x)
        return
    for w in range(1, spec.depth + 1):
        r = spec._rank_at(x, w)
        if r != spec.ranks[w - 1]:
            raise FiltrationError(f"H^{w} has rank {r} at the point, declared {spec.ranks[w - 1]}", x)


def _check_spanning(spec: FiltrationSpec, x) -> None:
    top = spec._rank_at(x, spec.depth)
    if top != spec.dim:
        raise FiltrationError(f"top filtration level has rank {top}, the chart has dimension {spec.dim}", x)


def check_filtration(spec: FiltrationSpec, points: Sequence[Sequence]) -> FiltrationReport:
    """[H^i, H^j] in H^{i+j} pointwise, by exact membership solves."""
    pts = [tuple(to_q(c) for c in p) for p in points]
    brackets = {}
    violations = []
    r = spec.depth
    for x in pts:
        if len(x) != spec.dim:
            raise ValueError("point has the wrong dimension")
        _check_ranks(spec, x)
        values = [f.at(x) for f in spec.frames]
        for a in range(len(spec.frames)):
            for b in range(a + 1, len(spec.frames)):
                key = (a, b)
                if key not in brackets:
                    brackets[key] = vf_bracket(spec.frames[a], spec.frames[b])
                v = brackets[key].at(x)
                w = spec.weights[a] + spec.weights[b]
                span = [values[i] for i in spec.frames_upto(min(w, r))]
                if not _in_span(span, v):
                    violations.append(FiltrationViolation(x, key, w, v))
    return FiltrationReport(pts, violations)


@dataclass
class OsculatingAlgebra:
    algebra: GradedLieAlgebra
    point: tuple
    complement: list  # frame indices spanning each H^i / H^{i-1}, degree-major

    def to_dict(self):
        return {"point": [exact.fmt_q(c) for c in self.point], "complement": list(self.complement)}


def osculating_algebra(spec: FiltrationSpec, x: Sequence, labels=None) -> OsculatingAlgebra:
    """g_x = sum_i H^i_x / H^{i-1}_x with the induced bracket.

    The complement in each degree is picked greedily in frame order
    (pivoted exact elimination).  Brackets of chosen frames are evaluated
    at x and reduced modulo H^{i+j-1}_x.
    """
    x = tuple(to_q(c) for c in x)
    rep = check_filtration(spec, [x])
    _check_spanning(spec, x)
    if not rep.ok:
        raise FiltrationError("filtration condition fails at the point", x)
    values = [f.at(x) for f in spec.frames]
    chosen: list[int] = []
    dims = []
    lower: list = []
    for w in range(1, spec.depth + 1):
        count = 0
        for i in spec.frames_upto(w):
            if spec.weights[i] != w:
                continue
            cand = lower + [values[i]]
            if exact.rank([list(v) for v in cand]) > len(lower):
                lower = cand
                chosen.append(i)
                count += 1
        dims.append(count)
    n = len(chosen)
    degree_of = [spec.weights[i] for i in chosen]
    basis_vals = [values[i] for i in chosen]
    mat = exact.transpose([list(v) for v in basis_vals])  # columns = chosen values
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            w = degree_of[a] + degree_of[b]
            if w > spec.depth:
                continue
            v = vf_bracket(spec.frames[chosen[a]], spec.frames[chosen[b]]).at(x)
            sol = exact.solve(mat, list(v))
            if sol is None:  # pragma: no cover - guarded by check_filtration
                raise FiltrationError("bracket value outside the frame span", x)
            vec = {k: c for k, c in enumerate(sol) if c and degree_of[k] == w}
            if vec:
                table[(a, b)] = vec
    while dims and dims[-1] == 0:
        dims.pop()
    basis = labels or [f"e{k + 1}" for k in range(n)]
    alg = GradedLieAlgebra(dims, table, basis)
    report = validate(alg)
    if not report.ok:
        raise FiltrationError(f"osculating bracket fails {report.violations[0].kind}", x)
    return OsculatingAlgebra(alg, x, chosen)


@dataclass
class FilteredSymbol:
    order: int
    monomial: dict  # exponents over the osculating basis, summed over terms
    terms: list


def filtration_order(spec: FiltrationSpec, words: Sequence, x=None):
    """Filtration order and principal symbol of a combination of frame words.

    ``words`` holds ``(coefficient, [frame indices])`` pairs (a bare list
    of frame indices means coefficient 1).  Returns the order, computed as
    the largest sum of weights that survives, and the symbol as an
    :class:`~carnot.enveloping.EnvelopingOperator` on the osculating
    algebra at ``x`` (default: the origin).  Top-order terms that cancel
    in U(g_x) drop the order.
    """
    from .enveloping import EnvelopingOperator

    x = tuple(0 for _ in range(spec.dim)) if x is None else x
    osc = osculating_algebra(spec, x)
    pos = {f: k for k, f in enumerate(osc.complement)}
    items = []
    for w in words:
        if isinstance(w, tuple) and len(w) == 2 and not isinstance(w[1], int):
            coeff, word = w
        else:
            coeff, word = 1, w
        items.append((to_q(coeff), list(word)))
    for _, word in items:
        for f in word:
            if f not in pos:
                raise ValueError(f"frame {f} is not part of the chosen graded basis")
    top = max((sum(spec.weights[f] for f in word) for _, word in items), default=0)
    # descend through orders until something survives
    for order in range(top, -1, -1):
        chosen = [(c, word) for c, word in items if sum(spec.weights[f] for f in word) == order]
        if not chosen:
            continue
        sym = EnvelopingOperator.from_words(osc.algebra, [([pos[f] for f in word], c) for c, word in chosen])
        # lower-order terms of the rewritten symbol belong to order - 1
        sym_top = EnvelopingOperator(
            osc.algebra, 1, 1,
            {m: c for m, c in sym.terms.items() if sum(e * osc.algebra.degrees[i] for i, e in enumerate(m)) == order},
        )
        if sym_top.terms:
            return order, sym_top
        if order == top and items:
            # commutator case: the order-top part cancels; its rewrite is the symbol one level down
            lower = EnvelopingOperator(osc.algebra, 1, 1, sym.terms)
            if lower.terms:
                return lower.order, lower
    return 0, EnvelopingOperator.zero(osc.algebra)


# -- standard frames -------------------------------------------------------------

def heisenberg_frames() -> FiltrationSpec:
    """X = d/dx, Y = d/dy + x d/dz on R^3, H^1 = span(X, Y)."""
    d = 3
    X = PolyVectorField.coordinate(d, 0)
    Y = PolyVectorField(d, [{}, monomial(d), monomial(d, (1, 0, 0))])
    T = vf_bracket(X, Y)
    return FiltrationSpec(d, [X, Y, T], [1, 1, 2], [2, 3])


def engel_frames() -> FiltrationSpec:
    """X = d/dx, Y = d/dy + x d/dz + x^2/2 d/dw, then [X,Y] and [X,[X,Y]]."""
    d = 4
    X = PolyVectorField.coordinate(d, 0)
    Y = PolyVectorField(d, [{}, monomial(d), monomial(d, (1, 0, 0, 0)), monomial(d, (2, 0, 0, 0), Fraction(1, 2))])
    XY = vf_bracket(X, Y)
    XXY = vf_bracket(X, XY)
    return FiltrationSpec(d, [X, Y, XY, XXY], [1, 1, 2, 3], [2, 3, 4])


# -- left-invariant fields (test oracle for the enveloping algebra) ----------------

def left_invariant_fields(alg: GradedLieAlgebra) -> list[PolyVectorField]:
    """X^L f(x) = d/ds f(x * exp(sX)) in exponential coordinates.

    Uses d/ds log(e^x e^{sX}) = sum_k b_k ad_x^k X with b the Taylor
    coefficients of z / (1 - e^{-z}).  X -> X^L is a Lie algebra
    homomorphism, so words act by composition.
    """
    n = alg.dim
    b = _bernoulli_plus(alg.step)
    fields = []
    for j in range(n):
        # components as polynomials in x; start with the constant field e_j
        cur = [{(0,) * n: Fraction(1)} if k == j else {} for k in range(n)]
        total = [dict(p) for p in cur]
        for k in range(1, alg.step):
            cur = _ad_x_poly(alg, cur)
            if b[k]:
                total = [poly_add(t, c, b[k]) for t, c in zip(total, cur)]
        fields.append(PolyVectorField(n, total))
    return fields


def _ad_x_poly(alg, vec_poly):
    """Apply ad_x, x the coordinate vector, to a polynomial-valued vector."""
    n = alg.dim
    out = [{} for _ in range(n)]
    for i in range(n):
        xi = {tuple(int(t == i) for t in range(n)): Fraction(1)}
        for j, pj in enumerate(vec_poly):
            if not pj:
                continue
            for k, c in alg.bracket_basis(i, j):
                out[k] = poly_add(out[k], poly_mul(xi, pj), c)
    return out


def _bernoulli_plus(m: int) -> list[Fraction]:
    """Taylor coefficients of z / (1 - e^{-z}) up to z^m."""
    # (1 - e^{-z}) / z = sum (-1)^k z^k / (k+1)!
    from math import factorial

    a = [Fraction((-1) ** k, factorial(k + 1)) for k in range(m + 1)]
    b = [Fraction(0)] * (m + 1)
    b[0] = Fraction(1)
    for k in range(1, m + 1):
        b[k] = -sum(a[i] * b[k - i] for i in range(1, k + 1))
    return b
