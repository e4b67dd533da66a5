"""Exact rational and Gaussian-rational arithmetic helpers.

Everything here works on :class:`fractions.Fraction` and plain nested lists,
which keeps structure-constant computations bit-exact.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Q = Fraction
Vector = tuple  # tuple[Fraction, ...]
Matrix = list  # list[list[Fraction]]


def to_q(value) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings, decimal strings and floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # decimal reading, so 0.1 means 1/10
        return Fraction(repr(value))
    if isinstance(value, GaussQ):
        if value.im != 0:
            raise ValueError(f"{value} is not real")
        return value.re
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt_q(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        orow = out[i]
        for k in range(inner):
            aik = row[k]
            if aik:
                brow = b[k]
                for j in range(cols):
                    if brow[j]:
                        orow[j] += aik * brow[j]
    return out


def matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a)


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(map(Fraction, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix, cols: int | None = None) -> list[Vector]:
    """Basis of {x : a x = 0}."""
    if cols is None:
        cols = len(a[0]) if a else 0
    if not a:
        return [tuple(Fraction(int(i == j)) for i in range(cols)) for j in range(cols)]
    r, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(r, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(a: Matrix, b: Sequence[Fraction]) -> Vector | None:
    """One solution of ``a x = b`` (free variables set to zero), or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(row) + [Fraction(b[i])] for i, row in enumerate(a)]
    r, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for row, p in zip(r, pivots):
        x[p] = row[cols]
    return tuple(x)


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def is_positive_definite(a: Matrix) -> bool:
    """Exact test via Gaussian elimination without pivoting (Sylvester)."""
    n = len(a)
    m = [list(map(Fraction, row)) for row in a]
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return True


def vec_add(x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vec_scale(c: Fraction, x: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in x)


def is_zero(x: Iterable) -> bool:
    return all(a == 0 for a in x)


class GaussQ:
    """Gaussian rational ``re + i*im`` with Fraction parts.

    Mixing with Python floats or complex numbers falls back to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_q(re)
        self.im = to_q(im)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, GaussQ):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(value[0], value[1])
        return cls(value, 0)

    def _other(self, other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussQ(other, 0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) + other
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) - other
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return other - complex(self)
        return GaussQ(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) * other
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        return GaussQ((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussQ({fmt_q(self.re)})"
        return f"GaussQ({fmt_q(self.re)}, {fmt_q(self.im)})"

    def to_json(self) -> list[str]:
        return [fmt_q(self.re), fmt_q(self.im)]


I = GaussQ(0, 1)


def to_scalar(value):
    """Exact GaussQ when possible, else Python complex."""
    if isinstance(value, GaussQ):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussQ(value)
    if isinstance(value, str):
        return GaussQ(to_q(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, (float,)) or isinstance(im, (float,)):
            return GaussQ(to_q(re), to_q(im))
        return GaussQ(re, im)
    if isinstance(value, float):
        return GaussQ(to_q(value))
    if isinstance(value, complex):
        return GaussQ(to_q(value.real), to_q(value.imag))
    try:
        import numpy as np

        if isinstance(value, np.generic):
            return to_scalar(value.item())
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot interpret {value!r} as a scalar")
