"""Exact integer and rational helpers: binomials, Stirling numbers,
polynomials over Q and the binomial basis C(w-1, k-1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class SingularMatrixError(ArithmeticError):
    pass


class NonIntegralError(ValueError):
    pass


def binomial(m: int, k: int) -> int:
    if k < 0 or k > m:
        return 0
    return math.comb(m, k)


@lru_cache(maxsize=None)
def stirling_first(k: int, i: int) -> int:
    """Signed Stirling number of the first kind s(k, i).

    Convention: x(x-1)...(x-k+1) = sum_i s(k, i) x^i, so s(3, 1) = 2.
    """
    if not 0 <= i <= k:
        raise ValueError(f"stirling_first index out of range: ({k}, {i})")
    if k == 0:
        return 1
    if i == 0:
        return 0
    lower = stirling_first(k - 1, i) if i <= k - 1 else 0
    return stirling_first(k - 1, i - 1) - (k - 1) * lower


@lru_cache(maxsize=None)
def stirling_second(k: int, i: int) -> int:
    if not 0 <= i <= k:
        raise ValueError(f"stirling_second index out of range: ({k}, {i})")
    if k == i:
        return 1
    if i == 0:
        return 0
    lower = stirling_second(k - 1, i) if i <= k - 1 else 0
    return stirling_second(k - 1, i - 1) + i * lower


class Poly:
    """Polynomial with Fraction coefficients; coeffs[i] multiplies x**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, v) -> "Poly":
        return cls([v])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, Poly) else Poly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-other if isinstance(other, Poly) else Poly.constant(-Fraction(other)))

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        out = Poly.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = other.coeffs[-1]
        for i in range(len(rem) - 1, other.degree - 1, -1):
            f = rem[i] / lead
            q[i - other.degree] = f
            if f:
                for j, c in enumerate(other.coeffs):
                    rem[i - other.degree + j] -= f * c
        return Poly(q), Poly(rem)

    def compose(self, inner: "Poly") -> "Poly":
        return self(inner)

    def reversed(self, degree: int | None = None) -> "Poly":
        """x**degree * p(1/x)."""
        d = self.degree if degree is None else degree
        return Poly(self[d - i] for i in range(d + 1))

    def is_palindromic(self) -> bool:
        return self.coeffs == tuple(reversed(self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return format_poly(self, "w")


def format_poly(p: Poly, var: str = "w") -> str:
    if not p.coeffs:
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mag = "" if a == 1 and i else str(a)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        parts.append((sign, (mag + " " + mono).strip() if mag and mono else mag or mono))
    head_sign, head = parts[0]
    s = ("-" if head_sign == "-" else "") + head
    for sign, term in parts[1:]:
        s += f" {sign} {term}"
    return s


def falling_binomial_poly(k: int, shift: int = 1) -> Poly:
    """C(w - shift, k) as a polynomial in w."""
    p = Poly.constant(1)
    for j in range(k):
        p = p * Poly([-(shift + j), 1])
    return p * Fraction(1, math.factorial(k))


@dataclass(frozen=True)
class BinomialRep:
    """p(w) = sum_k coeffs[k-1] * C(w-1, k-1)."""

    n: int
    coeffs: tuple[int, ...]

    def __call__(self, w: int) -> int:
        return sum(a * binomial(w - 1, k) for k, a in enumerate(self.coeffs))


def monomial_from_binomial(rep: BinomialRep | Sequence[int]) -> Poly:
    coeffs = rep.coeffs if isinstance(rep, BinomialRep) else tuple(rep)
    # C(u, m) = (1/m!) sum_j s(m, j) u^j with u = w - 1
    in_u = [Fraction(0)] * max(len(coeffs), 1)
    for m, a in enumerate(coeffs):
        if a:
            scale = Fraction(a, math.factorial(m))
            for j in range(m + 1):
                in_u[j] += scale * stirling_first(m, j)
    return Poly(in_u).compose(Poly([-1, 1]))


def binomial_from_monomial(p: Poly, n: int | None = None) -> BinomialRep:
    # p(w) = sum_j c_j u^j with u = w - 1, and u^j = sum_m S(j, m) m! C(u, m)
    in_u = p.compose(Poly([1, 1]))
    deg = max(in_u.degree, 0)
    out = []
    for m in range(deg + 1):
        v = sum((in_u[j] * stirling_second(j, m) for j in range(m, deg + 1)), Fraction(0))
        v *= math.factorial(m)
        if v.denominator != 1:
            raise NonIntegralError(f"coefficient {m + 1} is {v}, not an integer")
        out.append(int(v))
    return BinomialRep(n if n is not None else deg + 1, tuple(out))


def solve_exact_linear(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Gaussian elimination over Q with partial pivoting on nonzero entries."""
    size = len(matrix)
    if any(len(row) != size for row in matrix) or len(rhs) != size:
        raise ValueError("system must be square")
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"singular at column {col}")
        a[col], a[piv] = a[piv], a[col]
        prow = a[col]
        inv = 1 / prow[col]
        for r in range(col + 1, size):
            f = a[r][col]
            if f:
                f *= inv
                row = a[r]
                for c in range(col, size + 1):
                    row[c] -= f * prow[c]
    x = [Fraction(0)] * size
    for r in range(size - 1, -1, -1):
        s = a[r][size] - sum(a[r][c] * x[c] for c in range(r + 1, size))
        x[r] = s / a[r][r]
    return x


def interpolate(points: Sequence[tuple[int, int | Fraction]]) -> Poly:
    """Unique polynomial of degree < len(points) through the points."""
    xs = [Fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    matrix = [[x ** i for i in range(len(xs))] for x in xs]
    return Poly(solve_exact_linear(matrix, [y for _, y in points]))
