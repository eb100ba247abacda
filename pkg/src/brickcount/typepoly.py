"""Types of flat structures and the polynomials p_n(w).

For fixed n the number of structures p_n(w) is a polynomial in w of degree
n - 1.  Written in the basis C(w-1, k-1) its coefficients a_{n,k} count
structure types: offset sequences reduced to (residue pattern, quotients).
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact import (BinomialRep, Poly, binomial, binomial_from_monomial, interpolate,
                    monomial_from_binomial)
from .flat import FlatStructure, enumerate_flat, offsets

FITTED = "fitted-from-counts"
FITTED_SYMMETRIC = "fitted-with-symmetry"
REFERENCE = "reference-table"


@dataclass(frozen=True)
class TypeSignature:
    residues: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(set(self.residues))


def classify_offsets(b: Sequence[int], w: int) -> TypeSignature:
    res = [x % w for x in b]
    rank = {r: i for i, r in enumerate(sorted(set(res)))}
    return TypeSignature(tuple(rank[r] for r in res), tuple(x // w for x in b))


def classify(s: FlatStructure) -> TypeSignature:
    return classify_offsets(offsets(s), s.w)


def complexity(s: FlatStructure) -> int:
    return len({x % s.w for x in offsets(s)})


def type_coefficients_enumerated(n: int, k_max: int | None = None) -> list[int]:
    """a_{n,k}: structures at width k whose offsets hit all k residues."""
    k_max = n if k_max is None else k_max
    out = []
    for k in range(1, k_max + 1):
        out.append(sum(1 for s in enumerate_flat(k, n) if complexity(s) == k))
    return out


def type_coefficients_from_counts(values: Sequence[int]) -> list[int]:
    """Invert p(w) = sum_k a_k C(w-1, k-1) given p(1), p(2), ..."""
    return [
        sum((-1) ** (k - j) * binomial(k - 1, j - 1) * values[j - 1] for j in range(1, k + 1))
        for k in range(1, len(values) + 1)
    ]


def type_coefficients(n: int, k_max: int | None = None, method: str = "enumerate",
                      counter: Callable[[int, int], int] | None = None) -> list[int]:
    """a_{n,1}..a_{n,k_max} by type enumeration or by inverting counts p_n(1..k_max)."""
    k_max = n if k_max is None else k_max
    if method == "enumerate":
        return type_coefficients_enumerated(n, k_max)
    if method == "counts":
        if counter is None:
            from .transfer import tm_count
            counter = lambda w, m: tm_count(w, m)[m - 1]  # noqa: E731
        return type_coefficients_from_counts([counter(w, n) for w in range(1, k_max + 1)])
    raise ValueError(f"unknown method {method!r}")


@dataclass
class MultiplicityReport:
    n: int
    w: int
    ok: bool
    types_by_k: dict[int, int]
    structures_by_k: dict[int, int]
    offenders: list[tuple[TypeSignature, int]] = field(default_factory=list)


def type_multiplicity_check(n: int, w: int) -> MultiplicityReport:
    """Each type of complexity k must occur exactly C(w-1, k-1) times at width w."""
    groups = Counter(classify(s) for s in enumerate_flat(w, n))
    types_by_k: dict[int, int] = defaultdict(int)
    structs_by_k: dict[int, int] = defaultdict(int)
    offenders = []
    for t, size in groups.items():
        types_by_k[t.k] += 1
        structs_by_k[t.k] += size
        if size != binomial(w - 1, t.k - 1):
            offenders.append((t, size))
    return MultiplicityReport(n, w, not offenders, dict(sorted(types_by_k.items())),
                              dict(sorted(structs_by_k.items())), offenders)


@dataclass(frozen=True)
class PolynomialFamily:
    n: int
    binomial: BinomialRep
    monomial: Poly
    source: str

    @classmethod
    def from_binomial(cls, rep: BinomialRep, source: str) -> "PolynomialFamily":
        return cls(rep.n, rep, monomial_from_binomial(rep), source)

    @classmethod
    def from_monomial(cls, n: int, p: Poly, source: str) -> "PolynomialFamily":
        return cls(n, binomial_from_monomial(p, n), p, source)

    def __call__(self, w: int) -> Fraction:
        return self.monomial(w)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "binomial": [str(v) for v in self.binomial.coeffs],
            "monomial": [[str(c.numerator), str(c.denominator)] for c in self.monomial.coeffs],
            "source": self.source,
        })

    @classmethod
    def from_json(cls, text: str) -> "PolynomialFamily":
        d = json.loads(text)
        fam = cls(int(d["n"]), BinomialRep(int(d["n"]), tuple(int(v) for v in d["binomial"])),
                  Poly(Fraction(int(a), int(b)) for a, b in d["monomial"]), d["source"])
        if monomial_from_binomial(fam.binomial) != fam.monomial:
            raise ValueError("binomial and monomial forms disagree")
        return fam


class FitError(ValueError):
    pass


def fit_polynomial(n: int, values: Iterable[tuple[int, int]],
                   use_symmetry: bool = False) -> PolynomialFamily:
    """Interpolate p_n through (w, p_n(w)) points, optionally mirrored by p(1-w) = (-1)^(n-1) p(w)."""
    pts = {int(w): Fraction(v) for w, v in values}
    if use_symmetry:
        sign = -1 if (n - 1) % 2 else 1
        for w, v in list(pts.items()):
            pts.setdefault(1 - w, sign * v)
    if len(pts) < n:
        raise FitError(f"need {n} distinct points, have {len(pts)}")
    ordered = sorted(pts.items(), key=lambda kv: (abs(kv[0] - 0.5), kv[0]))
    p = interpolate(ordered[:n])
    for w, v in ordered[n:]:
        if p(w) != v:
            raise FitError(f"extra point w={w} disagrees: {p(w)} != {v}")
    if p.degree != n - 1:
        raise FitError(f"degree {p.degree}, expected {n - 1}")
    return PolynomialFamily.from_monomial(n, p, FITTED_SYMMETRIC if use_symmetry else FITTED)


def widths_needed(n: int, use_symmetry: bool) -> list[int]:
    """Widths 1..m whose counts determine p_n, plus one width for a consistency check."""
    m = (n + 1) // 2 if use_symmetry else n
    return list(range(1, m + 2))


def polynomial_from_counts(n: int, counter: Callable[[int, int], int],
                           use_symmetry: bool = False,
                           widths: Sequence[int] | None = None) -> PolynomialFamily:
    """Fit p_n from counter(w, n) = p_n(w) over the given (or minimal) widths."""
    ws = list(widths) if widths is not None else widths_needed(n, use_symmetry)
    return fit_polynomial(n, [(w, counter(w, n)) for w in ws], use_symmetry)


def pyramid_count(n: int, w: int) -> int:
    return binomial(w * n - 1, n - 1)


def pyramid_polynomial(n: int) -> PolynomialFamily:
    """C(wn-1, n-1) = n^(n-1)/(n-1)! * prod_{i<n} (w - i/n)."""
    p = Poly.constant(Fraction(n ** (n - 1), math.factorial(n - 1)))
    for i in range(1, n):
        p = p * Poly([Fraction(-i, n), 1])
    return PolynomialFamily.from_monomial(n, p, "pyramid")


def identity_suite(f: PolynomialFamily) -> dict[str, bool]:
    n, a, b = f.n, f.binomial.coeffs, f.monomial
    half = Fraction(n - 1, 2)
    sign = -1 if (n - 1) % 2 else 1
    mirrored = b.compose(Poly([1, -1]))  # p(1 - w)
    # the alternating sum runs over 0-based k, i.e. it is p_n(0) = (-1)^(n-1)
    checks = {
        "alternating_sum": sum((-1) ** k * c for k, c in enumerate(a)) == (-1) ** (n + 1),
        "second_binomial": n < 2 or a[n - 2] == half * a[n - 1],
        "constant_term": b[0] == sign,
        "value_at_one": sum(b.coeffs) == 1,
        "second_monomial": n < 2 or b[n - 2] == -half * b[n - 1],
        "reflection": mirrored == b * sign,
    }
    return checks


@dataclass
class GFNumerator:
    n: int
    A: Poly
    B: Poly | None
    palindromic: bool
    even_factor_ok: bool
    unimodal: bool
    reciprocity: bool


def _weakly_unimodal(cs: Sequence[Fraction]) -> bool:
    i = 0
    while i + 1 < len(cs) and cs[i] <= cs[i + 1]:
        i += 1
    while i + 1 < len(cs) and cs[i] >= cs[i + 1]:
        i += 1
    return i == len(cs) - 1


def gf_numerator(f: PolynomialFamily) -> GFNumerator:
    """A_n(x) = (1-x)^n * sum_{w>=1} p_n(w) x^(w-1)."""
    n = f.n
    series = Poly([f(w) for w in range(1, 2 * n + 1)])
    prod = Poly([1, -1]) ** n * series
    tail = [prod[i] for i in range(n, 2 * n)]
    if any(tail):
        raise ValueError("numerator does not terminate; wrong generating variable?")
    A = Poly(prod[i] for i in range(n))
    B = None
    even_ok = True
    if n % 2 == 0:
        q, r = A.divmod(Poly([1, 1]))
        even_ok = not r.coeffs and q.degree == n - 2 and q.is_palindromic()
        B = q if not r.coeffs else None
    return GFNumerator(
        n, A, B,
        palindromic=A.is_palindromic() and A.degree == n - 1,
        even_factor_ok=even_ok,
        unimodal=_weakly_unimodal(A.coeffs) and (B is None or _weakly_unimodal(B.coeffs)),
        reciprocity=A.reversed(n - 1) == A,
    )


def leading_coefficient_series(families: Sequence[PolynomialFamily]) -> list[Fraction]:
    """b_{n,n-1} for each family, in order of n."""
    return [f.monomial[f.n - 1] for f in sorted(families, key=lambda f: f.n)]


def reference_families(n_max: int = 14) -> list[PolynomialFamily]:
    from . import fixtures
    return [PolynomialFamily.from_monomial(n, fixtures.monomial(n), REFERENCE)
            for n in range(1, n_max + 1)]
