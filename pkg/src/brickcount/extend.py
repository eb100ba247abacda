"""Series extension with differential approximants.

An approximant of order K is a linear ODE

    sum_{i=0..K} Q_i(x) (x d/dx)^i F(x) = P(x)

whose polynomial coefficients are fitted exactly to the known terms of
F(x) = sum_{n>=1} a_n x^n.  Reading the ODE coefficient by coefficient gives
a recurrence that predicts the next terms.  Many approximants with different
degrees are averaged; their spread is the error estimate.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy

from .exact import SingularMatrixError
from .series import CountSeries

STOP_RATIO = 3e-6


class FitUnavailable(ArithmeticError):
    pass


class EmptyEnsemble(RuntimeError):
    pass


@dataclass(frozen=True)
class DifferentialApproximant:
    K: int
    degrees: tuple[int, ...]          # (deg Q_0, ..., deg Q_K, deg P)
    Q: tuple[tuple[Fraction, ...], ...]
    P: tuple[Fraction, ...]
    fitted: int                        # coefficients f_0..f_{fitted-1} used in the fit
    defect: int                        # known coefficients beyond the fit range

    def residual(self, f: Sequence, m: int) -> Fraction:
        """Coefficient of x^m in the ODE applied to f (needs f_0..f_m)."""
        total = Fraction(0)
        for i, q in enumerate(self.Q):
            for j, c in enumerate(q):
                if c and j <= m:
                    total += c * (m - j) ** i * f[m - j]
        return total - (self.P[m] if m < len(self.P) else 0)


@dataclass(frozen=True)
class EnsembleSpec:
    """Which approximants to fit and how to pool them.

    Cells use between min_fraction and max_fraction of the known
    coefficients.  Accuracy falls steeply as fewer coefficients are used, so
    the floor is high; degree skews and P degrees supply the variety.
    """

    orders: tuple[int, ...] = (1, 2)
    min_fraction: float = 0.92
    max_fraction: float = 1.0
    p_degrees: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    skews: tuple[int, ...] = (-2, -1, 0, 1, 2)
    min_fits: int = 8
    outlier_mads: float = 10.0
    singularity_tolerance: float | None = 0.02
    outlier_all_terms: bool = True


@dataclass
class PredictionEnsemble:
    mean: list[float]
    sigma: list[float]
    count: list[int]
    fits: int
    rejected: int


def _coeffs(s: CountSeries | Sequence) -> list[Fraction]:
    vals = s.exact_values if isinstance(s, CountSeries) else list(s)
    return [Fraction(0)] + [Fraction(v) for v in vals]


def _solve(rows: list[list[int]], rhs: list[int]) -> list[Fraction]:
    """Exact solution of an integer system by fraction-free elimination.

    Rank-deficient but consistent systems are accepted: unknowns without a
    pivot are set to zero.  Inconsistent systems raise SingularMatrixError.
    """
    n = len(rows[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    prev = 1
    pivots = []
    r = 0
    for k in range(n):
        piv = next((i for i in range(r, len(a)) if a[i][k] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        pk = a[r]
        d = pk[k]
        for i in range(r + 1, len(a)):
            ri = a[i]
            e = ri[k]
            for j in range(k + 1, n + 1):
                ri[j] = (ri[j] * d - e * pk[j]) // prev
            ri[k] = 0
        prev = d
        pivots.append(k)
        r += 1
    if any(a[i][n] != 0 for i in range(r, len(a))):
        raise SingularMatrixError("inconsistent system")
    x = [Fraction(0)] * n
    for i in range(r - 1, -1, -1):
        k = pivots[i]
        acc = Fraction(a[i][n])
        for j in range(k + 1, n):
            if a[i][j] and x[j]:
                acc -= a[i][j] * x[j]
        x[k] = acc / a[i][k]
    return x


def fit_approximant(s: CountSeries | Sequence, K: int, degrees: Sequence[int]) -> DifferentialApproximant:
    """Exact fit with Q_K(0) = 1; uses as many leading coefficients as there are unknowns."""
    f = _coeffs(s)
    degs = tuple(int(d) for d in degrees)
    if len(degs) != K + 2 or min(degs) < 0:
        raise ValueError("degrees must be (deg Q_0, ..., deg Q_K, deg P), all >= 0")
    den = 1
    for v in f:
        den = math.lcm(den, v.denominator)
    fi = [int(v * den) for v in f]
    # unknown layout: Q_0 .. Q_K coefficients, then P; Q_K[0] is fixed to 1
    cols = [(i, j) for i in range(K + 1) for j in range(degs[i] + 1)]
    fixed = cols.index((K, 0))
    cols.pop(fixed)
    n_q = len(cols)
    n_unknown = n_q + degs[K + 1] + 1
    if n_unknown > len(f):
        raise FitUnavailable(f"{n_unknown} unknowns but only {len(f)} coefficients")
    rows, rhs = [], []
    for m in range(n_unknown):
        row = []
        for i, j in cols:
            row.append((m - j) ** i * fi[m - j] if j <= m else 0)
        row += [-den if m == l else 0 for l in range(degs[K + 1] + 1)]
        rows.append(row)
        rhs.append(-(m ** K) * fi[m])
    try:
        sol = _solve(rows, rhs)
    except SingularMatrixError as e:
        raise FitUnavailable(str(e)) from None
    Q = [[Fraction(0)] * (degs[i] + 1) for i in range(K + 1)]
    Q[K][0] = Fraction(1)
    for (i, j), v in zip(cols, sol):
        Q[i][j] = v
    P = tuple(sol[n_q:])
    approx = DifferentialApproximant(K, degs, tuple(tuple(q) for q in Q), P,
                                     n_unknown, len(f) - n_unknown)
    return approx


def recurrence_forward(a: DifferentialApproximant, s: CountSeries | Sequence, num_new: int,
                       exact: bool = False) -> list:
    """Continue the series num_new terms past its known ones.

    Returns floats (or Fractions with exact=True).  Stops early, returning
    what it has, if the coefficient of the new term vanishes.
    """
    f = _coeffs(s)
    N = len(f)
    out = []
    for m in range(N, N + num_new):
        pivot = sum(q[0] * m ** i for i, q in enumerate(a.Q))
        if pivot == 0:
            break
        f.append(Fraction(0))
        rest = a.residual(f, m)  # includes P[m] with the new term still zero
        f[m] = -rest / pivot
        out.append(f[m] if exact else float(f[m]))
    return out


def ensemble_grid(num_terms: int, spec: EnsembleSpec = EnsembleSpec()) -> list[tuple[int, tuple[int, ...]]]:
    """(K, degrees) cells whose unknown count lies in the configured fraction band."""
    lo = int(spec.min_fraction * num_terms + 0.999999)
    hi = int(spec.max_fraction * num_terms)
    cells = []
    for K in spec.orders:
        for L in spec.p_degrees:
            for skew in spec.skews:
                for N in range(0, num_terms + 1):
                    degs = [N] * K + [N + skew]
                    if min(degs) < 0:
                        continue
                    unknowns = sum(d + 1 for d in degs) - 1 + L + 1
                    if lo <= unknowns <= hi:
                        cells.append((K, tuple(degs) + (L,)))
    return cells


def nearest_singularity(a: DifferentialApproximant) -> complex | None:
    """Zero of Q_K closest to the origin, or None when Q_K is constant."""
    q = [float(c) for c in a.Q[-1]]
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    if len(q) < 2:
        return None
    roots = numpy.roots(q[::-1])
    return complex(min(roots, key=abs))


def _consistent(sings: list[complex | None], tol: float) -> list[bool]:
    """Flag approximants whose nearest singularity is real, positive and near the consensus."""
    real = [z.real for z in sings if z is not None and z.real > 0 and abs(z.imag) <= tol * abs(z)]
    if not real:
        return [True] * len(sings)
    xc = statistics.median(real)
    return [z is not None and abs(z - xc) <= tol * xc for z in sings]


def predict_ensemble(s: CountSeries | Sequence, num_new: int,
                     spec: EnsembleSpec = EnsembleSpec()) -> PredictionEnsemble:
    f = _coeffs(s)
    rows: list[list[float]] = []
    sings: list[complex | None] = []
    for K, degs in ensemble_grid(len(f), spec):
        try:
            approx = fit_approximant(s, K, degs)
        except FitUnavailable:
            continue
        pred = recurrence_forward(approx, s, num_new)
        if len(pred) == num_new and all(abs(p) < float("inf") for p in pred):
            rows.append(pred)
            sings.append(nearest_singularity(approx))
    fitted = len(rows)
    if spec.singularity_tolerance is not None and len(rows) >= spec.min_fits:
        ok = _consistent(sings, spec.singularity_tolerance)
        if sum(ok) >= spec.min_fits:
            rows = [r for r, good in zip(rows, ok) if good]
    if len(rows) < spec.min_fits:
        raise EmptyEnsemble(f"only {len(rows)} usable approximants (need {spec.min_fits})")
    keep = rows
    for k in range(num_new if spec.outlier_all_terms else 1):
        col = [r[k] for r in rows]
        med = statistics.median(col)
        mad = statistics.median(abs(x - med) for x in col)
        keep = [r for r in keep if abs(r[k] - med) <= spec.outlier_mads * mad]
    if not keep:
        raise EmptyEnsemble("every approximant rejected as an outlier")
    mean, sigma = [], []
    for k in range(num_new):
        col = sorted(r[k] for r in keep)
        mu = sum(col) / len(col)
        mean.append(mu)
        sigma.append(statistics.pstdev(col, mu) if len(col) > 1 else 0.0)
    return PredictionEnsemble(mean, sigma, [len(keep)] * num_new, fitted, fitted - len(keep))


def extend_series(s: CountSeries, num_new: int, spec: EnsembleSpec = EnsembleSpec(),
                  stop_ratio: float | None = STOP_RATIO) -> tuple[CountSeries, PredictionEnsemble]:
    """Append up to num_new predicted terms with 3-sigma error bars.

    Appending stops at the first term whose sigma exceeds stop_ratio times
    the prediction; pass stop_ratio=None to keep all num_new terms.
    """
    if s.num_exact != len(s):
        raise ValueError("series already carries predicted terms")
    if len(s) < 12:
        raise ValueError("need at least 12 exact terms")
    ens = predict_ensemble(s, num_new, spec)
    keep = num_new
    if stop_ratio is not None:
        for k, (m, sd) in enumerate(zip(ens.mean, ens.sigma)):
            if sd > stop_ratio * abs(m):
                keep = k
                break
    return s.extended([(m, 3 * sd) for m, sd in zip(ens.mean[:keep], ens.sigma[:keep])]), ens


def holdout(s: CountSeries, m: int, spec: EnsembleSpec = EnsembleSpec()) -> list[tuple[int, float, float, bool]]:
    """Drop the last m exact terms, predict them, and report (n, rel. error, sigma ratio, within 3 sigma)."""
    exact = s.exact_values
    base = CountSeries.from_exact(s.family, exact[:-m], s.w)
    ens = predict_ensemble(base, m, spec)
    out = []
    for k in range(m):
        n = len(exact) - m + k + 1
        true = exact[n - 1]
        err = abs(ens.mean[k] - true)
        out.append((n, err / abs(true), ens.sigma[k] / abs(true), err <= 3 * ens.sigma[k]))
    return out


def rational_series(num: Iterable[int], den: Iterable[int], count: int) -> list[Fraction]:
    """Taylor coefficients x^1..x^count of num(x)/den(x), for testing."""
    num, den = list(num), list(den)
    c = []
    for k in range(count + 1):
        v = Fraction(num[k] if k < len(num) else 0)
        for j in range(1, min(k, len(den) - 1) + 1):
            v -= den[j] * c[k - j]
        c.append(v / den[0])
    return c[1:]
