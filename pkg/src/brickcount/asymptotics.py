"""Ratio-method analysis of count series.

Assumes a_n ~ A mu^n n^g.  Ratios r_n = a_n / a_{n-1} are formed exactly and
rounded to 40 significant digits; every estimator works in that precision
and reports Python floats.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import mpmath as mp

from .series import CountSeries

DPS = 40


@dataclass
class EstimatorTrace:
    name: str
    points: list[tuple[int, float, float, str]]  # (n, value, abscissa, provenance)

    @property
    def values(self) -> list[float]:
        return [p[1] for p in self.points]

    @property
    def last(self) -> float:
        return self.points[-1][1]

    def exact_only(self) -> "EstimatorTrace":
        return EstimatorTrace(self.name, [p for p in self.points if p[3] == "exact"])


@dataclass
class AsymptoticFit:
    n: int
    mu: float
    g: float
    c: tuple[float, ...]
    provenance: str = "exact"
    uncertainty: dict[str, float] = field(default_factory=dict)

    @property
    def c1(self) -> float | None:
        return self.c[0] if self.c else None


def _mpf(v) -> mp.mpf:
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def _ratios(s: CountSeries) -> dict[int, tuple[mp.mpf, str]]:
    """n -> (r_n, provenance) for n >= 2."""
    out = {}
    terms = s.terms
    with mp.workdps(DPS):
        for n in range(2, len(terms) + 1):
            a, b = terms[n - 1], terms[n - 2]
            if b.value == 0:
                raise ZeroDivisionError(f"a_{n - 1} is zero")
            if a.exact and b.exact:
                q = Fraction(a.value) / Fraction(b.value)
                r = mp.mpf(q.numerator) / q.denominator
                prov = "exact"
            else:
                r = _mpf(a.value) / _mpf(b.value)
                prov = "predicted"
            out[n] = (r, prov)
    return out


def _worst(*provs: str) -> str:
    return "exact" if all(p == "exact" for p in provs) else "predicted"


def ratios(s: CountSeries) -> EstimatorTrace:
    if len(s) < 2:
        raise ValueError("need at least 2 terms")
    return EstimatorTrace("ratio", [(n, float(r), 1 / n, p) for n, (r, p) in _ratios(s).items()])


def linear_intercepts(s: CountSeries) -> EstimatorTrace:
    """l_n = n r_n - (n-1) r_{n-1}."""
    if len(s) < 3:
        raise ValueError("need at least 3 terms")
    r = _ratios(s)
    pts = []
    with mp.workdps(DPS):
        for n in range(3, len(s) + 1):
            v = n * r[n][0] - (n - 1) * r[n - 1][0]
            pts.append((n, float(v), 1 / n ** 2, _worst(r[n][1], r[n - 1][1])))
    return EstimatorTrace("linear-intercept", pts)


def exponent_estimates(s: CountSeries, mu: float) -> EstimatorTrace:
    """g_n = n (r_n / mu - 1)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    pts = []
    with mp.workdps(DPS):
        m = mp.mpf(mu)
        for n, (r, p) in _ratios(s).items():
            pts.append((n, float(n * (r / m - 1)), 1 / n, p))
    return EstimatorTrace("exponent", pts)


def refined_mu(s: CountSeries, order: int = 1) -> EstimatorTrace:
    """Growth-constant estimators that assume g = -1.

    order 1: n r_n / (n-1), error O(1/n^2).
    order 2: n^3 r_n / ((n-1)(2n-1)) - (n-1)^3 r_{n-1} / ((n-2)(2n-1)), error O(1/n^3).
    """
    r = _ratios(s)
    pts = []
    with mp.workdps(DPS):
        if order == 1:
            for n, (v, p) in r.items():
                pts.append((n, float(n * v / (n - 1)), 1 / n ** 2, p))
        elif order == 2:
            for n in range(3, len(s) + 1):
                v = (mp.mpf(n) ** 3 * r[n][0] / ((n - 1) * (2 * n - 1))
                     - mp.mpf(n - 1) ** 3 * r[n - 1][0] / ((n - 2) * (2 * n - 1)))
                pts.append((n, float(v), 1 / n ** 3, _worst(r[n][1], r[n - 1][1])))
        else:
            raise ValueError("order must be 1 or 2")
    return EstimatorTrace(f"refined-mu-{order}", pts)


def fit_ratio_expansion(s: CountSeries, num_correction_terms: int = 2,
                        g: float = -1.0) -> list[AsymptoticFit]:
    """Sliding-window fits of r_n = mu (1 + g/n + c_1/n^2 + ... + c_k/n^(k+1)).

    The model is linear in (mu, mu c_1, ..., mu c_k).  Each window of k+1
    consecutive ratios gives one fit; the last window is the headline.
    Windows whose system is singular are skipped.
    """
    k = num_correction_terms
    if k < 0:
        raise ValueError("num_correction_terms must be >= 0")
    r = _ratios(s)
    ns = sorted(r)
    fits = []
    with mp.workdps(DPS):
        gg = mp.mpf(g)
        for end in range(k, len(ns)):
            window = ns[end - k:end + 1]
            M = mp.matrix([[1 + gg / n] + [mp.mpf(1) / mp.mpf(n) ** (j + 2) for j in range(k)]
                           for n in window])
            v = mp.matrix([r[n][0] for n in window])
            try:
                sol = mp.lu_solve(M, v)
            except ZeroDivisionError:
                continue
            mu = sol[0]
            if mu == 0:
                continue
            cs = tuple(float(sol[j + 1] / mu) for j in range(k))
            fits.append(AsymptoticFit(window[-1], float(mu), float(g), cs,
                                      _worst(*(r[n][1] for n in window))))
    return fits


def spread(values: Sequence[float], last: int = 3) -> float:
    """Max deviation of the last `last` values from the final one."""
    tail = list(values)[-last:]
    return max(abs(v - tail[-1]) for v in tail)


def terminal_fit(fits: Sequence[AsymptoticFit]) -> AsymptoticFit:
    """Last window, with the spread of the last three windows as uncertainty."""
    if not fits:
        raise ValueError("no fits available")
    f = fits[-1]
    unc = {"mu": spread([x.mu for x in fits])}
    for j in range(len(f.c)):
        unc[f"c{j + 1}"] = spread([x.c[j] for x in fits])
    return AsymptoticFit(f.n, f.mu, f.g, f.c, f.provenance, unc)


def c1_estimates(s: CountSeries, mu: float) -> EstimatorTrace:
    """c_1 ~ (r_n / mu - 1 + 1/n) n^2."""
    pts = []
    with mp.workdps(DPS):
        m = mp.mpf(mu)
        for n, (r, p) in _ratios(s).items():
            pts.append((n, float((r / m - 1 + mp.mpf(1) / n) * n * n), 1 / n ** 5, p))
    return EstimatorTrace("c1", pts)


def neville(xs: Sequence, ys: Sequence, x0=0):
    """Value at x0 of the polynomial through (xs, ys)."""
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = ((x0 - xs[i + k]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + k])
    return p[0]


def extrapolate(trace: EstimatorTrace, points: int = 2) -> float:
    """Polynomial extrapolation of the last `points` trace values to abscissa 0."""
    tail = trace.points[-points:]
    with mp.workdps(DPS):
        return float(neville([mp.mpf(p[2]) for p in tail], [mp.mpf(p[1]) for p in tail]))


@dataclass
class Amplitude:
    coefficient: float
    gf: float
    uncertainty: float


def gf_amplitude(coefficient_amplitude: float, g: float) -> float:
    """Generating-function amplitude C for a_n ~ A mu^n n^g.

    g = -1 is the logarithmic case C log(1 - mu x) / x, where C = -A.
    Otherwise C (1 - mu x)^(-g-1) with C = A Gamma(g + 1).
    """
    if g == -1:
        return -coefficient_amplitude
    if g + 1 <= 0 and float(g + 1).is_integer():
        raise ValueError(f"no algebraic form for g={g}")
    return coefficient_amplitude * math.gamma(g + 1)


def amplitude(s: CountSeries, mu: float, g: float, points: int = 3) -> Amplitude:
    """Extrapolate A_n = a_n n^(-g) / mu^n in 1/n by Neville's scheme."""
    with mp.workdps(DPS):
        m, gg = mp.mpf(mu), mp.mpf(g)
        seq = [(_mpf(t.value) * mp.mpf(n) ** (-gg) / m ** n, mp.mpf(1) / n)
               for n, t in enumerate(s.terms, 1)]
        ests = []
        for q in range(1, points + 1):
            tail = seq[-q:]
            ests.append(float(neville([x for _, x in tail], [y for y, _ in tail])))
    A = ests[-1]
    return Amplitude(A, gf_amplitude(A, g), spread(ests))


@dataclass
class LowerBound:
    log_convex: bool
    differences_increasing: bool
    lower_bound: float
    n: int


def log_convexity_bound(s: CountSeries) -> LowerBound:
    """Check a_{n-1} a_{n+1} - a_n^2 > 0 and increasing; bound mu by the last exact ratio."""
    a = [Fraction(v) for v in s.exact_values]
    if len(a) < 3:
        raise ValueError("need at least 3 exact terms")
    d = [a[i - 1] * a[i + 1] - a[i] ** 2 for i in range(1, len(a) - 1)]
    convex = all(x > 0 for x in d)
    increasing = all(y > x for x, y in zip(d, d[1:]))
    q = a[-1] / a[-2]
    return LowerBound(convex, increasing, q.numerator / q.denominator, len(a))


def truncate_digits(x: float, decimals: int) -> str:
    """x cut (not rounded) to `decimals` places, as lower bounds should be quoted."""
    scale = 10 ** decimals
    return f"{math.floor(Fraction(x) * scale) / scale:.{decimals}f}"


def _det(M: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    M = [row[:] for row in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass
class HankelReport:
    determinants: list[int]          # det[a_{i+j+1}], orders 1..
    shifted: list[int]               # det[a_{i+j+2}], orders 1..
    first_negative: int | None       # smallest order with a negative determinant
    first_negative_shifted: int | None

    @property
    def stieltjes_ruled_out(self) -> bool:
        return self.first_negative is not None or self.first_negative_shifted is not None


def hankel_diagnostic(s: CountSeries) -> HankelReport:
    """Exact Hankel determinants of the exact terms (a_1 as the zeroth moment)."""
    a = [Fraction(v) for v in s.exact_values]
    den = 1
    for v in a:
        den = den * v.denominator // math.gcd(den, v.denominator)
    m = [int(v * den) for v in a]

    def dets(offset):
        out = []
        k = 1
        while 2 * k - 2 + offset < len(m):
            out.append(_det([[m[i + j + offset] for j in range(k)] for i in range(k)]))
            k += 1
        return out

    plain, shifted = dets(0), dets(1)
    first = next((k for k, d in enumerate(plain, 1) if d < 0), None)
    first_s = next((k for k, d in enumerate(shifted, 1) if d < 0), None)
    return HankelReport(plain, shifted, first, first_s)


@dataclass
class GrowthOfGrowth:
    lam: float
    lam_uncertainty: float
    c: float
    c_linear: float
    curvature: float


def growth_of_growth(leading: CountSeries, mu_table: Iterable[tuple[int, float]],
                     lam: float | None = None) -> GrowthOfGrowth:
    """Growth rate lambda of the leading coefficients, and the intercept of mu(w) ~ c + lambda w.

    lambda comes from one-correction ratio fits with g = -1 (the series is
    short).  With lambda fixed, mu(w) - lambda w is fitted by least squares
    both as a constant (c_linear) and as c + d/w; c is the large-w intercept
    of the second fit.
    """
    fits = fit_ratio_expansion(leading, 1)
    head = terminal_fit(fits)
    lam_est = head.mu
    lam_used = lam_est if lam is None else lam
    rows = [(w, m - lam_used * w) for w, m in mu_table]
    c_lin = sum(y for _, y in rows) / len(rows)
    # least squares for y = c + d / w
    xs = [1 / w for w, _ in rows]
    ys = [y for _, y in rows]
    n = len(rows)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    d = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    c = my - d * mx
    return GrowthOfGrowth(lam_est, head.uncertainty["mu"], c, c_lin, d)


@dataclass
class Summary:
    family: str
    terms: int
    exact_terms: int
    mu: float
    mu_uncertainty: float
    g: float
    g_estimate: float
    c1: float | None
    amplitude: float
    gf_amplitude: float
    amplitude_uncertainty: float
    lower_bound: float


def analyze(s: CountSeries, g: float = -1.0, corrections: int | None = None,
            amplitude_points: int = 3) -> Summary:
    """Headline estimates: terminal ratio fit for mu, exponent limit, amplitude, bound.

    Without `corrections`, three correction terms are used when the series has
    at least 24 terms and two otherwise (shorter series oscillate with three).
    """
    k = corrections if corrections is not None else (3 if len(s) >= 24 else 2)
    head = terminal_fit(fit_ratio_expansion(s, k, g))
    g_est = extrapolate(exponent_estimates(s, head.mu), 2)
    amp = amplitude(s, head.mu, g, amplitude_points)
    return Summary(s.family, len(s), s.num_exact, head.mu, head.uncertainty["mu"], g, g_est,
                   head.c1, amp.coefficient, amp.gf, amp.uncertainty,
                   log_convexity_bound(s).lower_bound)


def write_csv(traces: Sequence[EstimatorTrace], out: TextIO | None = None) -> str:
    """RFC-4180 CSV with columns n, abscissa, value, estimator, provenance."""
    buf = out if out is not None else io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["n", "abscissa", "value", "estimator", "provenance"])
    for t in traces:
        for n, v, x, p in t.points:
            wr.writerow([n, repr(x), repr(v), t.name, p])
    return buf.getvalue() if out is None else ""


ESTIMATORS = {
    "ratio": lambda s, mu: ratios(s),
    "intercept": lambda s, mu: linear_intercepts(s),
    "exponent": lambda s, mu: exponent_estimates(s, mu),
    "refined1": lambda s, mu: refined_mu(s, 1),
    "refined2": lambda s, mu: refined_mu(s, 2),
    "c1": lambda s, mu: c1_estimates(s, mu),
}
