"""Reference values shipped with the package (see data/*.json)."""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cache
from importlib import resources

from .exact import BinomialRep, Poly


@cache
def _load(name: str) -> dict:
    with resources.files("brickcount.data").joinpath(name).open() as fh:
        return json.load(fh)


def flat_counts(w: int) -> list[int]:
    if w == 1:
        return [1] * 30
    return [int(v) for v in _load("flat_counts.json")["counts"][str(w)]]


def flat_widths() -> list[int]:
    return sorted(int(w) for w in _load("flat_counts.json")["counts"])


def brick_counts() -> list[int]:
    return [int(v) for v in _load("analysis.json")["brick_counts"]["counts"]]


def binomial_rep(n: int) -> BinomialRep:
    """Published binomial-basis coefficients of p_n, n = 3..14."""
    data = _load("polynomials.json")
    if str(n) in data["binomial_displays"]:
        vals = data["binomial_displays"][str(n)]
    else:
        vals = data["binomial_table"][str(n)]
    return BinomialRep(n, tuple(int(v) for v in vals))


def monomial(n: int) -> Poly:
    return Poly(Fraction(int(a), int(b)) for a, b in _load("polynomials.json")["monomial"][str(n)])


def pyramid(n: int) -> tuple[BinomialRep, Poly]:
    d = _load("polynomials.json")["pyramid"][str(n)]
    return BinomialRep(n, tuple(d["binomial"])), Poly(Fraction(a, b) for a, b in d["monomial"])


def gf_numerator_data(n: int) -> dict:
    return _load("polynomials.json")["gf_numerators"][str(n)]


def prediction_rows() -> list[tuple[int, int, float]]:
    return [(int(a), int(p), float(e)) for a, p, e in _load("analysis.json")["prediction_w2"]["rows"]]


def asymptotics_table() -> dict[int, tuple[float, float]]:
    rows = _load("analysis.json")["asymptotics"]["rows"]
    return {int(w): (float(m), float(a)) for w, (m, a) in rows.items()}


def scalar(name: str) -> str:
    return _load("analysis.json")["scalars"][name]
