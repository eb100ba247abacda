"""Count series with per-term provenance, and their JSON file form."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Exact = Union[int, Fraction]
SCHEMA_VERSION = 1
_FAMILY = re.compile(r"^(flat-w\d+|brick2x4|leading-coeffs|custom)$")


class SchemaError(ValueError):
    """A series document is malformed; `where` points at the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class Term:
    value: Union[int, Fraction, float]
    provenance: str = "exact"
    sigma: float | None = None

    @property
    def exact(self) -> bool:
        return self.provenance == "exact"


@dataclass
class CountSeries:
    """Terms a_1, a_2, ... ; predicted terms may only follow the exact ones."""

    family: str
    terms: list[Term]
    w: int | None = None
    generator: str = "brickcount"
    version: int = SCHEMA_VERSION
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        seen_predicted = False
        for i, t in enumerate(self.terms):
            if t.provenance not in ("exact", "predicted"):
                raise SchemaError(f"terms[{i}].provenance", f"unknown provenance {t.provenance!r}")
            if t.exact and seen_predicted:
                raise SchemaError(f"terms[{i}]", "exact term after a predicted one")
            seen_predicted |= not t.exact

    @classmethod
    def from_exact(cls, family: str, values: Iterable[Exact], w: int | None = None) -> "CountSeries":
        return cls(family, [Term(v) for v in values], w)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def values(self) -> list:
        return [t.value for t in self.terms]

    @property
    def exact_values(self) -> list[Exact]:
        return [t.value for t in self.terms if t.exact]

    @property
    def num_exact(self) -> int:
        return sum(1 for t in self.terms if t.exact)

    def exact_only(self) -> "CountSeries":
        return CountSeries(self.family, self.terms[:self.num_exact], self.w, self.generator)

    def truncated(self, m: int) -> "CountSeries":
        return CountSeries(self.family, self.terms[:m], self.w, self.generator)

    def extended(self, predictions: Sequence[tuple[float, float]]) -> "CountSeries":
        extra = [Term(float(v), "predicted", float(s)) for v, s in predictions]
        return CountSeries(self.family, self.terms + extra, self.w, self.generator)

    # ---- JSON

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "w": self.w,
            "terms": [{"value": _encode(t), "provenance": t.provenance, "sigma": t.sigma}
                      for t in self.terms],
            "generator": self.generator,
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "CountSeries":
        if not isinstance(d, dict):
            raise SchemaError("$", "expected an object")
        for key in ("family", "terms", "version"):
            if key not in d:
                raise SchemaError(key, "missing")
        if d["version"] != SCHEMA_VERSION:
            raise SchemaError("version", f"unsupported version {d['version']!r}")
        if not isinstance(d["family"], str) or not _FAMILY.match(d["family"]):
            raise SchemaError("family", f"unknown family {d['family']!r}")
        w = d.get("w")
        if w is not None and (not isinstance(w, int) or w < 1):
            raise SchemaError("w", "must be a positive integer or null")
        if not isinstance(d["terms"], list):
            raise SchemaError("terms", "expected a list")
        terms = []
        for i, t in enumerate(d["terms"]):
            where = f"terms[{i}]"
            if not isinstance(t, dict) or "value" not in t:
                raise SchemaError(where, "expected an object with a value")
            prov = t.get("provenance", "exact")
            sigma = t.get("sigma")
            if prov == "exact":
                if not isinstance(t["value"], str):
                    raise SchemaError(where + ".value", "exact values must be decimal strings")
                terms.append(Term(_decode(t["value"], where + ".value"), "exact", sigma))
            elif prov == "predicted":
                try:
                    v = float(t["value"])
                except (TypeError, ValueError):
                    raise SchemaError(where + ".value", "not a number") from None
                if sigma is not None and not isinstance(sigma, (int, float)):
                    raise SchemaError(where + ".sigma", "not a number")
                terms.append(Term(v, "predicted", None if sigma is None else float(sigma)))
            else:
                raise SchemaError(where + ".provenance", f"unknown provenance {prov!r}")
        return cls(d["family"], terms, w, d.get("generator", "unknown"), d["version"])

    @classmethod
    def from_json(cls, text: str) -> "CountSeries":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError("$", f"invalid JSON: {e}") from None
        return cls.from_dict(d)


def _encode(t: Term):
    v = t.value
    if not t.exact:
        return float(v)
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{v.numerator}/{v.denominator}"
    return str(int(v))


def _decode(s: str, where: str) -> Exact:
    try:
        f = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(where, f"not an exact number: {s!r}") from None
    if "/" not in s and not re.fullmatch(r"-?\d+", s.strip()):
        raise SchemaError(where, f"not an integer decimal string: {s!r}")
    return int(f) if f.denominator == 1 else f


def flat_series(w: int, values: Iterable[int]) -> CountSeries:
    return CountSeries.from_exact(f"flat-w{w}", values, w)


def brick_series(values: Iterable[int]) -> CountSeries:
    return CountSeries.from_exact("brick2x4", values)
