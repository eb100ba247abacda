"""Command-line driver.

Exit codes: 0 success, 1 usage or schema error, 2 partial results (a budget
was hit; whatever was finished is still written), 3 internal assertion
failure.  Machine-readable output goes only to --out / --out-dir.
"""

from __future__ import annotations

import csv
import io
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click

from . import asymptotics as asy
from . import extend as ext
from . import fixtures
from .brick3d import BrickCapExceeded, count_buildings
from .exact import format_poly
from .flat import ResourceLimitExceeded, count_flat
from .series import CountSeries, SchemaError, brick_series, flat_series
from .transfer import DEFAULT_MEMORY, BudgetExceeded, tm_run
from .typepoly import (FitError, identity_suite, polynomial_from_counts,
                       pyramid_count, pyramid_polynomial, type_coefficients,
                       type_multiplicity_check)

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL, EXIT_INTERNAL = 0, 1, 2, 3
MEMORY_ENV = "BRICKCOUNT_MEMORY"

# desk-scale reach of the flat-count regeneration; --full uses the long targets
QUICK_REACH = {2: 16, 3: 12, 4: 10, 5: 9, 6: 9, 7: 8, 8: 8, 9: 7, 10: 7}
FULL_REACH = {2: 18, 3: 14, 4: 12, 5: 12, 6: 12, 7: 12, 8: 8, 9: 8, 10: 8}


@dataclass
class RunConfig:
    memory_budget: int
    time_budget: float | None
    thread_count: int
    cap: int


def _size(text: str) -> int:
    units = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30, "t": 1 << 40}
    t = text.strip().lower().rstrip("b")
    mult = units.get(t[-1:], 1)
    if t[-1:] in units:
        t = t[:-1]
    try:
        v = int(float(t) * mult)
    except ValueError:
        raise click.BadParameter(f"not a size: {text!r}") from None
    if v <= 0:
        raise click.BadParameter("budget must be positive")
    return v


def _out_series(s: CountSeries, out: str | None) -> None:
    if out:
        Path(out).write_text(s.to_json())


def _print_series(values, start: int = 1) -> None:
    vals = [str(v) for v in values]
    width = max((len(v) for v in vals), default=1)
    for n, v in enumerate(vals, start):
        click.echo(f"{n:>3}  {v:>{width}}")


def _load_series(path: str) -> CountSeries:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise click.BadParameter(str(e), param_hint="--series") from None
    return CountSeries.from_json(text)


@click.group()
@click.option("--memory", "memory", default=None, help=f"memory budget, e.g. 4G (env {MEMORY_ENV})")
@click.option("--time-budget", type=click.FloatRange(min=0, min_open=True), default=None,
              help="seconds; per width for transfer-matrix counts, overall for searches")
@click.option("--threads", type=click.IntRange(min=1), default=1,
              help="worker threads (the engines are single-threaded)")
@click.option("--cap", type=click.IntRange(min=0), default=10 ** 10,
              help="visit cap for brute-force searches (0 = none)")
@click.pass_context
def cli(ctx, memory, time_budget, threads, cap):
    """Counting and series analysis for flat and 3D brick structures."""
    mem = memory or os.environ.get(MEMORY_ENV)
    ctx.obj = RunConfig(_size(mem) if mem else DEFAULT_MEMORY, time_budget, threads, cap)


class _Clock:
    def __init__(self, budget):
        self.budget = budget
        self.t0 = time.monotonic()

    def expired(self) -> bool:
        return self.budget is not None and time.monotonic() - self.t0 > self.budget


@cli.command("count2d")
@click.option("--w", type=click.IntRange(min=1), required=True)
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--engine", type=click.Choice(["tm", "brute"]), default="tm")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def count2d(cfg: RunConfig, w, n, engine, out):
    """Count flat structures of 1..N tiles of width W."""
    values, partial, why = [], False, ""
    if engine == "tm":
        try:
            values = tm_run(w, n, memory_bytes=cfg.memory_budget, time_budget=cfg.time_budget).counts
        except BudgetExceeded as e:
            values, partial, why = e.partial, True, str(e)
    else:
        clock = _Clock(cfg.time_budget)
        for m in range(1, n + 1):
            if clock.expired():
                partial, why = True, "time budget exceeded"
                break
            try:
                values.append(count_flat(w, m, cfg.cap, engine="auto"))
            except ResourceLimitExceeded as e:
                partial, why = True, str(e)
                break
    s = flat_series(w, values)
    s.generator = f"brickcount count2d --engine {engine}"
    _print_series(values)
    _out_series(s, out)
    if partial:
        click.echo(f"partial: exact through n={len(values)} ({why})", err=True)
        return EXIT_PARTIAL
    return EXIT_OK


@cli.command("count3d")
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def count3d(cfg: RunConfig, n, out):
    """Count 2x4 brick buildings of 1..N bricks up to translation and rotation."""
    values, partial, why = [], False, ""
    clock = _Clock(cfg.time_budget)
    for m in range(1, n + 1):
        if clock.expired():
            partial, why = True, "time budget exceeded"
            break
        try:
            values.append(count_buildings(m, cap=cfg.cap))
        except BrickCapExceeded as e:
            partial, why = True, str(e)
            break
    s = brick_series(values)
    s.generator = "brickcount count3d"
    _print_series(values)
    _out_series(s, out)
    if partial:
        click.echo(f"partial: exact through n={len(values)} ({why})", err=True)
        return EXIT_PARTIAL
    return EXIT_OK


def _counter(source: str, memory: int):
    cache: dict[int, list[int]] = {}

    def from_tm(w, n):
        if w not in cache or len(cache[w]) < n:
            cache[w] = tm_run(w, n, memory_bytes=memory).counts
        return cache[w][n - 1]

    def from_table(w, n):
        vals = fixtures.flat_counts(w)
        if n > len(vals):
            raise click.UsageError(f"reference table has only {len(vals)} terms for w={w}")
        return vals[n - 1]

    return from_tm if source == "count" else from_table


def _table_widths(n: int) -> list[int]:
    return [w for w in [1] + fixtures.flat_widths() if len(fixtures.flat_counts(w)) >= n]


@cli.command("poly")
@click.option("--n", type=click.IntRange(min=1, max=30), required=True)
@click.option("--use-symmetry", is_flag=True, help="also use p(1-w) = (-1)^(n-1) p(w)")
@click.option("--source", type=click.Choice(["count", "table"]), default="count",
              help="where p_n(w) values come from: fresh counts or the shipped reference table")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def poly(cfg: RunConfig, n, use_symmetry, source, out):
    """Fit the polynomial p_n(w) and print both representations."""
    counter = _counter(source, cfg.memory_budget)
    widths = _table_widths(n) if source == "table" else None
    try:
        fam = polynomial_from_counts(n, counter, use_symmetry, widths)
    except FitError as e:
        raise click.UsageError(f"cannot fit p_{n}: {e} (try --use-symmetry)") from None
    click.echo(f"p_{n}(w) [{fam.source}{', table values' if source == 'table' else ''}]")
    click.echo("binomial: " + ", ".join(str(c) for c in fam.binomial.coeffs))
    click.echo("monomial: " + format_poly(fam.monomial))
    bad = [k for k, ok in identity_suite(fam).items() if not ok]
    click.echo("identities: " + ("all hold" if not bad else "FAILED " + ", ".join(bad)))
    if out:
        Path(out).write_text(fam.to_json() + "\n")
    return EXIT_OK


@cli.command("types")
@click.option("--n", type=click.IntRange(min=1, max=9), required=True)
@click.option("--w", type=click.IntRange(min=1), default=None, help="also check multiplicities at this width")
def types(n, w):
    """Type coefficients a_{n,k} by enumeration."""
    a = type_coefficients(n)
    for k, v in enumerate(a, 1):
        click.echo(f"a_{n},{k} = {v}")
    if w is not None:
        rep = type_multiplicity_check(n, w)
        click.echo(f"multiplicity check at w={w}: {'ok' if rep.ok else 'FAILED'}")
        if not rep.ok:
            return EXIT_INTERNAL
    return EXIT_OK


@cli.command("pyramid")
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--w", type=click.IntRange(min=1), required=True)
def pyramid(n, w):
    """Pyramid count C(wn-1, n-1) and its polynomial in w."""
    fam = pyramid_polynomial(n)
    click.echo(f"count: {pyramid_count(n, w)}")
    click.echo("binomial: " + ", ".join(str(c) for c in fam.binomial.coeffs))
    click.echo("monomial: " + format_poly(fam.monomial))
    return EXIT_OK


ANALYSES = ("logconvex", "fit", "amplitude", "hankel", "summary") + tuple(asy.ESTIMATORS)


@cli.command("analyze")
@click.option("--series", "path", required=True)
@click.option("--estimators", default="summary", help="comma list from: " + ",".join(ANALYSES))
@click.option("--mu", type=float, default=None, help="growth constant for exponent/c1/amplitude")
@click.option("--g", type=float, default=None, help="critical exponent (default -1, or -1.5 for brick2x4)")
@click.option("--corrections", type=click.IntRange(min=0, max=4), default=None)
@click.option("--csv-dir", type=click.Path(file_okay=False), default=None)
def analyze(path, estimators, mu, g, corrections, csv_dir):
    """Ratio-method analysis of a series file."""
    s = _load_series(path)
    names = [x.strip() for x in estimators.split(",") if x.strip()]
    for x in names:
        if x not in ANALYSES:
            raise click.BadParameter(f"unknown estimator {x!r}", param_hint="--estimators")
    if g is None:
        g = -1.5 if s.family == "brick2x4" else -1.0
    if mu is None and any(x in ("exponent", "c1", "amplitude", "summary") for x in names):
        mu = asy.analyze(s, g, corrections).mu
    traces = []
    for x in names:
        if x == "logconvex":
            b = asy.log_convexity_bound(s)
            click.echo(f"log-convex: {b.log_convex}; differences increasing: {b.differences_increasing}")
            click.echo(f"lower bound: mu > {asy.truncate_digits(b.lower_bound, 4)} "
                       f"(a_{b.n}/a_{b.n - 1} = {b.lower_bound:.8f})")
        elif x == "fit":
            k = corrections if corrections is not None else (3 if len(s) >= 24 else 2)
            f = asy.terminal_fit(asy.fit_ratio_expansion(s, k, g))
            cs = ", ".join(f"c{j + 1}={c:.5f}" for j, c in enumerate(f.c))
            click.echo(f"mu = {f.mu:.7f} +- {f.uncertainty['mu']:.1e} ({cs}; window ending n={f.n})")
        elif x == "amplitude":
            amp = asy.amplitude(s, mu, g)
            click.echo(f"amplitude A = {amp.coefficient:.6g} +- {amp.uncertainty:.1e}; "
                       f"generating-function C = {amp.gf:.6g}")
        elif x == "hankel":
            h = asy.hankel_diagnostic(s)
            click.echo(f"Hankel orders: {len(h.determinants)}; first negative: {h.first_negative}; "
                       f"shifted first negative: {h.first_negative_shifted}")
        elif x == "summary":
            r = asy.analyze(s, g, corrections)
            click.echo(f"{s.family}: {r.terms} terms ({r.exact_terms} exact)")
            click.echo(f"mu = {r.mu:.7f} +- {r.mu_uncertainty:.1e}; exponent ~ {r.g_estimate:.4f}")
            click.echo(f"amplitude = {r.amplitude:.6g}; C = {r.gf_amplitude:.6g}")
            click.echo(f"lower bound: mu > {asy.truncate_digits(r.lower_bound, 4)}")
        else:
            t = asy.ESTIMATORS[x](s, mu)
            traces.append(t)
            click.echo(f"{t.name}: last = {t.last:.8g} at n={t.points[-1][0]}")
    if csv_dir and traces:
        d = Path(csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for t in traces:
            with open(d / f"{s.family}-{t.name}.csv", "w", newline="") as fh:
                asy.write_csv([t], fh)
    return EXIT_OK


@cli.command("extend")
@click.option("--series", "path", required=True)
@click.option("--terms", type=click.IntRange(min=1), required=True)
@click.option("--no-stop", is_flag=True, help="keep terms whose relative sigma exceeds 3e-6")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def extend_cmd(path, terms, no_stop, out):
    """Predict further terms with differential approximants."""
    s = _load_series(path)
    try:
        x, ens = ext.extend_series(s, terms, stop_ratio=None if no_stop else ext.STOP_RATIO)
    except ext.EmptyEnsemble as e:
        click.echo(f"extension failed: {e}", err=True)
        return EXIT_PARTIAL
    base = len(s)
    for k, t in enumerate(x.terms[base:]):
        click.echo(f"{base + k + 1:>3}  {t.value:.15g} +- {t.sigma:.3g}")
    click.echo(f"{ens.fits} approximants, {ens.rejected} rejected; kept {len(x) - base} of {terms} terms")
    _out_series(x, out)
    return EXIT_OK


# ------------------------------------------------------------------ reports


def _write_csv(rows, header, path: Path | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    if path is not None:
        path.write_text(buf.getvalue())


def report_flat_counts(reach: dict[int, int], memory: int, time_budget: float | None = None):
    """Recount each width up to its reach; the time budget applies per width."""
    rows, ok, partial = [], True, False
    for w, n in reach.items():
        ref = fixtures.flat_counts(w)
        try:
            got = tm_run(w, n, memory_bytes=memory, time_budget=time_budget).counts
        except BudgetExceeded as e:
            got = e.partial
            partial = True
        for m in range(1, n + 1):
            have = got[m - 1] if m <= len(got) else None
            match = have == ref[m - 1]
            ok &= match or have is None
            rows.append((w, m, "" if have is None else have, ref[m - 1], match))
    return rows, ok, partial


def report_asymptotics():
    rows, ok = [], True
    for w, (mu_ref, amp_ref) in fixtures.asymptotics_table().items():
        s = flat_series(w, fixtures.flat_counts(w))
        x, _ = ext.extend_series(s, 12)
        r = asy.analyze(x)
        mu_ok = abs(r.mu - mu_ref) <= 0.002 * mu_ref
        amp_ok = abs(r.amplitude - amp_ref) <= 0.02 * amp_ref
        ok &= mu_ok and amp_ok
        rows.append((w, len(x), f"{r.mu:.6f}", f"{r.mu_uncertainty:.1e}", mu_ref,
                     f"{r.amplitude:.5f}", amp_ref, mu_ok and amp_ok))
    return rows, ok, False


def report_polynomials():
    rows, ok = [], True
    for n in range(3, 15):
        counter = _counter("table", 0)
        fam = polynomial_from_counts(n, counter, n >= 11, _table_widths(n))
        ref = fixtures.binomial_rep(n).coeffs
        match = fam.binomial.coeffs == ref
        ok &= match and all(identity_suite(fam).values())
        for k, (a, b) in enumerate(zip(fam.binomial.coeffs, ref), 1):
            rows.append((n, k, a, b, fam.source, a == b))
    return rows, ok, False


def report_prediction():
    exact = fixtures.flat_counts(2)
    ens = ext.predict_ensemble(flat_series(2, exact[:20]), 9)
    rows, ok = [], True
    for k, (actual, ref_pred, ref_err) in enumerate(fixtures.prediction_rows()):
        assert actual == exact[20 + k]
        err = abs(ens.mean[k] - actual) / actual
        good = err <= 5 * ref_err
        ok &= good
        rows.append((21 + k, actual, f"{ens.mean[k]:.0f}", f"{err:.1e}", ref_pred,
                     f"{ref_err:.1e}", good))
    return rows, ok, False


REPORTS = {
    "flat-counts": ("w,n,computed,reference,match", None),
    "asymptotics": ("w,terms,mu,mu_pm,mu_reference,amplitude,amplitude_reference,within_tolerance", report_asymptotics),
    "polynomials": ("n,k,a_nk,reference,source,match", report_polynomials),
    "prediction": ("n,actual,predicted,rel_error,reference_prediction,reference_rel_error,ok", report_prediction),
}


@cli.command("report")
@click.option("--table", type=click.Choice(list(REPORTS)), required=True)
@click.option("--full", is_flag=True, help="flat-counts: use the long reach (minutes per width)")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.pass_obj
def report(cfg: RunConfig, table, full, out_dir):
    """Regenerate a reference table and diff it against the shipped values."""
    header, fn = REPORTS[table]
    if table == "flat-counts":
        rows, ok, partial = report_flat_counts(FULL_REACH if full else QUICK_REACH, cfg.memory_budget,
                                            cfg.time_budget)
    else:
        rows, ok, partial = fn()
    cols = header.split(",")
    text = [cols] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in text) for i in range(len(cols))]
    for r in text:
        click.echo("  ".join(c.rjust(wd) for c, wd in zip(r, widths)))
    mismatches = sum(1 for r in rows if not r[-1])
    if partial:
        click.echo(f"{table}: partial, a budget was hit; {mismatches} row(s) missing or different", err=True)
    else:
        click.echo(f"{table}: {'all cells match' if ok else f'{mismatches} row(s) differ'}")
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        _write_csv(rows, cols, d / f"{table}.csv")
        (d / f"{table}.txt").write_text("\n".join("  ".join(c.rjust(wd) for c, wd in zip(r, widths))
                                                  for r in text) + "\n")
    if not ok:
        return EXIT_INTERNAL
    return EXIT_PARTIAL if partial else EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="brickcount", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except SchemaError as e:
        click.echo(f"schema error at {e.where}: {e}", err=True)
        return EXIT_USAGE
    except AssertionError as e:
        click.echo(f"internal assertion failed: {e}", err=True)
        return EXIT_INTERNAL
    return rv if isinstance(rv, int) else EXIT_OK


def entry() -> None:
    sys.exit(main())
