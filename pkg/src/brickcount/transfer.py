"""Transfer-matrix counting of flat structures.

The scan runs row by row, bottom row first, one cell at a time from left to
right.  A state records, for every cell of the boundary between scanned and
unscanned cells, which connected component occupies it (0 = empty), plus how
many cells of the tile currently being laid remain.  Labels are renumbered in
first-occurrence order so equivalent states share a key.

Every state maps to a count vector indexed by tiles used.  In the Python
engine the vector is packed into one integer, SLOT bits per entry, so adding
a tile is a shift.

Translation is removed as follows: the bottom row begins with a tile at
column 0, and at every row end the boundary is stripped of empty cells and
re-padded by the widest margin a future tile could still reach.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field

try:
    from . import _tmcore
except ImportError:  # pragma: no cover - exercised only without a compiler
    _tmcore = None

SLOT = 128
_RUN = re.compile(rb"([^\x00])\1*")


class BudgetExceeded(RuntimeError):
    """The state table outgrew its budget; counts up to `completed` are exact."""

    def __init__(self, message: str, partial: list[int], completed: int):
        super().__init__(message)
        self.partial = partial
        self.completed = completed


@dataclass
class TMResult:
    counts: list[int]
    completed: int
    peak_states: int
    total_states: int
    trace: list[tuple[int, int, int]] = field(default_factory=list)


def canon(b: bytes) -> bytes:
    """Relabel components 1, 2, ... in order of first appearance."""
    k = max(b)
    if k == 0:
        return b
    pos = sorted((b.find(v), v) for v in range(1, k + 1) if v in b)
    if all(v == i + 1 for i, (_, v) in enumerate(pos)) and len(pos) == k:
        return b
    tab = bytearray(range(256))
    for i, (_, v) in enumerate(pos):
        tab[v] = i + 1
    return b.translate(tab)


def make_need(w: int):
    """Lower bound on tiles still needed to merge all boundary components.

    Three bounds are combined.  Two components whose nearest cells are d apart
    need ceil(d / (w-1)) tiles to bridge the gap.  Gaps that separate the
    boundary into independent blocks must each be crossed, and crossings of
    consecutive gaps can share tiles only within one chain.  Finally each tile
    joins at most two components, so c components need c - 1 tiles.
    """
    wm = w - 1
    cache: dict[bytes, int] = {}

    def need(b: bytes) -> int:
        c = b.strip(b"\x00")
        hit = cache.get(c)
        if hit is not None:
            return hit
        if not c:
            cache[c] = 1
            return 1
        runs = [(m.start(), m.end() - 1, c[m.start()]) for m in _RUN.finditer(c)]
        labels = {v for _, _, v in runs}
        if len(labels) == 1:
            cache[c] = 0
            return 0
        last = {v: i for i, (_, _, v) in enumerate(runs)}
        dmin: dict[int, int] = {}
        gaps = []
        reach = -1
        for i in range(len(runs) - 1):
            _, e, v = runs[i]
            a2, _, v2 = runs[i + 1]
            if v != v2:
                d = a2 - e
                dmin[v] = min(dmin.get(v, d), d)
                dmin[v2] = min(dmin.get(v2, d), d)
            reach = max(reach, last[v])
            if reach == i:
                gaps.append((e, a2))
        best = max(max(-(-d // wm) for d in dmin.values()), len(labels) - 1)
        if len(gaps) > 1:
            dp = [0] * (len(gaps) + 1)
            for j in range(1, len(gaps) + 1):
                dp[j] = min(dp[i] + -(-(gaps[j - 1][1] - gaps[i][0]) // wm) for i in range(j))
            best = max(best, dp[-1])
        cache[c] = best
        return best

    return need


@dataclass
class SignatureTable:
    """States of one scan position: {(cells, remaining): packed counts}."""

    w: int
    n_max: int
    row: int
    width: int
    entries: dict[tuple[bytes, int], int]
    finished: int = 0  # packed counts of completed structures

    def unpack(self, vec: int) -> list[int]:
        mask = (1 << SLOT) - 1
        return [(vec >> (SLOT * k)) & mask for k in range(self.n_max + 1)]

    def counts(self) -> list[int]:
        return self.unpack(self.finished)[1:]


def _low(vec: int) -> int:
    return ((vec & -vec).bit_length() - 1) // SLOT


class _Masks:
    def __init__(self, n_max: int):
        self.full = (1 << (SLOT * (n_max + 1))) - 1
        self.upto = [(1 << (SLOT * (k + 1))) - 1 for k in range(n_max + 1)]


def start_table(w: int, n_max: int) -> SignatureTable:
    width = 1 + n_max * (w - 1)
    return SignatureTable(w, n_max, 0, width, {(bytes(width), 0): 1})


def tm_step(table: SignatureTable, x: int, need=None, pruning: bool = True) -> SignatureTable:
    """Expand every state over the choices available at cell x of the current row."""
    w, n_max, F = table.w, table.n_max, table.width
    masks = _Masks(n_max)
    need = need or make_need(w)
    out: dict[tuple[bytes, int], int] = {}
    get = out.get
    finished = table.finished
    first_cell = table.row == 0 and x == 0

    def keep(key, vec, extra):
        nd = need(key[0]) + extra if pruning else 0
        nd = max(nd, 0)
        if _low(vec) + nd <= n_max:
            v = vec & masks.upto[n_max - nd]
            out[key] = get(key, 0) + v

    for (b, rem), vec in table.entries.items():
        old = b[x]
        if rem:
            t = b[x - 1]
            if old and old != t:
                b2 = b.translate(bytes.maketrans(bytes([old]), bytes([t])))
                b2 = canon(b2[:x] + bytes([t]) + b2[x + 1:])
            else:
                b2 = b[:x] + bytes([t]) + b[x + 1:]
            key = (b2, rem - 1)
            out[key] = get(key, 0) + vec
            continue
        if first_cell:
            pass
        elif not old:
            key = (b, 0)
            out[key] = get(key, 0) + vec
        else:
            b2 = b[:x] + b"\x00" + b[x + 1:]
            if old not in b2:
                # a component left the boundary: done if it was the only one
                if not any(b2):
                    finished += vec
            else:
                keep((canon(b2), 0), vec, 0)
        if x + w <= F:
            v2 = (vec << SLOT) & masks.full
            if v2:
                b2 = b if old else canon(b[:x] + bytes([max(b) + 1]) + b[x + 1:])
                keep((b2, w - 1), v2, -1)
    return SignatureTable(w, n_max, table.row, F, out, finished)


def prune(table: SignatureTable, need=None) -> SignatureTable:
    """Drop count slots that cannot reach a connected structure within budget."""
    masks = _Masks(table.n_max)
    need = need or make_need(table.w)
    out = {}
    for key, vec in table.entries.items():
        nd = max(need(key[0]) - (1 if key[1] else 0), 0)
        if _low(vec) + nd <= table.n_max:
            out[key] = vec & masks.upto[table.n_max - nd]
    return SignatureTable(table.w, table.n_max, table.row, table.width, out, table.finished)


def next_row(table: SignatureTable, pruning: bool = True, mirror: bool = True) -> SignatureTable:
    """Strip and re-pad the boundary after the last cell of a row.

    With mirror=True a boundary and its left-right reflection share one key,
    since both complete in the same number of ways.
    """
    w, n_max = table.w, table.n_max
    full = 1 + n_max * (w - 1)
    if not table.entries:
        return SignatureTable(w, n_max, table.row + 1, 0, {}, table.finished)
    if pruning:
        min_used = min(_low(v) for v in table.entries.values())
        pad = min(max(n_max - min_used, 0) * (w - 1), full - 1)
    else:
        pad = full - 1
    stripped = [(b.strip(b"\x00"), v) for (b, _), v in table.entries.items()]
    if mirror:
        stripped = [(min(c, canon(c[::-1])), v) for c, v in stripped]
    maxlen = max(len(c) for c, _ in stripped)
    F = pad + maxlen + pad
    out: dict[tuple[bytes, int], int] = {}
    for c, v in stripped:
        key = (bytes(pad) + c + bytes(F - pad - len(c)), 0)
        out[key] = out.get(key, 0) + v
    return SignatureTable(w, n_max, table.row + 1, F, out, table.finished)


def tm_count_python(w: int, n_max: int, pruning: bool = True,
                    max_states: int = 0, trace: bool = False,
                    time_budget: float | None = None, mirror: bool = True) -> TMResult:
    need = make_need(w)
    t0 = time.monotonic()
    table = start_table(w, n_max)
    peak = total = 0
    steps = []
    while table.entries:
        for x in range(table.width):
            table = tm_step(table, x, need, pruning)
            size = len(table.entries)
            peak, total = max(peak, size), total + size
            if trace:
                steps.append((table.row, x, size))
            over = bool(max_states and size > max_states)
            late = time_budget is not None and time.monotonic() - t0 > time_budget
            if over or late:
                done = min(_low(v) for v in table.entries.values()) - 1 if table.entries else n_max
                counts = table.counts()
                why = f"state table exceeded {max_states} entries" if over else \
                    f"time budget of {time_budget:g} s exceeded"
                raise BudgetExceeded(why, counts[:max(done, 0)], max(done, 0))
        table = next_row(table, pruning, mirror)
    return TMResult(table.counts(), n_max, peak, total, steps)


def _states_for_budget(w: int, n_max: int, memory_bytes: int) -> int:
    width = 1 + n_max * (w - 1)
    per_state = 2 * (width + 1 + 16 * (n_max + 1)) + 16
    return max(memory_bytes // per_state, 1)


DEFAULT_MEMORY = 3 << 30


def tm_run(w: int, n_max: int, engine: str = "auto", memory_bytes: int = DEFAULT_MEMORY,
           trace: bool = False, time_budget: float | None = None) -> TMResult:
    """Count structures of 1..n_max tiles and return counts with diagnostics."""
    if w < 1 or n_max < 1:
        raise ValueError("need w >= 1 and n_max >= 1")
    if w == 1:
        return TMResult([1] * n_max, n_max, 0, 0)
    max_states = _states_for_budget(w, n_max, memory_bytes)
    if engine == "auto":
        engine = "native" if _tmcore is not None else "python"
    if engine == "python":
        return tm_count_python(w, n_max, max_states=max_states, trace=trace, time_budget=time_budget)
    if engine != "native":
        raise ValueError(f"unknown engine {engine!r}")
    if _tmcore is None:
        raise RuntimeError("compiled kernel not available; use engine='python'")
    counts, done, peak, total, steps = _tmcore.tm_count(w, n_max, max_states, trace, time_budget or 0.0)
    if done < n_max:
        why = f"state table exceeded {max_states} entries" if peak > max_states else \
            f"time budget of {time_budget:g} s exceeded"
        raise BudgetExceeded(why, list(counts[:done]), done)
    return TMResult(list(counts), done, peak, total, list(steps))


def tm_count(w: int, n_max: int, engine: str = "auto",
             memory_bytes: int = DEFAULT_MEMORY, time_budget: float | None = None) -> list[int]:
    """a_1..a_{n_max} for width-w tiles, exact."""
    return tm_run(w, n_max, engine, memory_bytes, time_budget=time_budget).counts
