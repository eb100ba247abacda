"""Explicit enumeration of flat structures built from w x 1 tiles.

A structure is a set of tiles (row, left).  Tiles in adjacent rows are joined
when their horizontal extents share at least one cell; tiles in the same row
never touch each other's cells and never join.  Structures are counted up to
horizontal and vertical translation.

Enumeration is Redelmeier's algorithm on the graph of tile placements: every
connected, conflict-free placement set is generated exactly once from the
root tile (0, 0), which is always the least tile in (row, left) order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

try:
    from . import _tmcore
except ImportError:  # pragma: no cover
    _tmcore = None


class ResourceLimitExceeded(RuntimeError):
    def __init__(self, message: str, visited: int):
        super().__init__(message)
        self.visited = visited


DEFAULT_CAP = 10**8


@dataclass(frozen=True, order=True)
class FlatStructure:
    w: int
    tiles: tuple[tuple[int, int], ...]

    @classmethod
    def from_tiles(cls, w: int, tiles) -> "FlatStructure":
        """Translate so the bottom row's leftmost tile sits at (0, 0)."""
        ts = sorted(tiles)
        if not ts:
            raise ValueError("a structure needs at least one tile")
        r0, l0 = ts[0]
        return cls(w, tuple((r - r0, l - l0) for r, l in ts))

    @property
    def n(self) -> int:
        return len(self.tiles)

    @property
    def height(self) -> int:
        return self.tiles[-1][0] + 1

    def to_line(self) -> str:
        return f"w={self.w} tiles=" + ";".join(f"({r},{l})" for r, l in self.tiles)

    @classmethod
    def from_line(cls, line: str) -> "FlatStructure":
        m = _LINE.fullmatch(line.strip())
        if not m:
            raise ValueError(f"not a structure line: {line!r}")
        tiles = tuple((int(r), int(l)) for r, l in _PAIR.findall(m.group(2)))
        return cls(int(m.group(1)), tiles)


_LINE = re.compile(r"w=(\d+) tiles=((?:\(-?\d+,-?\d+\);?)+)")
_PAIR = re.compile(r"\((-?\d+),(-?\d+)\)")


def overlap(w: int, a: int, b: int) -> bool:
    """Do tiles starting at columns a and b share a column?"""
    return abs(a - b) < w


def validate(s: FlatStructure) -> list[str]:
    """Return a list of violated structure invariants (empty when valid)."""
    problems = []
    w, tiles = s.w, s.tiles
    if w < 1:
        problems.append("tile width must be positive")
    if list(tiles) != sorted(set(tiles)):
        problems.append("tiles not sorted and distinct")
    if not tiles:
        return problems + ["empty structure"]
    if tiles[0] != (0, 0):
        problems.append("not translated so the bottom-left tile is at (0, 0)")
    rows = {r for r, _ in tiles}
    if rows != set(range(max(rows) + 1)):
        problems.append("rows are not contiguous from 0")
    for i, (r, a) in enumerate(tiles):
        for r2, b in tiles[i + 1:]:
            if r2 == r and overlap(w, a, b):
                problems.append(f"tiles ({r},{a}) and ({r2},{b}) overlap")
    # connectivity through vertical overlap only
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        r, a = tiles[i]
        for j, (r2, b) in enumerate(tiles):
            if j not in seen and abs(r2 - r) == 1 and overlap(w, a, b):
                seen.add(j)
                stack.append(j)
    if len(seen) != len(tiles):
        problems.append("not connected")
    return problems


class _Redelmeier:
    """Shared state for enumerating placement sets of one (w, n)."""

    def __init__(self, w: int, n: int, cap: int):
        self.w, self.n, self.cap = w, n, cap
        span = (n - 1) * (w - 1) + w
        self.off = span
        self.m = 2 * span + 1  # columns per row in the id encoding
        size = n * self.m
        self.blocked = [0] * size
        self.seen = [False] * size
        self.visited = 0
        self.root = self.off  # (0, 0)
        wm = w - 1
        m = self.m
        nbrs = []
        for v in range(size):
            r, c = divmod(v, m)
            out = []
            for r2 in (r - 1, r + 1):
                if not 0 <= r2 < n:
                    continue
                for c2 in range(max(c - wm, 0), min(c + wm, m - 1) + 1):
                    u = r2 * m + c2
                    if u > self.root:
                        out.append(u)
            nbrs.append(tuple(out))
        self.nbrs = nbrs

    def tick(self, k: int = 1) -> None:
        self.visited += k
        if self.visited > self.cap:
            raise ResourceLimitExceeded(
                f"visited more than {self.cap} placement sets", self.visited)

    def block(self, v: int, d: int) -> None:
        r = v // self.m
        lo = max(v - self.w + 1, r * self.m)
        hi = min(v + self.w - 1, r * self.m + self.m - 1)
        b = self.blocked
        for u in range(lo, hi + 1):
            b[u] += d

    def grow(self, v: int) -> list[int]:
        seen = self.seen
        new = [u for u in self.nbrs[v] if not seen[u]]
        for u in new:
            seen[u] = True
        return new

    def shrink(self, new: list[int]) -> None:
        for u in new:
            self.seen[u] = False

    def count(self) -> int:
        if self.n == 1:
            return 1
        root = self.root
        self.seen[root] = True
        self.block(root, 1)
        untried = self.grow(root)
        total = self._count(untried, 1)
        return total

    def _count(self, untried: list[int], depth: int) -> int:
        blocked = self.blocked
        if depth == self.n - 1:
            k = sum(1 for u in untried if not blocked[u])
            self.tick(k)
            return k
        total = 0
        untried = list(untried)
        while untried:
            v = untried.pop()
            if blocked[v]:
                continue
            self.tick()
            self.block(v, 1)
            new = self.grow(v)
            total += self._count(untried + new, depth + 1)
            self.shrink(new)
            self.block(v, -1)
        return total

    def sets(self) -> Iterator[list[int]]:
        root = self.root
        chosen = [root]
        if self.n == 1:
            self.tick()
            yield chosen
            return
        self.seen[root] = True
        self.block(root, 1)
        yield from self._sets(self.grow(root), chosen)

    def _sets(self, untried: list[int], chosen: list[int]) -> Iterator[list[int]]:
        blocked = self.blocked
        untried = list(untried)
        last = len(chosen) == self.n - 1
        while untried:
            v = untried.pop()
            if blocked[v]:
                continue
            self.tick()
            chosen.append(v)
            if last:
                yield chosen
            else:
                self.block(v, 1)
                new = self.grow(v)
                yield from self._sets(untried + new, chosen)
                self.shrink(new)
                self.block(v, -1)
            chosen.pop()

    def decode(self, v: int) -> tuple[int, int]:
        r, c = divmod(v, self.m)
        return r, c - self.off


def enumerate_flat(w: int, n: int, cap: int = DEFAULT_CAP) -> Iterator[FlatStructure]:
    """Yield every flat structure of n tiles of width w once, in a fixed DFS order."""
    if w < 1 or n < 1:
        raise ValueError("need w >= 1 and n >= 1")
    if w == 1:
        yield FlatStructure(1, tuple((r, 0) for r in range(n)))
        return
    engine = _Redelmeier(w, n, cap)
    for ids in engine.sets():
        yield FlatStructure(w, tuple(sorted(engine.decode(v) for v in ids)))


def count_flat(w: int, n: int, cap: int = DEFAULT_CAP, engine: str = "python") -> int:
    """Number of structures, by the same search; engine="native" runs the compiled twin."""
    if w < 1 or n < 1:
        raise ValueError("need w >= 1 and n >= 1")
    if w == 1:
        return 1
    if engine == "auto":
        engine = "native" if _tmcore is not None else "python"
    if engine == "native":
        try:
            return _tmcore.flat_count(w, n, cap or 0)
        except OverflowError:
            raise ResourceLimitExceeded(f"visited more than {cap} nodes", cap) from None
    if engine != "python":
        raise ValueError(f"unknown engine {engine!r}")
    return _Redelmeier(w, n, cap).count()


def offsets(s: FlatStructure) -> tuple[int, ...]:
    """Left coordinates numbered bottom-left to top-right, relative to tile 0."""
    base = s.tiles[0][1]
    return tuple(l - base for _, l in sorted(s.tiles))


def is_pyramid(s: FlatStructure) -> bool:
    """One base tile, and every higher tile rests on some tile in the row below."""
    by_row: dict[int, list[int]] = {}
    for r, l in s.tiles:
        by_row.setdefault(r, []).append(l)
    if len(by_row.get(0, ())) != 1:
        return False
    return all(
        any(overlap(s.w, l, b) for b in by_row.get(r - 1, ()))
        for r, l in s.tiles if r > 0
    )
