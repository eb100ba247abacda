"""Connected buildings of 2x4 bricks, counted up to translation and rotation.

A brick is (x, y, z, o): minimum stud corner (x, y), layer z and orientation o
(0: four studs along x, 1: four studs along y).  Bricks in adjacent layers are
linked when their footprints share a stud; bricks in one layer may not
overlap.  Buildings are counted up to translation in all three directions and
rotation by multiples of 90 degrees about the vertical axis.

Counting uses Burnside's lemma over the rotation group:

    classes = (F_0 + 2 F_90 + F_180) / 4

where F_g is the number of translation classes that rotation g maps to a
translate of themselves.  F_0 comes from Redelmeier's algorithm on the brick
placement graph.  For F_90 and F_180 the invariant buildings are enumerated
as unions of rotation orbits around each possible rotation centre.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

try:
    from . import _tmcore
except ImportError:  # pragma: no cover
    _tmcore = None

Brick = tuple[int, int, int, int]
SIZE = {0: (4, 2), 1: (2, 4)}


class BrickCapExceeded(RuntimeError):
    def __init__(self, message: str, completed: int):
        super().__init__(message)
        self.completed = completed


def footprint(b: Brick) -> tuple[int, int, int, int]:
    x, y, _, o = b
    sx, sy = SIZE[o]
    return x, y, x + sx, y + sy


def overlap(a: Brick, b: Brick) -> bool:
    """Do the footprints of a and b share a stud (ignoring layers)?"""
    ax0, ay0, ax1, ay1 = footprint(a)
    bx0, by0, bx1, by1 = footprint(b)
    return ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1


def _offsets() -> dict[tuple[int, int], list[tuple[int, int]]]:
    """(o, o2) -> list of (dx, dy) with brick (dx, dy, ., o2) overlapping (0, 0, ., o)."""
    out = {}
    for o in (0, 1):
        for o2 in (0, 1):
            out[o, o2] = [(dx, dy) for dx in range(-4, 5) for dy in range(-4, 5)
                          if overlap((0, 0, 0, o), (dx, dy, 0, o2))]
    return out


OVERLAPS = _offsets()


def neighbours(b: Brick) -> Iterator[Brick]:
    """Bricks in the layers directly above and below that interlock with b."""
    x, y, z, o = b
    for z2 in (z - 1, z + 1):
        for o2 in (0, 1):
            for dx, dy in OVERLAPS[o, o2]:
                yield (x + dx, y + dy, z2, o2)


def conflicts(b: Brick) -> Iterator[Brick]:
    """Bricks in the same layer that would collide with b (including b)."""
    x, y, z, o = b
    for o2 in (0, 1):
        for dx, dy in OVERLAPS[o, o2]:
            yield (x + dx, y + dy, z, o2)


def is_connected(bricks: Sequence[Brick]) -> bool:
    if not bricks:
        return False
    todo = [bricks[0]]
    seen = {bricks[0]}
    rest = set(bricks)
    while todo:
        b = todo.pop()
        for c in rest:
            if c not in seen and abs(c[2] - b[2]) == 1 and overlap(b, c):
                seen.add(c)
                todo.append(c)
    return len(seen) == len(rest)


def validate(bricks: Sequence[Brick]) -> list[str]:
    problems = []
    bs = list(bricks)
    if len(set(bs)) != len(bs):
        problems.append("duplicate bricks")
    for i, a in enumerate(bs):
        for b in bs[i + 1:]:
            if a[2] == b[2] and overlap(a, b):
                problems.append(f"bricks {a} and {b} collide")
    if not is_connected(bs):
        problems.append("not connected")
    return problems


def rotate90(b: Brick, cx2: int = 0, cy2: int = 0) -> Brick:
    """Quarter turn counter-clockwise about (cx2/2, cy2/2)."""
    x, y, z, o = b
    sx, sy = SIZE[o]
    s = (cx2 + cy2) // 2
    d = (cy2 - cx2) // 2
    return (s - y - sy, d + x, z, 1 - o)


def rotate180(b: Brick, cx2: int = 0, cy2: int = 0) -> Brick:
    x, y, z, o = b
    sx, sy = SIZE[o]
    return (cx2 - x - sx, cy2 - y - sy, z, o)


def _normalise(bricks: Iterable[Brick]) -> tuple[Brick, ...]:
    bs = list(bricks)
    mx = min(b[0] for b in bs)
    my = min(b[1] for b in bs)
    mz = min(b[2] for b in bs)
    return tuple(sorted((x - mx, y - my, z - mz, o) for x, y, z, o in bs))


def canonical_form(bricks: Iterable[Brick]) -> tuple[Brick, ...]:
    """Least translated-and-sorted brick tuple over the four rotations."""
    cur = list(bricks)
    best = None
    for _ in range(4):
        cand = _normalise(cur)
        if best is None or cand < best:
            best = cand
        cur = [rotate90(b) for b in cur]
    return best


# ---------------------------------------------------------------- fixed count


class _Lattice:
    """Integer ids for bricks in a box, ordered by (z, x, y, o)."""

    def __init__(self, n: int, reach: int | None = None):
        self.n = n
        self.r = reach if reach is not None else 4 * (n - 1) + 4
        self.side = 2 * self.r + 1
        self.size = n * self.side * self.side * 2

    def id(self, b: Brick) -> int:
        x, y, z, o = b
        r, s = self.r, self.side
        if not (-r <= x <= r and -r <= y <= r and 0 <= z < self.n):
            return -1
        return ((z * s + (x + r)) * s + (y + r)) * 2 + o

    def brick(self, i: int) -> Brick:
        i, o = divmod(i, 2)
        i, y = divmod(i, self.side)
        z, x = divmod(i, self.side)
        return (x - self.r, y - self.r, z, o)


def _graph(lat: _Lattice, root: int):
    nb, cf = [], []
    for i in range(lat.size):
        b = lat.brick(i)
        nb.append([j for j in map(lat.id, neighbours(b)) if j > root])
        cf.append([j for j in map(lat.id, conflicts(b)) if j >= 0])
    return nb, cf


def _redelmeier_count(nb, cf, root: int, n: int, size: int, cap: int) -> int:
    blocked = [0] * size
    seen = bytearray(size)
    visited = 0

    def block(v, d):
        for u in cf[v]:
            blocked[u] += d

    def rec(untried, depth):
        nonlocal visited
        if depth == n - 1:
            k = 0
            for u in untried:
                if not blocked[u]:
                    k += 1
            visited += k
            if cap and visited > cap:
                raise BrickCapExceeded(f"visited more than {cap} buildings", n - 1)
            return k
        total = 0
        mine = list(untried)
        while mine:
            v = mine.pop()
            if blocked[v]:
                continue
            visited += 1
            block(v, 1)
            new = [u for u in nb[v] if not seen[u]]
            for u in new:
                seen[u] = 1
            total += rec(mine + new, depth + 1)
            for u in new:
                seen[u] = 0
            block(v, -1)
        return total

    if n == 1:
        return 1
    seen[root] = 1
    block(root, 1)
    first = list(nb[root])
    for u in first:
        seen[u] = 1
    return rec(first, 1)


def count_fixed(n: int, engine: str = "auto", cap: int = 0) -> int:
    """Connected n-brick buildings up to translation only."""
    if n < 1:
        raise ValueError("n must be positive")
    if engine == "auto":
        engine = "native" if _tmcore is not None and hasattr(_tmcore, "graph_count") else "python"
    lat = _Lattice(n)
    total = 0
    for o in (0, 1):
        root = lat.id((0, 0, 0, o))
        nb, cf = _graph(lat, root)
        if engine == "native":
            try:
                total += _tmcore.graph_count(nb, cf, root, n, cap)
            except OverflowError:
                raise BrickCapExceeded(f"visited more than {cap} buildings", n - 1) from None
        else:
            total += _redelmeier_count(nb, cf, root, n, lat.size, cap)
    return total


# ----------------------------------------------------------- symmetric counts


def _orbit(b: Brick, turn, order: int) -> tuple[Brick, ...]:
    out = [b]
    for _ in range(order - 1):
        out.append(turn(out[-1]))
    return tuple(sorted(set(out)))


def count_symmetric(n: int, quarter: bool) -> int:
    """Translation classes mapped to a translate of themselves by a 90 (or 180) degree turn."""
    if quarter:
        centres = [(0, 0), (1, 1)]
        order = 4
    else:
        centres = [(0, 0), (1, 0), (0, 1), (1, 1)]
        order = 2
    total = 0
    for cx2, cy2 in centres:
        turn = (lambda b, a=cx2, c=cy2: rotate90(b, a, c)) if quarter else \
               (lambda b, a=cx2, c=cy2: rotate180(b, a, c))
        total += _count_invariant(n, turn, order, cx2, cy2)
    return total


def _count_invariant(n: int, turn, order: int, cx2: int, cy2: int) -> int:
    """Buildings with lowest layer 0 that are invariant under `turn`.

    Vertices are brick orbits; a building is a union of orbits.  Orbit sets
    that are connected as orbits are grown with Redelmeier's algorithm and
    real connectivity is checked once the brick count reaches n.
    """
    # the rotation centre is the building's centroid, so every brick lies near it
    reach = (7 * (n - 1) + 8) // 2 + 2
    lo_x, lo_y = cx2 // 2 - reach, cy2 // 2 - reach
    orbits: dict[tuple[Brick, ...], int] = {}
    order_keys = []
    for z in range(n):
        for x in range(lo_x, lo_x + 2 * reach + 2):
            for y in range(lo_y, lo_y + 2 * reach + 2):
                for o in (0, 1):
                    orb = _orbit((x, y, z, o), turn, order)
                    if orb in orbits:
                        continue
                    # an orbit whose members collide is unusable
                    if any(a[2] == b[2] and overlap(a, b)
                           for i, a in enumerate(orb) for b in orb[i + 1:]):
                        continue
                    orbits[orb] = len(order_keys)
                    order_keys.append(orb)
    # canonical order: (lowest layer, then orbit tuple)
    keys = sorted(order_keys, key=lambda orb: (orb[0][2], orb))
    index = {orb: i for i, orb in enumerate(keys)}
    brick_orbit = {b: index[orb] for orb in keys for b in orb}
    weight = [len(orb) for orb in keys]
    nbrs = []
    for orb in keys:
        s = set()
        for b in orb:
            for c in neighbours(b):
                j = brick_orbit.get(c)
                if j is not None:
                    s.add(j)
        s.discard(index[orb])
        nbrs.append(sorted(s))
    conf = []
    for orb in keys:
        s = set()
        for b in orb:
            for c in conflicts(b):
                j = brick_orbit.get(c)
                if j is not None:
                    s.add(j)
        conf.append(s)

    total = 0
    blocked = [0] * len(keys)
    for root, orb in enumerate(keys):
        if orb[0][2] != 0:
            break
        if weight[root] > n:
            continue
        seen = {root}
        for u in conf[root]:
            blocked[u] += 1
        chosen = [root]

        def rec(untried, mass):
            nonlocal total
            if mass == n:
                bricks = [b for i in chosen for b in keys[i]]
                if is_connected(bricks):
                    total += 1
                return
            mine = list(untried)
            while mine:
                v = mine.pop()
                if blocked[v] or mass + weight[v] > n:
                    continue
                for u in conf[v]:
                    blocked[u] += 1
                chosen.append(v)
                new = [u for u in nbrs[v] if u > root and u not in seen]
                seen.update(new)
                rec(mine + new, mass + weight[v])
                seen.difference_update(new)
                chosen.pop()
                for u in conf[v]:
                    blocked[u] -= 1

        first = [u for u in nbrs[root] if u > root]
        seen.update(first)
        rec(first, weight[root])
        for u in conf[root]:
            blocked[u] -= 1
    return total


@dataclass
class BrickCount:
    n: int
    classes: int
    fixed: int
    quarter_symmetric: int
    half_symmetric: int


def count_buildings_detail(n: int, engine: str = "auto", cap: int = 0) -> BrickCount:
    fixed = count_fixed(n, engine, cap)
    f90 = count_symmetric(n, True)
    f180 = count_symmetric(n, False)
    total = Fraction(fixed + 2 * f90 + f180, 4)
    if total.denominator != 1:
        raise ArithmeticError(f"Burnside sum not divisible by 4 for n={n}")
    return BrickCount(n, int(total), fixed, f90, f180)


def count_buildings(n: int, engine: str = "auto", cap: int = 0) -> int:
    return count_buildings_detail(n, engine, cap).classes


def brute_force_classes(n: int) -> set[tuple[Brick, ...]]:
    """Canonical forms of all n-brick buildings, by growth and dedup (small n only)."""
    level = {canonical_form([(0, 0, 0, 0)])}
    for _ in range(n - 1):
        nxt = set()
        for bs in level:
            occupied = set(bs)
            for b in bs:
                for c in neighbours(b):
                    if c in occupied:
                        continue
                    if any(d[2] == c[2] and overlap(c, d) for d in bs):
                        continue
                    nxt.add(canonical_form(bs + (c,)))
        level = nxt
    return level
