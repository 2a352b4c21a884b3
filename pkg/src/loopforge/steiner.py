"""Steiner triple systems, Steiner loops, Pasch configurations, orientations."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .extension import Cocycle, central_extension
from .loopcore import FiniteLoop, LoopError, cyclic_group, is_commutative, loops_isomorphic


@dataclass(frozen=True, eq=False)
class STS:
    """Blocks on points 0..n-1; every pair of distinct points in exactly one block."""

    n: int
    blocks: tuple[tuple[int, int, int], ...]
    labels: tuple[str, ...] | None = None

    def __eq__(self, other) -> bool:
        return (isinstance(other, STS) and self.n == other.n
                and sorted(self.blocks) == sorted(other.blocks))

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.blocks))))

    def label(self, p: int) -> str:
        return self.labels[p] if self.labels is not None else str(p)

    @cached_property
    def third(self) -> np.ndarray:
        """``third[x, y]`` is the third point of the block on x != y; -1 on the diagonal."""
        t = np.full((self.n, self.n), -1, dtype=np.int64)
        for a, b, c in self.blocks:
            t[a, b] = t[b, a] = c
            t[a, c] = t[c, a] = b
            t[b, c] = t[c, b] = a
        return t

    def block_of(self, x: int, y: int) -> tuple[int, int, int]:
        return tuple(sorted((x, y, int(self.third[x, y]))))


def sts_from_blocks(n: int, blocks: Iterable[Sequence[int]], labels: Sequence[str] | None = None) -> STS:
    if n < 1:
        raise LoopError("an STS needs at least one point")
    if n >= 3 and n % 6 not in (1, 3):
        raise LoopError(f"no STS of order {n}: n must be 1 or 3 mod 6")
    if n == 2:
        raise LoopError("no STS of order 2")
    seen: dict[tuple[int, int], tuple] = {}
    norm = []
    for b in blocks:
        b = tuple(int(p) for p in b)
        if len(b) != 3 or len(set(b)) != 3:
            raise LoopError(f"block {b} does not have 3 distinct points")
        if any(not 0 <= p < n for p in b):
            raise LoopError(f"block {b} has a point outside 0..{n - 1}")
        for x, y in itertools.combinations(sorted(b), 2):
            if (x, y) in seen:
                raise LoopError(f"pair {{{x},{y}}} covered by {seen[(x, y)]} and {b}")
            seen[(x, y)] = b
        norm.append(tuple(sorted(b)))
    for x, y in itertools.combinations(range(n), 2):
        if (x, y) not in seen:
            raise LoopError(f"pair {{{x},{y}}} is not covered")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n or len(set(labels)) != n:
            raise LoopError("labels must be n distinct strings")
    return STS(n, tuple(sorted(norm)), labels)


def steiner_quasigroup(S: STS) -> np.ndarray:
    """x*x = x, and x*y is the third point of the block on x, y."""
    t = S.third.copy()
    np.fill_diagonal(t, np.arange(S.n))
    return t


def steiner_loop(S: STS) -> FiniteLoop:
    """Adjoin e = 0; point p becomes element p + 1 and x*x = e."""
    n = S.n + 1
    t = np.zeros((n, n), dtype=np.int64)
    t[0, :] = np.arange(n)
    t[:, 0] = np.arange(n)
    t[1:, 1:] = S.third + 1
    np.fill_diagonal(t, 0)
    labels = ["e"] + [S.label(p) for p in range(S.n)]
    if "e" in labels[1:]:
        labels = None
    return FiniteLoop(t, labels=labels)


def is_steiner_loop(L: FiniteLoop) -> bool:
    """Commutative and x(xy) = y."""
    if not is_commutative(L):
        return False
    x = np.arange(L.order)
    return bool((L.table[x[:, None], L.table] == x[None, :]).all())


def loop_to_sts(L: FiniteLoop) -> STS:
    if not is_steiner_loop(L):
        raise LoopError("not a Steiner loop")
    blocks = set()
    for x in range(1, L.order):
        for y in range(x + 1, L.order):
            blocks.add(tuple(sorted((x - 1, y - 1, int(L.table[x, y]) - 1))))
    labels = L.labels[1:] if L.labels is not None else None
    return sts_from_blocks(L.order - 1, sorted(blocks), labels)


# -- configurations and subsystems ----------------------------------------------

def pasch_configurations(S: STS) -> list[tuple[tuple[int, int, int], ...]]:
    """All Pasch configurations {a,b,c},{a,d,e},{f,b,d},{f,c,e} on six points.

    Each pair of blocks meeting in a point a is completed: f is the third point
    on b, d and the configuration closes if c, e, f is also a block.
    """
    third = S.third
    through: dict[int, list[tuple[int, int]]] = {p: [] for p in range(S.n)}
    for blk in S.blocks:
        for i in range(3):
            through[blk[i]].append((blk[(i + 1) % 3], blk[(i + 2) % 3]))
    found = set()
    for a in range(S.n):
        for (b, c), (d, e) in itertools.combinations(through[a], 2):
            for dd, ee in ((d, e), (e, d)):
                f = third[b, dd]
                if third[c, ee] == f:
                    conf = frozenset(tuple(sorted(q)) for q in
                                     ((a, b, c), (a, dd, ee), (f, b, dd), (f, c, ee)))
                    found.add(conf)
    return sorted(tuple(sorted(c)) for c in found)


def is_anti_pasch(S: STS) -> bool:
    return not pasch_configurations(S)


def subsystem_closure(S: STS, points: Iterable[int]) -> frozenset[int]:
    closed = set(int(p) for p in points)
    queue = list(closed)
    third = S.third
    while queue:
        x = queue.pop()
        for y in list(closed):
            if y != x:
                z = int(third[x, y])
                if z not in closed:
                    closed.add(z)
                    queue.append(z)
    return frozenset(closed)


def is_minimal(S: STS) -> bool:
    """Every proper subsystem has at most one block (at most 3 points).

    A closed set with 4 or more points contains a block and a further point,
    so it suffices to close every block together with one outside point.
    """
    for blk in S.blocks:
        for p in range(S.n):
            if p not in blk and len(subsystem_closure(S, (*blk, p))) != S.n:
                return False
    return True


def induced_sts(S: STS, points: Iterable[int]) -> STS:
    pts = sorted(points)
    pos = {p: i for i, p in enumerate(pts)}
    blocks = [tuple(pos[p] for p in b) for b in S.blocks if all(p in pos for p in b)]
    return sts_from_blocks(len(pts), blocks)


def affine_plane_sts9() -> STS:
    """Lines of AG(2,3); point (i, j) is 3i + j."""
    pts = [(i, j) for i in range(3) for j in range(3)]
    lines = set()
    for p, q in itertools.combinations(pts, 2):
        r = ((-p[0] - q[0]) % 3, (-p[1] - q[1]) % 3)
        lines.add(tuple(sorted(3 * u + v for u, v in (p, q, r))))
    return sts_from_blocks(9, sorted(lines))


def is_hall(S: STS) -> bool:
    """Every non-collinear triple closes to a 9-point subsystem isomorphic to STS(9)."""
    ref = steiner_loop(affine_plane_sts9())
    checked: set[frozenset[int]] = set()
    for x, y, z in itertools.combinations(range(S.n), 3):
        if S.third[x, y] == z:
            continue
        closed = subsystem_closure(S, (x, y, z))
        if len(closed) != 9:
            return False
        if closed not in checked:
            if loops_isomorphic(steiner_loop(induced_sts(S, closed)), ref) is None:
                return False
            checked.add(closed)
    return True


# -- orientations --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrientedSTS:
    base: STS
    cyclic_orders: tuple[tuple[int, int, int], ...]

    @cached_property
    def d(self) -> np.ndarray:
        """d[x, y] = 0 if (x, y, .) follows a block's cyclic order, 1 if reversed, -1 if x = y."""
        d = np.full((self.base.n, self.base.n), -1, dtype=np.int64)
        for x, y, z in self.cyclic_orders:
            d[x, y] = d[y, z] = d[z, x] = 0
            d[y, x] = d[z, y] = d[x, z] = 1
        return d


def orient(S: STS, cyclic_orders: Iterable[Sequence[int]]) -> OrientedSTS:
    """One cyclic order per block (any rotation of it), in any block order."""
    orders = [tuple(int(p) for p in o) for o in cyclic_orders]
    by_block = {}
    for o in orders:
        key = tuple(sorted(o))
        if len(o) != 3 or key not in set(S.blocks):
            raise LoopError(f"{o} is not an ordering of a block")
        if key in by_block:
            raise LoopError(f"block {key} oriented twice")
        by_block[key] = o
    if len(by_block) != len(S.blocks):
        raise LoopError("every block needs exactly one cyclic order")
    return OrientedSTS(S, tuple(by_block[b] for b in S.blocks))


def orientation_d(O: OrientedSTS, x: int, y: int) -> int:
    if x == y:
        raise LoopError("d is defined on distinct points only")
    return int(O.d[x, y])


def random_orientation(S: STS, rng: random.Random | int | None = None) -> OrientedSTS:
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    orders = []
    for a, b, c in S.blocks:
        orders.append((a, b, c) if rng.random() < 0.5 else (a, c, b))
    return orient(S, orders)


def all_orientations(S: STS) -> Iterable[OrientedSTS]:
    for flips in itertools.product((False, True), repeat=len(S.blocks)):
        yield orient(S, [(a, c, b) if f else (a, b, c) for (a, b, c), f in zip(S.blocks, flips)])


def oriented_cocycle(O: OrientedSTS, diag: int) -> Cocycle:
    """Z2-cocycle on the Steiner loop: f = d off the diagonal, f(x,x) = diag, f(e,.) = f(.,e) = 0."""
    if diag not in (0, 1):
        raise LoopError("diag must be 0 or 1")
    n = O.base.n + 1
    v = np.zeros((n, n), dtype=np.int64)
    v[1:, 1:] = O.d
    np.fill_diagonal(v, diag)
    v[0, 0] = 0
    return Cocycle(cyclic_group(2), steiner_loop(O.base), v)


def oriented_steiner_loop(O: OrientedSTS, diag: int, verify: bool = True) -> FiniteLoop:
    return central_extension(oriented_cocycle(O, diag), verify=verify).loop


def assoc_case_predicate(O: OrientedSTS, diag: int, x: int, y: int, z: int) -> bool:
    """Whether lifts of base-loop elements x, y, z associate (anti-Pasch case analysis).

    x, y, z are Steiner loop elements (0 is e, point p is p + 1).
    """
    if 0 in (x, y, z):
        return True
    if x == y and diag == 1:
        return True
    if y == z and diag == 1:
        return True
    if x == z:
        return True
    return len({x, y, z}) == 3 and O.base.third[x - 1, y - 1] == z - 1
