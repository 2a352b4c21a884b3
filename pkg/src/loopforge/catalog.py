"""Named loops, triple systems and cocycles used throughout the package."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

from .extension import Cocycle, central_extension
from .loopcore import (
    FiniteLoop, LoopError, _check_limit, chein_double, cyclic_group, klein_like_power, symmetric_group,
)
from .steiner import STS, affine_plane_sts9, steiner_loop, sts_from_blocks


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str  # "loop", "sts" or "cocycle"
    note: str
    build: Callable[[], Any]
    refs: tuple[str, str] | None = None  # (Z, base) references of a cocycle

    @property
    def payload(self):
        return _payload(self.name)


_F5 = [
    [0, 1, 2, 3, 4],
    [1, 2, 4, 0, 3],
    [2, 0, 3, 4, 1],
    [3, 4, 1, 2, 0],
    [4, 3, 0, 1, 2],
]

# STS(13): one block per column
_STS13_ROWS = (
    "0 0 0 0 0 0 1 1 1 1 1 2 2 2 2 2 3 3 3 4 4 4 5 5 6 6",
    "1 3 5 7 8 9 3 4 6 9 a 3 4 5 7 8 7 9 a 5 6 8 7 8 7 b",
    "2 4 6 c b a 5 7 8 b c 6 a c b 9 8 c b b 9 c 9 a a c",
)

# unordered pairs {x, y} of STS(13) points with f(x, y) = 1
_COCYCLE28_ROWS = (
    "0 0 1 1 1 1 3 3 4 4 5 8 9 a a",
    "5 6 9 a b c a b 8 c 6 c b b c",
)

# an anti-Pasch STS(15)
_STS15AP = [
    (0, 1, 10), (0, 2, 4), (0, 3, 7), (0, 5, 12), (0, 6, 11), (0, 8, 13), (0, 9, 14),
    (1, 2, 9), (1, 3, 14), (1, 4, 5), (1, 6, 12), (1, 7, 8), (1, 11, 13),
    (2, 3, 5), (2, 6, 8), (2, 7, 14), (2, 10, 11), (2, 12, 13),
    (3, 4, 11), (3, 6, 10), (3, 8, 12), (3, 9, 13),
    (4, 6, 14), (4, 7, 12), (4, 8, 9), (4, 10, 13),
    (5, 6, 9), (5, 7, 10), (5, 8, 11), (5, 13, 14),
    (6, 7, 13), (7, 9, 11), (8, 10, 14), (9, 10, 12), (11, 12, 14),
]

_HEX = "0123456789abc"


def _f5() -> FiniteLoop:
    return FiniteLoop(_F5, labels="e a b c d".split(), name="F5")


def _cocycle15() -> Cocycle:
    F = _payload("F5")
    return Cocycle.from_entries(cyclic_group(3), F, [(x, x, 1) for x in range(1, F.order)])


def _sts7() -> STS:
    return sts_from_blocks(7, [((i) % 7, (i + 1) % 7, (i + 3) % 7) for i in range(7)])


def _sts13() -> STS:
    cols = zip(*(r.split() for r in _STS13_ROWS))
    return sts_from_blocks(13, [tuple(_HEX.index(t) for t in c) for c in cols], labels=list(_HEX))


def _cocycle28() -> Cocycle:
    F = _payload("F14")
    pairs = zip(*(r.split() for r in _COCYCLE28_ROWS))
    entries = [(F.index(a), F.index(b), 1) for a, b in pairs]
    return Cocycle.from_entries(cyclic_group(2), F, entries, symmetric=True)


def _named(L: FiniteLoop, name: str) -> FiniteLoop:
    return FiniteLoop(L.table, labels=L.labels, name=name)


_ENTRIES = {e.name: e for e in [
    CatalogEntry("F5", "loop", "order-5 loop where cubing holds at a but not at b", _f5),
    CatalogEntry("COCYCLE15", "cocycle", "Z3-valued, f(x,x) = 1 for x != e, 0 elsewhere",
                 _cocycle15, refs=("Z3", "builtin:F5")),
    CatalogEntry("X15", "loop", "central extension of F5 by Z3 along COCYCLE15",
                 lambda: _named(central_extension(_payload("COCYCLE15")).loop, "X15")),
    CatalogEntry("S3", "loop", "symmetric group on 3 letters", lambda: _named(symmetric_group(3), "S3")),
    CatalogEntry("M12", "loop", "Chein double M(S3, 2), the smallest nonassociative Moufang loop",
                 lambda: _named(chein_double(symmetric_group(3)), "M12")),
    CatalogEntry("STS7", "sts", "Fano plane", _sts7),
    CatalogEntry("STS9", "sts", "affine plane AG(2,3)", affine_plane_sts9),
    CatalogEntry("STS13", "sts", "a Steiner triple system on points 0-9, a, b, c", _sts13),
    CatalogEntry("STS15AP", "sts", "an anti-Pasch Steiner triple system of order 15",
                 lambda: sts_from_blocks(15, _STS15AP)),
    CatalogEntry("SL8", "loop", "Steiner loop of STS7", lambda: _named(steiner_loop(_payload("STS7")), "SL8")),
    CatalogEntry("SL10", "loop", "Steiner loop of STS9, simple",
                 lambda: _named(steiner_loop(_payload("STS9")), "SL10")),
    CatalogEntry("F14", "loop", "Steiner loop of STS13",
                 lambda: _named(steiner_loop(_payload("STS13")), "F14")),
    CatalogEntry("SL16", "loop", "Steiner loop of STS15AP",
                 lambda: _named(steiner_loop(_payload("STS15AP")), "SL16")),
    CatalogEntry("COCYCLE28", "cocycle", "symmetric Z2-cocycle on F14",
                 _cocycle28, refs=("Z2", "builtin:F14")),
    CatalogEntry("K28", "loop", "central extension of F14 by Z2 along COCYCLE28",
                 lambda: _named(central_extension(_payload("COCYCLE28")).loop, "K28")),
]}

def _guarded(order: int) -> int:
    _check_limit(order, None, "builtin family")
    return order


_FAMILIES = {
    "Zn": (re.compile(r"Z(\d+)"), "cyclic group of order n",
           lambda m: cyclic_group(_guarded(int(m.group(1))))),
    "Z2^k": (re.compile(r"Z2\^(\d+)"), "elementary abelian 2-group of order 2^k",
             lambda m: klein_like_power(_guarded(2 ** int(m.group(1))).bit_length() - 1)),
}


def names() -> list[str]:
    return list(_ENTRIES)


def entries() -> list[CatalogEntry]:
    return list(_ENTRIES.values())


def families() -> dict[str, str]:
    return {k: v[1] for k, v in _FAMILIES.items()}


def entry(name: str) -> CatalogEntry:
    if name in _ENTRIES:
        return _ENTRIES[name]
    for pattern, note, build in _FAMILIES.values():
        m = pattern.fullmatch(name)
        if m:
            return CatalogEntry(name, "loop", note, lambda m=m: _named(build(m), name))
    known = ", ".join([*_ENTRIES, *_FAMILIES])
    raise LoopError(f"unknown builtin {name!r}; available: {known}")


@lru_cache(maxsize=None)
def _payload(name: str):
    return entry(name).build()


def get(name: str):
    return _payload(name)


def get_loop(name: str) -> FiniteLoop:
    e = entry(name)
    if e.kind != "loop":
        raise LoopError(f"builtin {name!r} is a {e.kind}, not a loop")
    return _payload(name)


def get_sts(name: str) -> STS:
    e = entry(name)
    if e.kind != "sts":
        raise LoopError(f"builtin {name!r} is a {e.kind}, not an STS")
    return _payload(name)
