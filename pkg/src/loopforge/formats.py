"""Text formats for Cayley tables, triple systems, cocycles and product subloops.

Cayley table::

    5
    #labels: e a b c d
    0 1 2 3 4
    ...

STS (token order inside a line is the block's cyclic order)::

    13
    0 1 2
    ...

Cocycle::

    Z2
    builtin:F14
    0 5 1
    ...

``#`` starts a comment everywhere; ``#labels:`` and ``#symmetric`` are
directives.
"""
from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .extension import Cocycle
from .loopcore import FiniteLoop, LoopError, cyclic_group
from .steiner import STS, OrientedSTS, orient, sts_from_blocks

log = logging.getLogger(__name__)


class FormatError(LoopError):
    pass


def _lines(text: str) -> tuple[list[tuple[int, list[str]]], dict[str, str]]:
    """Non-comment lines as (line number, tokens) plus directives."""
    out, directives = [], {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"#\s*(labels|symmetric)\s*:?\s*(.*)$", line)
        if m:
            directives[m.group(1)] = m.group(2).strip()
            continue
        line = line.split("#", 1)[0].strip()
        if line:
            out.append((no, line.split()))
    return out, directives


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {no}: expected an integer, got {tok!r}") from None


# -- Cayley tables -------------------------------------------------------------

def parse_table(text: str) -> FiniteLoop:
    lines, directives = _lines(text)
    if not lines:
        raise FormatError("empty table file")
    no, first = lines[0]
    if len(first) != 1:
        raise FormatError(f"line {no}: expected the order n")
    n = _int(first[0], no)
    rows = lines[1:]
    if len(rows) != n:
        raise FormatError(f"expected {n} table rows, found {len(rows)}")
    table = []
    for no, toks in rows:
        if len(toks) != n:
            raise FormatError(f"line {no}: expected {n} entries, found {len(toks)}")
        table.append([_int(t, no) for t in toks])
    labels = directives["labels"].split() if "labels" in directives else None
    t = np.array(table)
    if t.min() < 0 or t.max() >= n:
        raise FormatError("table entries must be 0-based indices below n")
    ident = np.arange(n)
    ids = [e for e in range(n) if np.array_equal(t[e], ident) and np.array_equal(t[:, e], ident)]
    if not ids:
        raise FormatError("table has no identity element")
    e = ids[0]
    if e != 0:
        log.warning("identity is element %d; re-indexing it to 0", e)
        perm = np.arange(n)
        perm[[0, e]] = [e, 0]  # new index i holds old element perm[i]
        inv = np.argsort(perm)
        t = inv[t[np.ix_(perm, perm)]]
        if labels is not None:
            labels = [labels[p] for p in perm]
    return FiniteLoop(t, labels=labels)


def format_table(L: FiniteLoop) -> str:
    out = [str(L.order)]
    if L.labels is not None:
        out.append("#labels: " + " ".join(L.labels))
    width = len(str(L.order - 1))
    out += [" ".join(str(v).rjust(width) for v in row) for row in L.table.tolist()]
    return "\n".join(out) + "\n"


# -- triple systems --------------------------------------------------------------

def _point_order(tokens: list[str]) -> list[str]:
    if all(t.isdigit() for t in tokens):
        return sorted(tokens, key=int)

    def key(t: str):
        try:
            return (0, int(t, 36), t)
        except ValueError:
            return (1, 0, t)
    return sorted(tokens, key=key)


def parse_sts_lines(text: str) -> tuple[STS, list[tuple[int, int, int]]]:
    """The STS and the blocks as written (their cyclic orders)."""
    lines, directives = _lines(text)
    if not lines:
        raise FormatError("empty STS file")
    no, first = lines[0]
    if len(first) != 1:
        raise FormatError(f"line {no}: expected the number of points")
    n = _int(first[0], no)
    raw = []
    for no, toks in lines[1:]:
        if len(toks) != 3:
            raise FormatError(f"line {no}: a block needs 3 points")
        raw.append(toks)
    if "labels" in directives:
        labels = directives["labels"].split()
    else:
        tokens = sorted({t for b in raw for t in b})
        if all(t.isdigit() and int(t) < n for t in tokens):
            labels = [str(i) for i in range(n)]
        else:
            labels = _point_order(tokens)
    if len(labels) != n:
        raise FormatError(f"found {len(labels)} point labels for n = {n}")
    pos = {t: i for i, t in enumerate(labels)}
    try:
        orders = [tuple(pos[t] for t in b) for b in raw]
    except KeyError as exc:
        raise FormatError(f"unknown point label {exc.args[0]!r}") from None
    numeric = labels == [str(i) for i in range(n)]
    S = sts_from_blocks(n, orders, None if numeric else labels)
    return S, orders


def parse_sts(text: str) -> STS:
    return parse_sts_lines(text)[0]


def parse_oriented_sts(text: str) -> OrientedSTS:
    S, orders = parse_sts_lines(text)
    return orient(S, orders)


def format_sts(S: STS, orders: Sequence[Sequence[int]] | None = None) -> str:
    out = [str(S.n)]
    numeric = S.labels is None
    if not numeric and _point_order(list(S.labels)) != list(S.labels):
        out.append("#labels: " + " ".join(S.labels))
    for b in (orders if orders is not None else S.blocks):
        out.append(" ".join(S.label(p) for p in b))
    return "\n".join(out) + "\n"


def format_oriented_sts(O: OrientedSTS) -> str:
    return format_sts(O.base, O.cyclic_orders)


# -- cocycles --------------------------------------------------------------------

LoopResolver = Callable[[str], FiniteLoop]


def resolve_z(ref: str, resolve: LoopResolver) -> FiniteLoop:
    m = re.fullmatch(r"Z(\d+)", ref)
    return cyclic_group(int(m.group(1))) if m else resolve(ref)


def parse_cocycle(text: str, resolve: LoopResolver, symmetric: bool = False) -> tuple[Cocycle, str, str]:
    """The cocycle plus the Z and base references as written."""
    lines, directives = _lines(text)
    if len(lines) < 2:
        raise FormatError("cocycle file needs a Z line and a base loop line")
    (_, ztoks), (_, btoks) = lines[0], lines[1]
    z_ref, base_ref = " ".join(ztoks), " ".join(btoks)
    Z = resolve_z(z_ref, resolve)
    F = resolve(base_ref)
    symmetric = symmetric or "symmetric" in directives
    entries = []
    for no, toks in lines[2:]:
        if len(toks) != 3:
            raise FormatError(f"line {no}: expected 'x y value'")
        try:
            x, y = F.index(toks[0]), F.index(toks[1])
        except LoopError as exc:
            raise FormatError(f"line {no}: {exc}") from None
        v = _int(toks[2], no)
        if not 0 <= v < Z.order:
            raise FormatError(f"line {no}: value {v} outside Z{Z.order}")
        entries.append((x, y, v))
    return Cocycle.from_entries(Z, F, entries, symmetric=symmetric), z_ref, base_ref


def format_cocycle(c: Cocycle, z_ref: str, base_ref: str) -> str:
    out = [z_ref, base_ref]
    for x, y, v in c.nonzero_entries():
        out.append(f"{c.base.label(x)} {c.base.label(y)} {v}")
    return "\n".join(out) + "\n"


# -- product subloops ----------------------------------------------------------------

def parse_tuples(text: str, factors: Sequence[FiniteLoop]) -> list[tuple[int, ...]]:
    """One tuple per line, coordinates as factor labels."""
    lines, _ = _lines(text)
    out = []
    for no, toks in lines:
        if len(toks) != len(factors):
            raise FormatError(f"line {no}: expected {len(factors)} coordinates")
        try:
            out.append(tuple(F.index(t) for F, t in zip(factors, toks)))
        except LoopError as exc:
            raise FormatError(f"line {no}: {exc}") from None
    return out


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
