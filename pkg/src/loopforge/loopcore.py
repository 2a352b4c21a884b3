"""Finite loops as Cayley tables.

Elements are the integers ``0..n-1`` and the identity is always ``0``.
Everything here is a pure function of immutable tables; derived data (division
tables, inner mapping generators) is computed once and cached on the loop.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

# Size guards. Override with LOOPFORGE_MAX_ORDER.
MAX_ORDER = int(os.environ.get("LOOPFORGE_MAX_ORDER", "256"))


class LoopError(ValueError):
    """Invalid loop data or a violated precondition."""


class SizeLimitError(LoopError):
    """A size guard refused the computation."""


def _check_limit(n: int, limit: int | None, what: str) -> None:
    limit = MAX_ORDER if limit is None else limit
    if n > limit:
        raise SizeLimitError(f"{what}: order {n} exceeds limit {limit}")


def _latin_inverse(table: np.ndarray, axis: int) -> np.ndarray:
    # inverse permutation of every row (axis=1) or every column (axis=0)
    n = table.shape[0]
    inv = np.empty_like(table)
    idx = np.arange(n)
    if axis == 1:
        inv[idx[:, None], table] = idx[None, :]
    else:
        inv[table, idx[None, :]] = idx[:, None]
    return inv


class FiniteLoop:
    """A finite loop given by its multiplication table, identity at index 0."""

    def __init__(self, table, labels: Sequence[str] | None = None, name: str | None = None):
        t = np.array(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise LoopError("table must be a nonempty square array")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise LoopError("table entries out of range")
        ident = np.arange(n)
        for i in range(n):
            if len(np.unique(t[i])) != n:
                raise LoopError(f"row {i} is not a permutation")
            if len(np.unique(t[:, i])) != n:
                raise LoopError(f"column {i} is not a permutation")
        if not (np.array_equal(t[0], ident) and np.array_equal(t[:, 0], ident)):
            raise LoopError("element 0 is not the identity")
        self.table = t
        self.table.setflags(write=False)
        self.ldiv_table = _latin_inverse(t, axis=1)
        self.rdiv_table = _latin_inverse(t, axis=0)
        self.ldiv_table.setflags(write=False)
        self.rdiv_table.setflags(write=False)
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise LoopError("labels must be n distinct strings")
        self.labels = labels
        self.name = name

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<FiniteLoop{tag} order={self.order}>"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteLoop) and np.array_equal(self.table, other.table)
                and self.labels == other.labels)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)

    def index(self, token: str | int) -> int:
        """Element index for an external label (or a plain integer index)."""
        if self.labels is not None and str(token) in self.labels:
            return self.labels.index(str(token))
        try:
            x = int(token)
        except (TypeError, ValueError):
            raise LoopError(f"unknown element {token!r}") from None
        if not 0 <= x < self.order:
            raise LoopError(f"element {x} out of range")
        return x

    def _check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.order:
                raise IndexError(f"element {x} out of range for order {self.order}")

    def mul(self, x: int, y: int) -> int:
        self._check(x, y)
        return int(self.table[x, y])

    def ldiv(self, x: int, y: int) -> int:
        """The unique z with x*z = y."""
        self._check(x, y)
        return int(self.ldiv_table[x, y])

    def rdiv(self, x: int, y: int) -> int:
        """The unique z with z*y = x."""
        self._check(x, y)
        return int(self.rdiv_table[x, y])

    @cached_property
    def inner_maps(self) -> np.ndarray:
        """Distinct standard generators of the inner mapping group, one per row.

        Row ``r`` is the permutation ``z -> g(z)``. The generators are
        ``L_{x,y}(z) = (yx)\\(y(xz))``, ``R_{x,y}(z) = ((zx)y)/(xy)`` and
        ``T_x(z) = (xz)/x``.
        """
        t, ld, rd = self.table, self.ldiv_table, self.rdiv_table
        n = self.order
        z = np.arange(n)
        ys = np.arange(n)[:, None]
        maps = z[None, :].astype(np.int32)
        for x in range(n):
            lxy = ld[t[ys, x], t[ys, t[x, z][None, :]]]
            rxy = rd[t[t[z, x][None, :], ys], t[x, ys]]
            tx = rd[t[x, z], x][None, :]
            maps = np.unique(np.vstack([maps, lxy, rxy, tx]).astype(np.int32), axis=0)
        maps.setflags(write=False)
        return maps

    @cached_property
    def rows(self) -> list[list[int]]:
        """The table as nested Python lists (fast scalar lookups)."""
        return self.table.tolist()

    def elements(self) -> range:
        return range(self.order)


@dataclass(frozen=True, eq=False)
class Subloop:
    """A subset of ``parent`` closed under the loop operations."""

    parent: FiniteLoop
    elements: tuple[int, ...]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subloop) and self.elements == other.elements
                and (self.parent is other.parent or self.parent == other.parent))

    def __hash__(self) -> int:
        return hash(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return int(x) in self.elementset

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"Subloop(order={len(self)}, elements={list(self.elements)})"

    @cached_property
    def elementset(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    def as_loop(self) -> tuple[FiniteLoop, "LoopHom"]:
        """The subloop as a standalone loop plus its embedding into the parent."""
        els = np.array(self.elements)
        pos = np.full(self.parent.order, -1)
        pos[els] = np.arange(len(els))
        sub = pos[self.parent.table[np.ix_(els, els)]]
        labels = None
        if self.parent.labels is not None:
            labels = [self.parent.labels[x] for x in self.elements]
        loop = FiniteLoop(sub, labels=labels)
        return loop, LoopHom(loop, self.parent, tuple(self.elements))


def subloop_from_mask(parent: FiniteLoop, mask: np.ndarray) -> Subloop:
    return Subloop(parent, tuple(int(x) for x in np.flatnonzero(mask)))


@dataclass(frozen=True, eq=False)
class LoopHom:
    domain: FiniteLoop
    codomain: FiniteLoop
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __eq__(self, other) -> bool:
        return (isinstance(other, LoopHom) and self.domain == other.domain
                and self.codomain == other.codomain and self.map == other.map)

    def __hash__(self) -> int:
        return hash(self.map)

    def is_homomorphism(self) -> bool:
        m = np.array(self.map)
        if len(m) != self.domain.order or m[0] != 0:
            return False
        return bool(np.array_equal(m[self.domain.table], self.codomain.table[np.ix_(m, m)]))

    def is_bijective(self) -> bool:
        return self.domain.order == self.codomain.order and len(set(self.map)) == len(self.map)

    def kernel(self) -> Subloop:
        return Subloop(self.domain, tuple(x for x, y in enumerate(self.map) if y == 0))

    def image(self) -> Subloop:
        return Subloop(self.codomain, tuple(sorted(set(self.map))))

    def compose(self, other: "LoopHom") -> "LoopHom":
        """``self`` after ``other``."""
        return LoopHom(other.domain, self.codomain, tuple(self.map[y] for y in other.map))

    def inverse(self) -> "LoopHom":
        inv = [0] * len(self.map)
        for x, y in enumerate(self.map):
            inv[y] = x
        return LoopHom(self.codomain, self.domain, tuple(inv))


# -- closures ---------------------------------------------------------------

def _close_mask(table: np.ndarray, mask: np.ndarray, fresh: np.ndarray | None = None) -> np.ndarray:
    """Close ``mask`` under multiplication.

    If ``fresh`` is given, ``mask & ~fresh`` must already be closed; only the
    products involving new elements are then computed. For a finite loop a
    multiplicatively closed subset is closed under both divisions as well,
    since each translation restricts to an injection of the subset into itself.
    """
    mask = mask.copy()
    mask[0] = True
    if fresh is None:
        fresh = np.flatnonzero(mask)
    else:
        mask[fresh] = True
    elems = np.flatnonzero(mask)
    while fresh.size:
        prods = np.concatenate((table[np.ix_(fresh, elems)].ravel(),
                                table[np.ix_(elems, fresh)].ravel()))
        fresh = np.unique(prods[~mask[prods]])
        if fresh.size:
            mask[fresh] = True
            elems = np.flatnonzero(mask)
    return mask


def _normal_close_mask(L: FiniteLoop, mask: np.ndarray) -> np.ndarray:
    inner = L.inner_maps
    mask = _close_mask(L.table, mask)
    while True:
        images = np.unique(inner[:, mask])
        grown = mask.copy()
        grown[images] = True
        if grown.sum() == mask.sum():
            return mask
        mask = _close_mask(L.table, grown)


def _mask(L: FiniteLoop, elements: Iterable[int]) -> np.ndarray:
    m = np.zeros(L.order, dtype=bool)
    els = [int(x) for x in elements]
    L._check(*els)
    m[els] = True
    return m


def generated_subloop(L: FiniteLoop, gens: Iterable[int]) -> Subloop:
    """The subloop generated by ``gens`` (always contains the identity)."""
    return subloop_from_mask(L, _close_mask(L.table, _mask(L, gens)))


def normal_closure(L: FiniteLoop, elements: Iterable[int]) -> Subloop:
    """Smallest normal subloop containing ``elements``."""
    return subloop_from_mask(L, _normal_close_mask(L, _mask(L, elements)))


def is_subloop(L: FiniteLoop, elements: Iterable[int]) -> bool:
    m = _mask(L, elements)
    if not m[0]:
        return False
    els = np.flatnonzero(m)
    return bool(m[L.table[np.ix_(els, els)]].all())


def _as_subloop(L: FiniteLoop, A) -> Subloop:
    if isinstance(A, Subloop):
        if A.parent is not L and A.parent != L:
            raise LoopError("subloop belongs to a different loop")
        return A
    els = tuple(sorted(set(int(x) for x in A)))
    if not is_subloop(L, els):
        raise LoopError("not a subloop")
    return Subloop(L, els)


# -- inner mappings, normality, center ----------------------------------------

def apply_inner(L: FiniteLoop, kind: str, x: int, y: int, z: int) -> int:
    """Evaluate a standard inner mapping generator at ``z``.

    ``kind`` is ``"L"`` for ``(yx)\\(y(xz))``, ``"R"`` for ``((zx)y)/(xy)`` or
    ``"T"`` for ``(xz)/x`` (``y`` is ignored).
    """
    L._check(x, y, z)
    if kind == "L":
        return L.ldiv(L.mul(y, x), L.mul(y, L.mul(x, z)))
    if kind == "R":
        return L.rdiv(L.mul(L.mul(z, x), y), L.mul(x, y))
    if kind == "T":
        return L.rdiv(L.mul(x, z), x)
    raise LoopError(f"unknown inner generator kind {kind!r}")


def is_normal(L: FiniteLoop, A) -> bool:
    A = _as_subloop(L, A)
    return bool(A.mask[L.inner_maps[:, list(A.elements)]].all())


def center(L: FiniteLoop) -> Subloop:
    inner = L.inner_maps
    fixed = (inner == np.arange(L.order)[None, :]).all(axis=0)
    return subloop_from_mask(L, fixed)


def is_simple(L: FiniteLoop) -> bool:
    if L.order == 1:
        return False
    for x in range(1, L.order):
        if len(normal_closure(L, [x])) != L.order:
            return False
    return True


def is_abelian_group(L: FiniteLoop) -> bool:
    return is_commutative(L) and is_associative(L)


def is_commutative(L: FiniteLoop) -> bool:
    return bool(np.array_equal(L.table, L.table.T))


def is_associative(L: FiniteLoop, elements: Sequence[int] | None = None) -> bool:
    """Exhaustive associativity check, optionally restricted to a subloop."""
    t = L.table
    els = np.arange(L.order) if elements is None else np.asarray(elements)
    for x in els:
        xy = t[x, els]
        lhs = t[xy[:, None], els[None, :]]
        rhs = t[x, t[np.ix_(els, els)]]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def diassociativity_counterexample(L: FiniteLoop) -> tuple[tuple[int, int], tuple[int, int, int]] | None:
    """Generators (x, y) of a nonassociative subloop and a triple inside it that fails."""
    seen: set[tuple[int, ...]] = set()
    for x in range(L.order):
        for y in range(x, L.order):
            sub = generated_subloop(L, [x, y]).elements
            if sub in seen:
                continue
            if not is_associative(L, sub):
                t = L.table
                for a, b, c in itertools.product(sub, repeat=3):
                    if t[t[a, b], c] != t[a, t[b, c]]:
                        return (x, y), (a, b, c)
            seen.add(sub)
    return None


def is_diassociative(L: FiniteLoop) -> bool:
    return diassociativity_counterexample(L) is None


# -- lattices -----------------------------------------------------------------

def _lattice(L: FiniteLoop, normal: bool, limit: int | None) -> list[Subloop]:
    # Breadth-first over "closure of K plus one element". Complete: every
    # (normal) subloop A > K with K maximal below A is reached from K.
    _check_limit(L.order, limit, "subloop enumeration")
    if normal:
        def grow(mask, x):
            m = mask.copy()
            m[x] = True
            return _normal_close_mask(L, m)
        start = _normal_close_mask(L, np.zeros(L.order, dtype=bool))
    else:
        def grow(mask, x):
            return _close_mask(L.table, mask, np.array([x]))
        start = _close_mask(L.table, np.zeros(L.order, dtype=bool))
    found = {start.tobytes(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for K in frontier:
            for x in np.flatnonzero(~K):
                H = grow(K, x)
                key = H.tobytes()
                if key not in found:
                    found[key] = H
                    nxt.append(H)
        frontier = nxt
    subs = [subloop_from_mask(L, m) for m in found.values()]
    subs.sort(key=lambda s: (len(s), s.elements))
    return subs


def all_subloops(L: FiniteLoop, limit: int | None = None) -> list[Subloop]:
    """Every subloop of ``L``, sorted by (order, elements)."""
    return _lattice(L, normal=False, limit=limit)


def all_normal_subloops(L: FiniteLoop, limit: int | None = None) -> list[Subloop]:
    return _lattice(L, normal=True, limit=limit)


@dataclass(frozen=True)
class SubloopClass:
    subloop: Subloop
    tag: str  # "abelian" | "nonabelian-simple" | "other"


def classify_subloops(L: FiniteLoop, limit: int | None = None) -> list[SubloopClass]:
    out = []
    for A in all_subloops(L, limit=limit):
        B, _ = A.as_loop()
        if is_abelian_group(B):
            tag = "abelian"
        elif is_simple(B):
            tag = "nonabelian-simple"
        else:
            tag = "other"
        out.append(SubloopClass(A, tag))
    return out


# -- quotients and products ----------------------------------------------------

def quotient(L: FiniteLoop, N) -> tuple[FiniteLoop, LoopHom]:
    """The quotient ``L/N`` with cosets numbered by their least members."""
    N = _as_subloop(L, N)
    if not is_normal(L, N):
        raise LoopError("quotient by a subloop that is not normal")
    n_els = np.array(N.elements)
    coset_rep = L.table[:, n_els].min(axis=1)  # xN represented by min(xN)
    reps = np.unique(coset_rep)
    pos = np.full(L.order, -1)
    pos[reps] = np.arange(len(reps))
    proj = pos[coset_rep]
    qtable = proj[L.table[np.ix_(reps, reps)]]
    labels = None
    if L.labels is not None:
        labels = [L.labels[r] for r in reps]
    Q = FiniteLoop(qtable, labels=labels)
    return Q, LoopHom(L, Q, tuple(int(p) for p in proj))


def direct_product_table(tables: Sequence[np.ndarray]) -> np.ndarray:
    """Table of the componentwise product, first factor most significant."""
    out = np.zeros((1, 1), dtype=np.int64)
    for t in tables:
        m = t.shape[0]
        out = (out[:, None, :, None] * m + t[None, :, None, :]).reshape(
            out.shape[0] * m, out.shape[0] * m)
    return out


def direct_product_loop(factors: Sequence[FiniteLoop], limit: int | None = None) -> FiniteLoop:
    if not factors:
        raise LoopError("direct product needs at least one factor")
    size = int(np.prod([F.order for F in factors]))
    _check_limit(size, limit, "direct product")
    if len(factors) == 1:
        labels = factors[0].labels
    else:
        labels = ["(" + ",".join(p) + ")" for p in
                  itertools.product(*[[F.label(x) for x in range(F.order)] for F in factors])]
    return FiniteLoop(direct_product_table([F.table for F in factors]), labels=labels)


# -- powers, exponent ------------------------------------------------------------

def power_sets(L: FiniteLoop, x: int, n: int) -> list[frozenset[int]]:
    """``[P_1, ..., P_n]`` where ``P_k`` holds every parenthesization of x^k."""
    L._check(x)
    if n < 1:
        raise LoopError("power index must be positive")
    t = L.rows
    P = [frozenset([x])]
    for k in range(2, n + 1):
        P.append(frozenset(t[a][b] for i in range(1, k) for a in P[i - 1] for b in P[k - i - 1]))
    return P


def power_set(L: FiniteLoop, x: int, n: int) -> frozenset[int]:
    return power_sets(L, x, n)[-1]


def has_exponent(L: FiniteLoop, n: int) -> bool:
    return all(power_set(L, x, n) == {0} for x in range(L.order))


def exponent(L: FiniteLoop, max_n: int | None = None) -> int | None:
    """Least n with every parenthesized n-th power equal to the identity."""
    max_n = 2 * L.order if max_n is None else max_n
    good = np.ones(max_n, dtype=bool)
    for x in range(L.order):
        for k, p in enumerate(power_sets(L, x, max_n)):
            if p != {0}:
                good[k] = False
    hits = np.flatnonzero(good)
    return int(hits[0]) + 1 if hits.size else None


# -- isomorphism -----------------------------------------------------------------

def _fingerprints(L: FiniteLoop) -> list[tuple[int, ...]]:
    fps = []
    for x in range(L.order):
        sizes = [len(p) for p in power_sets(L, x, 4)]
        fps.append((len(generated_subloop(L, [x])), *sizes))
    return fps


def _generating_sequence(L: FiniteLoop, fps) -> list[int]:
    counts: dict = {}
    for f in fps:
        counts[f] = counts.get(f, 0) + 1
    mask = _close_mask(L.table, np.zeros(L.order, dtype=bool))
    gens = []
    while not mask.all():
        rest = np.flatnonzero(~mask)
        g = int(min(rest, key=lambda v: (counts[fps[v]], v)))
        gens.append(g)
        mask = _close_mask(L.table, mask, np.array([g]))
    return gens


def isomorphisms(A: FiniteLoop, B: FiniteLoop, limit: int | None = None) -> Iterator[LoopHom]:
    """Yield every isomorphism A -> B (backtracking over generator images)."""
    if A.order != B.order:
        return
    _check_limit(A.order, limit, "isomorphism search")
    fa, fb = _fingerprints(A), _fingerprints(B)
    if sorted(fa) != sorted(fb):
        return
    gens = _generating_sequence(A, fa)
    ta, tb = A.table, B.table
    n = A.order

    def extend(phi: list[int], used: list[bool], domain: list[int], new: list[int]):
        # propagate phi along products; returns False on a clash
        while new:
            x = new.pop()
            for y in list(domain):
                for a, b in ((x, y), (y, x)):
                    p = int(ta[a, b])
                    img = int(tb[phi[a], phi[b]])
                    if phi[p] < 0:
                        if used[img] or fa[p] != fb[img]:
                            return False
                        phi[p] = img
                        used[img] = True
                        domain.append(p)
                        new.append(p)
                    elif phi[p] != img:
                        return False
        return True

    def rec(i: int, phi: list[int], used: list[bool], domain: list[int]):
        if i == len(gens):
            yield LoopHom(A, B, tuple(phi))
            return
        g = gens[i]
        if phi[g] >= 0:
            yield from rec(i + 1, phi, used, domain)
            return
        for c in range(n):
            if used[c] or fb[c] != fa[g]:
                continue
            phi2, used2, dom2 = phi[:], used[:], domain[:]
            phi2[g] = c
            used2[c] = True
            dom2.append(g)
            if extend(phi2, used2, dom2, [g]):
                yield from rec(i + 1, phi2, used2, dom2)

    phi0 = [-1] * n
    phi0[0] = 0
    used0 = [False] * n
    used0[0] = True
    yield from rec(0, phi0, used0, [0])


def loops_isomorphic(A: FiniteLoop, B: FiniteLoop, limit: int | None = None) -> LoopHom | None:
    return next(isomorphisms(A, B, limit=limit), None)


def automorphisms(L: FiniteLoop, limit: int | None = None) -> list[LoopHom]:
    return list(isomorphisms(L, L, limit=limit))


# -- builders --------------------------------------------------------------------

def cyclic_group(n: int) -> FiniteLoop:
    if n < 1:
        raise LoopError("cyclic group order must be positive")
    i = np.arange(n)
    return FiniteLoop((i[:, None] + i[None, :]) % n, name=f"Z{n}")


def klein_like_power(k: int) -> FiniteLoop:
    """Elementary abelian group Z2^k (XOR on k-bit indices)."""
    i = np.arange(2 ** k)
    return FiniteLoop(i[:, None] ^ i[None, :], name=f"Z2^{k}")


def symmetric_group(k: int) -> FiniteLoop:
    """S_k on permutations in lexicographic order; (p*q)(i) = p(q(i))."""
    perms = list(itertools.permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    return FiniteLoop(table, name=f"S{k}")


def chein_double(G: FiniteLoop) -> FiniteLoop:
    """Chein loop M(G,2) on G ∪ Gu; element g*u has index |G| + g.

    g.h = gh,  g.(hu) = (hg)u,  (gu).h = (gh^-1)u,  (gu).(hu) = h^-1 g
    """
    if not is_associative(G):
        raise LoopError("Chein doubling needs a group")
    n = G.order
    t = G.table
    inv = G.ldiv_table[:, 0]
    table = np.empty((2 * n, 2 * n), dtype=np.int64)
    g = np.arange(n)[:, None]
    h = np.arange(n)[None, :]
    table[:n, :n] = t[g, h]
    table[:n, n:] = t[h, g] + n
    table[n:, :n] = t[g, inv[h]] + n
    table[n:, n:] = t[inv[h], g]
    return FiniteLoop(table, name=f"M({G.name or 'G'},2)")


def is_moufang(L: FiniteLoop) -> bool:
    """Exhaustive check of ((xy)x)z = x(y(xz))."""
    t = L.table
    z = np.arange(L.order)
    for x in range(L.order):
        for y in range(L.order):
            if not np.array_equal(t[t[t[x, y], x], z], t[x, t[y, t[x, z]]]):
                return False
    return True
