"""Central extensions Ext(Z, F, f) of an abelian group Z by a loop F."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .loopcore import (
    FiniteLoop, LoopError, LoopHom, Subloop, center, cyclic_group, is_abelian_group,
    klein_like_power, loops_isomorphic, quotient,
)

__all__ = [
    "Cocycle", "CocycleCheck", "Extension", "central_extension", "validate_cocycle",
    "cyclic_group", "klein_like_power",
]


@dataclass(frozen=True, eq=False)
class Cocycle:
    """A map F x F -> Z, stored as an |F| x |F| array of Z-indices."""

    z_group: FiniteLoop
    base: FiniteLoop
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        if v.shape != (self.base.order, self.base.order):
            raise LoopError(f"cocycle shape {v.shape} does not match base order {self.base.order}")
        if v.size and (v.min() < 0 or v.max() >= self.z_group.order):
            raise LoopError("cocycle values outside Z")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cocycle) and self.z_group == other.z_group
                and self.base == other.base and np.array_equal(self.values, other.values))

    __hash__ = None

    @classmethod
    def from_entries(cls, z_group: FiniteLoop, base: FiniteLoop, entries, symmetric: bool = False):
        """Build from ``(x, y, value)`` triples; unlisted entries are 0."""
        v = np.zeros((base.order, base.order), dtype=np.int64)
        for x, y, val in entries:
            v[x, y] = val
            if symmetric:
                v[y, x] = val
        return cls(z_group, base, v)

    def nonzero_entries(self) -> list[tuple[int, int, int]]:
        return [(int(x), int(y), int(self.values[x, y])) for x, y in np.argwhere(self.values)]


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    problems: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def validate_cocycle(c: Cocycle) -> CocycleCheck:
    problems = []
    if not is_abelian_group(c.z_group):
        problems.append("Z is not an abelian group")
    for x in np.flatnonzero(c.values[0]):
        problems.append(f"f(e,{c.base.label(x)}) = {c.values[0, x]} is not 0")
    for x in np.flatnonzero(c.values[:, 0]):
        if x:
            problems.append(f"f({c.base.label(x)},e) = {c.values[x, 0]} is not 0")
    return CocycleCheck(not problems, tuple(problems))


@dataclass(frozen=True, eq=False)
class Extension:
    loop: FiniteLoop
    embedding: LoopHom   # Z -> X, a -> (a, e)
    projection: LoopHom  # X -> F, (a, x) -> x
    cocycle: Cocycle

    @property
    def central_part(self) -> Subloop:
        return self.embedding.image()


def central_extension(c: Cocycle, verify: bool = True) -> Extension:
    """The loop on Z x F with (a,x)(b,y) = (a + b + f(x,y), xy).

    Element (a, x) has index a*|F| + x. With ``verify`` the embedded copy of Z is
    checked to be central and the quotient by it to be isomorphic to F.
    """
    check = validate_cocycle(c)
    if not check:
        raise LoopError("invalid cocycle: " + "; ".join(check.problems))
    Z, F = c.z_group, c.base
    nz, nf = Z.order, F.order
    a = np.repeat(np.arange(nz), nf)
    x = np.tile(np.arange(nf), nz)
    ab = Z.table[Z.table[a[:, None], a[None, :]], c.values[x[:, None], x[None, :]]]
    table = ab * nf + F.table[x[:, None], x[None, :]]
    labels = None
    if Z.labels is not None or F.labels is not None:
        labels = [f"({Z.label(i)},{F.label(j)})" for i, j in zip(a, x)]
    X = FiniteLoop(table, labels=labels)  # raises unless the result is a loop
    emb = LoopHom(Z, X, tuple(int(i) * nf for i in range(nz)))
    proj = LoopHom(X, F, tuple(int(v) for v in x))
    ext = Extension(X, emb, proj, c)
    if verify:
        verify_extension(ext)
    return ext


def verify_extension(ext: Extension) -> None:
    """Z x {e} is central and X/(Z x {e}) is isomorphic to F."""
    X = ext.loop
    Zx = ext.central_part
    zc = center(X)
    if not set(Zx.elements) <= set(zc.elements):
        raise LoopError("embedded Z is not central")
    Q, _ = quotient(X, Zx)
    if loops_isomorphic(Q, ext.cocycle.base) is None:
        raise LoopError("quotient by Z is not isomorphic to F")
