"""Direct and subdirect products, Goursat decomposition, lifted graphs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .loopcore import (
    FiniteLoop, LoopError, LoopHom, Subloop, _as_subloop, _check_limit, all_normal_subloops,
    all_subloops, center, direct_product_loop, is_abelian_group, is_normal, is_simple,
    quotient, subloop_from_mask,
)


class InvariantError(AssertionError):
    """Two independent computations that must agree did not."""


@dataclass(frozen=True, eq=False)
class ProductLoop:
    """A materialized direct product with a mixed-radix tuple codec."""

    factors: tuple[FiniteLoop, ...]
    underlying: FiniteLoop

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(F.order for F in self.factors)

    def encode(self, coords: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(c) for c in coords), self.radices))

    def decode(self, x: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(int(x), self.radices))

    @cached_property
    def coords(self) -> np.ndarray:
        """``coords[x, i]`` is coordinate i of element x."""
        return np.stack(np.unravel_index(np.arange(self.underlying.order), self.radices), axis=1)

    def subloop(self, tuples: Iterable[Sequence[int]]) -> Subloop:
        return _as_subloop(self.underlying, [self.encode(t) for t in tuples])


def direct_product(factors: Sequence[FiniteLoop], limit: int | None = None) -> ProductLoop:
    return ProductLoop(tuple(factors), direct_product_loop(factors, limit=limit))


def _index_set(P: ProductLoop, J: Iterable[int]) -> tuple[int, ...]:
    J = tuple(sorted(set(int(j) for j in J)))
    if any(not 0 <= j < len(P.factors) for j in J):
        raise LoopError(f"index set {J} out of range")
    return J


def support(P: ProductLoop, x: int) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(P.coords[x]))


def embed(P: ProductLoop, J: Iterable[int], coords: Sequence[int]) -> int:
    """The canonical embedding e_J: coordinates outside J become the identity."""
    J = _index_set(P, J)
    full = [0] * len(P.factors)
    for j, c in zip(J, coords):
        full[j] = c
    return P.encode(full)


def project(P: ProductLoop, A, J: Iterable[int]) -> tuple[ProductLoop, Subloop]:
    """A_J as a subloop of the product of the factors indexed by J."""
    A = _as_subloop(P.underlying, A)
    J = _index_set(P, J)
    PJ = direct_product([P.factors[j] for j in J])
    if not J:
        return PJ, Subloop(PJ.underlying, (0,))
    sub = P.coords[np.array(A.elements)][:, list(J)]
    idx = np.ravel_multi_index(tuple(sub.T), PJ.radices)
    return PJ, Subloop(PJ.underlying, tuple(int(v) for v in np.unique(idx)))


def restrict(P: ProductLoop, A, J: Iterable[int]) -> Subloop:
    """A[J]: the elements of A supported inside J."""
    A = _as_subloop(P.underlying, A)
    J = _index_set(P, J)
    outside = [i for i in range(len(P.factors)) if i not in J]
    els = np.array(A.elements)
    keep = (P.coords[els][:, outside] == 0).all(axis=1) if outside else np.ones(len(els), bool)
    return Subloop(P.underlying, tuple(int(v) for v in els[keep]))


def coordinate_kernel(P: ProductLoop, A, i: int) -> Subloop:
    """A[i]_i as a subloop of factor i."""
    R = restrict(P, A, [i])
    return Subloop(P.factors[i], tuple(sorted(int(P.coords[x, i]) for x in R.elements)))


def coordinate_image(P: ProductLoop, A, i: int) -> Subloop:
    """A_i as a subloop of factor i."""
    A = _as_subloop(P.underlying, A)
    vals = np.unique(P.coords[np.array(A.elements), i])
    return Subloop(P.factors[i], tuple(int(v) for v in vals))


def is_flat(P: ProductLoop, A) -> bool:
    return all(len(coordinate_kernel(P, A, i)) == 1 for i in range(len(P.factors)))


def is_subdirect(P: ProductLoop, A) -> bool:
    return failing_projection(P, A) is None


def failing_projection(P: ProductLoop, A) -> int | None:
    """First coordinate whose projection is not surjective, if any."""
    for i, F in enumerate(P.factors):
        if len(coordinate_image(P, A, i)) != F.order:
            return i
    return None


@dataclass(frozen=True, eq=False)
class SubdirectProduct:
    product: ProductLoop
    carrier: Subloop

    def __post_init__(self):
        parent = self.carrier.parent
        if parent is not self.product.underlying and parent != self.product.underlying:
            raise LoopError("carrier is not a subloop of the product")
        i = failing_projection(self.product, self.carrier)
        if i is not None:
            raise LoopError(f"projection onto factor {i} is not surjective")

    def __len__(self) -> int:
        return len(self.carrier)


# -- Goursat -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GoursatData:
    """N1 = A[1]_1, N2 = A[2]_2 and the induced isomorphism X1/N1 -> X2/N2."""

    N1: Subloop
    N2: Subloop
    Q1: FiniteLoop
    Q2: FiniteLoop
    pi1: LoopHom
    pi2: LoopHom
    phi: LoopHom

    def __eq__(self, other) -> bool:
        return (isinstance(other, GoursatData) and self.N1 == other.N1 and self.N2 == other.N2
                and self.phi.map == other.phi.map)

    __hash__ = None


def _two_factors(P: ProductLoop) -> tuple[FiniteLoop, FiniteLoop]:
    if len(P.factors) != 2:
        raise LoopError(f"expected a product of 2 factors, got {len(P.factors)}")
    return P.factors


def goursat_decompose(S: SubdirectProduct) -> GoursatData:
    P = S.product
    X1, X2 = _two_factors(P)
    N1 = coordinate_kernel(P, S.carrier, 0)
    N2 = coordinate_kernel(P, S.carrier, 1)
    Q1, pi1 = quotient(X1, N1)
    Q2, pi2 = quotient(X2, N2)
    phi = [-1] * Q1.order
    for x in S.carrier.elements:
        x1, x2 = P.decode(x)
        c1, c2 = pi1(x1), pi2(x2)
        if phi[c1] not in (-1, c2):
            raise InvariantError("carrier does not induce a map between quotients")
        phi[c1] = c2
    hom = LoopHom(Q1, Q2, tuple(phi))
    if not (hom.is_bijective() and hom.is_homomorphism()):
        raise InvariantError("induced quotient map is not an isomorphism")
    return GoursatData(N1, N2, Q1, Q2, pi1, pi2, hom)


def lifted_graph(X1: FiniteLoop, X2: FiniteLoop, N1, N2, phi) -> SubdirectProduct:
    """The preimage of gr(phi) under X1 x X2 -> X1/N1 x X2/N2.

    ``phi`` is a LoopHom or a sequence mapping coset indices of X1/N1 (least
    representative numbering) to coset indices of X2/N2.
    """
    N1 = _as_subloop(X1, N1)
    N2 = _as_subloop(X2, N2)
    if not (is_normal(X1, N1) and is_normal(X2, N2)):
        raise LoopError("lifted graph needs normal subloops")
    Q1, pi1 = quotient(X1, N1)
    Q2, pi2 = quotient(X2, N2)
    phi_map = phi.map if isinstance(phi, LoopHom) else tuple(int(v) for v in phi)
    if isinstance(phi, LoopHom) and not (np.array_equal(phi.domain.table, Q1.table)
                                         and np.array_equal(phi.codomain.table, Q2.table)):
        raise LoopError("phi does not act between the given quotients")
    hom = LoopHom(Q1, Q2, phi_map)
    if not (len(phi_map) == Q1.order and hom.is_bijective() and hom.is_homomorphism()):
        raise LoopError("phi is not an isomorphism of the quotients")
    P = direct_product([X1, X2])
    p1 = np.array(pi1.map)
    p2 = np.array(pi2.map)
    ph = np.array(phi_map)
    c = P.coords
    mask = ph[p1[c[:, 0]]] == p2[c[:, 1]]
    return SubdirectProduct(P, subloop_from_mask(P.underlying, mask))


# -- normality in X1 x X2 ----------------------------------------------------

@dataclass(frozen=True)
class NormalityReport:
    direct: bool
    criterion: bool
    M1: tuple[int, ...]
    M2: tuple[int, ...]
    N1: tuple[int, ...]
    N2: tuple[int, ...]
    central1: bool
    central2: bool


def _central_section(X: FiniteLoop, M: Subloop, N: Subloop) -> bool:
    # N normal in X, M normal in X, and M/N inside Z(X/N)
    if not (is_normal(X, N) and is_normal(X, M)):
        return False
    Q, pi = quotient(X, N)
    Z = center(Q)
    return all(pi(m) in Z for m in M.elements)


def normality_report(P: ProductLoop, A) -> NormalityReport:
    """Direct normality of A in X1 x X2 next to the M_i/N_i centrality criterion.

    Raises InvariantError if the two disagree.
    """
    _two_factors(P)
    A = _as_subloop(P.underlying, A)
    direct = is_normal(P.underlying, A)
    M = [coordinate_image(P, A, i) for i in (0, 1)]
    N = [coordinate_kernel(P, A, i) for i in (0, 1)]
    c1 = _central_section(P.factors[0], M[0], N[0])
    c2 = _central_section(P.factors[1], M[1], N[1])
    report = NormalityReport(direct, c1 and c2, M[0].elements, M[1].elements,
                             N[0].elements, N[1].elements, c1, c2)
    if report.direct != report.criterion:
        raise InvariantError(f"normality criterion disagrees with direct check: {report}")
    return report


def is_normal_in_product(P: ProductLoop, A) -> bool:
    return normality_report(P, A).direct


# -- S_X^~ and enumeration ----------------------------------------------------------

def _as_automorphism(X: FiniteLoop, phi) -> LoopHom:
    hom = phi if isinstance(phi, LoopHom) else LoopHom(X, X, tuple(int(v) for v in phi))
    if len(hom.map) != X.order or not (hom.is_bijective() and hom.is_homomorphism()):
        raise LoopError("not an automorphism")
    return hom


def _check_partition(classes: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    classes = [sorted(int(i) for i in c) for c in classes]
    flat = sorted(i for c in classes for i in c)
    if flat != list(range(k)) or any(not c for c in classes):
        raise LoopError(f"classes must partition 0..{k - 1}")
    return sorted(classes)


def s_x_sim(X: FiniteLoop, classes: Sequence[Sequence[int]], autos: Sequence) -> SubdirectProduct:
    """{x in X^k : phi_i(x_i) = phi_j(x_j) whenever i ~ j}, classes given 0-based."""
    k = len(autos)
    classes = _check_partition(classes, k)
    homs = [_as_automorphism(X, a) for a in autos]
    P = direct_product([X] * k)
    phis = np.array([h.map for h in homs])  # (k, n)
    vals = phis[np.arange(k)[None, :], P.coords]  # phi_i(x_i)
    mask = np.ones(P.underlying.order, dtype=bool)
    for c in classes:
        for j in c[1:]:
            mask &= vals[:, c[0]] == vals[:, j]
    return SubdirectProduct(P, subloop_from_mask(P.underlying, mask))


def s_x_sim_parametrization(X: FiniteLoop, classes: Sequence[Sequence[int]], autos: Sequence,
                            target: SubdirectProduct) -> LoopHom:
    """The free-coordinate map X^l -> X^k onto the S_X^~ carrier.

    Coordinate j in a class with least member r is phi_j^-1(phi_r(v)), where v
    is the free value chosen for that class.
    """
    k = len(autos)
    classes = _check_partition(classes, k)
    homs = [_as_automorphism(X, a) for a in autos]
    inv = [h.inverse().map for h in homs]
    free = direct_product([X] * len(classes))
    P = target.product
    image = []
    for v in range(free.underlying.order):
        vals = free.decode(v)
        coords = [0] * k
        for c, val in zip(classes, vals):
            anchor = homs[c[0]].map[val]
            for j in c:
                coords[j] = inv[j][anchor]
        image.append(P.encode(coords))
    return LoopHom(free.underlying, P.underlying, tuple(image))


def enumerate_subdirect_products(P: ProductLoop, max_order: int = 256) -> list[SubdirectProduct]:
    """Every subdirect product of P, found by exhaustive subloop enumeration."""
    _check_limit(P.underlying.order, max_order, "subdirect enumeration")
    out = []
    for A in all_subloops(P.underlying, limit=max_order):
        if is_subdirect(P, A):
            out.append(SubdirectProduct(P, A))
    return out


def verify_simple2(X: FiniteLoop, k: int, Y: FiniteLoop, limit: int | None = None) -> bool:
    """Do the normal subloops of X^k x Y equal M_1 x ... x M_k x N, M_i in {1, X}, N normal in Y?"""
    if not is_simple(X) or is_abelian_group(X):
        raise LoopError("X must be nonabelian and simple")
    P = direct_product([X] * k + [Y], limit=limit)
    found = {A.elements for A in all_normal_subloops(P.underlying, limit=limit)}
    predicted = set()
    full, triv = tuple(range(X.order)), (0,)
    for N in all_normal_subloops(Y, limit=limit):
        for Ms in itertools.product([triv, full], repeat=k):
            els = [P.encode(c) for c in itertools.product(*Ms, N.elements)]
            predicted.add(tuple(sorted(els)))
    return found == predicted
