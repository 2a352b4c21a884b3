from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from loopforge import catalog
from loopforge.loopcore import (
    LoopError, all_subloops, exponent, is_abelian_group, is_diassociative, is_simple,
    klein_like_power, loops_isomorphic,
)
from loopforge.steiner import (
    affine_plane_sts9, all_orientations, assoc_case_predicate, induced_sts, is_anti_pasch,
    is_hall, is_minimal, is_steiner_loop, loop_to_sts, orient, orientation_d, oriented_cocycle,
    oriented_steiner_loop, pasch_configurations, random_orientation, steiner_loop,
    steiner_quasigroup, sts_from_blocks, subsystem_closure,
)
from loopforge.terms import builtin_equation, propagates

STS_NAMES = ["STS7", "STS9", "STS13", "STS15AP"]
ASSOC = builtin_equation("assoc")


# -- construction ---------------------------------------------------------------

def test_rejects_wrong_order():
    with pytest.raises(LoopError, match="1 or 3 mod 6"):
        sts_from_blocks(5, [(0, 1, 2)])


def test_rejects_double_cover():
    blocks = [(0, 1, 2), (0, 1, 3)]
    with pytest.raises(LoopError, match="pair"):
        sts_from_blocks(7, blocks)


def test_rejects_missing_pair():
    with pytest.raises(LoopError, match="not covered"):
        sts_from_blocks(7, [(0, 1, 2)])


@pytest.mark.parametrize("name", STS_NAMES)
def test_catalog_systems_valid(name):
    S = catalog.get_sts(name)
    assert len(S.blocks) == S.n * (S.n - 1) // 6
    for x, y in itertools.combinations(range(S.n), 2):
        assert sum({x, y} <= set(b) for b in S.blocks) == 1


def test_sts13_from_listing():
    S = catalog.get_sts("STS13")
    assert S.n == 13 and len(S.blocks) == 26
    assert S.labels[10:] == ("a", "b", "c")


# -- loop correspondence ------------------------------------------------------------

@pytest.mark.parametrize("name", STS_NAMES)
def test_loop_roundtrip(name):
    S = catalog.get_sts(name)
    L = steiner_loop(S)
    assert L.order == S.n + 1
    assert is_steiner_loop(L)
    assert loop_to_sts(L) == S


def test_steiner_quasigroup_idempotent():
    S = catalog.get_sts("STS7")
    q = steiner_quasigroup(S)
    assert all(q[x, x] == x for x in range(7))


def test_fano_loop_is_elementary_abelian():
    assert loops_isomorphic(steiner_loop(catalog.get_sts("STS7")), klein_like_power(3)) is not None


def test_non_steiner_loop_rejected():
    with pytest.raises(LoopError):
        loop_to_sts(catalog.get_loop("Z4"))


# -- Pasch, minimality, Hall ---------------------------------------------------------------

@pytest.mark.parametrize("name", STS_NAMES)
def test_pasch_count_brute_force(name):
    S = catalog.get_sts(name)
    assert len(pasch_configurations(S)) == oracles.pasch_count(S.blocks)


def test_pasch_verdicts():
    assert not is_anti_pasch(catalog.get_sts("STS7"))
    assert is_anti_pasch(catalog.get_sts("STS9"))
    assert is_anti_pasch(catalog.get_sts("STS15AP"))


def test_pasch_configuration_shape():
    for conf in pasch_configurations(catalog.get_sts("STS13")):
        pts = [p for b in conf for p in b]
        assert len(set(pts)) == 6 and all(pts.count(p) == 2 for p in set(pts))


def test_hall_and_minimal():
    S9 = catalog.get_sts("STS9")
    assert is_hall(S9) and is_minimal(S9)
    assert not is_hall(catalog.get_sts("STS7"))
    assert not is_hall(catalog.get_sts("STS15AP"))
    assert is_minimal(catalog.get_sts("STS15AP"))


def test_non_minimal_system():
    # the Steiner loop of Z2^4 is the projective geometry PG(3,2), which has Fano subplanes
    S = loop_to_sts(klein_like_power(4))
    assert not is_minimal(S)


@pytest.mark.parametrize("name", ["STS7", "STS9", "STS13"])
def test_minimal_matches_subset_closure(name):
    S = catalog.get_sts(name)
    closed = [c for r in range(4, S.n) for c in itertools.combinations(range(S.n), r)
              if subsystem_closure(S, c) == frozenset(c)]
    assert is_minimal(S) == (not closed)


def test_induced_subsystem():
    S = loop_to_sts(klein_like_power(4))
    sub = subsystem_closure(S, [0, 1, 3])
    assert len(sub) == 7
    assert loops_isomorphic(steiner_loop(induced_sts(S, sub)), klein_like_power(3)) is not None


def test_affine_plane_unique_up_to_isomorphism():
    S = affine_plane_sts9()
    rnd = random.Random(3)
    perm = list(range(9))
    rnd.shuffle(perm)
    T = sts_from_blocks(9, [tuple(perm[p] for p in b) for b in S.blocks])
    assert loops_isomorphic(steiner_loop(S), steiner_loop(T)) is not None


# -- anti-Pasch loops -----------------------------------------------------------------------

@pytest.mark.parametrize("name", STS_NAMES)
def test_anti_pasch_implies_assoc_propagates(name):
    S = catalog.get_sts(name)
    if is_anti_pasch(S):
        assert propagates(ASSOC, steiner_loop(S)).result


@pytest.mark.parametrize("name", ["STS9", "STS15AP"])
def test_minimal_anti_pasch_loop_simple_with_abelian_subloops(name):
    L = steiner_loop(catalog.get_sts(name))
    assert is_simple(L) and not is_abelian_group(L)
    for A in all_subloops(L):
        if len(A) < L.order:
            assert is_abelian_group(A.as_loop()[0])


@pytest.mark.parametrize("name", ["F5", "SL8", "SL10", "S3", "M12", "F14", "Z6"])
def test_assoc_propagation_implies_diassociative(name):
    L = catalog.get_loop(name)
    if propagates(ASSOC, L).result:
        assert is_diassociative(L)


# -- orientations -----------------------------------------------------------------------

def test_orientation_d():
    S = catalog.get_sts("STS7")
    O = orient(S, [(b[0], b[2], b[1]) for b in S.blocks])
    a, b, c = S.blocks[0]
    assert orientation_d(O, a, c) == 0 and orientation_d(O, c, a) == 1
    with pytest.raises(LoopError):
        orientation_d(O, a, a)


def test_orient_rejects_non_block():
    S = catalog.get_sts("STS7")
    with pytest.raises(LoopError):
        orient(S, [(0, 1, 2)] + list(S.blocks[1:]))


def test_cocycle_normalized():
    O = random_orientation(catalog.get_sts("STS9"), 0)
    for diag in (0, 1):
        v = oriented_cocycle(O, diag).values
        assert not v[0].any() and not v[:, 0].any()
        assert all(v[x, x] == diag for x in range(1, 10))


def test_all_orientations_count():
    assert sum(1 for _ in all_orientations(catalog.get_sts("STS7"))) == 2 ** 7


@given(st.integers(0, 10 ** 6))
def test_oriented_loop_exponents(seed):
    O = random_orientation(catalog.get_sts("STS9"), seed)
    X0 = oriented_steiner_loop(O, 0)
    X1 = oriented_steiner_loop(O, 1)
    assert X0.order == X1.order == 20
    # d is antisymmetric, so neither extension is commutative
    assert exponent(X0) == 2 and not is_steiner_loop(X0)
    assert exponent(X1) == 4 and not is_steiner_loop(X1)


@pytest.mark.parametrize("diag", [0, 1])
@given(seed=st.integers(0, 10 ** 6))
def test_case_predicate_matches_lifts(diag, seed):
    O = random_orientation(catalog.get_sts("STS9"), seed)
    X = oriented_steiner_loop(O, diag)
    n = 10
    for x, y, z in itertools.product(range(n), repeat=3):
        t = X.table
        for a, b, c in itertools.product(range(2), repeat=3):
            u, v, w = a * n + x, b * n + y, c * n + z
            assert (t[t[u, v], w] == t[u, t[v, w]]) == assoc_case_predicate(O, diag, x, y, z)


@given(st.integers(0, 10 ** 6))
def test_oriented_assoc_propagates_iff_diag_one(seed):
    O = random_orientation(catalog.get_sts("STS9"), seed)
    assert propagates(ASSOC, oriented_steiner_loop(O, 1)).result
    assert not propagates(ASSOC, oriented_steiner_loop(O, 0)).result


def test_oriented_anti_pasch_15():
    O = random_orientation(catalog.get_sts("STS15AP"), 7)
    assert propagates(ASSOC, oriented_steiner_loop(O, 1)).result
    assert not propagates(ASSOC, oriented_steiner_loop(O, 0)).result
