from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import corpus_loops
from loopforge import catalog
from loopforge.extension import Cocycle, central_extension, validate_cocycle, verify_extension
from loopforge.loopcore import (
    LoopError, center, cyclic_group, is_abelian_group, klein_like_power, loops_isomorphic,
    quotient,
)
from loopforge.steiner import is_steiner_loop, loop_to_sts, pasch_configurations


@st.composite
def cocycles(draw):
    Z = cyclic_group(draw(st.integers(1, 4)))
    F = draw(corpus_loops(max_order=8))
    vals = draw(st.lists(st.integers(0, Z.order - 1), min_size=F.order ** 2, max_size=F.order ** 2))
    v = np.array(vals).reshape(F.order, F.order)
    v[0, :] = 0
    v[:, 0] = 0
    return Cocycle(Z, F, v)


@given(cocycles())
def test_extension_contract(c):
    ext = central_extension(c, verify=False)
    X = ext.loop
    assert X.order == c.z_group.order * c.base.order
    assert ext.embedding.is_homomorphism() and ext.projection.is_homomorphism()
    assert set(ext.central_part.elements) <= set(center(X).elements)
    Q, _ = quotient(X, ext.central_part)
    assert loops_isomorphic(Q, c.base) is not None
    verify_extension(ext)


def test_multiplication_rule():
    c = catalog.get("COCYCLE15")
    X = central_extension(c).loop
    nf = 5
    for a, x, b, y in np.ndindex(3, 5, 3, 5):
        got = X.mul(a * nf + x, b * nf + y)
        want = ((a + b + c.values[x, y]) % 3) * nf + c.base.mul(x, y)
        assert got == want


def test_zero_cocycle_gives_klein_group():
    Z2 = cyclic_group(2)
    c = Cocycle(Z2, Z2, np.zeros((2, 2), dtype=int))
    X = central_extension(c).loop
    assert is_abelian_group(X)
    assert loops_isomorphic(X, klein_like_power(2)) is not None


def test_unnormalized_cocycle_rejected():
    Z2 = cyclic_group(2)
    c = Cocycle(Z2, Z2, np.array([[0, 1], [0, 0]]))
    assert not validate_cocycle(c)
    with pytest.raises(LoopError, match="invalid cocycle"):
        central_extension(c)


def test_values_out_of_range():
    with pytest.raises(LoopError):
        Cocycle(cyclic_group(2), cyclic_group(2), np.array([[0, 0], [0, 2]]))


def test_x15():
    X = catalog.get_loop("X15")
    assert X.order == 15
    assert len(center(X)) == 3


def test_k28_properties():
    K = catalog.get_loop("K28")
    assert K.order == 28 and is_steiner_loop(K)
    assert len(center(K)) == 2
    Q, _ = quotient(K, center(K))
    assert Q.order == 14 and is_steiner_loop(Q)
    assert loops_isomorphic(Q, catalog.get_loop("F14")) is not None
    assert pasch_configurations(loop_to_sts(K))


def test_cocycle28_symmetric_listing():
    c = catalog.get("COCYCLE28")
    assert np.array_equal(c.values, c.values.T)
    assert len(c.nonzero_entries()) == 30
