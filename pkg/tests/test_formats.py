from __future__ import annotations

import logging

import numpy as np
import pytest
from hypothesis import given

from conftest import small_loops
from loopforge import catalog
from loopforge.cli import emit_builtin, load_loop
from loopforge.formats import (
    FormatError, format_cocycle, format_oriented_sts, format_sts, format_table, parse_cocycle,
    parse_oriented_sts, parse_sts, parse_sts_lines, parse_table, parse_tuples,
)
from loopforge.steiner import random_orientation

F5_TEXT = """\
# comment line
5
#labels: e a b c d
0 1 2 3 4
1 2 4 0 3
2 0 3 4 1   # trailing comment
3 4 1 2 0
4 3 0 1 2
"""


def test_parse_f5():
    L = parse_table(F5_TEXT)
    assert L == catalog.get_loop("F5")
    assert L.labels == ("e", "a", "b", "c", "d")


@given(small_loops())
def test_table_roundtrip(L):
    text = format_table(L)
    assert parse_table(text) == L
    assert format_table(parse_table(text)) == text


def test_reindex_identity(caplog):
    text = "3\n#labels: a e b\n1 0 2\n0 1 2\n2 2 1\n"
    # identity is element 1 here; the table above is not Latin on purpose
    with pytest.raises(Exception):
        parse_table(text)
    text = "3\n#labels: a e b\n2 0 1\n0 1 2\n1 2 0\n"
    with caplog.at_level(logging.WARNING):
        L = parse_table(text)
    assert "re-index" in caplog.text
    assert L.labels[0] == "e"
    assert L.mul(L.index("a"), L.index("a")) == L.index("b")
    assert L.mul(L.index("a"), L.index("b")) == L.index("e")


@pytest.mark.parametrize("text, msg", [
    ("", "empty"),
    ("2\n0 1\n", "rows"),
    ("2\n0 1\n1 x\n", "integer"),
    ("2\n0 1\n1 0 1\n", "entries"),
    ("3\n0 2 1\n2 1 0\n1 0 2\n", "identity"),
])
def test_table_errors(text, msg):
    with pytest.raises(FormatError, match=msg):
        parse_table(text)


def test_sts_labels_sorted_base36():
    S = catalog.get_sts("STS13")
    assert S.labels == tuple("0123456789abc")
    text = format_sts(S)
    assert parse_sts(text) == S
    assert format_sts(parse_sts(text)) == text
    assert text.count("\n") == 27


def test_sts_custom_labels():
    text = "7\nA B D\nB C E\nC D F\nD E G\nE F A\nF G B\nG A C\n"
    S = parse_sts(text)
    assert S.labels == tuple("ABCDEFG")
    assert parse_sts(format_sts(S)) == S


def test_sts_errors():
    with pytest.raises(FormatError, match="3 points"):
        parse_sts("7\n0 1\n")
    with pytest.raises(Exception, match="not covered"):
        parse_sts("7\n0 1 2\n")


def test_oriented_roundtrip():
    O = random_orientation(catalog.get_sts("STS9"), 5)
    text = format_oriented_sts(O)
    O2 = parse_oriented_sts(text)
    assert np.array_equal(O2.d, O.d)
    S, orders = parse_sts_lines(text)
    assert orders == list(O.cyclic_orders)


def test_cocycle_roundtrip():
    c = catalog.get("COCYCLE28")
    text = format_cocycle(c, "Z2", "builtin:F14")
    c2, z, base = parse_cocycle(text, load_loop)
    assert z == "Z2" and base == "builtin:F14"
    assert np.array_equal(c2.values, c.values)


def test_cocycle_symmetric_flag():
    text = "Z2\nbuiltin:F14\n0 5 1\n#symmetric\n"
    c, _, _ = parse_cocycle(text, load_loop)
    F = c.base
    assert c.values[F.index("5"), F.index("0")] == 1
    c, _, _ = parse_cocycle("Z2\nbuiltin:F14\n0 5 1\n", load_loop)
    assert c.values[F.index("5"), F.index("0")] == 0


def test_cocycle_value_range():
    with pytest.raises(FormatError, match="outside"):
        parse_cocycle("Z2\nbuiltin:F5\na b 2\n", load_loop)


def test_tuples():
    Z4, Z2 = catalog.get_loop("Z4"), catalog.get_loop("Z2")
    assert parse_tuples("0 0\n2 1\n", [Z4, Z2]) == [(0, 0), (2, 1)]
    with pytest.raises(FormatError):
        parse_tuples("0 0 0\n", [Z4, Z2])


@pytest.mark.parametrize("entry", catalog.entries(), ids=lambda e: e.name)
def test_builtin_emit_roundtrip(entry):
    text = emit_builtin(entry.name)
    if entry.kind == "loop":
        obj = parse_table(text)
        assert obj == entry.payload
        assert format_table(obj) == text
    elif entry.kind == "sts":
        obj = parse_sts(text)
        assert obj == entry.payload
        assert format_sts(obj) == text
    else:
        obj, z, base = parse_cocycle(text, load_loop)
        assert np.array_equal(obj.values, entry.payload.values)
        assert format_cocycle(obj, z, base) == text


def test_emit_f5_matches_table():
    assert emit_builtin("F5") == format_table(catalog.get_loop("F5"))
    rows = emit_builtin("F5").splitlines()[2:]
    assert rows[1].split() == ["1", "2", "4", "0", "3"]
